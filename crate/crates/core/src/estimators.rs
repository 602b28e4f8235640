//! The five quadratures: stratified control variates (SCV), classical
//! control variates (CV), control variates with median-of-means (CV+MoM),
//! plain stratified sampling, and crude Monte Carlo.
//!
//! All control-variate methods share one piecewise interpolant `g` built from
//! `n0` node values on each of the `m^d` subcubes. Subcubes are visited in
//! lexicographic order and summed with compensation, so a run is a pure
//! function of `(integrand, config, seed)`.
//!
//! Stream layout per run seed: subcube `i` draws from stream `linear(i)`,
//! the interpolation shift from [`SHIFT_STREAM`], and cube-wide iid samples
//! from [`GLOBAL_STREAM`].

use crate::error::{Error, Result};
use crate::grid::{poly_dim, regular_nodes, shifted_nodes, SubcubeIndex};
use crate::interp::Interpolator;
use crate::rng::{Streams, GLOBAL_STREAM, SHIFT_STREAM};
use crate::testbed::{Integrand, Tally};
use rand::Rng;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Scv,
    Cv,
    CvMom,
    Strat,
    Crude,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Scv, Method::Cv, Method::CvMom, Method::Strat, Method::Crude];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Scv => "SCV",
            Method::Cv => "CV",
            Method::CvMom => "CV_MOM",
            Method::Strat => "STRAT",
            Method::Crude => "CRUDE",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().replace(['-', '+'], "_").as_str() {
            "SCV" => Ok(Method::Scv),
            "CV" => Ok(Method::Cv),
            "CV_MOM" | "CVMOM" | "MOM" => Ok(Method::CvMom),
            "STRAT" | "STRATIFIED" => Ok(Method::Strat),
            "CRUDE" | "MC" => Ok(Method::Crude),
            _ => Err(Error::InvalidParameter(format!("unknown method `{s}`"))),
        }
    }
}

/// Where the interpolation nodes sit inside each subcube.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum InterpolationMode {
    /// The fixed regular node set.
    #[default]
    Deterministic,
    /// `{(x_j + ξ)/2}` with one `ξ ~ U([0,1]^d)` per run, shared by all subcubes.
    Shifted,
}

impl fmt::Display for InterpolationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InterpolationMode::Deterministic => "deterministic",
            InterpolationMode::Shifted => "shifted",
        })
    }
}

impl FromStr for InterpolationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "deterministic" | "fixed" => Ok(Self::Deterministic),
            "shifted" | "randomized" | "random" => Ok(Self::Shifted),
            _ => Err(Error::InvalidParameter(format!("unknown interpolation mode `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EstimatorConfig {
    pub method: Method,
    /// Interpolation order: local polynomials have total degree `< s`.
    pub s: usize,
    /// Subdivisions per axis.
    pub m: usize,
    /// Median-of-means groups (CV+MoM only).
    pub k: usize,
    /// Residual samples per subcube; `None` means `n0` (one for STRAT).
    pub samples_per_cube: Option<usize>,
    pub mode: InterpolationMode,
    pub seed: u64,
    /// Sample count for crude Monte Carlo; `None` means `2·n0·m^d`.
    pub crude_n: Option<usize>,
}

impl EstimatorConfig {
    pub fn new(method: Method, s: usize, m: usize) -> Self {
        Self { method, s, m, k: 11, samples_per_cube: None, mode: InterpolationMode::Deterministic, seed: 0, crude_n: None }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn with_mode(mut self, mode: InterpolationMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_samples_per_cube(mut self, n: usize) -> Self {
        self.samples_per_cube = Some(n);
        self
    }

    pub fn with_crude_n(mut self, n: usize) -> Self {
        self.crude_n = Some(n);
        self
    }

    pub fn n0(&self, d: usize) -> Result<usize> {
        poly_dim(self.s, d)
    }

    fn cubes(&self, d: usize) -> Result<usize> {
        self.m
            .checked_pow(d as u32)
            .ok_or_else(|| Error::Overflow(format!("m^d with m={}, d={d}", self.m)))
    }

    fn per_cube(&self, n0: usize) -> usize {
        match self.method {
            Method::Strat => self.samples_per_cube.unwrap_or(1),
            _ => self.samples_per_cube.unwrap_or(n0),
        }
    }

    /// Number of integrand evaluations one run makes in dimension `d`.
    pub fn budget(&self, d: usize) -> Result<usize> {
        self.validate(d)?;
        let n0 = self.n0(d)?;
        let cubes = self.cubes(d)?;
        let interp = n0 * cubes;
        let residual = self.per_cube(n0) * cubes;
        Ok(match self.method {
            Method::Scv | Method::Cv => interp + residual,
            Method::CvMom => interp + self.k * (residual / self.k),
            Method::Strat => residual,
            Method::Crude => self.crude_n.unwrap_or(2 * interp),
        })
    }

    pub fn validate(&self, d: usize) -> Result<()> {
        if self.s == 0 || self.m == 0 || d == 0 {
            return Err(Error::InvalidParameter(format!("need s, m, d >= 1, got s={}, m={}, d={d}", self.s, self.m)));
        }
        if self.samples_per_cube == Some(0) || self.crude_n == Some(0) {
            return Err(Error::InvalidParameter("sample counts must be positive".into()));
        }
        if self.method == Method::CvMom {
            let n0 = self.n0(d)?;
            let residual = self.per_cube(n0) * self.cubes(d)?;
            if self.k == 0 || residual < self.k {
                return Err(Error::Budget(format!(
                    "CV+MoM needs n0·m^d >= k, got {residual} residual samples for k={}",
                    self.k
                )));
            }
        }
        Ok(())
    }
}

/// One realisation of an estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateRun {
    pub value: f64,
    pub evals: u64,
    pub config: EstimatorConfig,
    pub seed: u64,
}

/// Largest `m` with `2·n0·m^d ≤ n`, i.e. `⌊(n / 2n0)^{1/d}⌋`.
pub fn m_for_budget(n: usize, s: usize, d: usize) -> Result<usize> {
    let n0 = poly_dim(s, d)?;
    let fits = |m: usize| m.checked_pow(d as u32).and_then(|c| c.checked_mul(2 * n0)).is_some_and(|b| b <= n);
    if !fits(1) {
        return Err(Error::Budget(format!("budget {n} below the minimum 2·n0 = {}", 2 * n0)));
    }
    let mut m = ((n as f64 / (2 * n0) as f64).powf(1.0 / d as f64)).floor().max(1.0) as usize;
    while !fits(m) {
        m -= 1;
    }
    while fits(m + 1) {
        m += 1;
    }
    Ok(m)
}

/// Run the method selected by `cfg.method`.
pub fn run(f: &Integrand, cfg: &EstimatorConfig) -> Result<EstimateRun> {
    match cfg.method {
        Method::Scv => scv(f, cfg),
        Method::Cv => classical_cv(f, cfg),
        Method::CvMom => cv_mom(f, cfg),
        Method::Strat => stratified(f, cfg),
        Method::Crude => {
            let n = cfg.budget(f.dim())?;
            let mut run = crude_mc(f, n, cfg.seed)?;
            run.config = cfg.clone();
            Ok(run)
        }
    }
}

fn expect_method(cfg: &EstimatorConfig, method: Method) -> Result<()> {
    if cfg.method != method {
        return Err(Error::InvalidParameter(format!("{method} estimator called with method {}", cfg.method)));
    }
    Ok(())
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    #[inline]
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.carry
    }
}

fn interpolator(cfg: &EstimatorConfig, d: usize, streams: &Streams) -> Result<Interpolator> {
    let base = regular_nodes(cfg.s, d)?;
    let nodes = match cfg.mode {
        InterpolationMode::Deterministic => base,
        InterpolationMode::Shifted => {
            let mut rng = streams.stream(SHIFT_STREAM);
            let xi: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
            shifted_nodes(&base, &xi)?
        }
    };
    Interpolator::new(nodes)
}

#[inline]
fn fill_uniform<R: Rng>(rng: &mut R, out: &mut [f64]) {
    for v in out.iter_mut() {
        *v = rng.random();
    }
}

/// The shared piecewise control variate: per-subcube coefficients and `∫g`.
struct PiecewiseInterpolant {
    interp: Interpolator,
    m: usize,
    d: usize,
    coeffs: Vec<f64>,
    integral: f64,
}

impl PiecewiseInterpolant {
    fn build(f: &mut Tally<'_>, interp: Interpolator, m: usize, d: usize) -> Result<Self> {
        let n0 = interp.len();
        let mut coeffs = Vec::with_capacity(n0 * m.pow(d as u32));
        let mut x = vec![0.0; d];
        let mut acc = CompensatedSum::default();
        for cube in SubcubeIndex::all(m, d) {
            let start = coeffs.len();
            for node in interp.nodes().points() {
                cube.map_into(node, &mut x);
                coeffs.push(f.eval(&x));
            }
            interp.solve_in_place(&mut coeffs[start..])?;
            acc.add(interp.mean_of(&coeffs[start..]));
        }
        let integral = acc.total() / m.pow(d as u32) as f64;
        Ok(Self { interp, m, d, coeffs, integral })
    }

    /// `[f − g](x)` at a global point `x ∈ [0,1]^d`.
    fn residual(&self, f: &mut Tally<'_>, x: &[f64], local: &mut [f64]) -> f64 {
        let n0 = self.interp.len();
        let mf = self.m as f64;
        let mut linear = 0;
        for (l, &y) in local.iter_mut().zip(x) {
            let i = ((y * mf) as usize).min(self.m - 1);
            linear = linear * self.m + i;
            *l = y * mf - i as f64;
        }
        let c = &self.coeffs[linear * n0..(linear + 1) * n0];
        f.eval(x) - self.interp.eval_of(c, local)
    }

    fn sample_residual_mean(&self, f: &mut Tally<'_>, rng: &mut impl Rng, count: usize) -> f64 {
        let mut x = vec![0.0; self.d];
        let mut local = vec![0.0; self.d];
        let mut acc = CompensatedSum::default();
        for _ in 0..count {
            fill_uniform(rng, &mut x);
            acc.add(self.residual(f, &x, &mut local));
        }
        acc.total() / count as f64
    }
}

/// Stratified control variates:
/// `m^{-d} Σ_i ( a_i + (1/n0) Σ_j [f − g_i](X_i^{(j)}) )` with
/// `X_i^{(j)} ~ U(G_i)` and `a_i` the exact mean of the local interpolant.
/// Uses `2·n0·m^d` evaluations.
pub fn scv(f: &Integrand, cfg: &EstimatorConfig) -> Result<EstimateRun> {
    expect_method(cfg, Method::Scv)?;
    let d = f.dim();
    cfg.validate(d)?;
    let streams = Streams::new(cfg.seed);
    let interp = interpolator(cfg, d, &streams)?;
    let per_cube = cfg.per_cube(interp.len());
    let mut tally = f.tally();
    let mut coeffs = vec![0.0; interp.len()];
    let mut x = vec![0.0; d];
    let mut local = vec![0.0; d];
    let mut acc = CompensatedSum::default();
    for cube in SubcubeIndex::all(cfg.m, d) {
        for (c, node) in coeffs.iter_mut().zip(interp.nodes().points()) {
            cube.map_into(node, &mut x);
            *c = tally.eval(&x);
        }
        interp.solve_in_place(&mut coeffs)?;
        let mut rng = streams.stream(cube.linear() as u64);
        let mut residual = 0.0;
        for _ in 0..per_cube {
            fill_uniform(&mut rng, &mut local);
            cube.map_into(&local, &mut x);
            residual += tally.eval(&x) - interp.eval_of(&coeffs, &local);
        }
        acc.add(interp.mean_of(&coeffs) + residual / per_cube as f64);
    }
    let value = acc.total() / cfg.cubes(d)? as f64;
    Ok(EstimateRun { value, evals: tally.count(), config: cfg.clone(), seed: cfg.seed })
}

/// Classical control variates: `∫g + (1/N) Σ [f − g](X_i)` with `N = n0·m^d`
/// iid uniform samples over the whole cube.
pub fn classical_cv(f: &Integrand, cfg: &EstimatorConfig) -> Result<EstimateRun> {
    expect_method(cfg, Method::Cv)?;
    let d = f.dim();
    cfg.validate(d)?;
    let streams = Streams::new(cfg.seed);
    let interp = interpolator(cfg, d, &streams)?;
    let count = cfg.per_cube(interp.len()) * cfg.cubes(d)?;
    let mut tally = f.tally();
    let g = PiecewiseInterpolant::build(&mut tally, interp, cfg.m, d)?;
    let mut rng = streams.stream(GLOBAL_STREAM);
    let value = g.integral + g.sample_residual_mean(&mut tally, &mut rng, count);
    Ok(EstimateRun { value, evals: tally.count(), config: cfg.clone(), seed: cfg.seed })
}

/// Control variates with median-of-means: `∫g` plus the median of `k` group
/// means of `n1 = ⌊n0·m^d / k⌋` iid residual samples each.
pub fn cv_mom(f: &Integrand, cfg: &EstimatorConfig) -> Result<EstimateRun> {
    expect_method(cfg, Method::CvMom)?;
    let d = f.dim();
    cfg.validate(d)?;
    let streams = Streams::new(cfg.seed);
    let interp = interpolator(cfg, d, &streams)?;
    let group = cfg.per_cube(interp.len()) * cfg.cubes(d)? / cfg.k;
    let mut tally = f.tally();
    let g = PiecewiseInterpolant::build(&mut tally, interp, cfg.m, d)?;
    let mut rng = streams.stream(GLOBAL_STREAM);
    let mut means: Vec<f64> = (0..cfg.k).map(|_| g.sample_residual_mean(&mut tally, &mut rng, group)).collect();
    let value = g.integral + median(&mut means);
    Ok(EstimateRun { value, evals: tally.count(), config: cfg.clone(), seed: cfg.seed })
}

/// Median; the mean of the two central order statistics for even lengths.
pub(crate) fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Stratified sampling without control variate: `m^{-d} Σ_i f(X_i)`, one
/// `X_i ~ U(G_i)` per subcube.
pub fn stratified(f: &Integrand, cfg: &EstimatorConfig) -> Result<EstimateRun> {
    expect_method(cfg, Method::Strat)?;
    let d = f.dim();
    cfg.validate(d)?;
    let streams = Streams::new(cfg.seed);
    let per_cube = cfg.per_cube(1);
    let mut tally = f.tally();
    let mut x = vec![0.0; d];
    let mut local = vec![0.0; d];
    let mut acc = CompensatedSum::default();
    for cube in SubcubeIndex::all(cfg.m, d) {
        let mut rng = streams.stream(cube.linear() as u64);
        let mut sum = 0.0;
        for _ in 0..per_cube {
            fill_uniform(&mut rng, &mut local);
            cube.map_into(&local, &mut x);
            sum += tally.eval(&x);
        }
        acc.add(sum / per_cube as f64);
    }
    let value = acc.total() / cfg.cubes(d)? as f64;
    Ok(EstimateRun { value, evals: tally.count(), config: cfg.clone(), seed: cfg.seed })
}

/// Plain Monte Carlo mean of `n` iid uniform evaluations.
pub fn crude_mc(f: &Integrand, n: usize, seed: u64) -> Result<EstimateRun> {
    if n == 0 {
        return Err(Error::InvalidParameter("crude Monte Carlo needs n >= 1".into()));
    }
    let mut tally = f.tally();
    let mut rng = Streams::new(seed).stream(GLOBAL_STREAM);
    let mut x = vec![0.0; f.dim()];
    let mut acc = CompensatedSum::default();
    for _ in 0..n {
        fill_uniform(&mut rng, &mut x);
        acc.add(tally.eval(&x));
    }
    let config = EstimatorConfig::new(Method::Crude, 1, 1).with_seed(seed).with_crude_n(n);
    Ok(EstimateRun { value: acc.total() / n as f64, evals: tally.count(), config, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testbed::{random_poly, test_function_2d};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn constant(d: usize, c: f64) -> Integrand {
        Integrand::new(d, "const", Some(c), move |_| c)
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("foo".parse::<Method>().is_err());
        assert_eq!("shifted".parse::<InterpolationMode>().unwrap(), InterpolationMode::Shifted);
    }

    #[test]
    fn scv_budget_example() {
        let f = test_function_2d();
        let cfg = EstimatorConfig::new(Method::Scv, 2, 4).with_seed(3);
        let run = scv(&f, &cfg).unwrap();
        assert_eq!(run.evals, 96);
        assert_eq!(cfg.budget(2).unwrap(), 96);
        assert_eq!(f.eval_count(), 96);
    }

    #[test]
    fn budgets_match_measured_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for trial in 0..50 {
            let s = rng.random_range(1..=3);
            let d = rng.random_range(1..=3);
            let m = rng.random_range(1..=5);
            let f = random_poly(s, d, trial).unwrap();
            for method in Method::ALL {
                let mut cfg = EstimatorConfig::new(method, s, m).with_seed(trial);
                cfg.k = rng.random_range(1..=5);
                if rng.random_bool(0.3) {
                    cfg.samples_per_cube = Some(rng.random_range(1..=4));
                }
                if cfg.validate(d).is_err() {
                    continue;
                }
                let run = run(&f, &cfg).unwrap();
                assert_eq!(run.evals as usize, cfg.budget(d).unwrap(), "{cfg:?}");
            }
        }
    }

    #[test]
    fn exact_on_polynomials() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for trial in 0..60 {
            let s = rng.random_range(1..=4);
            let d = rng.random_range(1..=3);
            let m: usize = rng.random_range(1..=4);
            let f = random_poly(s, d, 1000 + trial).unwrap();
            let exact = f.exact_integral().unwrap();
            let mode = if rng.random_bool(0.5) { InterpolationMode::Shifted } else { InterpolationMode::Deterministic };
            for method in [Method::Scv, Method::Cv, Method::CvMom] {
                let n0 = poly_dim(s, d).unwrap();
                let k = 11.min(n0 * m.pow(d as u32));
                let cfg = EstimatorConfig::new(method, s, m).with_seed(trial).with_mode(mode).with_k(k);
                let v = run(&f, &cfg).unwrap().value;
                assert!((v - exact).abs() < 1e-10, "{cfg:?}: {v} vs {exact}");
            }
        }
    }

    #[test]
    fn constants_are_exact_for_sampling_methods() {
        let f = constant(3, 2.75);
        for seed in 0..5 {
            let v = stratified(&f, &EstimatorConfig::new(Method::Strat, 1, 3).with_seed(seed)).unwrap().value;
            assert!((v - 2.75).abs() < 1e-14);
            let v = crude_mc(&f, 17, seed).unwrap().value;
            assert!((v - 2.75).abs() < 1e-14);
        }
    }

    #[test]
    fn single_sample_cases() {
        let f = Integrand::new(2, "x1+x2^2", None, |x| x[0] + x[1] * x[1]);
        let run = stratified(&f, &EstimatorConfig::new(Method::Strat, 1, 1).with_seed(8)).unwrap();
        assert_eq!(run.evals, 1);
        let mut rng = Streams::new(8).stream(0);
        let x: [f64; 2] = [rng.random(), rng.random()];
        assert_eq!(run.value, x[0] + x[1] * x[1]);

        let run = crude_mc(&f, 1, 4).unwrap();
        let mut rng = Streams::new(4).stream(GLOBAL_STREAM);
        let x: [f64; 2] = [rng.random(), rng.random()];
        assert_eq!(run.value, x[0] + x[1] * x[1]);
    }

    #[test]
    fn crude_variance_matches_closed_form() {
        // f = x on [0,1]: Var f = 1/12, so Var of an n-sample mean is 1/(12 n).
        let f = Integrand::new(1, "x", Some(0.5), |x| x[0]);
        let n = 10;
        let runs = 10_000;
        let values: Vec<f64> = (0..runs).map(|seed| crude_mc(&f, n, seed).unwrap().value).collect();
        let mean = values.iter().sum::<f64>() / runs as f64;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (runs - 1) as f64;
        let expected = 1.0 / (12.0 * n as f64);
        assert!((var / expected - 1.0).abs() < 0.2, "{var} vs {expected}");
    }

    #[test]
    fn mom_with_one_group_is_classical_cv_on_same_samples() {
        let f = test_function_2d();
        for seed in 0..20 {
            let cv = classical_cv(&f, &EstimatorConfig::new(Method::Cv, 2, 3).with_seed(seed)).unwrap();
            let mom = cv_mom(&f, &EstimatorConfig::new(Method::CvMom, 2, 3).with_seed(seed).with_k(1)).unwrap();
            assert!((cv.value - mom.value).abs() < 1e-12);
            assert_eq!(cv.evals, mom.evals);
        }
    }

    #[test]
    fn mom_budget_violation() {
        let f = test_function_2d();
        let cfg = EstimatorConfig::new(Method::CvMom, 2, 1);
        assert!(matches!(cv_mom(&f, &cfg), Err(Error::Budget(_))));
        assert!(cv_mom(&f, &EstimatorConfig::new(Method::CvMom, 2, 2)).is_ok());
    }

    #[test]
    fn m_equal_one_cv_and_scv_share_budget() {
        let f = test_function_2d();
        let a = scv(&f, &EstimatorConfig::new(Method::Scv, 2, 1)).unwrap();
        let b = classical_cv(&f, &EstimatorConfig::new(Method::Cv, 2, 1)).unwrap();
        assert_eq!(a.evals, 6);
        assert_eq!(b.evals, 6);
    }

    #[test]
    fn wrong_method_is_rejected() {
        let f = test_function_2d();
        assert!(scv(&f, &EstimatorConfig::new(Method::Cv, 2, 2)).is_err());
    }

    #[test]
    fn reruns_are_bit_identical() {
        let f = test_function_2d();
        for method in Method::ALL {
            let cfg = EstimatorConfig::new(method, 2, 5).with_seed(99).with_mode(InterpolationMode::Shifted);
            let a = run(&f, &cfg).unwrap().value;
            let b = run(&f, &cfg).unwrap().value;
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn median_rules() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
        assert_eq!(median(&mut [7.0]), 7.0);
    }

    #[test]
    fn m_from_budget() {
        // n0(2,2) = 3: 2·3·m^2 ≤ n.
        assert_eq!(m_for_budget(96, 2, 2).unwrap(), 4);
        assert_eq!(m_for_budget(95, 2, 2).unwrap(), 3);
        assert_eq!(m_for_budget(6, 2, 2).unwrap(), 1);
        assert!(m_for_budget(5, 2, 2).is_err());
        assert_eq!(m_for_budget(2 * 64 * 64 * 64, 1, 3).unwrap(), 64);
    }
}
