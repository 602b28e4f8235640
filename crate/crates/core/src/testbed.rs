//! Reference integrands with known exact integrals.

use crate::error::{Error, Result};
use crate::grid::{poly_dim, MonomialBasis, Smoothness};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

type EvalFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// A real function on `[0,1]^d` with an evaluation counter.
///
/// Clones share the counter, so a campaign can hand copies to worker
/// threads and still read the total afterwards.
#[derive(Clone)]
pub struct Integrand {
    dim: usize,
    func: Arc<EvalFn>,
    exact: Option<f64>,
    evals: Arc<AtomicU64>,
    label: String,
}

impl fmt::Debug for Integrand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Integrand")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("exact", &self.exact)
            .field("evals", &self.eval_count())
            .finish()
    }
}

impl Integrand {
    pub fn new<F>(dim: usize, label: impl Into<String>, exact: Option<f64>, func: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self { dim, func: Arc::new(func), exact, evals: Arc::new(AtomicU64::new(0)), label: label.into() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn exact_integral(&self) -> Option<f64> {
        self.exact
    }

    /// Evaluate at `x`, counting one evaluation.
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.evals.fetch_add(1, Ordering::Relaxed);
        (self.func)(x)
    }

    pub fn eval_count(&self) -> u64 {
        self.evals.load(Ordering::Relaxed)
    }

    pub fn reset_count(&self) {
        self.evals.store(0, Ordering::Relaxed);
    }

    pub(crate) fn tally(&self) -> Tally<'_> {
        Tally { f: self, count: 0 }
    }
}

/// Counts evaluations locally and adds them to the shared counter on drop,
/// so concurrent runs do not contend on the atomic for every sample.
pub(crate) struct Tally<'a> {
    f: &'a Integrand,
    count: u64,
}

impl Tally<'_> {
    #[inline]
    pub fn eval(&mut self, x: &[f64]) -> f64 {
        self.count += 1;
        (self.f.func)(x)
    }

    pub fn count(&self) -> u64 {
        self.count
    }
}

impl Drop for Tally<'_> {
    fn drop(&mut self) {
        self.f.evals.fetch_add(self.count, Ordering::Relaxed);
    }
}

/// Normalising constant of `c·exp(15 x1 − 5 x2)` on the unit square,
/// `75 / ((e^15 − 1)(1 − e^−5))`, arranged to avoid the large exponential.
pub fn test_function_constant() -> f64 {
    75.0 * (-15.0f64).exp() / ((-(-15.0f64).exp_m1()) * (-(-5.0f64).exp_m1()))
}

/// `f(x1, x2) = c·exp(15 x1 − 5 x2)` with `c` chosen so that `∫f = 1`.
/// Large values and derivatives near the corner `(1, 0)` make it an
/// outlier-prone integrand.
pub fn test_function_2d() -> Integrand {
    let c = test_function_constant();
    Integrand::new(2, "exp(15x1-5x2)", Some(1.0), move |x| c * (15.0 * x[0] - 5.0 * x[1]).exp())
}

/// Polynomial `Σ_k coeffs[k] x^{α_k}` in `basis`, with its exact integral.
pub fn polynomial(basis: MonomialBasis, coeffs: Vec<f64>, label: impl Into<String>) -> Result<Integrand> {
    if coeffs.len() != basis.len() {
        return Err(Error::DimensionMismatch { expected: basis.len(), got: coeffs.len() });
    }
    let exact = coeffs.iter().zip(basis.moments()).map(|(c, m)| c * m).sum();
    let dim = basis.smoothness().d();
    Ok(Integrand::new(dim, label, Some(exact), move |x| basis.eval(&coeffs, x)))
}

/// Polynomial of total degree `< s` with iid coefficients in `[-1, 1]`.
pub fn random_poly(s: usize, d: usize, seed: u64) -> Result<Integrand> {
    let basis = MonomialBasis::new(Smoothness::new(s, d)?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs = (0..basis.len()).map(|_| rng.random_range(-1.0..=1.0)).collect();
    polynomial(basis, coeffs, format!("random_poly(s={s},d={d},seed={seed})"))
}

/// Parameters of a scaled bump `σ^{-(d/p - s)} ψ0((x − ξ)/σ)` with
/// `ψ0(x) = (1 − |x|²)^s` on the unit ball.
#[derive(Debug, Clone, PartialEq)]
pub struct BumpSpec {
    pub s: usize,
    pub d: usize,
    pub p: f64,
    pub sigma: f64,
    pub center: Vec<f64>,
    /// Divide by `‖ψ0‖_{W_p^s}`. Not supported: the Sobolev norm is not computed.
    pub normalized: bool,
}

impl BumpSpec {
    /// Height at the centre, `σ^{-(d/p - s)}`.
    pub fn peak(&self) -> f64 {
        self.sigma.powf(-(self.d as f64 / self.p - self.s as f64))
    }

    /// `∫ψ0 = Γ(s+1) π^{d/2} / Γ(d/2 + s + 1)`.
    pub fn base_integral(&self) -> f64 {
        bump_base_integral(self.s, self.d)
    }

    /// `γ0 · σ^{s + d(1 - 1/p)}`.
    pub fn integral(&self) -> f64 {
        let d = self.d as f64;
        self.base_integral() * self.sigma.powf(self.s as f64 + d * (1.0 - 1.0 / self.p))
    }
}

/// Base bump `ψ0(x) = (1 − |x|²)^s` for `|x| ≤ 1`, zero outside.
pub fn base_bump(s: usize, x: &[f64]) -> f64 {
    let r2: f64 = x.iter().map(|v| v * v).sum();
    if r2 <= 1.0 {
        (1.0 - r2).powi(s as i32)
    } else {
        0.0
    }
}

pub fn bump_base_integral(s: usize, d: usize) -> f64 {
    gamma_half(2 * s + 2) * PI.powf(d as f64 / 2.0) / gamma_half(d + 2 * s + 2)
}

/// Volume of the unit ball in `d` dimensions.
pub fn unit_ball_volume(d: usize) -> f64 {
    PI.powf(d as f64 / 2.0) / gamma_half(d + 2)
}

/// `Γ(k/2)` for a positive integer `k`.
fn gamma_half(k: usize) -> f64 {
    assert!(k > 0);
    let (mut value, mut x) = if k.is_multiple_of(2) { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    let target = k as f64 / 2.0;
    while x < target {
        value *= x;
        x += 1.0;
    }
    value
}

/// Unnormalised scaled bump supported inside the unit cube.
pub fn bump(spec: BumpSpec) -> Result<Integrand> {
    if spec.normalized {
        return Err(Error::Unsupported("normalised bumps need the Sobolev norm of ψ0".into()));
    }
    if spec.s == 0 || spec.d == 0 || spec.center.len() != spec.d {
        return Err(Error::InvalidParameter(format!("bad bump shape: s={}, d={}, |ξ|={}", spec.s, spec.d, spec.center.len())));
    }
    if !(spec.p >= 1.0) {
        return Err(Error::InvalidParameter(format!("bump needs p >= 1, got {}", spec.p)));
    }
    if !(spec.sigma > 0.0 && spec.sigma <= 0.5) {
        return Err(Error::InvalidParameter(format!("bump needs 0 < σ <= 1/2, got {}", spec.sigma)));
    }
    if spec.center.iter().any(|&c| c - spec.sigma < 0.0 || c + spec.sigma > 1.0) {
        return Err(Error::OutOfDomain { point: spec.center.clone(), region: format!("cube interior at distance σ={}", spec.sigma) });
    }
    let peak = spec.peak();
    let exact = spec.integral();
    let BumpSpec { s, d, sigma, center, .. } = spec;
    let label = format!("bump(s={s},d={d},σ={sigma})");
    Ok(Integrand::new(d, label, Some(exact), move |x| {
        let r2: f64 = x.iter().zip(&center).map(|(a, c)| ((a - c) / sigma).powi(2)).sum();
        if r2 <= 1.0 {
            peak * (1.0 - r2).powi(s as i32)
        } else {
            0.0
        }
    }))
}

/// Adversarial low-smoothness input for SCV at uncertainty `δ`: a bump of
/// width `σ = σ0·δ^{1/d}/m` centred in the corner subcube `G_0`.
///
/// `σ0 = (2 / (n0·V_d))^{1/d}` makes the chance that one of the `n0` samples
/// of `G_0` lands in the support about `2δ`, so the `(1-δ)`-quantile of the
/// error is driven by the bump height `σ^{-(d/p - s)}`.
pub fn tail_bump(s: usize, d: usize, p: f64, m: usize, delta: f64) -> Result<Integrand> {
    let n0 = poly_dim(s, d)? as f64;
    let sigma0 = (2.0 / (n0 * unit_ball_volume(d))).powf(1.0 / d as f64);
    tail_bump_with(s, d, p, m, delta, sigma0)
}

/// [`tail_bump`] with an explicit width constant `σ0`.
pub fn tail_bump_with(s: usize, d: usize, p: f64, m: usize, delta: f64, sigma0: f64) -> Result<Integrand> {
    if !(s as f64 * p < d as f64) {
        return Err(Error::InvalidParameter(format!("tail bumps need s < d/p, got s={s}, d={d}, p={p}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!("δ must lie in (0,1), got {delta}")));
    }
    if m == 0 || !(sigma0 > 0.0) {
        return Err(Error::InvalidParameter(format!("need m >= 1 and σ0 > 0, got m={m}, σ0={sigma0}")));
    }
    let mf = m as f64;
    let sigma = sigma0 * delta.powf(1.0 / d as f64) / mf;
    let center = vec![0.5 / mf; d];
    bump(BumpSpec { s, d, p, sigma, center, normalized: false })
}
