//! Replication, empirical probabilistic error, rate fits and histograms.
//!
//! The probabilistic error of a method at uncertainty `δ` is the smallest
//! `ε` such that `P(|Q_n(f) − ∫f| > ε) ≤ δ`. Its plug-in estimate from `R`
//! replications is the `⌈(1−δ)R⌉`-th order statistic of the absolute errors.

mod inequalities;

pub use inequalities::{
    default_hoeffding_suite, default_mz_suite, mz_constant, verify_hoeffding_p, verify_mz, BoundedDist,
    HoeffdingCheck, HoeffdingFamily, HoeffdingReport, MzCheck, MzReport,
};

use crate::error::{Error, Result};
use crate::estimators::{run, EstimatorConfig};
use crate::rng::replication_seed;
use crate::testbed::Integrand;
use rayon::prelude::*;

/// Signed errors `Q_n(f) − ∫f` of `R` independent replications.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorSample {
    pub errors: Vec<f64>,
    pub config: EstimatorConfig,
    pub master_seed: u64,
    /// Evaluations per replication.
    pub n_evals: u64,
}

impl ErrorSample {
    pub fn len(&self) -> usize {
        self.errors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn prob_error(&self, delta: f64) -> Result<f64> {
        prob_error(&self.errors, delta)
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.errors)
    }

    pub fn mean(&self) -> f64 {
        self.errors.iter().sum::<f64>() / self.errors.len() as f64
    }

    /// Unbiased sample standard deviation.
    pub fn std_dev(&self) -> f64 {
        let n = self.errors.len() as f64;
        let mean = self.mean();
        (self.errors.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        self.std_dev() / (self.errors.len() as f64).sqrt()
    }

    pub fn histogram(&self, bins: usize) -> Result<Vec<Bin>> {
        histogram(&self.errors, bins)
    }

    pub fn tail_fraction(&self, threshold: f64) -> Result<f64> {
        tail_fraction(&self.errors, threshold)
    }
}

/// Run `reps` replications with seeds derived from `(master_seed, rep)`.
///
/// Work is spread over the current rayon pool; results are collected in
/// replication order, so the sample does not depend on the thread count.
pub fn replicate(f: &Integrand, cfg: &EstimatorConfig, reps: usize, master_seed: u64) -> Result<ErrorSample> {
    let exact = f.exact_integral().ok_or_else(|| Error::NoExactIntegral(f.label().to_string()))?;
    if reps == 0 {
        return Err(Error::InvalidParameter("need at least one replication".into()));
    }
    cfg.validate(f.dim())?;
    let runs: Vec<(f64, u64)> = (0..reps as u64)
        .into_par_iter()
        .map(|rep| {
            let mut c = cfg.clone();
            c.seed = replication_seed(master_seed, rep);
            run(f, &c).map(|r| (r.value - exact, r.evals))
        })
        .collect::<Result<_>>()?;
    let n_evals = runs[0].1;
    Ok(ErrorSample { errors: runs.into_iter().map(|(e, _)| e).collect(), config: cfg.clone(), master_seed, n_evals })
}

/// Smallest `ε` among the absolute errors with at most `⌊δR⌋` strict exceedances.
pub fn prob_error(errors: &[f64], delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!("δ must lie in (0,1), got {delta}")));
    }
    if errors.is_empty() {
        return Err(Error::InvalidParameter("empty error sample".into()));
    }
    let mut abs: Vec<f64> = errors.iter().map(|e| e.abs()).collect();
    abs.sort_by(f64::total_cmp);
    let r = abs.len();
    // ⌈(1−δ)R⌉ written as R − ⌊δR⌋, with slack for representation error in δR.
    let allowed = ((delta * r as f64) + 1e-9).floor() as usize;
    let rank = r.saturating_sub(allowed).max(1);
    Ok(abs[rank - 1])
}

pub fn max_abs(errors: &[f64]) -> f64 {
    errors.iter().fold(0.0, |a, e| a.max(e.abs()))
}

/// Least-squares line through `(log n, log e)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateFit {
    pub points: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    /// Root mean square residual in log space.
    pub residual: f64,
}

pub fn fit_rate(points: &[(f64, f64)]) -> Result<RateFit> {
    if points.len() < 2 {
        return Err(Error::InvalidParameter(format!("rate fit needs at least two points, got {}", points.len())));
    }
    if points.iter().any(|&(n, e)| !(n > 0.0 && e > 0.0)) {
        return Err(Error::InvalidParameter("rate fit needs positive budgets and errors".into()));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(n, e)| (n.ln(), e.ln())).collect();
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("rate fit needs at least two distinct budgets".into()));
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (logs.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum::<f64>() / k).sqrt();
    Ok(RateFit { points: points.to_vec(), slope, intercept, residual })
}

/// One histogram bin `[left, right)`; the last bin is closed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bin {
    pub left: f64,
    pub right: f64,
    pub count: usize,
}

/// Equal-width bins spanning `[min, max]` of the signed errors.
pub fn histogram(errors: &[f64], bins: usize) -> Result<Vec<Bin>> {
    if bins == 0 {
        return Err(Error::InvalidParameter("histogram needs at least one bin".into()));
    }
    if errors.is_empty() {
        return Err(Error::InvalidParameter("empty error sample".into()));
    }
    let lo = errors.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = errors.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = (hi - lo) / bins as f64;
    let mut out: Vec<Bin> = (0..bins)
        .map(|k| Bin {
            left: lo + k as f64 * width,
            right: if k + 1 == bins { hi } else { lo + (k + 1) as f64 * width },
            count: 0,
        })
        .collect();
    for &e in errors {
        let k = if width > 0.0 { (((e - lo) / width) as usize).min(bins - 1) } else { 0 };
        out[k].count += 1;
    }
    Ok(out)
}

/// Fraction of replications with `|error| > threshold`.
pub fn tail_fraction(errors: &[f64], threshold: f64) -> Result<f64> {
    if !(threshold >= 0.0) {
        return Err(Error::InvalidParameter(format!("threshold must be non-negative, got {threshold}")));
    }
    if errors.is_empty() {
        return Err(Error::InvalidParameter("empty error sample".into()));
    }
    Ok(errors.iter().filter(|e| e.abs() > threshold).count() as f64 / errors.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::Method;
    use crate::testbed::{random_poly, test_function_2d};
    use proptest::prelude::*;

    #[test]
    fn prob_error_examples() {
        let errors: Vec<f64> = (1..=10).map(f64::from).collect();
        assert_eq!(prob_error(&errors, 0.2).unwrap(), 8.0);
        assert_eq!(prob_error(&errors, 1e-6).unwrap(), 10.0);
        assert_eq!(prob_error(&[0.0; 5], 0.1).unwrap(), 0.0);
        assert!(prob_error(&errors, 0.0).is_err());
        assert!(prob_error(&errors, 1.0).is_err());
        // Signs are ignored.
        assert_eq!(prob_error(&[-3.0, 1.0, 2.0], 0.34).unwrap(), 2.0);
    }

    #[test]
    fn fit_rate_examples() {
        let pts: Vec<(f64, f64)> = [6.0, 24.0, 96.0, 384.0].iter().map(|&n| (n, 2.5 * f64::powf(n, -1.5))).collect();
        let fit = fit_rate(&pts).unwrap();
        assert!((fit.slope + 1.5).abs() < 1e-12);
        assert!(fit.residual < 1e-12);
        let pts: Vec<(f64, f64)> = [1.0, 10.0, 100.0].iter().map(|&n| (n, 3.0 / n)).collect();
        assert!((fit_rate(&pts).unwrap().slope + 1.0).abs() < 1e-12);
        let fit = fit_rate(&[(4.0, 0.5), (16.0, 0.1)]).unwrap();
        assert!((fit.slope - (0.1f64 / 0.5).ln() / 4f64.ln()).abs() < 1e-14);
        assert!(fit_rate(&[(1.0, 0.0), (2.0, 1.0)]).is_err());
        assert!(fit_rate(&[(1.0, 1.0)]).is_err());
    }

    #[test]
    fn histogram_examples() {
        let h = histogram(&[0.5; 7], 4).unwrap();
        assert_eq!(h.iter().filter(|b| b.count > 0).count(), 1);
        assert_eq!(h[0].count, 7);
        let h = histogram(&[-1.0, 1.0], 2).unwrap();
        assert_eq!(h.iter().map(|b| b.count).collect::<Vec<_>>(), vec![1, 1]);
        assert_eq!((h[0].left, h[0].right, h[1].right), (-1.0, 0.0, 1.0));
        assert!(histogram(&[1.0], 0).is_err());
    }

    #[test]
    fn tail_fraction_examples() {
        assert_eq!(tail_fraction(&[0.1, -0.2, 0.3], 0.0).unwrap(), 1.0);
        assert_eq!(tail_fraction(&[0.1, -0.2, 0.3], 0.3).unwrap(), 0.0);
        assert_eq!(tail_fraction(&[0.1, -0.2, 0.3, 4.0], 0.15).unwrap(), 0.75);
        assert!(tail_fraction(&[1.0], -1.0).is_err());
    }

    #[test]
    fn replicate_exact_polynomial() {
        let f = random_poly(3, 2, 4).unwrap();
        let sample = replicate(&f, &EstimatorConfig::new(Method::Scv, 3, 3), 1, 5).unwrap();
        assert_eq!(sample.len(), 1);
        assert!(sample.errors[0].abs() < 1e-10);
    }

    #[test]
    fn replicate_is_deterministic() {
        let f = test_function_2d();
        let cfg = EstimatorConfig::new(Method::Cv, 2, 3);
        let a = replicate(&f, &cfg, 200, 77).unwrap();
        let b = replicate(&f, &cfg, 200, 77).unwrap();
        assert_eq!(a.errors, b.errors);
        assert_eq!(a.n_evals, 54);
        let c = replicate(&f, &cfg, 200, 78).unwrap();
        assert_ne!(a.errors, c.errors);
    }

    #[test]
    fn replicate_needs_exact_integral() {
        let f = Integrand::new(1, "anon", None, |x| x[0]);
        assert!(matches!(
            replicate(&f, &EstimatorConfig::new(Method::Scv, 1, 2), 3, 0),
            Err(Error::NoExactIntegral(_))
        ));
    }

    fn errors_strategy() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-1e3f64..1e3, 1..300)
    }

    proptest! {
        #[test]
        fn prob_error_is_monotone_in_delta(errors in errors_strategy(), a in 0.001f64..0.999, b in 0.001f64..0.999) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(prob_error(&errors, lo).unwrap() >= prob_error(&errors, hi).unwrap());
        }

        #[test]
        fn prob_error_matches_brute_scan(errors in errors_strategy(), delta in 0.001f64..0.999) {
            // Smallest candidate ε among |errors| ∪ {0} with #{|e| > ε} ≤ ⌊δR⌋.
            let r = errors.len();
            let allowed = (delta * r as f64 + 1e-9).floor() as usize;
            let mut candidates: Vec<f64> = errors.iter().map(|e| e.abs()).collect();
            candidates.sort_by(f64::total_cmp);
            let brute = candidates
                .iter()
                .copied()
                .find(|&eps| errors.iter().filter(|e| e.abs() > eps).count() <= allowed)
                .unwrap();
            prop_assert_eq!(prob_error(&errors, delta).unwrap(), brute);
        }

        #[test]
        fn histogram_conserves_counts(errors in errors_strategy(), bins in 1usize..64) {
            let h = histogram(&errors, bins).unwrap();
            prop_assert_eq!(h.iter().map(|b| b.count).sum::<usize>(), errors.len());
            let widths: Vec<f64> = h.iter().map(|b| b.right - b.left).collect();
            let scale = widths[0].abs().max(1.0);
            for w in &widths {
                prop_assert!((w - widths[0]).abs() <= 1e-9 * scale);
            }
        }

        #[test]
        fn fit_rate_recovers_planted_slopes(slope in -3.0f64..1.0, c in 0.01f64..100.0) {
            let pts: Vec<(f64, f64)> = [6.0, 24.0, 96.0, 384.0, 1536.0].iter().map(|&n| (n, c * f64::powf(n, slope))).collect();
            let fit = fit_rate(&pts).unwrap();
            prop_assert!((fit.slope - slope).abs() < 1e-12);
        }
    }
}
