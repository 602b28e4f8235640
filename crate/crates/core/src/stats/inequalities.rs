//! Monte Carlo checks of the concentration inequalities behind the error
//! bounds: a Hoeffding inequality in terms of `‖b‖_p` for `1 < p < 2`, and a
//! Marcinkiewicz–Zygmund type moment bound for means of independent variables.

use crate::error::{Error, Result};
use crate::rng::Streams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const CHUNK: usize = 4096;

/// Split `trials` into fixed chunks, each with its own stream, so results
/// do not depend on the thread count.
fn chunked<T, F>(trials: usize, seed: u64, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, usize) -> T + Sync + Send,
{
    let streams = Streams::new(seed);
    (0..trials.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut rng = streams.stream(c as u64);
            work(&mut rng, CHUNK.min(trials - c * CHUNK))
        })
        .collect()
}

/// Distribution family for the Hoeffding check; all are centred.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HoeffdingFamily {
    /// `Z_i ~ U[−b_i, b_i]`.
    Uniform,
    /// `Z_i = ±b_i` with equal probability; maximal variance at the given bounds.
    Rademacher,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HoeffdingCheck {
    pub p: f64,
    pub b: Vec<f64>,
    pub delta: f64,
    pub trials: usize,
    pub family: HoeffdingFamily,
    pub seed: u64,
    /// Leading constant of the bound; 3 in the inequality as stated.
    pub constant: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HoeffdingReport {
    pub bound: f64,
    pub empirical_fail_rate: f64,
    pub failures: usize,
    pub trials: usize,
    pub delta: f64,
}

impl HoeffdingReport {
    pub fn holds(&self) -> bool {
        self.empirical_fail_rate <= self.delta
    }
}

impl HoeffdingCheck {
    pub fn new(p: f64, b: Vec<f64>, delta: f64, trials: usize) -> Self {
        Self { p, b, delta, trials, family: HoeffdingFamily::Uniform, seed: 0, constant: 3.0 }
    }

    /// `C · n^{-1} · (2 log(2/δ))^{1 − 1/p} · ‖b‖_p`.
    pub fn bound(&self) -> f64 {
        let n = self.b.len() as f64;
        let norm = self.b.iter().map(|v| v.abs().powf(self.p)).sum::<f64>().powf(1.0 / self.p);
        self.constant / n * (2.0 * (2.0 / self.delta).ln()).powf(1.0 - 1.0 / self.p) * norm
    }

    pub fn run(&self) -> Result<HoeffdingReport> {
        if !(self.p > 1.0 && self.p < 2.0) {
            return Err(Error::InvalidParameter(format!("Hoeffding check needs 1 < p < 2, got {}", self.p)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) || self.b.is_empty() || self.trials == 0 {
            return Err(Error::InvalidParameter("Hoeffding check needs δ in (0,1), non-empty b and trials >= 1".into()));
        }
        if self.b.iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::InvalidParameter("bounds b_i must be non-negative".into()));
        }
        let bound = self.bound();
        let n = self.b.len() as f64;
        let failures: usize = chunked(self.trials, self.seed, |rng, count| {
            let mut fails = 0;
            for _ in 0..count {
                let sum: f64 = self
                    .b
                    .iter()
                    .map(|&bi| match self.family {
                        HoeffdingFamily::Uniform => bi * (2.0 * rng.random::<f64>() - 1.0),
                        HoeffdingFamily::Rademacher => if rng.random::<bool>() { bi } else { -bi },
                    })
                    .sum();
                if (sum / n).abs() > bound {
                    fails += 1;
                }
            }
            fails
        })
        .into_iter()
        .sum();
        Ok(HoeffdingReport {
            bound,
            empirical_fail_rate: failures as f64 / self.trials as f64,
            failures,
            trials: self.trials,
            delta: self.delta,
        })
    }
}

/// Hoeffding check with uniform variables and the stated constant.
pub fn verify_hoeffding_p(p: f64, b: &[f64], delta: f64, trials: usize) -> Result<HoeffdingReport> {
    HoeffdingCheck::new(p, b.to_vec(), delta, trials).run()
}

/// Twenty checks with heavy-tailed bound profiles, alternating families.
pub fn default_hoeffding_suite(seed: u64, trials: usize) -> Vec<HoeffdingCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..20)
        .map(|i| {
            let n = rng.random_range(1..=40);
            let b = (0..n).map(|_| rng.random::<f64>().powi(3)).collect();
            let mut check = HoeffdingCheck::new(rng.random_range(1.05..1.95), b, rng.random_range(0.01..0.3), trials);
            check.family = if i % 2 == 0 { HoeffdingFamily::Uniform } else { HoeffdingFamily::Rademacher };
            check.seed = rng.random();
            check
        })
        .collect()
}

/// A bounded real distribution with known mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundedDist {
    Constant(f64),
    Uniform { lo: f64, hi: f64 },
    /// `hi` with probability `p_hi`, otherwise `lo`.
    TwoPoint { lo: f64, hi: f64, p_hi: f64 },
}

impl BoundedDist {
    pub fn mean(&self) -> f64 {
        match *self {
            BoundedDist::Constant(c) => c,
            BoundedDist::Uniform { lo, hi } => 0.5 * (lo + hi),
            BoundedDist::TwoPoint { lo, hi, p_hi } => lo + p_hi * (hi - lo),
        }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            BoundedDist::Constant(c) => c,
            BoundedDist::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
            BoundedDist::TwoPoint { lo, hi, p_hi } => {
                if rng.random::<f64>() < p_hi {
                    hi
                } else {
                    lo
                }
            }
        }
    }
}

/// Upper estimate of the moment constant: `2^{1+1/q}` for `q ≤ 2`, `2(q−1)` above.
pub fn mz_constant(q: f64) -> f64 {
    if q <= 2.0 {
        2f64.powf(1.0 + 1.0 / q)
    } else {
        2.0 * (q - 1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MzCheck {
    pub q: f64,
    pub dists: Vec<BoundedDist>,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MzReport {
    /// Empirical `‖mean(Z) − a‖_{L_q}`.
    pub lhs: f64,
    /// `(c_q/n) (Σ ‖Z_i‖_{L_q}^{q'})^{1/q'}` with empirical `L_q` norms.
    pub rhs: f64,
    pub lhs_se: f64,
    pub rhs_se: f64,
}

impl MzReport {
    /// `lhs ≤ rhs` allowing three standard errors of Monte Carlo noise on each side.
    pub fn holds(&self) -> bool {
        self.lhs - 3.0 * self.lhs_se <= self.rhs + 3.0 * self.rhs_se
    }
}

/// Running `Σ x` and `Σ x²` for standard errors.
#[derive(Debug, Default, Clone, Copy)]
struct Moments {
    sum: f64,
    sq: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.sum += x;
        self.sq += x * x;
    }

    fn merge(self, o: Moments) -> Moments {
        Moments { sum: self.sum + o.sum, sq: self.sq + o.sq }
    }

    /// Mean and standard error of the mean over `n` observations.
    fn summary(&self, n: usize) -> (f64, f64) {
        let nf = n as f64;
        let mean = self.sum / nf;
        let var = (self.sq / nf - mean * mean).max(0.0) * nf / (nf - 1.0).max(1.0);
        (mean, (var / nf).sqrt())
    }
}

/// `se(M^{1/q})` by the delta method.
fn root_se(m: f64, se: f64, q: f64) -> f64 {
    if m > 0.0 {
        m.powf(1.0 / q - 1.0) * se / q
    } else {
        0.0
    }
}

impl MzCheck {
    pub fn run(&self) -> Result<MzReport> {
        if !(self.q >= 1.0) || !self.q.is_finite() {
            return Err(Error::InvalidParameter(format!("moment check needs q >= 1, got {}", self.q)));
        }
        if self.dists.is_empty() || self.trials < 2 {
            return Err(Error::InvalidParameter("moment check needs distributions and at least two trials".into()));
        }
        let n = self.dists.len();
        let q = self.q;
        let a = self.dists.iter().map(BoundedDist::mean).sum::<f64>() / n as f64;
        let (dev, per_var) = chunked(self.trials, self.seed, |rng, count| {
            let mut dev = Moments::default();
            let mut per_var = vec![Moments::default(); n];
            for _ in 0..count {
                let mut sum = 0.0;
                for (acc, dist) in per_var.iter_mut().zip(&self.dists) {
                    let z = dist.sample(rng);
                    acc.push(z.abs().powf(q));
                    sum += z;
                }
                dev.push((sum / n as f64 - a).abs().powf(q));
            }
            (dev, per_var)
        })
        .into_iter()
        .reduce(|(d1, v1), (d2, v2)| (d1.merge(d2), v1.into_iter().zip(v2).map(|(x, y)| x.merge(y)).collect()))
        .expect("at least one chunk");

        let (m_dev, se_dev) = dev.summary(self.trials);
        let lhs = m_dev.powf(1.0 / q);
        let lhs_se = root_se(m_dev, se_dev, q);

        let q_prime = q.min(2.0);
        let c = mz_constant(q) / n as f64;
        let parts: Vec<(f64, f64)> = per_var.iter().map(|m| m.summary(self.trials)).collect();
        let norms: Vec<f64> = parts.iter().map(|&(m, _)| m.powf(1.0 / q)).collect();
        let total: f64 = norms.iter().map(|v| v.powf(q_prime)).sum();
        let rhs = c * total.powf(1.0 / q_prime);
        let rhs_se = if total > 0.0 {
            parts
                .iter()
                .zip(&norms)
                .map(|(&(m, se), &norm)| {
                    let d = c * total.powf(1.0 / q_prime - 1.0) * norm.powf(q_prime - 1.0);
                    (d * root_se(m, se, q)).powi(2)
                })
                .sum::<f64>()
                .sqrt()
        } else {
            0.0
        };
        Ok(MzReport { lhs, rhs, lhs_se, rhs_se })
    }
}

pub fn verify_mz(q: f64, dists: &[BoundedDist], trials: usize) -> Result<MzReport> {
    MzCheck { q, dists: dists.to_vec(), trials, seed: 0 }.run()
}

/// Twenty checks over `q ∈ {1, 1.5, 2, 3, 4}` mixing uniform and skewed two-point laws.
pub fn default_mz_suite(seed: u64, trials: usize) -> Vec<MzCheck> {
    const QS: [f64; 5] = [1.0, 1.5, 2.0, 3.0, 4.0];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..20)
        .map(|i| {
            let n = rng.random_range(1..=20);
            let dists = (0..n)
                .map(|_| {
                    let lo = rng.random_range(-2.0..1.0);
                    let hi = lo + rng.random_range(0.1..3.0);
                    if rng.random_bool(0.5) {
                        BoundedDist::Uniform { lo, hi }
                    } else {
                        BoundedDist::TwoPoint { lo, hi: hi + rng.random_range(0.0..8.0), p_hi: rng.random_range(0.01..0.5) }
                    }
                })
                .collect();
            MzCheck { q: QS[i % QS.len()], dists, trials, seed: rng.random() }
        })
        .collect()
}
