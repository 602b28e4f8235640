//! The four campaigns. Each one collects its results in replication order
//! and writes them single-threaded, so output is byte-identical across
//! thread counts.

use crate::config::Settings;
use crate::CliError;
use scv::stats::{default_hoeffding_suite, default_mz_suite};
use scv::{fit_rate, poly_dim, replicate, tail_bump, test_function_2d, ErrorSample, EstimatorConfig, InterpolationMode, Method};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

pub const RAW_HEADER: &str = "method,s,d,m,n_evals,rep,signed_error";
pub const SUMMARY_HEADER: &str = "method,s,d,m,n_evals,stat,value";

const RATES_M: [usize; 7] = [1, 2, 4, 8, 16, 32, 64];
const DEFAULT_METHODS: [Method; 3] = [Method::Cv, Method::CvMom, Method::Scv];

struct Sinks {
    raw: Option<BufWriter<File>>,
    summary: Box<dyn Write>,
}

fn summary_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".summary.csv");
    PathBuf::from(name)
}

impl Sinks {
    fn open(out: Option<&Path>, with_raw: bool) -> Result<Self, CliError> {
        let mut sinks = match out {
            Some(path) if with_raw => Sinks {
                raw: Some(BufWriter::new(File::create(path)?)),
                summary: Box::new(BufWriter::new(File::create(summary_path(path))?)),
            },
            Some(path) => Sinks { raw: None, summary: Box::new(BufWriter::new(File::create(path)?)) },
            None => Sinks { raw: None, summary: Box::new(BufWriter::new(io::stdout().lock())) },
        };
        if let Some(raw) = sinks.raw.as_mut() {
            writeln!(raw, "{RAW_HEADER}")?;
        }
        writeln!(sinks.summary, "{SUMMARY_HEADER}")?;
        Ok(sinks)
    }

    fn raw_rows(&mut self, sample: &ErrorSample, d: usize) -> io::Result<()> {
        let Some(raw) = self.raw.as_mut() else { return Ok(()) };
        let c = &sample.config;
        for (rep, e) in sample.errors.iter().enumerate() {
            writeln!(raw, "{},{},{d},{},{},{rep},{e}", c.method, c.s, c.m, sample.n_evals)?;
        }
        Ok(())
    }

    fn stat(&mut self, sample: &ErrorSample, d: usize, stat: &str, value: impl std::fmt::Display) -> io::Result<()> {
        let c = &sample.config;
        writeln!(self.summary, "{},{},{d},{},{},{stat},{value}", c.method, c.s, c.m, sample.n_evals)
    }

    /// Aggregate rows span several `m`, so those columns stay empty.
    fn aggregate(&mut self, method: Method, s: usize, d: usize, stat: &str, value: f64) -> io::Result<()> {
        writeln!(self.summary, "{method},{s},{d},,,{stat},{value}")
    }

    fn finish(mut self) -> io::Result<()> {
        if let Some(raw) = self.raw.as_mut() {
            raw.flush()?;
        }
        self.summary.flush()
    }
}

fn require_positive(name: &str, v: usize) -> Result<usize, CliError> {
    if v == 0 {
        return Err(CliError::Config(format!("{name} must be positive")));
    }
    Ok(v)
}

fn test_function_dim(settings: &Settings) -> Result<usize, CliError> {
    match settings.d.unwrap_or(2) {
        2 => Ok(2),
        d => Err(CliError::Config(format!("the test function is two-dimensional, got d = {d}"))),
    }
}

fn base_config(settings: &Settings, method: Method, s: usize, m: usize) -> EstimatorConfig {
    EstimatorConfig::new(method, s, m)
        .with_k(settings.k.unwrap_or(11))
        .with_mode(settings.mode.unwrap_or(InterpolationMode::Deterministic))
}

/// `n0·m^d < k` leaves fewer residual samples than groups.
fn mom_skipped(cfg: &EstimatorConfig, d: usize) -> Result<bool, CliError> {
    if cfg.method != Method::CvMom {
        return Ok(false);
    }
    let n0 = poly_dim(cfg.s, d)?;
    let residuals = (cfg.m as u128).checked_pow(d as u32).map(|c| c * n0 as u128);
    if residuals.is_some_and(|r| r < cfg.k as u128) {
        eprintln!("skipping CV_MOM at s={} d={d} m={}: {} residual samples < k = {}", cfg.s, cfg.m, residuals.unwrap(), cfg.k);
        return Ok(true);
    }
    Ok(false)
}

pub fn rates(settings: &Settings, out: Option<&Path>) -> Result<(), CliError> {
    let d = test_function_dim(settings)?;
    let s = require_positive("s", settings.s.unwrap_or(2))?;
    let reps = require_positive("reps", settings.reps.unwrap_or(1000))?;
    let seed = settings.seed.unwrap_or(0);
    let m_list = settings.m_list.clone().unwrap_or_else(|| RATES_M.to_vec());
    let methods = settings.methods.clone().unwrap_or_else(|| DEFAULT_METHODS.to_vec());
    let f = test_function_2d();
    let mut sinks = Sinks::open(out, true)?;
    for &method in &methods {
        let mut max_points = Vec::new();
        let mut q99_points = Vec::new();
        for &m in &m_list {
            let cfg = base_config(settings, method, s, m);
            if mom_skipped(&cfg, d)? {
                continue;
            }
            let sample = replicate(&f, &cfg, reps, seed)?;
            sinks.raw_rows(&sample, d)?;
            let (max, q99) = (sample.max_abs(), sample.prob_error(0.01)?);
            sinks.stat(&sample, d, "max_abs_error", max)?;
            sinks.stat(&sample, d, "q99_error", q99)?;
            max_points.push((sample.n_evals as f64, max));
            q99_points.push((sample.n_evals as f64, q99));
        }
        for (stat, points) in [("max_abs_error_slope", &max_points), ("q99_error_slope", &q99_points)] {
            if points.len() >= 2 && points.iter().all(|&(_, e)| e > 0.0) {
                sinks.aggregate(method, s, d, stat, fit_rate(points)?.slope)?;
            }
        }
    }
    Ok(sinks.finish()?)
}

pub fn histogram(settings: &Settings, out: Option<&Path>) -> Result<(), CliError> {
    let d = test_function_dim(settings)?;
    let s = require_positive("s", settings.s.unwrap_or(2))?;
    let reps = require_positive("reps", settings.reps.unwrap_or(100_000))?;
    let bins = require_positive("bins", settings.bins.unwrap_or(50))?;
    let seed = settings.seed.unwrap_or(0);
    let m_list = settings.m_list.clone().unwrap_or_else(|| vec![4]);
    let methods = settings.methods.clone().unwrap_or_else(|| DEFAULT_METHODS.to_vec());
    let thresholds = settings.thresholds.clone().unwrap_or_else(|| vec![2.5, 2.9]);
    if let Some(t) = thresholds.iter().find(|t| !(**t >= 0.0)) {
        return Err(CliError::Config(format!("thresholds must be non-negative, got {t}")));
    }
    let f = test_function_2d();
    let mut sinks = Sinks::open(out, true)?;
    for &m in &m_list {
        for &method in &methods {
            let cfg = base_config(settings, method, s, m);
            if mom_skipped(&cfg, d)? {
                continue;
            }
            let sample = replicate(&f, &cfg, reps, seed)?;
            sinks.raw_rows(&sample, d)?;
            sinks.stat(&sample, d, "mean_error", sample.mean())?;
            sinks.stat(&sample, d, "max_abs_error", sample.max_abs())?;
            for &t in &thresholds {
                sinks.stat(&sample, d, &format!("tail_fraction_gt_{t}"), sample.tail_fraction(t)?)?;
            }
            for (i, bin) in sample.histogram(bins)?.iter().enumerate() {
                sinks.stat(&sample, d, &format!("bin_{i}_left"), bin.left)?;
                sinks.stat(&sample, d, &format!("bin_{i}_right"), bin.right)?;
                sinks.stat(&sample, d, &format!("bin_{i}_count"), bin.count)?;
            }
        }
    }
    Ok(sinks.finish()?)
}

pub fn tails(settings: &Settings, out: Option<&Path>) -> Result<(), CliError> {
    let s = require_positive("s", settings.s.unwrap_or(1))?;
    let d = require_positive("d", settings.d.unwrap_or(2))?;
    let p = settings.p.unwrap_or(1.0);
    if !(p >= 1.0) || s as f64 * p >= d as f64 {
        return Err(CliError::Config(format!("tails needs p >= 1 and s < d/p, got s={s} d={d} p={p}")));
    }
    let reps = require_positive("reps", settings.reps.unwrap_or(10_000))?;
    let seed = settings.seed.unwrap_or(0);
    let m_list = settings.m_list.clone().unwrap_or_else(|| vec![8]);
    let methods = settings.methods.clone().unwrap_or_else(|| vec![Method::Scv]);
    let deltas = settings.deltas.clone().unwrap_or_else(|| vec![0.1, 0.05, 0.02]);
    if let Some(bad) = deltas.iter().find(|x| !(**x > 0.0 && **x < 1.0)) {
        return Err(CliError::Config(format!("δ must lie in (0,1), got {bad}")));
    }
    // One sample per (δ, rep) would not fit the raw schema, so tails only writes summaries.
    let mut sinks = Sinks::open(out, false)?;
    for &m in &m_list {
        for &method in &methods {
            let mut points = Vec::new();
            for &delta in &deltas {
                let f = tail_bump(s, d, p, m, delta)?;
                let cfg = base_config(settings, method, s, m);
                if mom_skipped(&cfg, d)? {
                    break;
                }
                let sample = replicate(&f, &cfg, reps, seed)?;
                let e = sample.prob_error(delta)?;
                sinks.stat(&sample, d, &format!("prob_error_delta_{delta}"), e)?;
                points.push((1.0 / delta, e));
            }
            if points.len() >= 2 && points.iter().all(|&(_, e)| e > 0.0) {
                writeln!(sinks.summary, "{method},{s},{d},{m},,delta_slope,{}", fit_rate(&points)?.slope)?;
            }
        }
    }
    Ok(sinks.finish()?)
}

pub fn verify(settings: &Settings, out: Option<&Path>) -> Result<(), CliError> {
    let trials = require_positive("trials", settings.trials.unwrap_or(100_000))?;
    let seed = settings.seed.unwrap_or(0);
    let mut report = String::new();
    let mut failures = Vec::new();
    report.push_str(&format!("Hoeffding-type bound, {trials} trials per configuration\n"));
    for (i, check) in default_hoeffding_suite(seed, trials).iter().enumerate() {
        let r = check.run()?;
        let verdict = if r.holds() { "ok" } else { "FAIL" };
        let line = format!(
            "  [{i:2}] {verdict:4} family={:?} n={} p={:.4} δ={:.4} bound={:.6e} fail_rate={:.6}",
            check.family,
            check.b.len(),
            check.p,
            check.delta,
            r.bound,
            r.empirical_fail_rate
        );
        if !r.holds() {
            failures.push(format!("hoeffding {line}"));
        }
        report.push_str(&line);
        report.push('\n');
    }
    report.push_str(&format!("Moment bound, {trials} trials per configuration\n"));
    for (i, check) in default_mz_suite(seed.wrapping_add(1), trials).iter().enumerate() {
        let r = check.run()?;
        let verdict = if r.holds() { "ok" } else { "FAIL" };
        let line = format!(
            "  [{i:2}] {verdict:4} q={} n={} lhs={:.6e}±{:.1e} rhs={:.6e}±{:.1e}",
            check.q,
            check.dists.len(),
            r.lhs,
            r.lhs_se,
            r.rhs,
            r.rhs_se
        );
        if !r.holds() {
            failures.push(format!("moment {line}"));
        }
        report.push_str(&line);
        report.push('\n');
    }
    report.push_str(&format!("{} of 40 checks failed\n", failures.len()));
    match out {
        Some(path) => std::fs::write(path, &report)?,
        None => print!("{report}"),
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(failures.join("\n")))
    }
}
