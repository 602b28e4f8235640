//! `scv`: seeded experiment campaigns for stratified control variates.
//!
//! Exit codes: 0 on success, 1 on configuration or I/O errors, 2 when
//! `verify` finds a violated bound.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use clap::{Args, Parser, Subcommand};
use config::Settings;
use scv::{InterpolationMode, Method};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] scv::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("verification failed:\n{0}")]
    Verification(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 2,
            _ => 1,
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Config(m) => m.clone(),
            other => other.to_string(),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "scv", version, about = "Randomized quadrature experiments with stratified control variates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Max and 99% errors against the budget for each m (CSV).
    Rates(Common),
    /// Signed-error histograms and tail fractions at a fixed m (CSV).
    Histogram(Common),
    /// Probabilistic error of SCV on low-smoothness bumps as δ shrinks (CSV).
    Tails(Common),
    /// Monte Carlo checks of the concentration inequalities (text report).
    Verify(Common),
}

#[derive(Args, Debug, Default)]
struct Common {
    /// Flat `key = value` settings file; flags override it.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Master seed.
    #[arg(long, env = "SCV_SEED")]
    seed: Option<u64>,
    /// Raw rows go to PATH, summaries to PATH.summary.csv. Defaults to summaries on stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    method: Option<Vec<String>>,
    /// Interpolation order: local polynomials of total degree < s.
    #[arg(long)]
    s: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    /// Integrability exponent of the bump family (`tails`).
    #[arg(long)]
    p: Option<f64>,
    /// Subdivisions per axis.
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    m: Option<Vec<usize>>,
    /// Replications per configuration.
    #[arg(long, value_name = "N")]
    reps: Option<usize>,
    /// Median-of-means groups.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    delta: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    thresholds: Option<Vec<f64>>,
    #[arg(long)]
    bins: Option<usize>,
    /// Trials per inequality check (`verify`).
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, value_name = "deterministic|shifted")]
    mode: Option<String>,
}

impl Common {
    fn settings(&self) -> Result<Settings, CliError> {
        let file = match &self.config {
            Some(path) => Settings::load(path)?,
            None => Settings::default(),
        };
        let methods = self
            .method
            .as_ref()
            .map(|list| list.iter().map(|m| m.parse::<Method>()).collect::<Result<Vec<_>, _>>())
            .transpose()
            .map_err(|e| CliError::Config(e.to_string()))?;
        let mode = self
            .mode
            .as_deref()
            .map(str::parse::<InterpolationMode>)
            .transpose()
            .map_err(|e| CliError::Config(e.to_string()))?;
        let flags = Settings {
            methods,
            s: self.s,
            d: self.d,
            p: self.p,
            m_list: self.m.clone(),
            reps: self.reps,
            k: self.k,
            seed: self.seed,
            deltas: self.delta.clone(),
            thresholds: self.thresholds.clone(),
            bins: self.bins,
            trials: self.trials,
            mode,
        };
        Ok(file.merge(flags))
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let (common, which) = match &cli.command {
        Command::Rates(c) => (c, "rates"),
        Command::Histogram(c) => (c, "histogram"),
        Command::Tails(c) => (c, "tails"),
        Command::Verify(c) => (c, "verify"),
    };
    if let Some(n) = common.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot start thread pool: {e}")))?;
    }
    let settings = common.settings()?;
    let out = common.out.as_deref();
    match which {
        "rates" => commands::rates(&settings, out),
        "histogram" => commands::histogram(&settings, out),
        "tails" => commands::tails(&settings, out),
        _ => commands::verify(&settings, out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("scv: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
