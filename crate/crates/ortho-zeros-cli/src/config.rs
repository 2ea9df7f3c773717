//! Argument parsing and the normalized experiment configuration.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use ortho_zeros::measure::{Interval, MeasureSpec, SingularFactor};
use serde::{Deserialize, Serialize};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numeric(ortho_zeros::Error),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) | CliError::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "invalid configuration: {msg}"),
            CliError::Numeric(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o failure: {e}"),
        }
    }
}

impl From<ortho_zeros::Error> for CliError {
    fn from(e: ortho_zeros::Error) -> Self {
        CliError::Numeric(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

#[derive(Parser)]
#[command(
    name = "ortho-zeros",
    version,
    about = "Expected real zeros of random polynomials in orthonormal bases"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Kac-Rice expected real zeros over an interval for one or more degrees.
    ExpectedZeros(RunArgs),
    /// Sample random polynomials, count real zeros, histogram all zeros.
    MonteCarlo(RunArgs),
    /// Diagonal kernel ratios against their sine-kernel targets.
    Universality(RunArgs),
    /// Equilibrium measure of the support: capacity and interval masses.
    Equilibrium(RunArgs),
    /// The monomial ensemble on the full line or an interval.
    Kac(RunArgs),
    /// Join a quadrature run and a Monte Carlo run into one discrepancy table.
    Compare(RunArgs),
}

impl Command {
    pub fn mode(&self) -> &'static str {
        match self {
            Command::ExpectedZeros(_) => "expected-zeros",
            Command::MonteCarlo(_) => "monte-carlo",
            Command::Universality(_) => "universality",
            Command::Equilibrium(_) => "equilibrium",
            Command::Kac(_) => "kac",
            Command::Compare(_) => "compare",
        }
    }

    pub fn args(&self) -> &RunArgs {
        match self {
            Command::ExpectedZeros(a)
            | Command::MonteCarlo(a)
            | Command::Universality(a)
            | Command::Equilibrium(a)
            | Command::Kac(a)
            | Command::Compare(a) => a,
        }
    }
}

#[derive(Args, Clone)]
pub struct RunArgs {
    /// Measure preset (legendre, chebyshev, two-interval, jacobi:A,B) or a
    /// JSON measure file.
    #[arg(long, default_value = "legendre")]
    pub measure: String,
    /// Single degree.
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated, strictly increasing degrees.
    #[arg(long, value_delimiter = ',')]
    pub n_sweep: Option<Vec<usize>>,
    /// Interval "a,b"; defaults to the support hull (kac: the full line).
    #[arg(long, value_parser = parse_interval)]
    pub interval: Option<(f64, f64)>,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-8)]
    pub rel_tol: f64,
    /// Output directory for CSV tables and the JSON summary.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Worker thread cap; env ORTHO_ZEROS_THREADS is the fallback.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Evaluation point for universality ratios.
    #[arg(long, default_value_t = 0.0)]
    pub x: f64,
    /// Histogram bin count.
    #[arg(long, default_value_t = 40)]
    pub bins: usize,
    /// Also write per-trial zero counts.
    #[arg(long)]
    pub dump_trials: bool,
    /// Approximate the equilibrium density by the scaled Christoffel
    /// function (finite-n, labeled approximate in the summary).
    #[arg(long)]
    pub approximate: bool,
    /// Also write the recurrence table as CSV.
    #[arg(long)]
    pub dump_recurrence: bool,
    /// Print the normalized config as JSON and exit without running.
    #[arg(long)]
    pub dump_config: bool,
}

fn parse_interval(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected \"a,b\", got \"{s}\""));
    }
    let a: f64 = parts[0]
        .trim()
        .parse()
        .map_err(|_| format!("bad number \"{}\"", parts[0]))?;
    let b: f64 = parts[1]
        .trim()
        .parse()
        .map_err(|_| format!("bad number \"{}\"", parts[1]))?;
    if a.is_nan() || b.is_nan() || a >= b {
        return Err(format!("interval must satisfy a < b, got {a} >= {b}"));
    }
    Ok((a, b))
}

/// Fully validated run description; `--dump-config` emits exactly this and
/// the emitted JSON re-parses to an identical value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub mode: String,
    pub measure: String,
    pub n_values: Vec<usize>,
    pub interval: Option<(f64, f64)>,
    pub trials: usize,
    pub sigma: f64,
    pub seed: u64,
    pub rel_tol: f64,
    pub out: PathBuf,
    pub threads: Option<usize>,
    pub x: f64,
    pub bins: usize,
    pub dump_trials: bool,
    pub approximate: bool,
    pub dump_recurrence: bool,
}

pub fn normalize(mode: &str, args: &RunArgs) -> Result<ExperimentConfig, CliError> {
    let cfg_err = |msg: String| CliError::Config(msg);

    let n_values = match (args.n, &args.n_sweep) {
        (Some(_), Some(_)) => {
            return Err(cfg_err("give --n or --n-sweep, not both".to_string()))
        }
        (Some(n), None) => vec![n],
        (None, Some(list)) => list.clone(),
        (None, None) => Vec::new(),
    };
    if n_values.contains(&0) {
        return Err(cfg_err("degrees must be at least 1".to_string()));
    }
    if n_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(cfg_err(
            "--n-sweep must be strictly increasing".to_string(),
        ));
    }
    let needs_degree = match mode {
        "equilibrium" => args.approximate,
        _ => true,
    };
    if needs_degree && n_values.is_empty() {
        return Err(cfg_err("one of --n or --n-sweep is required".to_string()));
    }
    if matches!(mode, "monte-carlo" | "compare") && n_values.len() != 1 {
        return Err(cfg_err(format!("{mode} takes a single --n")));
    }
    if matches!(mode, "monte-carlo" | "compare") && args.trials == 0 {
        return Err(cfg_err("--trials must be at least 1".to_string()));
    }
    if !(args.sigma > 0.0 && args.sigma.is_finite()) {
        return Err(cfg_err(format!("--sigma must be positive, got {}", args.sigma)));
    }
    if !(args.rel_tol > 0.0 && args.rel_tol.is_finite()) {
        return Err(cfg_err(format!(
            "--rel-tol must be positive, got {}",
            args.rel_tol
        )));
    }
    if args.bins == 0 {
        return Err(cfg_err("--bins must be at least 1".to_string()));
    }
    let threads = match args.threads {
        Some(0) => return Err(cfg_err("--threads must be at least 1".to_string())),
        Some(k) => Some(k),
        None => match std::env::var("ORTHO_ZEROS_THREADS") {
            Ok(raw) => Some(raw.parse::<usize>().ok().filter(|&k| k >= 1).ok_or_else(
                || cfg_err(format!("ORTHO_ZEROS_THREADS must be a positive integer, got \"{raw}\"")),
            )?),
            Err(_) => None,
        },
    };
    let measure = if mode == "kac" {
        "monomial".to_string()
    } else {
        args.measure.clone()
    };
    Ok(ExperimentConfig {
        mode: mode.to_string(),
        measure,
        n_values,
        interval: args.interval,
        trials: args.trials,
        sigma: args.sigma,
        seed: args.seed,
        rel_tol: args.rel_tol,
        out: args.out.clone(),
        threads,
        x: args.x,
        bins: args.bins,
        dump_trials: args.dump_trials,
        approximate: args.approximate,
        dump_recurrence: args.dump_recurrence,
    })
}

#[derive(Deserialize)]
struct MeasureFile {
    jacobi: Option<JacobiSection>,
    support: Option<Vec<[f64; 2]>>,
    factors: Option<Vec<f64>>,
    singular: Option<Vec<SingularSection>>,
}

#[derive(Deserialize)]
struct JacobiSection {
    alpha: f64,
    beta: f64,
    interval: Option<[f64; 2]>,
}

#[derive(Deserialize)]
struct SingularSection {
    point: f64,
    exponent: f64,
}

/// Resolve `--measure`: a named preset, `jacobi:A,B`, or a JSON file.
pub fn resolve_measure(name: &str) -> Result<MeasureSpec, CliError> {
    let lib = |r: ortho_zeros::Result<MeasureSpec>| {
        r.map_err(|e| CliError::Config(format!("bad measure \"{name}\": {e}")))
    };
    match name {
        "legendre" => Ok(MeasureSpec::legendre()),
        "chebyshev" => Ok(MeasureSpec::chebyshev()),
        "two-interval" => lib(MeasureSpec::uniform_on(vec![
            Interval { lo: -1.0, hi: -0.5 },
            Interval { lo: 0.5, hi: 1.0 },
        ])),
        _ => {
            if let Some(params) = name.strip_prefix("jacobi:") {
                let parts: Vec<&str> = params.split(',').collect();
                let parsed: Option<(f64, f64)> = match parts.as_slice() {
                    [a, b] => a.trim().parse().ok().zip(b.trim().parse().ok()),
                    _ => None,
                };
                let (alpha, beta) = parsed.ok_or_else(|| {
                    CliError::Config(format!("expected jacobi:ALPHA,BETA, got \"{name}\""))
                })?;
                return lib(MeasureSpec::jacobi(alpha, beta));
            }
            let text = std::fs::read_to_string(name).map_err(|e| {
                CliError::Config(format!("cannot read measure file \"{name}\": {e}"))
            })?;
            let file: MeasureFile = serde_json::from_str(&text).map_err(|e| {
                CliError::Config(format!("measure file \"{name}\" is not valid JSON: {e}"))
            })?;
            measure_from_file(name, file)
        }
    }
}

fn measure_from_file(name: &str, file: MeasureFile) -> Result<MeasureSpec, CliError> {
    let lib = |r: ortho_zeros::Result<MeasureSpec>| {
        r.map_err(|e| CliError::Config(format!("bad measure \"{name}\": {e}")))
    };
    if let Some(j) = file.jacobi {
        let [lo, hi] = j.interval.unwrap_or([-1.0, 1.0]);
        let iv = Interval::new(lo, hi)
            .map_err(|e| CliError::Config(format!("bad measure \"{name}\": {e}")))?;
        return lib(MeasureSpec::jacobi_on(iv, j.alpha, j.beta));
    }
    let support_list = file.support.ok_or_else(|| {
        CliError::Config(format!(
            "measure file \"{name}\" needs either a \"jacobi\" section or a \"support\" list"
        ))
    })?;
    let mut intervals = Vec::with_capacity(support_list.len());
    for [lo, hi] in support_list {
        intervals.push(Interval::new(lo, hi).map_err(|e| {
            CliError::Config(format!("bad measure \"{name}\": {e}"))
        })?);
    }
    let factors = file
        .factors
        .unwrap_or_else(|| vec![1.0; intervals.len()]);
    let singular = file
        .singular
        .unwrap_or_default()
        .into_iter()
        .map(|s| SingularFactor {
            point: s.point,
            exponent: s.exponent,
        })
        .collect();
    lib(MeasureSpec::generalized(intervals, factors, singular))
}
