//! The `tpm-lab` command-line runner.
//!
//! Exit status: 0 pass, 1 identity check failed, 2 config error, 3 validation
//! error. Data goes to stdout or `--out`; diagnostics go to stderr.

pub mod config;
pub mod report;
pub mod scenario;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{error, info, warn};
use serde::Serialize;
use thiserror::Error;

use crate::batch;
use crate::random::{derive_seed, rng_from_seed};
use crate::sampler::{self, EstimatorReport};
use config::{ChannelSpec, ScenarioConfig};
use report::ReportRow;
use scenario::{Evaluation, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Pass = 0,
    CheckFailed = 1,
    ConfigError = 2,
    ValidationError = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("bad sweep parameter: {0}")]
    BadSweepParameter(String),

    #[error("validation error [{invariant}]: {source}")]
    Validation {
        invariant: &'static str,
        #[source]
        source: crate::Error,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
}

impl CliError {
    pub fn exit_status(&self) -> ExitStatus {
        match self {
            Self::Config(_) | Self::BadSweepParameter(_) | Self::Io { .. } => ExitStatus::ConfigError,
            Self::Validation { .. } => ExitStatus::ValidationError,
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(source: crate::Error) -> Self {
        let invariant = match &source {
            crate::Error::Quantum(q) => q.invariant(),
            crate::Error::Linalg(_) => "matrix",
            crate::Error::Tpm(_) => "distribution",
            crate::Error::Sampler(_) => "sampler",
        };
        Self::Validation { invariant, source }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "tpm-lab", version, about = "Two-point-measurement identity checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Scenario JSON file.
    #[arg(long)]
    pub config: PathBuf,
    /// Pass/fail tolerance (overrides the scenario's).
    #[arg(long)]
    pub tol: Option<f64>,
    /// Write data here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Override the scenario seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParameter {
    Beta,
    #[value(name = "channel_param", alias = "channel-param")]
    ChannelParam,
    Dim,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SampleWeight {
    /// e^{−I_nm}; exact value ⟨e^{−I}⟩.
    Mi,
    /// e^{−βW_nm}; exact value Σ p(n,m) e^{−βW}.
    Work,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact check of ⟨e^{−I}⟩ + support defect = 1 and ⟨I⟩ ≥ 0.
    Verify(CommonArgs),
    /// Exact check of ⟨e^{−βW}⟩ = Z'/Z.
    Jarzynski(CommonArgs),
    /// One report row per parameter value.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum)]
        param: SweepParameter,
        /// Comma-separated values; may be empty.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
    },
    /// Monte Carlo estimate of an exponential average.
    Sample {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        count: usize,
        #[arg(long, value_enum, default_value_t = SampleWeight::Mi)]
        weight: SampleWeight,
    },
}

pub fn load_config(path: &Path, seed: Option<u64>) -> Result<ScenarioConfig> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    let mut config = ScenarioConfig::from_json(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    if let Some(s) = seed {
        config.seed = s;
    }
    Ok(config)
}

fn evaluate(config: &ScenarioConfig) -> Result<(Scenario, Evaluation)> {
    let scenario = Scenario::build(config)?;
    let eval = scenario.evaluate()?;
    Ok((scenario, eval))
}

/// Pass when the bookkeeping identity and Jensen bound hold within `tol`.
pub fn verify_passes(row: &ReportRow, tol: f64) -> bool {
    (row.exp_avg_mi + row.support_defect - 1.0).abs() <= tol && row.avg_mi >= -tol
}

pub fn run_verify(config: &ScenarioConfig, tol: Option<f64>) -> Result<(ReportRow, bool)> {
    let tol = tol.unwrap_or(config.tolerances.verify);
    let (scenario, eval) = evaluate(config)?;
    scenario.log_flags(&eval);
    let pass = verify_passes(&eval.row, tol);
    Ok((eval.row, pass))
}

pub fn run_jarzynski(config: &ScenarioConfig, tol: Option<f64>) -> Result<(Evaluation, bool)> {
    let tol = tol.unwrap_or(config.tolerances.jarzynski);
    let (scenario, eval) = evaluate(config)?;
    scenario.log_flags(&eval);
    let pass = eval.work.jarzynski_defect.abs() <= tol;
    Ok((eval, pass))
}

fn sweep_point(base: &ScenarioConfig, param: SweepParameter, value: f64, index: usize) -> Result<ScenarioConfig> {
    let mut c = base.clone();
    c.seed = derive_seed(base.seed, index as u64);
    match param {
        SweepParameter::Beta => c.beta = value,
        SweepParameter::ChannelParam => match &mut c.channel {
            ChannelSpec::Dephasing { p } | ChannelSpec::Depolarizing { p } => *p = value,
            ChannelSpec::AmplitudeDamping { gamma } => *gamma = value,
            ChannelSpec::UnitaryFromHamiltonian { t, .. } => *t = value,
            other => {
                return Err(CliError::BadSweepParameter(format!("channel {other:?} has no sweepable parameter")));
            }
        },
        SweepParameter::Dim => {
            if !base.dimension_agnostic() {
                return Err(CliError::BadSweepParameter(
                    "dim sweeps need random Hamiltonians, eigenbasis measurements and a dimension-free channel".into(),
                ));
            }
            if value.fract() != 0.0 || !(1.0..=64.0).contains(&value) {
                return Err(CliError::BadSweepParameter(format!("dim must be an integer in 1..=64, got {value}")));
            }
            c.dim = value as usize;
        }
    }
    let label = match param {
        SweepParameter::Beta => "beta",
        SweepParameter::ChannelParam => "channel_param",
        SweepParameter::Dim => "dim",
    };
    c.name = format!("{}[{label}={value}]", base.name);
    c.validate().map_err(|e| CliError::BadSweepParameter(format!("{label}={value}: {e}")))?;
    Ok(c)
}

pub fn parse_values(list: &str) -> Result<Vec<f64>> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|e| CliError::BadSweepParameter(format!("value {s:?}: {e}"))))
        .collect()
}

/// Rows come back in input order whatever the scheduling.
pub fn run_sweep(config: &ScenarioConfig, param: SweepParameter, values: &[f64]) -> Result<Vec<ReportRow>> {
    let points = values
        .iter()
        .enumerate()
        .map(|(i, &v)| sweep_point(config, param, v, i))
        .collect::<Result<Vec<_>>>()?;
    let results = batch::map(&points, |_, c| evaluate(c));
    let mut rows = Vec::with_capacity(results.len());
    for r in results {
        let (scenario, eval) = r?;
        scenario.log_flags(&eval);
        rows.push(eval.row);
    }
    Ok(rows)
}

pub fn run_sample(config: &ScenarioConfig, count: usize, weight: SampleWeight) -> Result<EstimatorReport> {
    let (scenario, eval) = evaluate(config)?;
    scenario.log_flags(&eval);
    let (table, exact) = match weight {
        SampleWeight::Mi => (eval.mutual_information.weight_table(), eval.mutual_information.exp_average),
        SampleWeight::Work => (eval.work.beta_work_table(), eval.work.jarzynski_lhs),
    };
    let mut rng = rng_from_seed(scenario::sampling_seed(config));
    let samples = sampler::sample_trajectories(&eval.joint, count, &mut rng).map_err(crate::Error::from)?;
    let report = sampler::estimate_exponential_average(&samples, &table, Some(exact)).map_err(crate::Error::from)?;
    if report.sample_count == 1 {
        warn!("[{}] single sample: std_error reported as 0", config.name);
    }
    Ok(report)
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => fs::write(path, bytes).map_err(|source| CliError::Io { path: path.display().to_string(), source }),
        None => io::stdout().write_all(bytes).map_err(|source| CliError::Io { path: "stdout".into(), source }),
    }
}

fn json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut v = serde_json::to_vec_pretty(value).expect("report serializes");
    v.push(b'\n');
    v
}

fn rows_bytes(rows: &[ReportRow], format: Format) -> Vec<u8> {
    match format {
        Format::Csv => {
            let mut buf = Vec::new();
            report::write_rows_csv(&mut buf, rows).expect("in-memory csv");
            buf
        }
        Format::Json => json(&rows),
    }
}

#[derive(Serialize)]
struct JarzynskiReport<'a> {
    row: &'a ReportRow,
    work_statistics: &'a crate::tpm::WorkStatistics,
}

fn execute(cli: &Cli) -> Result<ExitStatus> {
    let status = |pass: bool| if pass { ExitStatus::Pass } else { ExitStatus::CheckFailed };
    match &cli.command {
        Command::Verify(args) => {
            let config = load_config(&args.config, args.seed)?;
            let (row, pass) = run_verify(&config, args.tol)?;
            let bytes = match args.format {
                Format::Csv => rows_bytes(std::slice::from_ref(&row), Format::Csv),
                Format::Json => json(&row),
            };
            emit(args.out.as_deref(), &bytes)?;
            log_outcome(&config.name, "verify", pass);
            Ok(status(pass))
        }
        Command::Jarzynski(args) => {
            let config = load_config(&args.config, args.seed)?;
            let (eval, pass) = run_jarzynski(&config, args.tol)?;
            let bytes = match args.format {
                Format::Csv => rows_bytes(std::slice::from_ref(&eval.row), Format::Csv),
                Format::Json => json(&JarzynskiReport { row: &eval.row, work_statistics: &eval.work }),
            };
            emit(args.out.as_deref(), &bytes)?;
            log_outcome(&config.name, "jarzynski", pass);
            Ok(status(pass))
        }
        Command::Sweep { common, param, values } => {
            let config = load_config(&common.config, common.seed)?;
            let values = parse_values(values)?;
            let rows = run_sweep(&config, *param, &values)?;
            emit(common.out.as_deref(), &rows_bytes(&rows, common.format))?;
            let tol = common.tol.unwrap_or(config.tolerances.verify);
            let pass = rows.iter().all(|r| verify_passes(r, tol));
            log_outcome(&config.name, "sweep", pass);
            Ok(status(pass))
        }
        Command::Sample { common, count, weight } => {
            if *count == 0 {
                return Err(CliError::Config("--count must be at least 1".into()));
            }
            let config = load_config(&common.config, common.seed)?;
            let report = run_sample(&config, *count, *weight)?;
            let bytes = match common.format {
                Format::Csv => {
                    let mut buf = Vec::new();
                    report::write_estimator_csv(&mut buf, &report).expect("in-memory csv");
                    buf
                }
                Format::Json => json(&report),
            };
            emit(common.out.as_deref(), &bytes)?;
            Ok(ExitStatus::Pass)
        }
    }
}

fn log_outcome(name: &str, command: &str, pass: bool) {
    if pass {
        info!("[{name}] {command}: PASS");
    } else {
        error!("[{name}] {command}: FAIL");
    }
}

/// Runs a parsed command line and returns the process exit status.
pub fn run(cli: &Cli) -> ExitStatus {
    match execute(cli) {
        Ok(s) => s,
        Err(e) => {
            error!("{e}");
            e.exit_status()
        }
    }
}
