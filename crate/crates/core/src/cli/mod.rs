//! Command-line front end: `nvdnp <command> --config run.toml --out results/`.
//!
//! Exit codes: 0 success, 2 configuration or input error (nothing written), 3 numerical
//! failure or non-convergence (a best-effort report is still written for fits), 4 when at
//! least half of a sweep's points failed, 1 for output I/O errors. Every nonzero exit prints
//! a one-line JSON error record on stderr.

mod commands;
pub mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::add_noise;
pub use config::{ConfigError, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "nvdnp", version, about = "NV-center nuclear polarization: steady-state model, sweeps and ODMR fits")]
pub struct Cli {
    /// Run configuration (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    pub out: PathBuf,
    /// Random seed; overrides `seed` in the config.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Worker threads for sweeps and strain averaging.
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Steady state at one parameter point (steady.json).
    Steady,
    /// Axial field sweep (sweep_b.csv).
    SweepB,
    /// Field by strain map (scan_2d.csv).
    #[command(name = "scan-2d")]
    Scan2d,
    /// Strain-averaged polarization per temperature row (temperature.csv).
    Temperature,
    /// Multi-Lorentzian fit of an ODMR spectrum (fit_odmr.txt).
    FitOdmr,
    /// Strain-distribution fit of a zero-field excited-state spectrum (fit_strain.txt).
    FitStrain,
    /// Synthetic spectrum with seeded Gaussian noise.
    Synth,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Config(String),
    Numerical { kind: &'static str, message: String },
    NotConverged(String),
    PartialSweep { failed: usize, total: usize },
    Io(String),
}

impl CliError {
    pub(crate) fn numerical(e: crate::Error) -> Self {
        CliError::Numerical {
            kind: e.kind(),
            message: e.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical { .. } | CliError::NotConverged(_) => 3,
            CliError::PartialSweep { .. } => 4,
            CliError::Io(_) => 1,
        }
    }

    /// Machine-readable one-line record.
    pub fn record(&self) -> String {
        let (category, kind, message) = match self {
            CliError::Config(m) => ("config", "invalid_input", m.clone()),
            CliError::Numerical { kind, message } => ("numerical", *kind, message.clone()),
            CliError::NotConverged(m) => ("numerical", "not_converged", m.clone()),
            CliError::PartialSweep { failed, total } => {
                ("sweep", "partial_failure", format!("{failed} of {total} points failed"))
            }
            CliError::Io(m) => ("io", "write_failed", m.clone()),
        };
        serde_json::json!({ "error": category, "kind": kind, "message": message, "exit_code": self.exit_code() })
            .to_string()
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.0)
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.record());
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config is required".into()))?;
    let config = RunConfig::load(path)?;
    if cli.threads == Some(0) {
        return Err(CliError::Config("--threads must be positive".into()));
    }
    let ctx = commands::Context {
        seed: cli.seed.or(config.seed).unwrap_or(0),
        config,
        config_dir: path.parent().map(PathBuf::from).unwrap_or_default(),
        out_dir: cli.out.clone(),
        threads: cli.threads,
    };
    let out = crate::sweep::with_threads(ctx.threads, || match cli.command {
        Command::Steady => commands::steady(&ctx),
        Command::SweepB => commands::sweep_b(&ctx),
        Command::Scan2d => commands::scan_2d(&ctx),
        Command::Temperature => commands::temperature(&ctx),
        Command::FitOdmr => commands::fit_odmr(&ctx),
        Command::FitStrain => commands::fit_strain(&ctx),
        Command::Synth => commands::synth(&ctx),
    })
    .map_err(|e| CliError::Config(e.to_string()))??;
    commands::write_outputs(&ctx.out_dir, &out.files)?;
    match out.failure {
        Some(f) => Err(f),
        None => Ok(()),
    }
}

/// Parses `args` (including the program name) and runs. Argument errors exit with 2.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            code
        }
    }
}
