//! Command-line driver: configuration, experiment orchestration and file output.

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use fdqm_core::hamiltonians::CSetting;

use crate::config::{Overrides, RunConfig};

/// Exit status for success.
pub const EXIT_OK: i32 = 0;
/// I/O or other failure outside the two classes below.
pub const EXIT_OTHER: i32 = 1;
/// Invalid configuration or arguments.
pub const EXIT_CONFIG: i32 = 2;
/// A numerical contract was violated (Hermiticity, by-construction identities, ...).
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical contract violated: {0}")]
    Numerical(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Io(_) => EXIT_OTHER,
        }
    }
}

impl From<fdqm_core::Error> for CliError {
    fn from(e: fdqm_core::Error) -> Self {
        use fdqm_core::Error as E;
        match e {
            E::InvalidGrid(_)
            | E::InvalidArgument(_)
            | E::PotentialDomain { .. }
            | E::LengthShortfall { .. } => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "fdqm",
    version,
    about = "Ehrenfest residuals, no-go witnesses and spectra of finite-dimensional Hamiltonians",
    after_help = "Exit status: 0 success, 1 I/O failure, 2 configuration error, 3 numerical contract violated."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args, Default)]
pub struct CommonArgs {
    /// JSON run configuration; flags below override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Matrix dimension N.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Fixed grid step for every Hamiltonian.
    #[arg(long, global = true)]
    pub a: Option<f64>,
    #[arg(long, global = true)]
    pub omega: Option<f64>,
    #[arg(long, global = true)]
    pub g: Option<f64>,
    /// Diagonal constant of the *_star Hamiltonians: a number or "kinetic".
    #[arg(long = "C", global = true, allow_hyphen_values = true)]
    pub c: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spectra of the three Hamiltonians against the exact levels (CSV).
    Fig1,
    /// Eigenvectors against the exact eigenfunction, one CSV per index.
    Fig2,
    /// Ehrenfest residuals, force gap and commutator defects (JSON).
    Check,
    /// Random-instance no-go witnesses with oracle cross-checks (JSON).
    Nogo {
        /// Comma-separated matrix sizes.
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
    },
    /// Grid step minimizing the largest eigenvalue (JSON).
    Stepsize,
}

/// Configuration from the optional file plus flag overrides.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut config = match &cli.common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let c = cli
        .common
        .c
        .as_deref()
        .map(|s| {
            s.parse::<CSetting>()
                .map_err(|e| CliError::Config(format!("--C: {e}")))
        })
        .transpose()?;
    let sizes = match &cli.command {
        Command::Nogo { sizes } => sizes.clone(),
        _ => None,
    };
    config.apply(&Overrides {
        output: cli.common.output.clone(),
        seed: cli.common.seed,
        n: cli.common.n,
        a: cli.common.a,
        omega: cli.common.omega,
        g: cli.common.g,
        c,
        sizes,
    })?;
    Ok(config)
}

/// Run one command; contract violations become [`CliError::Numerical`] after the
/// files have been written.
pub fn run(cli: &Cli) -> Result<commands::Outcome, CliError> {
    let config = resolve_config(cli)?;
    let outcome = match cli.command {
        Command::Fig1 => commands::fig1(&config)?,
        Command::Fig2 => commands::fig2(&config)?,
        Command::Check => commands::check(&config)?,
        Command::Nogo { .. } => commands::nogo(&config)?,
        Command::Stepsize => commands::stepsize(&config)?,
    };
    if !outcome.violations.is_empty() {
        return Err(CliError::Numerical(outcome.violations.join("; ")));
    }
    Ok(outcome)
}
