//! Batch front end for the twin-barrier waveguide solvers.
//!
//! Reads a JSON [`RunConfig`], runs one command and renders CSV or JSON.
//! Exit codes: 0 success, 1 failed check or solver failure, 2 bad input.

pub mod commands;
pub mod config;
mod error;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

pub use commands::Output;
pub use config::{Prepared, RunConfig};
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "twinbarrier",
    version,
    about = "Scattering by two apertured barriers in a waveguide"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reflection and transmission over the configured band (CSV).
    Sweep(Common),
    /// Located resonances (JSON).
    Resonance(Common),
    /// Invariant checks with a machine-readable summary (JSON).
    Validate(Common),
    /// Modal solver against the finite-difference oracle (CSV).
    CompareOracle {
        #[command(flatten)]
        common: Common,
        /// Wavenumbers to compare; comma separated or repeated.
        #[arg(long, value_delimiter = ',')]
        k: Vec<f64>,
        /// Also compare the Dirichlet and Neumann half problems.
        #[arg(long)]
        halves: bool,
    },
    /// Field samples on an x-z lattice (CSV with `#` footer).
    Field {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        k: f64,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Sweep(c) | Command::Resonance(c) | Command::Validate(c) => c,
            Command::CompareOracle { common, .. } | Command::Field { common, .. } => common,
        }
    }
}

/// Runs a parsed command and writes its output; returns whether checks passed.
pub fn run(cli: &Cli) -> Result<bool, CliError> {
    let common = cli.command.common();
    let cfg = RunConfig::load(&common.config)?;
    let prepared = cfg.prepare()?;
    let outputs = &cfg.output;
    let (out, default) = match &cli.command {
        Command::Sweep(_) => (commands::sweep(&prepared)?, &outputs.sweep),
        Command::Resonance(_) => (commands::resonance(&prepared)?, &outputs.resonance),
        Command::Validate(_) => (commands::validate(&prepared, &cfg)?, &outputs.validate),
        Command::CompareOracle { k, halves, .. } => (
            commands::compare_oracle(&prepared, Some(k), *halves)?,
            &outputs.compare_oracle,
        ),
        Command::Field { k, .. } => (commands::field(&prepared, &cfg, *k)?, &outputs.field),
    };
    emit(&out.text, common.out.as_deref().or(default.as_deref()))?;
    Ok(out.passed)
}

fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    use std::io::Write;
    match path {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Write {
            path: path.to_owned(),
            source,
        }),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Write {
                path: PathBuf::from("<stdout>"),
                source,
            }),
    }
}
