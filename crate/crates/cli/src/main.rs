//! `bs-sim`: identity checks, heralded sampling and parameter scans for the
//! two-sided scattershot and homodyne models.
//!
//! Exit codes: 0 when every check passes, 1 when an identity is violated or
//! output cannot be written, 2 for invalid or infeasible configurations.

mod commands;
mod config;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{ExperimentConfig, Settings};

#[derive(Parser, Debug)]
#[command(name = "bs-sim", version, about = "Boson sampling simulator and identity checker")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the model's identity against an independent route
    Verify(Invocation),
    /// Draw heralded samples (tsbs, herald)
    Sample(Invocation),
    /// Evaluate over a grid: t for herald, η for homodyne
    Scan(Invocation),
}

#[derive(clap::Args, Debug)]
struct Invocation {
    /// TOML file with default settings; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    settings: Settings,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad or infeasible configuration.
    Invalid(String),
    /// A check ran and failed.
    Violated(String),
    /// Output could not be produced.
    Output(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Violated(_) | CliError::Output(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid(m) => write!(f, "invalid configuration: {m}"),
            CliError::Violated(m) => write!(f, "check failed: {m}"),
            CliError::Output(m) => write!(f, "output error: {m}"),
        }
    }
}

impl From<bosim::Error> for CliError {
    fn from(e: bosim::Error) -> Self {
        use bosim::Error as E;
        match e {
            E::Io(_) | E::Json(_) | E::Csv(_) => CliError::Output(e.to_string()),
            E::Accuracy { .. } | E::NotUnitary { .. } | E::Unnormalized { .. } => {
                CliError::Violated(e.to_string())
            }
            other => CliError::Invalid(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (inv, cmd): (Invocation, fn(&ExperimentConfig) -> Result<(), CliError>) = match cli.command {
        Command::Verify(inv) => (inv, commands::verify),
        Command::Sample(inv) => (inv, commands::sample),
        Command::Scan(inv) => (inv, commands::scan),
    };
    let cfg = ExperimentConfig::resolve(inv.settings, inv.config.as_deref())?;
    cmd(&cfg)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bs-sim: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
