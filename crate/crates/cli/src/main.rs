//! `bigpast`: single-subject abnormality tests under the skewed Student t.
//!
//! Exit codes: 0 retain (or success), 2 reject (single-method `test`, or
//! `gof` rejecting the fit), 1 error.

mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{}: line {line}: {msg}", path.display())]
    Parse { path: PathBuf, line: u64, msg: String },

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] bigpast::Error),

    #[error("writing JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("writing CSV: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Parser)]
#[command(name = "bigpast", version, about = "Bayesian single-subject abnormality testing under the skewed Student t")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit the skewed t by maximum likelihood or maximum posterior.
    Fit(commands::FitCmd),
    /// Test whether a subject belongs to the control distribution.
    Test(Box<commands::TestCmd>),
    /// Goodness-of-fit test of the skewed t for a sample.
    Gof(commands::GofCmd),
    /// Evaluate a prior (and the Jeffreys Fisher block) at a parameter point.
    Prior(commands::PriorCmd),
    /// Run a named simulation preset.
    Simulate(commands::SimulateCmd),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Fit(c) => commands::fit(c),
        Command::Test(c) => commands::test(c),
        Command::Gof(c) => commands::gof(c),
        Command::Prior(c) => commands::prior(c),
        Command::Simulate(c) => commands::simulate(c),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
