//! `predrobust`: run the robust predictability test on a CSV file, simulate
//! datasets and reproduce the Monte Carlo size and power experiments.

mod config;
mod input;
mod models;
mod reproduce;
mod simulate;
mod test_cmd;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

pub const EXIT_ERROR: u8 = 1;
/// `test --gate` rejected the null at the primary level.
pub const EXIT_REJECT: u8 = 2;
/// Same value as `EX_USAGE` in sysexits.h.
pub const EXIT_USAGE: u8 = 64;

/// Bad flags or flag values; reported with exit code 64.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Result of a command that ran to completion.
pub enum Outcome {
    Done,
    Rejected,
}

#[derive(Parser)]
#[command(name = "predrobust", version, about = "Robust test for return predictability")]
struct Cli {
    /// TOML file with option defaults; command-line flags win over it.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Test H0: no predictability on a CSV with `y` and `x` columns.
    Test(test_cmd::TestArgs),
    /// Simulate a dataset and write it as CSV.
    Simulate(simulate::SimulateArgs),
    /// Reproduce a size table or a size-adjusted power curve.
    Reproduce(reproduce::ReproduceArgs),
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    let file = config::FileConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Test(args) => test_cmd::run(args, &file),
        Command::Simulate(args) => simulate::run(args, &file),
        Command::Reproduce(args) => reproduce::run(args, &file),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    match run(cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Rejected) => ExitCode::from(EXIT_REJECT),
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
