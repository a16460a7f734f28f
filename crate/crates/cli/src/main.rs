//! `sporobs`: batch front-end for observer design, verification and
//! simulation driven by JSON scenario files.
//!
//! Exit status is 0 on success, 2 when a design or certificate is
//! infeasible or a check fails, and 1 on usage, configuration or numerical
//! errors.

mod config;
mod run;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sporadic_observer::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("{0}: {1}")]
    Io(String, std::io::Error),
    #[error("{0}")]
    Core(#[from] Error),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) | CliError::Core(Error::AllInfeasible { .. } | Error::InfeasibleAtLowerBound { .. }) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "sporobs", version, about = "Observer design and verification for sporadically sampled plants")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Scenario file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; overrides `output.dir`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Also write SVG plots.
    #[arg(long, global = true)]
    pub plot: bool,
    /// Seed for random jitter; overrides `simulate.seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Design method: PropPred, PropX80, PropX8X6 or ZOH.
    #[arg(long, global = true)]
    pub method: Option<String>,
    /// `lo,hi,n,log|lin`.
    #[arg(long = "delta-grid", global = true)]
    pub delta_grid: Option<String>,
    /// Gains file (as written by `design`) for verify, simulate and export-sdpa.
    #[arg(long, global = true)]
    pub gains: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Minimise γ over the δ grid and write design.json and gains.json.
    Design,
    /// Search a certificate for given gains and write verify.json.
    Verify,
    /// Simulate the hybrid error system and write arc.csv.
    Simulate,
    /// γ against T2 over `sampling.t2_range`; writes pareto.csv.
    Pareto,
    /// Write the LMI problem at one δ as SDPA sparse format.
    ExportSdpa,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run::run(&cli) {
        Ok(msg) => {
            println!("{msg}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
