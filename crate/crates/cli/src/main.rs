//! Batch front end. A run is fully described by one JSON config; the flags
//! only locate it, redirect the artifact directory, or silence progress
//! lines. Exit codes: 0 ok, 2 config error, 3 property failure, 4 numerical
//! failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use kdvflat_core::Error as CoreError;

mod airy_run;
mod artifacts;
mod config;
mod control;
mod reach;
mod simulate;
mod verify;

use config::{Command, RunConfig};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Property(String),
    Numerical(String),
}

impl CliError {
    /// Core errors raised while building objects straight from config
    /// values are config errors; everything else keeps its own class.
    pub fn from_core_config(e: CoreError) -> Self {
        CliError::Config(e.to_string())
    }

    pub fn from_core(e: CoreError) -> Self {
        match e {
            CoreError::InvalidArgument(_) | CoreError::Domain(_) => {
                CliError::Config(e.to_string())
            }
            CoreError::NotReachable(_)
            | CoreError::DepthExceeded(_)
            | CoreError::DivergenceRisk(_) => CliError::Property(e.to_string()),
            CoreError::Unstable(_)
            | CoreError::Overflow(_)
            | CoreError::InsufficientResolution(_)
            | CoreError::SingularJet
            | CoreError::SingularMatrix => CliError::Numerical(e.to_string()),
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Property(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Property(m) | CliError::Numerical(m) => m,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "kdvflat",
    about = "Flatness-based boundary control runs for a linear KdV equation"
)]
struct Cli {
    /// Path to the JSON run configuration
    #[arg(long)]
    config: PathBuf,
    /// Override the config's output directory
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Suppress progress lines (artifacts are still written)
    #[arg(long)]
    quiet: bool,
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    let cfg = RunConfig::load(&cli.config)?;
    let out = cli
        .out_dir
        .clone()
        .or_else(|| cfg.out_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    match cfg.command {
        Command::NullControl => control::run(&cfg, &out, cli.quiet),
        Command::Reach => reach::run(&cfg, &out, cli.quiet),
        Command::Simulate => simulate::run(&cfg, &out, cli.quiet),
        Command::Airy => airy_run::run(&cfg, &out, cli.quiet),
        Command::Verify => verify::run(&cfg, &out, cli.quiet),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("kdvflat: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
