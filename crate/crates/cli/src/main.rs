mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use schwinger_core::Error;

use config::RunConfig;

#[derive(Parser)]
#[command(name = "schwinger", version, about = "Trotterized lattice Schwinger model experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration; omitted fields take their defaults
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    shots: Option<u64>,
    #[arg(long, global = true)]
    dense_limit: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Product-formula and exact trajectories from the bare vacuum
    Evolve,
    /// Step-count estimates and their scaling with N
    Bounds,
    /// Best linear protection angle for each evolution time
    AlphaSweep,
    /// Native-gate circuit for one first-order step
    Compile,
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(e.into())
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) if e.is_resource_limit() => 3,
            CliError::Core(
                Error::InvalidParams(_)
                | Error::InvalidOrder(_)
                | Error::InvalidPlan(_)
                | Error::NonIntegralSteps { .. }
                | Error::UnsupportedOrdering(_)
                | Error::Json(_),
            ) => 2,
            CliError::Core(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Core(e) if e.is_resource_limit() => write!(f, "resource limit: {e}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(s) = cli.shots {
        cfg.shots = Some(s);
    }
    if let Some(d) = cli.dense_limit {
        cfg.dense_limit = d;
    }
    if cfg.shots == Some(0) {
        return Err(CliError::Config("shots must be positive".into()));
    }
    std::fs::create_dir_all(&cli.out)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", cli.out.display())))?;
    match cli.command {
        Command::Evolve => commands::evolve(&cfg, &cli.out),
        Command::Bounds => commands::bounds(&cfg, &cli.out),
        Command::AlphaSweep => commands::alpha_sweep(&cfg, &cli.out),
        Command::Compile => commands::compile(&cfg, &cli.out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("schwinger: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
