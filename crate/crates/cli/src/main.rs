//! `routebench`: dataset creation, optimal baselines, experiment runs and
//! report tables.
//!
//! Exit codes: 0 success, 1 usage error, 2 environment error (missing
//! files, credentials, I/O), 3 some runs or solves failed.

mod config;
mod dataset;
mod providers;
mod report;
mod run;
mod solve;
mod summarize;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

use routebench_core::exact::ExactError;
use routebench_core::instance_io::IoError;
use routebench_core::llm::LlmError;
use routebench_core::metrics::MetricsError;
use routebench_core::pipeline::PipelineError;

#[derive(Debug, Parser)]
#[command(name = "routebench", version, about = "Robot-routing benchmark for LLM-generated solvers")]
struct Cli {
    /// Harness configuration (JSON). Flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Create or import a dataset.
    #[command(subcommand)]
    Dataset(dataset::DatasetCommand),
    /// Compute optimal-value certificates for a dataset.
    Solve(solve::SolveArgs),
    /// Run the code-generation experiment grid.
    Run(run::RunArgs),
    /// Aggregate run records into report tables.
    Report(report::ReportArgs),
    /// Summarize a paper into a context asset.
    Summarize(summarize::SummarizeArgs),
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Environment(String),
    #[error("{0}")]
    Partial(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Environment(_) => 2,
            CliError::Partial(_) => 3,
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Environment(e.to_string())
    }
}

impl From<LlmError> for CliError {
    fn from(e: LlmError) -> Self {
        CliError::Environment(e.to_string())
    }
}

impl From<MetricsError> for CliError {
    fn from(e: MetricsError) -> Self {
        match e {
            MetricsError::MixedExperiments(_) => CliError::Usage(format!("{e}; pick one with --experiment")),
            other => CliError::Environment(other.to_string()),
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Parameter(_) => CliError::Usage(e.to_string()),
            other => CliError::Environment(other.to_string()),
        }
    }
}

impl From<ExactError> for CliError {
    fn from(e: ExactError) -> Self {
        CliError::Usage(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn dispatch(cli: Cli) -> CliResult<()> {
    let cfg = match &cli.config {
        Some(path) => config::HarnessConfig::load(path)?,
        None => config::HarnessConfig::default(),
    };
    match cli.command {
        Command::Dataset(cmd) => dataset::execute(cmd, &cfg),
        Command::Solve(args) => solve::execute(args, &cfg),
        Command::Run(args) => run::execute(args, &cfg),
        Command::Report(args) => report::execute(args, &cfg),
        Command::Summarize(args) => summarize::execute(args, &cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
