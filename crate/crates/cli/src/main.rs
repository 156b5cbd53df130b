//! `reinit`: command-line front end for the reinitialization experiments.
//!
//! Exit codes: 0 success, 2 configuration or input error, 3 numerical failure, 4 failed checks
//! under `--check`. Errors are reported as a JSON object on stderr.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use reinit_core::config::ExperimentConfig;
use reinit_core::experiment::{self, Check};
use reinit_core::Error;
use serde_json::json;

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_CHECK: u8 = 4;

#[derive(Parser)]
#[command(name = "reinit", version, about = "Level-set reinitialization solver and verification harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Audit the problem hypotheses on the sampled data.
    Audit(Args),
    /// Extract the interface, build both distance fields and cross-check them.
    Oracle(Args),
    /// Solve, then measure errors, drift, barriers and a priori estimates.
    Run(Args),
    /// Refinement table over `analysis.resolutions`.
    StudyRefine(Args),
    /// Rescaled-family table over `analysis.epsilons`.
    StudyRescale(Args),
}

#[derive(clap::Args)]
struct Args {
    /// Experiment config (JSON).
    config: PathBuf,
    /// Overrides `outputs.directory`.
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Exit with status 4 when any acceptance check fails.
    #[arg(long)]
    check: bool,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
}

enum Failure {
    Error(Error),
    Checks(Vec<Check>),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

/// Writes the outcome, prints its JSON and applies `--check`.
macro_rules! emit {
    ($outcome:expr, $args:expr, $dir:expr) => {{
        let outcome = $outcome;
        let json = outcome.json()?;
        outcome.write(&$dir)?;
        print!("{json}");
        if $args.check && !outcome.document.passed {
            Err(Failure::Checks(outcome.document.failed_checks().cloned().collect()))
        } else {
            Ok(())
        }
    }};
}

fn execute(command: &Command) -> Result<(), Failure> {
    let args = match command {
        Command::Audit(a) | Command::Oracle(a) | Command::Run(a) | Command::StudyRefine(a) | Command::StudyRescale(a) => a,
    };
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let dir = args.output_dir.clone().unwrap_or_else(|| cfg.outputs.directory.clone());
    match command {
        Command::Audit(_) => emit!(experiment::audit(&cfg)?, args, dir),
        Command::Oracle(_) => emit!(experiment::oracle(&cfg)?, args, dir),
        Command::Run(_) => emit!(experiment::run(&cfg)?, args, dir),
        Command::StudyRefine(_) => emit!(experiment::study_refine(&cfg)?, args, dir),
        Command::StudyRescale(_) => emit!(experiment::study_rescale(&cfg)?, args, dir),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Error(e)) => {
            let code = if e.is_numerical() { EXIT_NUMERICAL } else { EXIT_CONFIG };
            let obj = json!({ "error": { "kind": e.kind(), "message": e.to_string(), "exit_code": code } });
            eprintln!("{obj}");
            ExitCode::from(code)
        }
        Err(Failure::Checks(failed)) => {
            let obj = json!({ "error": { "kind": "check_failed", "message": "acceptance checks failed", "exit_code": EXIT_CHECK, "failed": failed } });
            eprintln!("{obj}");
            ExitCode::from(EXIT_CHECK)
        }
    }
}
