//! `tailcheck`: reproduce the directional-error experiments, audit interval
//! estimators and run the tests on your own CSV data.

mod audit;
mod config;
mod ingest;
mod plot;
mod report;
mod simulate;
mod table;
mod test_data;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use config::FileConfig;

#[derive(Debug, Parser)]
#[command(
    name = "tailcheck",
    version,
    about = "Directional error audits for two-sided tests and confidence intervals"
)]
struct Cli {
    /// Worker threads for Monte Carlo runs [default: all cores]
    #[arg(long, global = true, env = "TAILCHECK_THREADS")]
    threads: Option<usize>,

    /// TOML file with defaults (alpha, n_reps, master_seed, n_permutations,
    /// n_boot, threads); command-line flags win
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Crossing ROC curves: Venkatraman's test read as an AUC comparison
    /// against the bootstrap AUC-difference test
    SimulateRoc(simulate::RocArgs),
    /// Crossing hazards under four weightings, and the equal-median experiment
    SimulateSurvival(simulate::SurvivalArgs),
    /// Exact per-tail audit of binomial interval estimators
    AuditCi(audit::AuditArgs),
    /// Apply a test to a CSV file
    #[command(subcommand)]
    Test(test_data::TestCommand),
    /// Summarise saved experiment results
    Report(report::ReportArgs),
}

fn run(cli: Cli) -> Result<()> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    if let Some(threads) = cli.threads.or(file.threads) {
        if threads == 0 {
            bail!("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("cannot configure worker threads")?;
    }
    match cli.command {
        Command::SimulateRoc(args) => simulate::simulate_roc(&args, &file),
        Command::SimulateSurvival(args) => simulate::simulate_survival(&args, &file),
        Command::AuditCi(args) => audit::audit_ci(&args),
        Command::Test(cmd) => test_data::run(&cmd, &file),
        Command::Report(args) => report::report(&args),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
