use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Subcommand, ValueEnum};
use tailcheck::roc::{bootstrap_auc_difference_test, naive_auc_direction, venkatraman_test};
use tailcheck::survival::WeightScheme;
use tailcheck::{decide, rng_stream};

use crate::config::{FileConfig, RunArgs, Settings};
use crate::ingest::{read_roc, read_survival};
use crate::simulate::logrank_table;

pub const VENKATRAMAN_WARNING: &str = "warning: Venkatraman's test compares whole ROC curves. A significant \
result says the curves differ somewhere, not which marker has the larger AUC, so the directional decision \
above has no coherent interpretation. Use the bootstrap AUC-difference test (--method bootstrap) for a \
directional claim about AUCs.";

#[derive(Debug, Clone, Subcommand)]
pub enum TestCommand {
    /// Compare the AUCs of two markers measured on the same subjects
    /// (CSV header `class,marker_x,marker_y`)
    Roc(RocTestArgs),
    /// Compare survival of groups A and B (CSV header `time,event,group`)
    Survival(SurvivalTestArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RocMethod {
    Venkatraman,
    Bootstrap,
}

#[derive(Debug, Clone, Args)]
pub struct RocTestArgs {
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = RocMethod::Venkatraman)]
    pub method: RocMethod,
    /// Significance level [default: 0.05]
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Seed for permutations or resamples [default: 2021]
    #[arg(long)]
    pub seed: Option<u64>,
    /// [default: 999]
    #[arg(long)]
    pub permutations: Option<usize>,
    /// [default: 1000]
    #[arg(long)]
    pub boots: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct SurvivalTestArgs {
    pub input: PathBuf,
    /// log-rank, gehan-breslow, tarone-ware or fleming-harrington(rho,gamma);
    /// repeatable [default: the first three and fleming-harrington(0,1)]
    #[arg(long = "scheme", value_name = "NAME")]
    pub schemes: Vec<WeightScheme>,
    /// Significance level [default: 0.05]
    #[arg(long)]
    pub alpha: Option<f64>,
}

pub fn run(cmd: &TestCommand, file: &FileConfig) -> Result<()> {
    match cmd {
        TestCommand::Roc(a) => test_roc(a, file),
        TestCommand::Survival(a) => test_survival(a, file),
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        anyhow::bail!("alpha must lie in (0, 1), got {alpha}");
    }
    Ok(())
}

fn test_roc(a: &RocTestArgs, file: &FileConfig) -> Result<()> {
    let run = RunArgs {
        alpha: a.alpha,
        reps: None,
        seed: a.seed,
    };
    let s = Settings::resolve(&run, a.permutations, a.boots, file);
    check_alpha(s.alpha)?;
    let data = read_roc(&a.input)?;
    let rng = rng_stream(s.master_seed, 0);
    println!(
        "subjects: {} positive, {} negative",
        data.n_positive(),
        data.n_negative()
    );
    match a.method {
        RocMethod::Venkatraman => {
            let r = venkatraman_test(&data, s.n_permutations, &rng)?;
            println!("test: venkatraman ({} permutations)", r.n_permutations);
            println!("auc_x: {:.6}", r.auc_x);
            println!("auc_y: {:.6}", r.auc_y);
            println!("statistic: {:.6}", r.e_obs);
            println!("p_value: {:.6}", r.p_value);
            println!("decision: {}", naive_auc_direction(&r, s.alpha));
            eprintln!("{VENKATRAMAN_WARNING}");
        }
        RocMethod::Bootstrap => {
            let o = bootstrap_auc_difference_test(&data, s.n_boot, &rng)?;
            println!("test: bootstrap_auc ({} resamples)", s.n_boot);
            println!("statistic (auc_x - auc_y): {:.6}", o.statistic);
            println!("p_value: {:.6}", o.p_value);
            println!("decision: {}", decide(&o, s.alpha));
        }
    }
    Ok(())
}

fn test_survival(a: &SurvivalTestArgs, file: &FileConfig) -> Result<()> {
    let alpha = a
        .alpha
        .or(file.alpha)
        .unwrap_or(crate::config::DEFAULT_ALPHA);
    check_alpha(alpha)?;
    let records = read_survival(&a.input)?;
    let schemes = if a.schemes.is_empty() {
        WeightScheme::STANDARD.to_vec()
    } else {
        a.schemes.clone()
    };
    let n_a = records
        .iter()
        .filter(|r| r.group == tailcheck::survival::Group::A)
        .count();
    println!(
        "records: {} in group A, {} in group B",
        n_a,
        records.len() - n_a
    );
    let (table, _) = logrank_table(&records, &schemes, alpha)?;
    print!("{table}");
    println!("z > 0: group A has more events than expected, i.e. group B survives longer under that weighting");
    Ok(())
}
