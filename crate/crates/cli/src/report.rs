use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use tailcheck::harness::{load, read_log, ExperimentResult, ScenarioSpec};

use crate::table::decomposition_table;

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    /// Result files: `.json` documents or `.jsonl` logs
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
}

fn describe(r: &ExperimentResult) -> String {
    let scenario = match &r.config.scenario {
        ScenarioSpec::Roc(p) => format!("roc (AUC {:.4} vs {:.4})", p.true_auc_x(), p.true_auc_y()),
        ScenarioSpec::Survival(p) => format!("survival ({}/{} per group)", p.n_a, p.n_b),
        ScenarioSpec::Binomial(b) => {
            format!("binomial (n = {}, p = {}, theta0 = {})", b.n, b.p, b.theta0)
        }
    };
    format!(
        "{}: {scenario}, alpha = {}, seed = {}",
        r.config.test.name(),
        r.config.alpha,
        r.config.master_seed
    )
}

pub fn report(args: &ReportArgs) -> Result<()> {
    let mut results: Vec<(String, ExperimentResult)> = Vec::new();
    for path in &args.inputs {
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let is_log = path.extension().is_some_and(|e| e == "jsonl");
        if is_log {
            let log = read_log(path).with_context(|| format!("{}", path.display()))?;
            for (i, r) in log.into_iter().enumerate() {
                results.push((format!("{stem}[{}]", i + 1), r));
            }
        } else {
            results.push((
                stem,
                load(path).with_context(|| format!("{}", path.display()))?,
            ));
        }
    }
    for (name, r) in &results {
        println!("{name}: {}", describe(r));
    }
    println!();
    let columns: Vec<(String, &ExperimentResult)> =
        results.iter().map(|(n, r)| (n.clone(), r)).collect();
    print!("{}", decomposition_table(&columns));
    Ok(())
}
