use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use serde::Serialize;
use tailcheck::harness::{
    records_csv, run_experiment, write_atomically, ExperimentConfig, ExperimentResult,
    ScenarioSpec, TestSpec, SCHEMA_VERSION,
};
use tailcheck::scenarios::{
    equal_median_scenario, generate_survival_dataset, RocScenarioParams, SurvivalScenarioParams,
};
use tailcheck::survival::{km_estimate, weighted_logrank, Group, WeightScheme};
use tailcheck::{decide, rng_stream, Direction};

use crate::config::{FileConfig, RunArgs, Settings};
use crate::ingest::survival_csv;
use crate::plot::km_svg;
use crate::table::{decomposition_table, rate_cell, render};

#[derive(Debug, Clone, Args)]
pub struct RocArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Permutations per Venkatraman test [default: 999]
    #[arg(long)]
    pub permutations: Option<usize>,
    /// Bootstrap resamples per AUC-difference test [default: 1000]
    #[arg(long)]
    pub boots: Option<usize>,
    /// Directory for the summary JSON files
    #[arg(long, default_value = "results")]
    pub out: PathBuf,
    /// Also write per-replication CSV files
    #[arg(long)]
    pub records: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SurvivalArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Directory for the summary JSON files
    #[arg(long, default_value = "results")]
    pub out: PathBuf,
    /// Write Kaplan-Meier curves of the crossing-hazards dataset as SVG
    #[arg(long, value_name = "FILE")]
    pub plot: Option<PathBuf>,
    /// Write the crossing-hazards dataset as CSV (`time,event,group`)
    #[arg(long, value_name = "FILE")]
    pub data: Option<PathBuf>,
    /// Also write per-replication CSV of the equal-median experiment
    #[arg(long)]
    pub records: bool,
}

/// Files are only written once every computation has succeeded.
struct PendingWrites(Vec<(PathBuf, Vec<u8>)>);

impl PendingWrites {
    fn new() -> Self {
        PendingWrites(Vec::new())
    }

    fn add(&mut self, path: PathBuf, contents: impl Into<Vec<u8>>) {
        self.0.push((path, contents.into()));
    }

    fn add_result(&mut self, path: PathBuf, result: &ExperimentResult) -> Result<()> {
        let summary = ExperimentResult {
            records: None,
            ..result.statistical_part()
        };
        let mut text = tailcheck::harness::to_json(&summary)?;
        text.push('\n');
        self.add(path, text);
        Ok(())
    }

    fn commit(self) -> Result<()> {
        for (path, contents) in self.0 {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)
                    .with_context(|| format!("cannot create {}", dir.display()))?;
            }
            write_atomically(&path, &contents)
                .with_context(|| format!("cannot write {}", path.display()))?;
            eprintln!("wrote {}", path.display());
        }
        Ok(())
    }
}

fn report_timing(name: &str, r: &ExperimentResult) {
    if let Some(t) = r.timing {
        eprintln!(
            "{name}: {} reps in {:.2} s ({:.1} reps/s, {} threads)",
            r.config.n_reps, t.wall_seconds, t.reps_per_second, t.threads
        );
    }
}

pub fn simulate_roc(args: &RocArgs, file: &FileConfig) -> Result<()> {
    let s = Settings::resolve(&args.run, args.permutations, args.boots, file);
    let params = RocScenarioParams::calibrated_default();
    let base = ExperimentConfig {
        scenario: ScenarioSpec::Roc(params),
        test: TestSpec::Venkatraman {
            n_permutations: s.n_permutations,
        },
        alpha: s.alpha,
        n_reps: s.n_reps,
        master_seed: s.master_seed,
        keep_records: args.records,
    };
    let configs = [
        base.clone(),
        ExperimentConfig {
            test: TestSpec::BootstrapAuc { n_boot: s.n_boot },
            ..base
        },
    ];
    for c in &configs {
        c.validate()?;
    }

    println!(
        "crossing ROC curves: true AUC x = {:.4}, y = {:.4}, {} positive + {} negative subjects",
        params.true_auc_x(),
        params.true_auc_y(),
        params.n_pos,
        params.n_neg
    );
    let mut results = Vec::new();
    for c in &configs {
        let r = run_experiment(c)?;
        report_timing(&c.test.name(), &r);
        results.push(r);
    }
    let columns: Vec<(String, &ExperimentResult)> =
        results.iter().map(|r| (r.config.test.name(), r)).collect();
    println!("alpha = {}, seed = {}", s.alpha, s.master_seed);
    print!("{}", decomposition_table(&columns));

    let mut writes = PendingWrites::new();
    for r in &results {
        let stem = format!("roc_{}", r.config.test.name());
        writes.add_result(args.out.join(format!("{stem}.json")), r)?;
        if args.records {
            writes.add(args.out.join(format!("{stem}.csv")), records_csv(r)?);
        }
    }
    writes.commit()
}

#[derive(Debug, Serialize)]
struct CrossingSummary {
    schema_version: u32,
    master_seed: u64,
    alpha: f64,
    scenario: SurvivalScenarioParams,
    tests: Vec<CrossingTest>,
}

#[derive(Debug, Serialize)]
struct CrossingTest {
    scheme: WeightScheme,
    z: f64,
    p_value: f64,
    decision: tailcheck::DirectionalDecision,
}

/// Weighted log-rank table for one dataset. Returns the rendered table and
/// the per-scheme results.
pub fn logrank_table(
    records: &[tailcheck::survival::SurvivalRecord],
    schemes: &[WeightScheme],
    alpha: f64,
) -> Result<(
    String,
    Vec<(WeightScheme, tailcheck::survival::LogRankResult)>,
)> {
    let mut cells = vec![vec![
        "weighting".into(),
        "z".into(),
        "p".into(),
        "decision".into(),
        "reading".into(),
    ]];
    let mut out = Vec::new();
    for &scheme in schemes {
        let r = weighted_logrank(records, scheme)?;
        let decision = decide(&r.as_outcome(), alpha);
        let reading = match decision.concluded() {
            Some(Direction::Greater) => "B survives longer",
            Some(Direction::Less) => "A survives longer",
            None => "-",
        };
        cells.push(vec![
            scheme.name(),
            format!("{:.3}", r.z),
            format!("{:.3e}", r.p_value),
            decision.to_string(),
            reading.into(),
        ]);
        out.push((scheme, r));
    }
    Ok((render(&cells), out))
}

pub fn simulate_survival(args: &SurvivalArgs, file: &FileConfig) -> Result<()> {
    let s = Settings::resolve(&args.run, None, None, file);
    let em_config = ExperimentConfig {
        scenario: ScenarioSpec::Survival(equal_median_scenario()),
        test: TestSpec::MedianComparison {
            scheme: WeightScheme::GehanBreslow,
        },
        alpha: s.alpha,
        n_reps: s.n_reps,
        master_seed: s.master_seed,
        keep_records: true,
    };
    em_config.validate()?;

    // crossing hazards, one large dataset
    let crossing = SurvivalScenarioParams::crossing_default();
    let data = generate_survival_dataset(&crossing, &rng_stream(s.master_seed, 0))?;
    println!(
        "crossing hazards: n = {}/{} per group, cutoff {}, true curves cross at t = {}",
        crossing.n_a,
        crossing.n_b,
        crossing.cutoff,
        crossing
            .crossing_times()
            .iter()
            .map(|t| format!("{t:.3}"))
            .collect::<Vec<_>>()
            .join(", ")
    );
    let (table, tests) = logrank_table(&data, &WeightScheme::STANDARD, s.alpha)?;
    print!("{table}");

    // equal medians, Monte Carlo
    let em = run_experiment(&em_config)?;
    report_timing("equal medians", &em);
    let n = em.config.n_reps as f64;
    let records = em.records.as_deref().unwrap_or_default();
    let sig: Vec<_> = records
        .iter()
        .filter(|r| r.p_value.is_some_and(|p| p <= s.alpha))
        .collect();
    let sig_a_longer = sig
        .iter()
        .filter(|r| r.observed_direction == Some(Direction::Less))
        .count();
    let sig_b_longer = sig
        .iter()
        .filter(|r| r.observed_direction == Some(Direction::Greater))
        .count();
    let share = |k: usize| {
        if sig.is_empty() {
            0.0
        } else {
            k as f64 / sig.len() as f64
        }
    };
    println!();
    println!(
        "equal true medians: n = {} per group, {} reps",
        em_config_size(&em),
        em.config.n_reps
    );
    println!(
        "  Gehan-Breslow rejection rate   {}",
        rate_cell(&em.significant)
    );
    println!(
        "  P(median_A > median_B)         {:.4}",
        em.observed_directions.less as f64 / n
    );
    println!(
        "  P(median_B > median_A)         {:.4}",
        em.observed_directions.greater as f64 / n
    );
    println!(
        "  median undefined or tied       {}",
        em.observed_directions.none
    );
    println!(
        "  among rejections, medians favour A {:.4}, favour B {:.4}",
        share(sig_a_longer),
        share(sig_b_longer)
    );

    let mut writes = PendingWrites::new();
    let summary = CrossingSummary {
        schema_version: SCHEMA_VERSION,
        master_seed: s.master_seed,
        alpha: s.alpha,
        scenario: crossing.clone(),
        tests: tests
            .iter()
            .map(|(scheme, r)| CrossingTest {
                scheme: *scheme,
                z: r.z,
                p_value: r.p_value,
                decision: decide(&r.as_outcome(), s.alpha),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&summary)?;
    text.push('\n');
    writes.add(args.out.join("survival_crossing.json"), text);
    writes.add_result(args.out.join("survival_equal_median.json"), &em)?;
    if args.records {
        writes.add(
            args.out.join("survival_equal_median.csv"),
            records_csv(&em)?,
        );
    }
    if let Some(path) = &args.plot {
        let km_a = km_estimate(&data, Some(Group::A))?;
        let km_b = km_estimate(&data, Some(Group::B))?;
        let svg = km_svg(
            "Kaplan-Meier, crossing hazards",
            &[("group A", &km_a), ("group B", &km_b)],
            crossing.cutoff,
        );
        writes.add(path.clone(), svg);
    }
    if let Some(path) = &args.data {
        writes.add(path.clone(), survival_csv(&data));
    }
    writes.commit()
}

fn em_config_size(r: &ExperimentResult) -> usize {
    match &r.config.scenario {
        ScenarioSpec::Survival(p) => p.n_a,
        _ => 0,
    }
}
