//! Monte Carlo experiment engine.
//!
//! Replication `i` draws its data from `rng_stream(master_seed, i)`; tests
//! that resample use sub-streams of that state. Replications run in parallel
//! and are aggregated by integer counts, so results do not depend on the
//! number of worker threads.

use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decision::{
    decide, DecisionCounts, Direction, DirectionalDecision, ErrorDecomposition, Rate, TestOutcome,
    TrueState,
};
use crate::error::{Error, Result};
use crate::intervals::{
    audit_intervals, ci_test_duality, Estimator, Interval, IntervalAudit, IntervalEstimator,
    IntervalMethod,
};
use crate::rng::rng_stream;
use crate::roc::{bootstrap_auc_difference_test, venkatraman_test};
use crate::scenarios::{
    generate_roc_dataset, generate_survival_dataset, BinomialScenario, RocScenarioParams,
    SurvivalScenarioParams,
};
use crate::survival::{km_estimate, median_survival, weighted_logrank, Group, WeightScheme};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScenarioSpec {
    Roc(RocScenarioParams),
    Survival(SurvivalScenarioParams),
    Binomial(BinomialScenario),
}

impl ScenarioSpec {
    pub fn true_state(&self) -> TrueState {
        match self {
            ScenarioSpec::Roc(p) => p.true_state(),
            ScenarioSpec::Survival(p) => p.true_state(),
            ScenarioSpec::Binomial(p) => p.true_state(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ScenarioSpec::Roc(_) => "roc",
            ScenarioSpec::Survival(_) => "survival",
            ScenarioSpec::Binomial(_) => "binomial",
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            ScenarioSpec::Roc(p) => p.validate(),
            ScenarioSpec::Survival(p) => p.validate(),
            ScenarioSpec::Binomial(p) => p.validate(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestSpec {
    /// Curve-equality permutation test read as an AUC comparison.
    Venkatraman {
        n_permutations: usize,
    },
    BootstrapAuc {
        n_boot: usize,
    },
    WeightedLogrank {
        scheme: WeightScheme,
    },
    /// Significance from a weighted log-rank test, direction from the sign
    /// of `median_B - median_A`.
    MedianComparison {
        scheme: WeightScheme,
    },
    /// Rejects `theta = theta0` when the interval excludes it.
    CiDuality {
        method: IntervalMethod,
    },
}

impl TestSpec {
    pub fn name(&self) -> String {
        match self {
            TestSpec::Venkatraman { .. } => "venkatraman".into(),
            TestSpec::BootstrapAuc { .. } => "bootstrap_auc".into(),
            TestSpec::WeightedLogrank { scheme } => format!("weighted_logrank({})", scheme.name()),
            TestSpec::MedianComparison { scheme } => {
                format!("median_comparison({})", scheme.name())
            }
            TestSpec::CiDuality { method } => format!("ci_duality({method})"),
        }
    }

    fn scenario_kind(&self) -> &'static str {
        match self {
            TestSpec::Venkatraman { .. } | TestSpec::BootstrapAuc { .. } => "roc",
            TestSpec::WeightedLogrank { .. } | TestSpec::MedianComparison { .. } => "survival",
            TestSpec::CiDuality { .. } => "binomial",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub scenario: ScenarioSpec,
    pub test: TestSpec,
    pub alpha: f64,
    pub n_reps: usize,
    pub master_seed: u64,
    /// Keep one record per replication in the result.
    #[serde(default)]
    pub keep_records: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_reps == 0 {
            return Err(Error::Config("n_reps must be at least 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if self.scenario.kind() != self.test.scenario_kind() {
            return Err(Error::Config(format!(
                "test {} needs a {} scenario, got {}",
                self.test.name(),
                self.test.scenario_kind(),
                self.scenario.kind()
            )));
        }
        match self.test {
            TestSpec::Venkatraman { n_permutations: 0 } => {
                return Err(Error::Config("n_permutations must be at least 1".into()))
            }
            TestSpec::BootstrapAuc { n_boot } if n_boot < 100 => {
                return Err(Error::Config("n_boot must be at least 100".into()))
            }
            TestSpec::WeightedLogrank { scheme } | TestSpec::MedianComparison { scheme } => {
                scheme.validate()?
            }
            _ => {}
        }
        self.scenario.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplicationRecord {
    pub rep: u64,
    pub statistic: f64,
    /// Absent for interval-based decisions, which have no p-value.
    pub p_value: Option<f64>,
    pub decision: DirectionalDecision,
    pub observed_direction: Option<Direction>,
}

/// Counts of the observed effect sign, regardless of significance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DirectionCounts {
    pub less: u64,
    pub greater: u64,
    pub none: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub wall_seconds: f64,
    pub reps_per_second: f64,
    pub threads: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub true_state: TrueState,
    pub decomposition: ErrorDecomposition,
    /// Share of replications with a significant test, with or without a
    /// directional conclusion.
    pub significant: Rate,
    pub observed_directions: DirectionCounts,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub records: Option<Vec<ReplicationRecord>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

impl ExperimentResult {
    /// The result without wall-clock metadata; two runs of the same config
    /// compare equal on this.
    pub fn statistical_part(&self) -> ExperimentResult {
        ExperimentResult {
            timing: None,
            ..self.clone()
        }
    }
}

/// Intervals for every outcome of a binomial scenario, built once per experiment.
fn interval_table(config: &ExperimentConfig) -> Result<Option<Vec<Interval>>> {
    match (&config.scenario, &config.test) {
        (ScenarioSpec::Binomial(b), TestSpec::CiDuality { method }) => Ok(Some(
            Estimator::new(*method, config.alpha)?.all_intervals(b.n)?,
        )),
        _ => Ok(None),
    }
}

fn run_one(
    config: &ExperimentConfig,
    intervals: Option<&[Interval]>,
    rep: u64,
) -> Result<(ReplicationRecord, bool)> {
    let rng = rng_stream(config.master_seed, rep);
    let alpha = config.alpha;
    let from_outcome = |o: TestOutcome| {
        let decision = decide(&o, alpha);
        (
            ReplicationRecord {
                rep,
                statistic: o.statistic,
                p_value: Some(o.p_value),
                decision,
                observed_direction: o.observed_direction,
            },
            o.p_value <= alpha,
        )
    };
    Ok(match (&config.scenario, &config.test) {
        (ScenarioSpec::Roc(p), TestSpec::Venkatraman { n_permutations }) => {
            let data = generate_roc_dataset(p, &rng)?;
            from_outcome(venkatraman_test(&data, *n_permutations, &rng)?.as_auc_outcome())
        }
        (ScenarioSpec::Roc(p), TestSpec::BootstrapAuc { n_boot }) => {
            let data = generate_roc_dataset(p, &rng)?;
            from_outcome(bootstrap_auc_difference_test(&data, *n_boot, &rng)?)
        }
        (ScenarioSpec::Survival(p), TestSpec::WeightedLogrank { scheme }) => {
            let data = generate_survival_dataset(p, &rng)?;
            from_outcome(weighted_logrank(&data, *scheme)?.as_outcome())
        }
        (ScenarioSpec::Survival(p), TestSpec::MedianComparison { scheme }) => {
            let data = generate_survival_dataset(p, &rng)?;
            let test = weighted_logrank(&data, *scheme)?;
            let med_a = median_survival(&km_estimate(&data, Some(Group::A))?);
            let med_b = median_survival(&km_estimate(&data, Some(Group::B))?);
            let diff = match (med_a, med_b) {
                (Some(a), Some(b)) => b - a,
                _ => 0.0,
            };
            from_outcome(TestOutcome::new(diff, test.p_value, Direction::of(diff)))
        }
        (ScenarioSpec::Binomial(b), TestSpec::CiDuality { .. }) => {
            let x = b.draw(&rng)?;
            let ci = intervals.expect("interval table for a binomial scenario")[x];
            let decision = ci_test_duality(&ci, b.theta0);
            let statistic = x as f64 / b.n as f64 - b.theta0;
            (
                ReplicationRecord {
                    rep,
                    statistic,
                    p_value: None,
                    decision,
                    observed_direction: Direction::of(statistic),
                },
                decision != DirectionalDecision::FailToReject,
            )
        }
        _ => unreachable!("validated scenario/test pairing"),
    })
}

/// Runs on the current rayon pool.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let start = Instant::now();
    let intervals = interval_table(config)?;
    let outcomes: Vec<(ReplicationRecord, bool)> = (0..config.n_reps as u64)
        .into_par_iter()
        .map(|rep| run_one(config, intervals.as_deref(), rep))
        .collect::<Result<_>>()?;
    let elapsed = start.elapsed().as_secs_f64();

    let truth = config.scenario.true_state();
    let counts: DecisionCounts = outcomes.iter().map(|(r, _)| r.decision).collect();
    let n_sig = outcomes.iter().filter(|(_, s)| *s).count() as u64;
    let mut dirs = DirectionCounts::default();
    for (r, _) in &outcomes {
        match r.observed_direction {
            Some(Direction::Less) => dirs.less += 1,
            Some(Direction::Greater) => dirs.greater += 1,
            None => dirs.none += 1,
        }
    }
    let n = config.n_reps as u64;
    Ok(ExperimentResult {
        schema_version: SCHEMA_VERSION,
        config: config.clone(),
        true_state: truth,
        decomposition: ErrorDecomposition::from_counts(truth, counts),
        significant: Rate::new(n_sig, n),
        observed_directions: dirs,
        records: config
            .keep_records
            .then(|| outcomes.into_iter().map(|(r, _)| r).collect()),
        timing: Some(Timing {
            wall_seconds: elapsed,
            reps_per_second: n as f64 / elapsed.max(1e-12),
            threads: rayon::current_num_threads(),
        }),
    })
}

/// Runs on a dedicated pool with `threads` workers.
pub fn run_experiment_with_threads(
    config: &ExperimentConfig,
    threads: usize,
) -> Result<ExperimentResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?;
    pool.install(|| run_experiment(config))
}

/// Exact audits over a grid of true proportions, with worst cases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditTable {
    pub method: IntervalMethod,
    pub n: usize,
    pub alpha: f64,
    pub rows: Vec<IntervalAudit>,
    pub worst_alpha_l: f64,
    pub worst_alpha_u: f64,
    /// Largest `alpha_l + alpha_u` over the grid.
    pub worst_total: f64,
    pub mean_width: f64,
}

impl AuditTable {
    pub fn worst_per_tail(&self) -> f64 {
        self.worst_alpha_l.max(self.worst_alpha_u)
    }
}

pub fn run_ci_audit_sweep(
    method: IntervalMethod,
    n: usize,
    alpha: f64,
    p_grid: &[f64],
) -> Result<AuditTable> {
    if p_grid.is_empty() {
        return Err(Error::InvalidArgument("p grid is empty".into()));
    }
    if let Some(p) = p_grid.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::InvalidArgument(format!(
            "grid value {p} outside [0, 1]"
        )));
    }
    let estimator = Estimator::new(method, alpha)?;
    let intervals = (0..=n)
        .into_par_iter()
        .map(|x| estimator.interval(x, n))
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<IntervalAudit> = p_grid
        .par_iter()
        .map(|&p| audit_intervals(&intervals, n, p))
        .collect();
    let fold = |f: fn(&IntervalAudit) -> f64| rows.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
    Ok(AuditTable {
        method,
        n,
        alpha,
        worst_alpha_l: fold(|r| r.alpha_l_realized),
        worst_alpha_u: fold(|r| r.alpha_u_realized),
        worst_total: fold(|r| r.alpha_l_realized + r.alpha_u_realized),
        mean_width: rows.iter().map(|r| r.expected_width).sum::<f64>() / rows.len() as f64,
        rows,
    })
}

/// Writes through a temporary sibling file and a rename, so `path` either
/// keeps its old contents or holds the complete new ones.
pub fn write_atomically(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::Io(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp", file_name.to_string_lossy()));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn to_json(result: &ExperimentResult) -> Result<String> {
    serde_json::to_string_pretty(result).map_err(|e| Error::Io(e.to_string()))
}

fn parse_err(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        message: e.to_string(),
    }
}

pub fn from_json(text: &str) -> Result<ExperimentResult> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(parse_err)?;
    let found = value
        .get("schema_version")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| Error::Parse {
            line: 1,
            message: "missing schema_version".into(),
        })?;
    if found != SCHEMA_VERSION as u64 {
        return Err(Error::SchemaVersion {
            expected: SCHEMA_VERSION,
            found: found as u32,
        });
    }
    serde_json::from_str(text).map_err(parse_err)
}

/// Writes the result as one JSON document. The file appears only once it
/// is complete.
pub fn persist(result: &ExperimentResult, path: &Path) -> Result<()> {
    let mut text = to_json(result)?;
    text.push('\n');
    write_atomically(path, text.as_bytes())
}

pub fn load(path: &Path) -> Result<ExperimentResult> {
    from_json(&fs::read_to_string(path)?)
}

/// Appends the result as a single line to a JSON-lines log.
pub fn append_log(result: &ExperimentResult, path: &Path) -> Result<()> {
    let mut line = serde_json::to_string(result).map_err(|e| Error::Io(e.to_string()))?;
    line.push('\n');
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    // one write call per record keeps concurrent appenders from interleaving
    f.write_all(line.as_bytes())?;
    Ok(())
}

pub fn read_log(path: &Path) -> Result<Vec<ExperimentResult>> {
    let text = fs::read_to_string(path)?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            from_json(l).map_err(|e| match e {
                Error::Parse { message, .. } => Error::Parse {
                    line: i + 1,
                    message,
                },
                other => other,
            })
        })
        .collect()
}

pub const RECORDS_HEADER: &str = "rep,statistic,p_value,decision,true_state";

/// Per-replication records as CSV; fails when the result kept none.
pub fn records_csv(result: &ExperimentResult) -> Result<String> {
    let records = result
        .records
        .as_ref()
        .ok_or_else(|| Error::Config("experiment was run without keep_records".into()))?;
    let mut out = String::from(RECORDS_HEADER);
    out.push('\n');
    for r in records {
        let p = r.p_value.map(|p| p.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.rep, r.statistic, p, r.decision, result.true_state
        ));
    }
    Ok(out)
}

pub fn write_records_csv(result: &ExperimentResult, path: &Path) -> Result<()> {
    write_atomically(path, records_csv(result)?.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::equal_median_scenario;

    fn binomial_config() -> ExperimentConfig {
        ExperimentConfig {
            scenario: ScenarioSpec::Binomial(BinomialScenario {
                n: 30,
                p: 0.3,
                theta0: 0.3,
            }),
            test: TestSpec::CiDuality {
                method: IntervalMethod::CpEqual,
            },
            alpha: 0.05,
            n_reps: 200,
            master_seed: 11,
            keep_records: true,
        }
    }

    #[test]
    fn mismatched_test_is_rejected_before_running() {
        let mut c = binomial_config();
        c.test = TestSpec::WeightedLogrank {
            scheme: WeightScheme::LogRank,
        };
        assert!(matches!(run_experiment(&c), Err(Error::Config(_))));
        let mut c = binomial_config();
        c.n_reps = 0;
        assert!(matches!(run_experiment(&c), Err(Error::Config(_))));
    }

    #[test]
    fn rerun_is_identical() {
        let c = binomial_config();
        let a = run_experiment(&c).unwrap();
        let b = run_experiment(&c).unwrap();
        assert_eq!(a.statistical_part(), b.statistical_part());
        assert_eq!(a.decomposition.total_count(), 200);
    }

    #[test]
    fn records_csv_has_header() {
        let r = run_experiment(&binomial_config()).unwrap();
        let csv = records_csv(&r).unwrap();
        assert!(csv.starts_with("rep,statistic,p_value,decision,true_state\n"));
        assert_eq!(csv.lines().count(), 201);
    }

    #[test]
    fn median_comparison_runs_small() {
        let c = ExperimentConfig {
            scenario: ScenarioSpec::Survival(equal_median_scenario().with_group_size(50)),
            test: TestSpec::MedianComparison {
                scheme: WeightScheme::GehanBreslow,
            },
            alpha: 0.05,
            n_reps: 20,
            master_seed: 1,
            keep_records: false,
        };
        let r = run_experiment(&c).unwrap();
        assert_eq!(r.true_state, TrueState::Null);
        assert_eq!(
            r.observed_directions.less + r.observed_directions.greater + r.observed_directions.none,
            20
        );
    }

    #[test]
    fn audit_sweep_rejects_bad_grid() {
        assert!(run_ci_audit_sweep(IntervalMethod::Wald, 10, 0.05, &[]).is_err());
        assert!(run_ci_audit_sweep(IntervalMethod::Wald, 10, 0.05, &[1.5]).is_err());
    }
}
