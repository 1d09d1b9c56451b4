//! Data-generating processes with known truth.
//!
//! Each scenario can report the [`TrueState`] of the estimand it is audited
//! against, computed from closed forms rather than from simulated data.
//! Frozen default parameters live in the TOML files under `configs/`.

use rand::Rng;
use rand_distr::{Binomial, Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::decision::{Direction, DirectionalDecision, ErrorDecomposition, TrueState};
use crate::error::{Error, Result};
use crate::rng::RngState;
use crate::roc::{Class, PairedDiagnosticDataset, Subject};
use crate::stats::{normal_cdf, normal_quantile};
use crate::survival::{Group, SurvivalRecord};

const ROC_DEFAULT_TOML: &str = include_str!("../configs/roc_default.toml");
const CROSSING_SURVIVAL_TOML: &str = include_str!("../configs/crossing_survival.toml");
const EQUAL_MEDIAN_TOML: &str = include_str!("../configs/equal_median.toml");

/// Differences in analytic criteria smaller than this count as no effect.
const TRUTH_TOL: f64 = 1e-9;

/// AUC of a binormal marker: negatives `N(0, 1)`, positives `N(mu, sigma^2)`
/// on the log scale.
pub fn true_auc(mu: f64, sigma: f64) -> f64 {
    normal_cdf(mu / (1.0 + sigma * sigma).sqrt())
}

/// Log-normal markers for a paired diagnostic study. Negatives have log
/// location 0 and spread 1 for both markers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocScenarioParams {
    pub mu_x: f64,
    pub sigma_x: f64,
    pub mu_y: f64,
    pub sigma_y: f64,
    /// Within-class correlation of the two latent log-markers.
    pub rho: f64,
    pub n_pos: usize,
    pub n_neg: usize,
}

impl RocScenarioParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.mu_x, self.sigma_x, self.mu_y, self.sigma_y, self.rho]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.sigma_x <= 0.0 || self.sigma_y <= 0.0 {
            return Err(Error::Config(
                "ROC scenario spreads must be finite and positive".into(),
            ));
        }
        if !(-1.0..=1.0).contains(&self.rho) {
            return Err(Error::Config(format!(
                "rho must lie in [-1, 1], got {}",
                self.rho
            )));
        }
        if self.n_pos == 0 || self.n_neg == 0 {
            return Err(Error::Config(
                "ROC scenario needs at least one subject per class".into(),
            ));
        }
        Ok(())
    }

    pub fn true_auc_x(&self) -> f64 {
        true_auc(self.mu_x, self.sigma_x)
    }

    pub fn true_auc_y(&self) -> f64 {
        true_auc(self.mu_y, self.sigma_y)
    }

    /// Sign of `AUC_x - AUC_y`.
    pub fn true_state(&self) -> TrueState {
        let diff = self.true_auc_x() - self.true_auc_y();
        if diff.abs() <= TRUTH_TOL {
            TrueState::Null
        } else {
            TrueState::Effect(Direction::of(diff).expect("non-zero"))
        }
    }

    /// Binormal ROC value `TPR(fpr)` of marker x or y.
    pub fn true_tpr(&self, fpr: f64, marker_y: bool) -> f64 {
        let (mu, sigma) = if marker_y {
            (self.mu_y, self.sigma_y)
        } else {
            (self.mu_x, self.sigma_x)
        };
        normal_cdf((mu + normal_quantile(1.0 - fpr)) / sigma)
    }

    /// The calibrated crossing-curves scenario shipped in `configs/`.
    pub fn calibrated_default() -> Self {
        let spec: RocCalibration = load_frozen(ROC_DEFAULT_TOML, "roc_default.toml");
        spec.build().expect("frozen ROC calibration is valid")
    }

    /// Both markers share the law of marker x, so the curves coincide.
    pub fn null_counterpart(&self) -> Self {
        RocScenarioParams {
            mu_y: self.mu_x,
            sigma_y: self.sigma_x,
            ..*self
        }
    }
}

fn load_frozen<T: for<'de> Deserialize<'de>>(text: &str, name: &str) -> T {
    toml::from_str(text).unwrap_or_else(|e| panic!("frozen config {name} is invalid: {e}"))
}

/// Calibration inputs for a crossing-curves ROC scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocCalibration {
    pub target_auc_x: f64,
    pub target_auc_y: f64,
    pub sigma_y: f64,
    pub rho: f64,
    pub n_pos: usize,
    pub n_neg: usize,
}

impl RocCalibration {
    pub fn build(&self) -> Result<RocScenarioParams> {
        let mut p =
            calibrate_roc_scenario(self.target_auc_x, self.target_auc_y, self.sigma_y, self.rho)?;
        p.n_pos = self.n_pos;
        p.n_neg = self.n_neg;
        p.validate()?;
        Ok(p)
    }
}

/// Sets `sigma_x = 1` and solves the two locations so the markers hit the
/// target AUCs. Sizes default to 100 per class.
pub fn calibrate_roc_scenario(
    target_auc_x: f64,
    target_auc_y: f64,
    sigma_y: f64,
    rho: f64,
) -> Result<RocScenarioParams> {
    for t in [target_auc_x, target_auc_y] {
        if !(0.5..1.0).contains(&t) {
            return Err(Error::Unattainable(format!(
                "target AUC {t} outside [0.5, 1)"
            )));
        }
    }
    if !(sigma_y > 0.0 && sigma_y.is_finite()) || sigma_y == 1.0 {
        return Err(Error::InvalidArgument(format!(
            "sigma_y must be positive and differ from 1 for the curves to cross, got {sigma_y}"
        )));
    }
    let locate = |target: f64, sigma: f64| normal_quantile(target) * (1.0 + sigma * sigma).sqrt();
    let params = RocScenarioParams {
        mu_x: locate(target_auc_x, 1.0),
        sigma_x: 1.0,
        mu_y: locate(target_auc_y, sigma_y),
        sigma_y,
        rho,
        n_pos: 100,
        n_neg: 100,
    };
    params.validate()?;
    Ok(params)
}

fn correlated_normals<R: Rng>(g: &mut R, rho: f64) -> (f64, f64) {
    let a: f64 = g.sample(StandardNormal);
    let b: f64 = g.sample(StandardNormal);
    (a, rho * a + (1.0 - rho * rho).max(0.0).sqrt() * b)
}

/// Negatives first, then positives.
pub fn generate_roc_dataset(
    params: &RocScenarioParams,
    rng: &RngState,
) -> Result<PairedDiagnosticDataset> {
    params.validate()?;
    let mut g = rng.generator();
    let mut subjects = Vec::with_capacity(params.n_pos + params.n_neg);
    for _ in 0..params.n_neg {
        let (zx, zy) = correlated_normals(&mut g, params.rho);
        subjects.push(Subject {
            class: Class::Negative,
            marker_x: zx.exp(),
            marker_y: zy.exp(),
        });
    }
    for _ in 0..params.n_pos {
        let (zx, zy) = correlated_normals(&mut g, params.rho);
        subjects.push(Subject {
            class: Class::Positive,
            marker_x: (params.mu_x + params.sigma_x * zx).exp(),
            marker_y: (params.mu_y + params.sigma_y * zy).exp(),
        });
    }
    PairedDiagnosticDataset::new(subjects)
}

/// Piecewise-constant hazard: `hazards[k]` applies on
/// `[breakpoints[k-1], breakpoints[k])`, the last rate to infinity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseHazard {
    #[serde(default)]
    pub breakpoints: Vec<f64>,
    pub hazards: Vec<f64>,
}

impl PiecewiseHazard {
    pub fn new(breakpoints: Vec<f64>, hazards: Vec<f64>) -> Result<Self> {
        let h = PiecewiseHazard {
            breakpoints,
            hazards,
        };
        h.validate()?;
        Ok(h)
    }

    pub fn constant(rate: f64) -> Result<Self> {
        Self::new(Vec::new(), vec![rate])
    }

    pub fn validate(&self) -> Result<()> {
        if self.hazards.len() != self.breakpoints.len() + 1 {
            return Err(Error::Config(
                "need exactly one more hazard than breakpoints".into(),
            ));
        }
        if self.hazards.iter().any(|&h| !(h >= 0.0 && h.is_finite())) {
            return Err(Error::Config(
                "hazards must be finite and non-negative".into(),
            ));
        }
        if !self.hazards.iter().any(|&h| h > 0.0) {
            return Err(Error::Config("at least one hazard must be positive".into()));
        }
        let increasing = self.breakpoints.windows(2).all(|w| w[1] > w[0]);
        if !increasing
            || self
                .breakpoints
                .first()
                .is_some_and(|&b| b.is_nan() || b <= 0.0)
        {
            return Err(Error::Config(
                "breakpoints must be positive and increasing".into(),
            ));
        }
        Ok(())
    }

    /// Segments as `(start, end, rate)`, the last one unbounded.
    fn segments(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let starts = std::iter::once(0.0).chain(self.breakpoints.iter().copied());
        let ends = self
            .breakpoints
            .iter()
            .copied()
            .chain(std::iter::once(f64::INFINITY));
        starts
            .zip(ends)
            .zip(self.hazards.iter().copied())
            .map(|((s, e), h)| (s, e, h))
    }

    pub fn cumulative(&self, t: f64) -> f64 {
        self.segments()
            .take_while(|&(s, _, _)| s < t)
            .map(|(s, e, h)| h * (t.min(e) - s))
            .sum()
    }

    pub fn survival(&self, t: f64) -> f64 {
        (-self.cumulative(t)).exp()
    }

    /// Time at which the cumulative hazard reaches `target`; infinite when
    /// it never does.
    pub fn inverse_cumulative(&self, target: f64) -> f64 {
        let mut acc = 0.0;
        for (s, e, h) in self.segments() {
            let span = h * (e - s);
            if acc + span >= target {
                return if h > 0.0 { s + (target - acc) / h } else { e };
            }
            acc += span;
        }
        f64::INFINITY
    }

    /// Time where survival falls to one half.
    pub fn median(&self) -> f64 {
        self.inverse_cumulative(std::f64::consts::LN_2)
    }

    /// `integral_0^tau S(t) dt`.
    pub fn restricted_mean(&self, tau: f64) -> f64 {
        let mut acc_h = 0.0f64;
        let mut area = 0.0;
        for (s, e, h) in self.segments() {
            if s >= tau {
                break;
            }
            let end = e.min(tau);
            let s0 = (-acc_h).exp();
            area += if h > 0.0 {
                s0 * (1.0 - (-h * (end - s)).exp()) / h
            } else {
                s0 * (end - s)
            };
            acc_h += h * (end - s);
        }
        area
    }
}

/// Which survival summary decides which group is "better".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SurvivalCriterion {
    #[default]
    Median,
    RestrictedMean,
    /// Survival probability at the administrative cutoff.
    LongTermSurvival,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalScenarioParams {
    pub group_a: PiecewiseHazard,
    pub group_b: PiecewiseHazard,
    /// Administrative censoring time.
    pub cutoff: f64,
    pub n_a: usize,
    pub n_b: usize,
    #[serde(default)]
    pub criterion: SurvivalCriterion,
}

impl SurvivalScenarioParams {
    pub fn validate(&self) -> Result<()> {
        self.group_a.validate()?;
        self.group_b.validate()?;
        if !(self.cutoff > 0.0 && self.cutoff.is_finite()) {
            return Err(Error::Config("cutoff must be positive".into()));
        }
        if self.n_a == 0 || self.n_b == 0 {
            return Err(Error::Config(
                "each group needs at least one subject".into(),
            ));
        }
        Ok(())
    }

    pub fn hazard(&self, group: Group) -> &PiecewiseHazard {
        match group {
            Group::A => &self.group_a,
            Group::B => &self.group_b,
        }
    }

    pub fn criterion_value(&self, group: Group) -> f64 {
        match self.criterion {
            SurvivalCriterion::Median => self.hazard(group).median(),
            SurvivalCriterion::RestrictedMean => self.hazard(group).restricted_mean(self.cutoff),
            SurvivalCriterion::LongTermSurvival => self.hazard(group).survival(self.cutoff),
        }
    }

    /// `Effect(Greater)` when group B is better on the chosen criterion.
    pub fn true_state(&self) -> TrueState {
        let (a, b) = (
            self.criterion_value(Group::A),
            self.criterion_value(Group::B),
        );
        let diff = b - a;
        if diff.abs() <= TRUTH_TOL || (a.is_infinite() && b.is_infinite()) {
            TrueState::Null
        } else {
            TrueState::Effect(Direction::of(diff).expect("non-zero"))
        }
    }

    pub fn with_group_size(mut self, n: usize) -> Self {
        self.n_a = n;
        self.n_b = n;
        self
    }

    /// Frozen crossing-hazards scenario: A does well early and badly late, B
    /// the reverse.
    pub fn crossing_default() -> Self {
        load_frozen(CROSSING_SURVIVAL_TOML, "crossing_survival.toml")
    }

    /// Crossing time of the two true survival curves within `(0, cutoff]`.
    pub fn crossing_times(&self) -> Vec<f64> {
        let steps = 100_000;
        let diff = |t: f64| self.group_a.survival(t) - self.group_b.survival(t);
        let mut out = Vec::new();
        let mut prev_t = self.cutoff / steps as f64;
        let mut prev = diff(prev_t);
        for k in 2..=steps {
            let t = self.cutoff * k as f64 / steps as f64;
            let d = diff(t);
            if d != 0.0 && prev != 0.0 && d.signum() != prev.signum() {
                let (mut lo, mut hi) = (prev_t, t);
                for _ in 0..100 {
                    let mid = 0.5 * (lo + hi);
                    if diff(mid).signum() == prev.signum() {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                out.push(0.5 * (lo + hi));
            }
            prev_t = t;
            prev = d;
        }
        out
    }
}

/// Inputs of the equal-median construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EqualMedianSpec {
    pub median: f64,
    /// Time at which group B's hazard drops.
    pub switch_time: f64,
    pub early_hazard_b: f64,
    /// From here on group B's survival coincides with group A's.
    pub rejoin_time: f64,
    pub cutoff: f64,
    pub n_per_group: usize,
}

impl EqualMedianSpec {
    /// Group A: constant hazard with the requested median. Group B: a high
    /// hazard until `switch_time`, a low one until `rejoin_time`, then A's
    /// hazard. The low rate is the one that makes both cumulative hazards
    /// meet at `rejoin_time`, so the curves agree around the median.
    pub fn build(&self) -> Result<SurvivalScenarioParams> {
        let ln2 = std::f64::consts::LN_2;
        if !(self.switch_time > 0.0
            && self.switch_time < self.rejoin_time
            && self.rejoin_time <= self.median)
        {
            return Err(Error::Config(
                "need 0 < switch_time < rejoin_time <= median".into(),
            ));
        }
        let lambda_a = ln2 / self.median;
        if self.early_hazard_b <= lambda_a {
            return Err(Error::Config(
                "early hazard of B must exceed the hazard of A".into(),
            ));
        }
        let early_mass = self.early_hazard_b * self.switch_time;
        let target = lambda_a * self.rejoin_time;
        if early_mass >= target {
            return Err(Error::Unattainable(
                "early hazard of B overshoots A before rejoin_time".into(),
            ));
        }
        let mid_b = (target - early_mass) / (self.rejoin_time - self.switch_time);
        let params = SurvivalScenarioParams {
            group_a: PiecewiseHazard::constant(lambda_a)?,
            group_b: PiecewiseHazard::new(
                vec![self.switch_time, self.rejoin_time],
                vec![self.early_hazard_b, mid_b, lambda_a],
            )?,
            cutoff: self.cutoff,
            n_a: self.n_per_group,
            n_b: self.n_per_group,
            criterion: SurvivalCriterion::Median,
        };
        params.validate()?;
        Ok(params)
    }
}

/// Groups with identical true median where B carries more early hazard.
pub fn equal_median_scenario() -> SurvivalScenarioParams {
    let spec: EqualMedianSpec = load_frozen(EQUAL_MEDIAN_TOML, "equal_median.toml");
    spec.build().expect("frozen equal-median spec is valid")
}

/// Event times by inversion of the cumulative hazard, censored at the cutoff.
/// Group A records come first.
pub fn generate_survival_dataset(
    params: &SurvivalScenarioParams,
    rng: &RngState,
) -> Result<Vec<SurvivalRecord>> {
    params.validate()?;
    let mut g = rng.generator();
    let mut out = Vec::with_capacity(params.n_a + params.n_b);
    for (group, n) in [(Group::A, params.n_a), (Group::B, params.n_b)] {
        let hazard = params.hazard(group);
        for _ in 0..n {
            let e: f64 = g.sample(Exp1);
            let t = hazard.inverse_cumulative(e);
            let rec = if t > params.cutoff {
                SurvivalRecord {
                    time: params.cutoff,
                    event: false,
                    group,
                }
            } else {
                SurvivalRecord {
                    time: t.max(f64::MIN_POSITIVE),
                    event: true,
                    group,
                }
            };
            out.push(rec);
        }
    }
    Ok(out)
}

/// Binomial draws audited against `theta0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinomialScenario {
    pub n: usize,
    pub p: f64,
    pub theta0: f64,
}

impl BinomialScenario {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || !(0.0..=1.0).contains(&self.p) || !(0.0..=1.0).contains(&self.theta0) {
            return Err(Error::Config(
                "binomial scenario needs n >= 1 and p, theta0 in [0, 1]".into(),
            ));
        }
        Ok(())
    }

    pub fn true_state(&self) -> TrueState {
        let diff = self.p - self.theta0;
        if diff.abs() <= TRUTH_TOL {
            TrueState::Null
        } else {
            TrueState::Effect(Direction::of(diff).expect("non-zero"))
        }
    }

    pub fn draw(&self, rng: &RngState) -> Result<usize> {
        self.validate()?;
        let dist = Binomial::new(self.n as u64, self.p)
            .map_err(|e| Error::Config(format!("binomial scenario: {e}")))?;
        Ok(dist.sample(&mut rng.generator()) as usize)
    }
}

/// One normal observation per group, `m_x ~ N(delta, 1)` and
/// `m_y ~ N(0, 1)`, with the rule "conclude the sign of `m_x - m_y`".
/// Replication `i` draws from `rng.substream(i)`.
pub fn single_observation_example(
    delta: f64,
    n_reps: usize,
    rng: &RngState,
) -> Result<ErrorDecomposition> {
    if n_reps == 0 {
        return Err(Error::InvalidArgument("n_reps must be at least 1".into()));
    }
    if !delta.is_finite() {
        return Err(Error::InvalidArgument("delta must be finite".into()));
    }
    let truth = match Direction::of(delta) {
        None => TrueState::Null,
        Some(d) => TrueState::Effect(d),
    };
    let decisions = (0..n_reps as u64).map(|i| {
        let mut g = rng.substream(i).generator();
        let mx: f64 = delta + g.sample::<f64, _>(StandardNormal);
        let my: f64 = g.sample(StandardNormal);
        match Direction::of(mx - my) {
            Some(d) => DirectionalDecision::conclude(d),
            None => DirectionalDecision::FailToReject,
        }
    });
    Ok(ErrorDecomposition::from_decisions(truth, decisions))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_stream;

    #[test]
    fn true_auc_examples() {
        assert_eq!(true_auc(0.0, 1.7), 0.5);
        // Phi^-1(0.763) * sqrt(2) = 1.0125571 (scipy)
        assert!((true_auc(1.012557096975874, 1.0) - 0.763).abs() < 1e-10);
        assert!((true_auc(1.0119, 1.0) - 0.763).abs() < 2e-4);
    }

    #[test]
    fn calibration_examples() {
        let p = calibrate_roc_scenario(0.763, 0.759, 2.0, 0.5).unwrap();
        // normal-quantile oracle (scipy): Phi^-1(0.763) sqrt(2), Phi^-1(0.759) sqrt(5)
        assert!((p.mu_x - 1.012557096975874).abs() < 1e-9, "{}", p.mu_x);
        assert!((p.mu_y - 1.5721558275635978).abs() < 1e-9, "{}", p.mu_y);
        assert!((p.true_auc_x() - 0.763).abs() < 1e-9);
        assert!((p.true_auc_y() - 0.759).abs() < 1e-9);
        assert_eq!(p.true_state(), TrueState::Effect(Direction::Greater));
        let zero = calibrate_roc_scenario(0.5, 0.5, 2.0, 0.0).unwrap();
        assert_eq!((zero.mu_x, zero.mu_y), (0.0, 0.0));
        assert!(calibrate_roc_scenario(1.0, 0.7, 2.0, 0.0).is_err());
        assert!(calibrate_roc_scenario(0.7, 0.7, 1.0, 0.0).is_err());
    }

    #[test]
    fn calibrated_curves_cross() {
        let p = calibrate_roc_scenario(0.763, 0.759, 2.0, 0.5).unwrap();
        let signs: Vec<f64> = (1..100)
            .map(|k| {
                let f = k as f64 / 100.0;
                (p.true_tpr(f, false) - p.true_tpr(f, true)).signum()
            })
            .collect();
        assert!(signs.contains(&1.0) && signs.contains(&-1.0));
    }

    #[test]
    fn perfect_dependence_copies_markers() {
        let p = RocScenarioParams {
            mu_x: 1.0,
            sigma_x: 1.3,
            mu_y: 1.0,
            sigma_y: 1.3,
            rho: 1.0,
            n_pos: 20,
            n_neg: 20,
        };
        let d = generate_roc_dataset(&p, &rng_stream(5, 0)).unwrap();
        assert!(d.subjects().iter().all(|s| s.marker_x == s.marker_y));
    }

    #[test]
    fn piecewise_hazard_closed_forms() {
        let h = PiecewiseHazard::new(vec![5.0], vec![0.05, 0.5]).unwrap();
        assert!((h.cumulative(5.0) - 0.25).abs() < 1e-15);
        assert!((h.cumulative(7.0) - 1.25).abs() < 1e-15);
        assert!((h.inverse_cumulative(1.25) - 7.0).abs() < 1e-12);
        let c = PiecewiseHazard::constant(1.0).unwrap();
        assert!((c.median() - std::f64::consts::LN_2).abs() < 1e-15);
        assert!((c.restricted_mean(2.0) - (1.0 - (-2.0f64).exp())).abs() < 1e-15);
        assert!(PiecewiseHazard::new(vec![], vec![0.0]).is_err());
        assert!(PiecewiseHazard::new(vec![3.0, 2.0], vec![1.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn zero_hazard_before_cutoff_censors_everyone() {
        let p = SurvivalScenarioParams {
            group_a: PiecewiseHazard::new(vec![10.0], vec![0.0, 1.0]).unwrap(),
            group_b: PiecewiseHazard::new(vec![10.0], vec![0.0, 2.0]).unwrap(),
            cutoff: 5.0,
            n_a: 50,
            n_b: 50,
            criterion: SurvivalCriterion::Median,
        };
        let recs = generate_survival_dataset(&p, &rng_stream(1, 1)).unwrap();
        assert!(recs.iter().all(|r| !r.event && r.time == 5.0));
    }

    #[test]
    fn crossing_default_crosses_once_after_switch() {
        let p = SurvivalScenarioParams::crossing_default();
        let cross = p.crossing_times();
        assert_eq!(cross.len(), 1, "{cross:?}");
        assert!(cross[0] > 5.0 && cross[0] < 15.0);
    }

    #[test]
    fn equal_median_scenario_has_equal_medians() {
        let p = equal_median_scenario();
        assert!((p.group_a.median() - p.group_b.median()).abs() < 1e-9);
        assert_eq!(p.true_state(), TrueState::Null);
        assert!(p.group_b.hazards[0] > p.group_a.hazards[0]);
    }

    #[test]
    fn single_observation_always_rejects_under_null() {
        let d = single_observation_example(0.0, 200, &rng_stream(3, 0)).unwrap();
        assert_eq!(d.context, TrueState::Null);
        assert_eq!(d.alpha_left.count + d.alpha_right.count, 200);
        let big = single_observation_example(10.0, 200, &rng_stream(3, 0)).unwrap();
        assert_eq!(big.power.count, 200);
        assert!(single_observation_example(0.0, 0, &rng_stream(3, 0)).is_err());
    }

    #[test]
    fn binomial_truth() {
        let b = BinomialScenario {
            n: 30,
            p: 0.3,
            theta0: 0.3,
        };
        assert_eq!(b.true_state(), TrueState::Null);
        let b = BinomialScenario {
            n: 30,
            p: 0.2,
            theta0: 0.3,
        };
        assert_eq!(b.true_state(), TrueState::Effect(Direction::Less));
        assert!(b.draw(&rng_stream(1, 2)).unwrap() <= 30);
    }
}
