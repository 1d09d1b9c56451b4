//! Kaplan-Meier estimation and the weighted log-rank family.
//!
//! Ties: at a shared time, events are processed before censorings, so a
//! subject censored at `t` is still at risk for the deaths at `t`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::decision::{decide, Direction, DirectionalDecision, TestOutcome};
use crate::error::{Error, Result};
use crate::stats::two_sided_normal_p;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
pub enum Group {
    A,
    B,
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Group::A => "A",
            Group::B => "B",
        })
    }
}

impl FromStr for Group {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" => Ok(Group::A),
            "B" => Ok(Group::B),
            other => Err(Error::InvalidArgument(format!(
                "group must be A or B, got {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurvivalRecord {
    pub time: f64,
    /// `true` for an observed event, `false` for a censored time.
    pub event: bool,
    pub group: Group,
}

impl SurvivalRecord {
    pub fn new(time: f64, event: bool, group: Group) -> Result<Self> {
        if !(time.is_finite() && time > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "time must be finite and positive, got {time}"
            )));
        }
        Ok(SurvivalRecord { time, event, group })
    }
}

/// Product-limit survival curve. `survival[i]` is the value on
/// `[times[i], times[i+1])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KmCurve {
    pub times: Vec<f64>,
    pub survival: Vec<f64>,
    pub at_risk: Vec<usize>,
    pub events: Vec<usize>,
}

impl KmCurve {
    pub fn survival_at(&self, t: f64) -> f64 {
        match self.times.partition_point(|&s| s <= t) {
            0 => 1.0,
            k => self.survival[k - 1],
        }
    }
}

/// One row per distinct time with at least one event in the pooled sample.
#[derive(Debug, Clone, Copy, PartialEq)]
struct RiskRow {
    time: f64,
    n: usize,
    n_a: usize,
    d: usize,
    d_a: usize,
}

fn risk_table<'a>(records: impl IntoIterator<Item = &'a SurvivalRecord>) -> Vec<RiskRow> {
    let mut sorted: Vec<&SurvivalRecord> = records.into_iter().collect();
    sorted.sort_by(|a, b| a.time.total_cmp(&b.time));
    let mut n = sorted.len();
    let mut n_a = sorted.iter().filter(|r| r.group == Group::A).count();
    let mut rows = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let t = sorted[i].time;
        let (mut d, mut d_a, mut c, mut c_a) = (0, 0, 0, 0);
        while i < sorted.len() && sorted[i].time == t {
            let is_a = sorted[i].group == Group::A;
            if sorted[i].event {
                d += 1;
                d_a += is_a as usize;
            } else {
                c += 1;
                c_a += is_a as usize;
            }
            i += 1;
        }
        if d > 0 {
            rows.push(RiskRow {
                time: t,
                n,
                n_a,
                d,
                d_a,
            });
        }
        n -= d + c;
        n_a -= d_a + c_a;
    }
    rows
}

/// Kaplan-Meier estimate for one group, or for the pooled sample when
/// `group` is `None`.
pub fn km_estimate(records: &[SurvivalRecord], group: Option<Group>) -> Result<KmCurve> {
    let selected: Vec<&SurvivalRecord> = records
        .iter()
        .filter(|r| group.is_none_or(|g| r.group == g))
        .collect();
    if selected.is_empty() {
        let name = group.map_or_else(|| "pooled".to_string(), |g| g.to_string());
        return Err(Error::EmptyGroup(format!("no records in group {name}")));
    }
    let rows = risk_table(selected);
    let mut s = 1.0;
    let mut curve = KmCurve {
        times: Vec::with_capacity(rows.len()),
        survival: Vec::with_capacity(rows.len()),
        at_risk: Vec::with_capacity(rows.len()),
        events: Vec::with_capacity(rows.len()),
    };
    for row in rows {
        s *= 1.0 - row.d as f64 / row.n as f64;
        curve.times.push(row.time);
        curve.survival.push(s);
        curve.at_risk.push(row.n);
        curve.events.push(row.d);
    }
    Ok(curve)
}

/// Smallest event time at which the curve reaches 0.5 or below.
pub fn median_survival(curve: &KmCurve) -> Option<f64> {
    // product-limit values that are mathematically 0.5 may land a few ulps above
    const SLACK: f64 = 1e-12;
    curve
        .times
        .iter()
        .zip(&curve.survival)
        .find(|(_, &s)| s <= 0.5 + SLACK)
        .map(|(&t, _)| t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightScheme {
    LogRank,
    GehanBreslow,
    TaroneWare,
    FlemingHarrington { rho: f64, gamma: f64 },
}

impl WeightScheme {
    /// The four schemes reported side by side.
    pub const STANDARD: [WeightScheme; 4] = [
        WeightScheme::LogRank,
        WeightScheme::GehanBreslow,
        WeightScheme::TaroneWare,
        WeightScheme::FlemingHarrington {
            rho: 0.0,
            gamma: 1.0,
        },
    ];

    /// Weight at an event time with `n_at_risk` pooled subjects at risk and
    /// pooled KM left limit `s_left`.
    pub fn weight(&self, n_at_risk: usize, s_left: f64) -> f64 {
        match *self {
            WeightScheme::LogRank => 1.0,
            WeightScheme::GehanBreslow => n_at_risk as f64,
            WeightScheme::TaroneWare => (n_at_risk as f64).sqrt(),
            WeightScheme::FlemingHarrington { rho, gamma } => {
                s_left.powf(rho) * (1.0 - s_left).powf(gamma)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            WeightScheme::FlemingHarrington { rho, gamma }
                if !(rho >= 0.0 && gamma >= 0.0 && rho.is_finite() && gamma.is_finite()) =>
            {
                Err(Error::InvalidArgument(
                    "Fleming-Harrington rho and gamma must be >= 0".into(),
                ))
            }
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> String {
        match self {
            WeightScheme::LogRank => "log-rank".into(),
            WeightScheme::GehanBreslow => "gehan-breslow".into(),
            WeightScheme::TaroneWare => "tarone-ware".into(),
            WeightScheme::FlemingHarrington { rho, gamma } => {
                format!("fleming-harrington({rho},{gamma})")
            }
        }
    }
}

impl FromStr for WeightScheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "log-rank" | "logrank" => Ok(WeightScheme::LogRank),
            "gehan-breslow" | "gehan" => Ok(WeightScheme::GehanBreslow),
            "tarone-ware" => Ok(WeightScheme::TaroneWare),
            _ => {
                let inner = s
                    .strip_prefix("fleming-harrington(")
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(|| {
                        Error::InvalidArgument(format!("unknown weight scheme {s:?}"))
                    })?;
                let (rho, gamma) = inner.split_once(',').ok_or_else(|| {
                    Error::InvalidArgument(format!(
                        "expected fleming-harrington(rho,gamma), got {s:?}"
                    ))
                })?;
                let parse = |v: &str| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::InvalidArgument(format!("bad number {v:?} in {s:?}")))
                };
                let scheme = WeightScheme::FlemingHarrington {
                    rho: parse(rho)?,
                    gamma: parse(gamma)?,
                };
                scheme.validate()?;
                Ok(scheme)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogRankResult {
    /// Positive when group A has more events than expected, i.e. group B
    /// survives better under this weighting.
    pub z: f64,
    pub p_value: f64,
    pub u: f64,
    pub variance: f64,
}

impl LogRankResult {
    pub fn as_outcome(&self) -> TestOutcome {
        TestOutcome::new(self.z, self.p_value, Direction::of(self.z))
    }
}

pub fn weighted_logrank(records: &[SurvivalRecord], scheme: WeightScheme) -> Result<LogRankResult> {
    scheme.validate()?;
    for g in [Group::A, Group::B] {
        if !records.iter().any(|r| r.group == g) {
            return Err(Error::EmptyGroup(format!("no records in group {g}")));
        }
    }
    let rows = risk_table(records);
    if rows.is_empty() {
        return Err(Error::DegenerateComparison(
            "no events in either group".into(),
        ));
    }
    let (mut u, mut variance) = (0.0, 0.0);
    let mut s_left = 1.0;
    for row in &rows {
        let w = scheme.weight(row.n, s_left);
        let n = row.n as f64;
        let d = row.d as f64;
        let share_a = row.n_a as f64 / n;
        u += w * (row.d_a as f64 - d * share_a);
        if row.n > 1 {
            variance += w * w * d * share_a * (1.0 - share_a) * (n - d) / (n - 1.0);
        }
        s_left *= 1.0 - d / n;
    }
    if variance.is_nan() || variance <= 0.0 {
        return Err(Error::DegenerateComparison(
            "zero variance: no event time with both groups at risk".into(),
        ));
    }
    let z = u / variance.sqrt();
    Ok(LogRankResult {
        z,
        p_value: two_sided_normal_p(z),
        u,
        variance,
    })
}

/// `ConcludeGreater` means group B survives better.
pub fn logrank_direction(result: &LogRankResult, alpha: f64) -> DirectionalDecision {
    decide(&result.as_outcome(), alpha)
}

/// Pooled weights at each distinct event time, in time order.
pub fn weight_sequence(records: &[SurvivalRecord], scheme: WeightScheme) -> Vec<(f64, f64)> {
    let mut s_left = 1.0;
    risk_table(records)
        .into_iter()
        .map(|row| {
            let w = scheme.weight(row.n, s_left);
            s_left *= 1.0 - row.d as f64 / row.n as f64;
            (row.time, w)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(time: f64, event: bool, group: Group) -> SurvivalRecord {
        SurvivalRecord::new(time, event, group).unwrap()
    }

    #[test]
    fn hand_product_limit() {
        let r = [
            rec(1.0, true, Group::A),
            rec(2.0, false, Group::A),
            rec(3.0, true, Group::A),
        ];
        let km = km_estimate(&r, Some(Group::A)).unwrap();
        assert_eq!(km.times, vec![1.0, 3.0]);
        assert!((km.survival[0] - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(km.survival[1], 0.0);
        assert_eq!(km.at_risk, vec![3, 1]);
        assert_eq!(km.survival_at(0.5), 1.0);
        assert!((km.survival_at(2.9) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn all_censored_is_flat() {
        let r = [rec(1.0, false, Group::B), rec(4.0, false, Group::B)];
        let km = km_estimate(&r, Some(Group::B)).unwrap();
        assert!(km.times.is_empty());
        assert_eq!(km.survival_at(100.0), 1.0);
        assert_eq!(median_survival(&km), None);
        assert!(matches!(
            km_estimate(&r, Some(Group::A)),
            Err(Error::EmptyGroup(_))
        ));
    }

    #[test]
    fn censoring_at_event_time_stays_at_risk() {
        let r = [
            rec(2.0, true, Group::A),
            rec(2.0, false, Group::A),
            rec(5.0, true, Group::A),
        ];
        let km = km_estimate(&r, None).unwrap();
        assert_eq!(km.at_risk[0], 3);
        assert!((km.survival[0] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn median_definition() {
        let km = KmCurve {
            times: vec![3.0, 7.0, 9.0],
            survival: vec![0.6, 0.4, 0.1],
            at_risk: vec![10, 6, 4],
            events: vec![4, 2, 3],
        };
        assert_eq!(median_survival(&km), Some(7.0));
    }

    #[test]
    fn symmetric_groups_give_zero() {
        let mut r = Vec::new();
        for (t, e) in [(1.0, true), (2.0, false), (3.0, true), (4.0, true)] {
            r.push(rec(t, e, Group::A));
            r.push(rec(t, e, Group::B));
        }
        for scheme in WeightScheme::STANDARD {
            let res = weighted_logrank(&r, scheme).unwrap();
            assert!(res.u.abs() < 1e-12);
            assert!(res.z.abs() < 1e-12);
        }
    }

    #[test]
    fn single_event_matches_hypergeometric_step() {
        // 3 in A, 2 in B, one death in A at t=1: u = 1 - 3/5, var = (3/5)(2/5)
        let r = [
            rec(1.0, true, Group::A),
            rec(2.0, false, Group::A),
            rec(2.0, false, Group::A),
            rec(2.0, false, Group::B),
            rec(2.0, false, Group::B),
        ];
        let res = weighted_logrank(&r, WeightScheme::LogRank).unwrap();
        let expected = (1.0 - 0.6) / (0.6f64 * 0.4).sqrt();
        assert!((res.z - expected).abs() < 1e-12);
    }

    #[test]
    fn degenerate_comparisons() {
        let no_events = [rec(1.0, false, Group::A), rec(2.0, false, Group::B)];
        assert!(matches!(
            weighted_logrank(&no_events, WeightScheme::LogRank),
            Err(Error::DegenerateComparison(_))
        ));
        // the only death happens when B has already left the risk set
        let disjoint = [rec(1.0, false, Group::B), rec(2.0, true, Group::A)];
        assert!(matches!(
            weighted_logrank(&disjoint, WeightScheme::LogRank),
            Err(Error::DegenerateComparison(_))
        ));
        let one_group = [rec(1.0, true, Group::A)];
        assert!(matches!(
            weighted_logrank(&one_group, WeightScheme::LogRank),
            Err(Error::EmptyGroup(_))
        ));
    }

    #[test]
    fn direction_examples() {
        let mk = |z: f64| LogRankResult {
            z,
            p_value: two_sided_normal_p(z),
            u: z,
            variance: 1.0,
        };
        assert_eq!(
            logrank_direction(&mk(2.5), 0.05),
            DirectionalDecision::ConcludeGreater
        );
        assert_eq!(
            logrank_direction(&mk(-1.0), 0.05),
            DirectionalDecision::FailToReject
        );
        assert_eq!(
            logrank_direction(&mk(-1.97), 0.05),
            DirectionalDecision::ConcludeLess
        );
    }

    #[test]
    fn scheme_names_parse() {
        for s in WeightScheme::STANDARD {
            assert_eq!(s.name().parse::<WeightScheme>().unwrap(), s);
        }
        assert!("fleming-harrington(-1,0)".parse::<WeightScheme>().is_err());
        assert!("wilcoxon".parse::<WeightScheme>().is_err());
    }

    #[test]
    fn invalid_times_rejected() {
        assert!(SurvivalRecord::new(0.0, true, Group::A).is_err());
        assert!(SurvivalRecord::new(f64::NAN, true, Group::A).is_err());
    }
}
