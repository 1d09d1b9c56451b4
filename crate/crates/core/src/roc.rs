//! Empirical ROC curves, AUC, and paired tests comparing two diagnostic
//! markers measured on the same subjects.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::decision::{decide, Direction, DirectionalDecision, TestOutcome};
use crate::error::{Error, Result};
use crate::rng::RngState;
use crate::stats::midranks;

pub const DEFAULT_PERMUTATIONS: usize = 999;
pub const DEFAULT_BOOTSTRAPS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Class {
    Negative,
    Positive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Subject {
    pub class: Class,
    pub marker_x: f64,
    pub marker_y: f64,
}

/// Two markers measured on the same subjects. Higher marker values point
/// towards the positive class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedDiagnosticDataset {
    subjects: Vec<Subject>,
}

impl PairedDiagnosticDataset {
    pub fn new(subjects: Vec<Subject>) -> Result<Self> {
        if let Some(i) = subjects
            .iter()
            .position(|s| !s.marker_x.is_finite() || !s.marker_y.is_finite())
        {
            return Err(Error::InvalidArgument(format!(
                "subject {i} has a non-finite marker"
            )));
        }
        let n_pos = subjects
            .iter()
            .filter(|s| s.class == Class::Positive)
            .count();
        if n_pos == 0 {
            return Err(Error::DegenerateClass("no positive subjects".into()));
        }
        if n_pos == subjects.len() {
            return Err(Error::DegenerateClass("no negative subjects".into()));
        }
        Ok(PairedDiagnosticDataset { subjects })
    }

    pub fn subjects(&self) -> &[Subject] {
        &self.subjects
    }

    pub fn len(&self) -> usize {
        self.subjects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subjects.is_empty()
    }

    pub fn n_positive(&self) -> usize {
        self.subjects
            .iter()
            .filter(|s| s.class == Class::Positive)
            .count()
    }

    pub fn n_negative(&self) -> usize {
        self.len() - self.n_positive()
    }

    fn split(&self, marker: impl Fn(&Subject) -> f64) -> (Vec<f64>, Vec<f64>) {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for s in &self.subjects {
            match s.class {
                Class::Positive => pos.push(marker(s)),
                Class::Negative => neg.push(marker(s)),
            }
        }
        (pos, neg)
    }

    /// `(positive, negative)` scores of marker x.
    pub fn scores_x(&self) -> (Vec<f64>, Vec<f64>) {
        self.split(|s| s.marker_x)
    }

    pub fn scores_y(&self) -> (Vec<f64>, Vec<f64>) {
        self.split(|s| s.marker_y)
    }

    /// The same subjects with the two markers exchanged.
    pub fn swapped(&self) -> Self {
        PairedDiagnosticDataset {
            subjects: self
                .subjects
                .iter()
                .map(|s| Subject {
                    class: s.class,
                    marker_x: s.marker_y,
                    marker_y: s.marker_x,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
}

/// Empirical ROC curve from `(0,0)` to `(1,1)`, one vertex per distinct
/// threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    points: Vec<RocPoint>,
}

impl RocCurve {
    /// Builds a curve from explicit vertices, checking endpoints and
    /// monotonicity.
    pub fn from_points(points: Vec<RocPoint>) -> Result<Self> {
        let ok_ends = matches!(points.first(), Some(p) if p.fpr == 0.0 && p.tpr == 0.0)
            && matches!(points.last(), Some(p) if p.fpr == 1.0 && p.tpr == 1.0);
        let monotone = points
            .windows(2)
            .all(|w| w[1].fpr >= w[0].fpr && w[1].tpr >= w[0].tpr);
        if !ok_ends || !monotone {
            return Err(Error::InvalidArgument(
                "ROC vertices must run monotonically from (0,0) to (1,1)".into(),
            ));
        }
        Ok(RocCurve { points })
    }

    pub fn points(&self) -> &[RocPoint] {
        &self.points
    }

    /// Step value at `fpr`: the highest TPR reached without exceeding `fpr`.
    pub fn tpr_at(&self, fpr: f64) -> f64 {
        self.points
            .iter()
            .take_while(|p| p.fpr <= fpr)
            .map(|p| p.tpr)
            .fold(0.0, f64::max)
    }
}

pub fn empirical_roc(pos_scores: &[f64], neg_scores: &[f64]) -> Result<RocCurve> {
    if pos_scores.is_empty() || neg_scores.is_empty() {
        return Err(Error::DegenerateClass(
            "both classes need at least one score".into(),
        ));
    }
    if pos_scores.iter().chain(neg_scores).any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("scores must be finite".into()));
    }
    let mut labelled: Vec<(f64, bool)> = pos_scores
        .iter()
        .map(|&v| (v, true))
        .chain(neg_scores.iter().map(|&v| (v, false)))
        .collect();
    labelled.sort_by(|a, b| b.0.total_cmp(&a.0));

    let (n_pos, n_neg) = (pos_scores.len() as f64, neg_scores.len() as f64);
    let mut points = Vec::with_capacity(labelled.len() + 1);
    points.push(RocPoint { fpr: 0.0, tpr: 0.0 });
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < labelled.len() {
        let t = labelled[i].0;
        while i < labelled.len() && labelled[i].0 == t {
            if labelled[i].1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push(RocPoint {
            fpr: fp as f64 / n_neg,
            tpr: tp as f64 / n_pos,
        });
    }
    Ok(RocCurve { points })
}

/// Trapezoidal area under the curve.
pub fn auc(curve: &RocCurve) -> f64 {
    curve
        .points
        .windows(2)
        .map(|w| (w[1].fpr - w[0].fpr) * (w[1].tpr + w[0].tpr) / 2.0)
        .sum()
}

/// Mann-Whitney AUC from midranks of the pooled sample, ties counted 1/2.
pub fn rank_auc(pos_scores: &[f64], neg_scores: &[f64]) -> f64 {
    let pooled: Vec<f64> = pos_scores.iter().chain(neg_scores).copied().collect();
    let ranks = midranks(&pooled);
    let (np, nn) = (pos_scores.len() as f64, neg_scores.len() as f64);
    let rank_sum: f64 = ranks[..pos_scores.len()].iter().sum();
    (rank_sum - np * (np + 1.0) / 2.0) / (np * nn)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VenkatramanResult {
    pub e_obs: f64,
    pub p_value: f64,
    pub auc_x: f64,
    pub auc_y: f64,
    pub observed_direction: Option<Direction>,
    pub n_permutations: usize,
}

impl VenkatramanResult {
    /// The result read as a test of `auc_x - auc_y`.
    pub fn as_auc_outcome(&self) -> TestOutcome {
        TestOutcome::new(self.e_obs, self.p_value, self.observed_direction)
            .with_permutations(self.n_permutations)
    }
}

/// Marker values recoded as doubled midranks, so ties stay exact integers.
struct RankedPairs {
    rank_x: Vec<u32>,
    rank_y: Vec<u32>,
    positive: Vec<bool>,
    n_pos: usize,
    n_neg: usize,
}

impl RankedPairs {
    fn new(data: &PairedDiagnosticDataset) -> Self {
        let xs: Vec<f64> = data.subjects.iter().map(|s| s.marker_x).collect();
        let ys: Vec<f64> = data.subjects.iter().map(|s| s.marker_y).collect();
        let dbl = |r: Vec<f64>| r.into_iter().map(|v| (2.0 * v) as u32).collect::<Vec<_>>();
        RankedPairs {
            rank_x: dbl(midranks(&xs)),
            rank_y: dbl(midranks(&ys)),
            positive: data
                .subjects
                .iter()
                .map(|s| s.class == Class::Positive)
                .collect(),
            n_pos: data.n_positive(),
            n_neg: data.n_negative(),
        }
    }
}

/// Scratch space for evaluating one curve on the negatives' FPR grid.
struct CurveScratch {
    pos_bucket: Vec<u32>,
    neg_bucket: Vec<u32>,
    tp_at: Vec<u32>,
}

impl CurveScratch {
    fn new(n_subjects: usize, n_neg: usize) -> Self {
        CurveScratch {
            pos_bucket: vec![0; 2 * n_subjects + 2],
            neg_bucket: vec![0; 2 * n_subjects + 2],
            tp_at: vec![0; n_neg + 1],
        }
    }

    /// Fills `tp_at[j]` with the number of true positives of the step curve
    /// at FPR `j / n_neg`, for `j = 0..=n_neg`.
    fn evaluate(&mut self, ranks: impl Iterator<Item = (u32, bool)>) {
        self.pos_bucket.fill(0);
        self.neg_bucket.fill(0);
        self.tp_at.fill(0);
        for (r, pos) in ranks {
            if pos {
                self.pos_bucket[r as usize] += 1;
            } else {
                self.neg_bucket[r as usize] += 1;
            }
        }
        let (mut tp, mut fp) = (0u32, 0usize);
        for v in (0..self.pos_bucket.len()).rev() {
            let (p, n) = (self.pos_bucket[v], self.neg_bucket[v]);
            if p == 0 && n == 0 {
                continue;
            }
            tp += p;
            fp += n as usize;
            // vertices are visited with non-decreasing (fp, tp)
            self.tp_at[fp] = tp;
        }
        let mut running = 0;
        for slot in self.tp_at.iter_mut() {
            running = running.max(*slot);
            *slot = running;
        }
    }
}

/// Sum over interior grid points of `|TP_x - TP_y|`, in integer counts.
fn grid_abs_difference(x: &CurveScratch, y: &CurveScratch, n_neg: usize) -> u64 {
    (1..n_neg)
        .map(|j| x.tp_at[j].abs_diff(y.tp_at[j]) as u64)
        .sum()
}

/// Paired permutation test of equality of two ROC curves.
///
/// The statistic integrates the absolute difference between the two step
/// curves over the FPR grid `j / n_neg`. Each permutation exchanges the two
/// markers' ranks within a random half of the subjects; the p-value uses the
/// add-one estimator `(1 + #{e* >= e}) / (B + 1)`. Permutation `b` draws from
/// `rng.substream(b)`.
pub fn venkatraman_test(
    data: &PairedDiagnosticDataset,
    n_permutations: usize,
    rng: &RngState,
) -> Result<VenkatramanResult> {
    if n_permutations == 0 {
        return Err(Error::InvalidArgument(
            "n_permutations must be at least 1".into(),
        ));
    }
    let ranked = RankedPairs::new(data);
    let n = data.len();
    let n_neg = ranked.n_neg;
    let mut cx = CurveScratch::new(n, n_neg);
    let mut cy = CurveScratch::new(n, n_neg);

    let pos = &ranked.positive;
    cx.evaluate(ranked.rank_x.iter().copied().zip(pos.iter().copied()));
    cy.evaluate(ranked.rank_y.iter().copied().zip(pos.iter().copied()));
    let observed = grid_abs_difference(&cx, &cy, n_neg);

    let mut bits = vec![0u64; n.div_ceil(64)];
    let mut exceed = 0usize;
    for b in 0..n_permutations {
        let mut g = rng.substream(b as u64).generator();
        for w in bits.iter_mut() {
            *w = g.random();
        }
        let swap = |i: usize| (bits[i / 64] >> (i % 64)) & 1 == 1;
        cx.evaluate((0..n).map(|i| {
            let r = if swap(i) {
                ranked.rank_y[i]
            } else {
                ranked.rank_x[i]
            };
            (r, pos[i])
        }));
        cy.evaluate((0..n).map(|i| {
            let r = if swap(i) {
                ranked.rank_x[i]
            } else {
                ranked.rank_y[i]
            };
            (r, pos[i])
        }));
        if grid_abs_difference(&cx, &cy, n_neg) >= observed {
            exceed += 1;
        }
    }

    let (px, nx) = data.scores_x();
    let (py, ny) = data.scores_y();
    let auc_x = rank_auc(&px, &nx);
    let auc_y = rank_auc(&py, &ny);
    Ok(VenkatramanResult {
        e_obs: observed as f64 / (n_neg as f64 * ranked.n_pos as f64),
        p_value: (1 + exceed) as f64 / (n_permutations + 1) as f64,
        auc_x,
        auc_y,
        observed_direction: Direction::of(auc_x - auc_y),
        n_permutations,
    })
}

/// Reads a curve-equality test as if it compared AUCs. This is the
/// interpretation whose directional error rates the audit measures.
pub fn naive_auc_direction(result: &VenkatramanResult, alpha: f64) -> DirectionalDecision {
    decide(&result.as_auc_outcome(), alpha)
}

/// Paired bootstrap test of `auc_x - auc_y`.
///
/// Subjects are resampled with replacement within each class, keeping both
/// markers of a subject together. The two-sided p-value is twice the smaller
/// bootstrap tail mass on either side of zero. Resample `b` draws from
/// `rng.substream(b)`.
pub fn bootstrap_auc_difference_test(
    data: &PairedDiagnosticDataset,
    n_boot: usize,
    rng: &RngState,
) -> Result<TestOutcome> {
    if n_boot < 100 {
        return Err(Error::InvalidArgument("n_boot must be at least 100".into()));
    }
    let (px, nx) = data.scores_x();
    let (py, ny) = data.scores_y();
    let statistic = rank_auc(&px, &nx) - rank_auc(&py, &ny);

    let (np, nn) = (px.len(), nx.len());
    let mut bx_pos = vec![0.0; np];
    let mut by_pos = vec![0.0; np];
    let mut bx_neg = vec![0.0; nn];
    let mut by_neg = vec![0.0; nn];
    let (mut at_or_below, mut at_or_above) = (0usize, 0usize);
    for b in 0..n_boot {
        let mut g = rng.substream(b as u64).generator();
        for k in 0..np {
            let i = g.random_range(0..np);
            bx_pos[k] = px[i];
            by_pos[k] = py[i];
        }
        for k in 0..nn {
            let i = g.random_range(0..nn);
            bx_neg[k] = nx[i];
            by_neg[k] = ny[i];
        }
        let d = rank_auc(&bx_pos, &bx_neg) - rank_auc(&by_pos, &by_neg);
        if d <= 0.0 {
            at_or_below += 1;
        }
        if d >= 0.0 {
            at_or_above += 1;
        }
    }
    let tail = at_or_below.min(at_or_above) as f64 / n_boot as f64;
    let p = (2.0 * tail).min(1.0);
    Ok(TestOutcome::new(statistic, p, Direction::of(statistic)).with_permutations(n_boot))
}
