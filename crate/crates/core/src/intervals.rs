//! Binomial confidence intervals and their exact directional audit.
//!
//! Every tail probability here is an explicit sum of binomial terms. The
//! audit enumerates all outcomes `x = 0..=n`, so coverage, the two one-sided
//! miss rates and the half-widths carry no Monte Carlo error.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::decision::DirectionalDecision;
use crate::error::{Error, Result};
use crate::stats::{beta_cdf, beta_quantile, normal_quantile};

/// Absolute tolerance on `p` for the Clopper-Pearson bisections.
pub const BISECTION_TOL: f64 = 1e-10;
/// Number of intervals in the tail-allocation grid for the shortest interval.
pub const SHORTEST_GRID: usize = 1000;
/// Width tolerance for the golden-section refinement.
pub const GOLDEN_TOL: f64 = 1e-9;
/// Endpoint tolerance of the HPD search.
pub const HPD_TOL: f64 = 1e-9;
/// Largest supported number of trials.
pub const MAX_TRIALS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn new(lower: f64, upper: f64) -> Self {
        debug_assert!(
            0.0 <= lower && lower <= upper && upper <= 1.0,
            "[{lower}, {upper}]"
        );
        Interval { lower, upper }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    /// `1 - [upper, lower]`: the interval for the complementary proportion.
    pub fn reflect(&self) -> Interval {
        Interval {
            lower: 1.0 - self.upper,
            upper: 1.0 - self.lower,
        }
    }

    pub fn contains(&self, p: f64) -> bool {
        self.lower <= p && p <= self.upper
    }
}

/// Nominal risk allocated to each side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailSpec {
    /// Risk that the whole interval lies above the truth.
    pub alpha_l_nominal: f64,
    /// Risk that the whole interval lies below the truth.
    pub alpha_u_nominal: f64,
}

impl TailSpec {
    pub fn new(alpha_l_nominal: f64, alpha_u_nominal: f64) -> Result<Self> {
        let sum = alpha_l_nominal + alpha_u_nominal;
        if !(alpha_l_nominal >= 0.0 && alpha_u_nominal >= 0.0 && sum > 0.0 && sum < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "tail risks ({alpha_l_nominal}, {alpha_u_nominal}) must be >= 0 with a sum in (0, 1)"
            )));
        }
        Ok(TailSpec {
            alpha_l_nominal,
            alpha_u_nominal,
        })
    }

    pub fn equal(alpha: f64) -> Result<Self> {
        Self::new(alpha / 2.0, alpha / 2.0)
    }
}

fn check_counts(x: usize, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if n > MAX_TRIALS {
        return Err(Error::InvalidArgument(format!(
            "n = {n} exceeds {MAX_TRIALS}"
        )));
    }
    if x > n {
        return Err(Error::InvalidArgument(format!("x = {x} exceeds n = {n}")));
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    Ok(())
}

fn ln_choose(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k)
        .map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln())
        .sum()
}

/// Binomial log-pmf.
pub fn ln_binomial_pmf(n: usize, k: usize, p: f64) -> f64 {
    if p <= 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if p >= 1.0 {
        return if k == n { 0.0 } else { f64::NEG_INFINITY };
    }
    ln_choose(n, k) + k as f64 * p.ln() + (n - k) as f64 * (1.0 - p).ln()
}

/// `P(lo <= X <= hi)` for `X ~ Bin(n, p)`.
///
/// Terms are accumulated relative to the largest term of the range and the
/// scale `exp(ln pmf)` is applied once at the end, so nothing overflows and
/// only negligible terms underflow.
pub fn binomial_range(n: usize, p: f64, lo: usize, hi: usize) -> f64 {
    if lo > hi || lo > n {
        return 0.0;
    }
    let hi = hi.min(n);
    if p <= 0.0 {
        return if lo == 0 { 1.0 } else { 0.0 };
    }
    if p >= 1.0 {
        return if hi == n { 1.0 } else { 0.0 };
    }
    let q = 1.0 - p;
    let odds = p / q;
    let mode = (((n + 1) as f64 * p).floor() as usize).min(n).clamp(lo, hi);
    let mut sum = 1.0;
    let mut t = 1.0;
    for k in mode..hi {
        t *= (n - k) as f64 / (k + 1) as f64 * odds;
        sum += t;
    }
    t = 1.0;
    for k in (lo + 1..=mode).rev() {
        t *= k as f64 / (n - k + 1) as f64 / odds;
        sum += t;
    }
    (ln_binomial_pmf(n, mode, p).exp() * sum).min(1.0)
}

/// `P(X >= x)`.
pub fn binomial_upper_tail(n: usize, x: usize, p: f64) -> f64 {
    binomial_range(n, p, x, n)
}

/// `P(X <= x)`.
pub fn binomial_lower_tail(n: usize, x: usize, p: f64) -> f64 {
    binomial_range(n, p, 0, x)
}

/// Root of a monotone function on `[0, 1]` by bisection.
fn bisect(increasing: bool, target: f64, f: impl Fn(f64) -> f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        let below = if increasing {
            f(mid) < target
        } else {
            f(mid) > target
        };
        if below {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn cp_lower(x: usize, n: usize, alpha_l: f64) -> f64 {
    if x == 0 || alpha_l <= 0.0 {
        0.0
    } else {
        bisect(true, alpha_l, |p| binomial_upper_tail(n, x, p))
    }
}

fn cp_upper(x: usize, n: usize, alpha_u: f64) -> f64 {
    if x == n || alpha_u <= 0.0 {
        1.0
    } else {
        bisect(false, alpha_u, |p| binomial_lower_tail(n, x, p))
    }
}

/// Clopper-Pearson interval with the given tail allocation.
pub fn clopper_pearson(x: usize, n: usize, tails: TailSpec) -> Result<Interval> {
    check_counts(x, n)?;
    Ok(Interval::new(
        cp_lower(x, n, tails.alpha_l_nominal),
        cp_upper(x, n, tails.alpha_u_nominal),
    ))
}

/// Clopper-Pearson interval with the tail split `(gamma, alpha - gamma)`
/// chosen to minimise the width.
pub fn zielinski_shortest(x: usize, n: usize, alpha: f64) -> Result<Interval> {
    check_counts(x, n)?;
    check_alpha(alpha)?;
    let (gamma, _) = shortest_allocation(x, n, alpha);
    Ok(Interval::new(
        cp_lower(x, n, gamma),
        cp_upper(x, n, alpha - gamma),
    ))
}

/// Width-minimising lower-tail allocation and the resulting width.
pub fn shortest_allocation(x: usize, n: usize, alpha: f64) -> (f64, f64) {
    let width = |g: f64| cp_upper(x, n, alpha - g) - cp_lower(x, n, g);
    let half = alpha / 2.0;
    let mut best_i = SHORTEST_GRID / 2;
    let mut best_w = width(half);
    let grid = |i: usize| i as f64 / SHORTEST_GRID as f64 * alpha;
    let widths: Vec<f64> = (0..=SHORTEST_GRID)
        .map(|i| {
            if i == SHORTEST_GRID / 2 {
                best_w
            } else {
                width(grid(i))
            }
        })
        .collect();
    for (i, &w) in widths.iter().enumerate() {
        let closer = (grid(i) - half).abs() < (grid(best_i) - half).abs();
        if w < best_w - GOLDEN_TOL || ((w - best_w).abs() <= GOLDEN_TOL && closer) {
            best_i = i;
            best_w = w;
        }
    }
    let mut best_g = grid(best_i);

    // golden-section refinement inside the neighbouring grid cells
    let (mut a, mut b) = (
        grid(best_i.saturating_sub(1)),
        grid((best_i + 1).min(SHORTEST_GRID)),
    );
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut wc, mut wd) = (width(c), width(d));
    for _ in 0..200 {
        if (wc - wd).abs() < GOLDEN_TOL && b - a < 1e-12 {
            break;
        }
        if b - a < 1e-14 {
            break;
        }
        if wc < wd {
            b = d;
            d = c;
            wd = wc;
            c = b - inv_phi * (b - a);
            wc = width(c);
        } else {
            a = c;
            c = d;
            wc = wd;
            d = a + inv_phi * (b - a);
            wd = width(d);
        }
    }
    let (g_ref, w_ref) = if wc < wd { (c, wc) } else { (d, wd) };
    if w_ref < best_w - GOLDEN_TOL {
        best_g = g_ref;
        best_w = w_ref;
    }
    (best_g, best_w)
}

/// Normal-approximation interval, clipped to `[0, 1]`.
pub fn wald(x: usize, n: usize, alpha: f64) -> Result<Interval> {
    check_counts(x, n)?;
    check_alpha(alpha)?;
    let p_hat = x as f64 / n as f64;
    let z = normal_quantile(1.0 - alpha / 2.0);
    let half = z * (p_hat * (1.0 - p_hat) / n as f64).sqrt();
    Ok(Interval::new(
        (p_hat - half).max(0.0),
        (p_hat + half).min(1.0),
    ))
}

/// Highest posterior density interval under the Jeffreys prior, i.e. for a
/// `Beta(x + 1/2, n - x + 1/2)` posterior.
pub fn jeffreys_hpd(x: usize, n: usize, alpha: f64) -> Result<Interval> {
    check_counts(x, n)?;
    check_alpha(alpha)?;
    let a = x as f64 + 0.5;
    let b = (n - x) as f64 + 0.5;
    // posterior density is monotone when x = 0 or x = n
    if x == 0 {
        return Ok(Interval::new(0.0, beta_quantile(1.0 - alpha, a, b)));
    }
    if x == n {
        return Ok(Interval::new(beta_quantile(alpha, a, b), 1.0));
    }
    let ln_density = |t: f64| (a - 1.0) * t.ln() + (b - 1.0) * (1.0 - t).ln();
    let upper_for = |l: f64| beta_quantile(beta_cdf(l, a, b) + 1.0 - alpha, a, b);
    // g(l) = f(l) - f(u(l)) rises from negative at l = 0 to positive at
    // l = q(alpha), where u(l) = 1
    let (mut lo, mut hi) = (0.0f64, beta_quantile(alpha, a, b));
    while hi - lo > HPD_TOL * 1e-2 {
        let mid = 0.5 * (lo + hi);
        let u = upper_for(mid);
        if u >= 1.0 || ln_density(mid) >= ln_density(u) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let lower = 0.5 * (lo + hi);
    Ok(Interval::new(lower, upper_for(lower).max(lower)))
}

/// A binomial interval construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntervalMethod {
    CpEqual,
    CpShortest,
    Wald,
    JeffreysHpd,
}

impl IntervalMethod {
    pub const ALL: [IntervalMethod; 4] = [
        IntervalMethod::CpEqual,
        IntervalMethod::CpShortest,
        IntervalMethod::Wald,
        IntervalMethod::JeffreysHpd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IntervalMethod::CpEqual => "cp-equal",
            IntervalMethod::CpShortest => "cp-shortest",
            IntervalMethod::Wald => "wald",
            IntervalMethod::JeffreysHpd => "jeffreys-hpd",
        }
    }
}

impl fmt::Display for IntervalMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IntervalMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        IntervalMethod::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown interval estimator {s:?}")))
    }
}

/// Any rule mapping an observed count to an interval.
pub trait IntervalEstimator: Sync {
    fn interval(&self, x: usize, n: usize) -> Result<Interval>;

    /// Intervals for every outcome `0..=n`.
    fn all_intervals(&self, n: usize) -> Result<Vec<Interval>> {
        (0..=n).map(|x| self.interval(x, n)).collect()
    }
}

/// A method at a fixed confidence level `1 - alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimator {
    pub method: IntervalMethod,
    pub alpha: f64,
}

impl Estimator {
    pub fn new(method: IntervalMethod, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Estimator { method, alpha })
    }
}

impl IntervalEstimator for Estimator {
    fn interval(&self, x: usize, n: usize) -> Result<Interval> {
        match self.method {
            IntervalMethod::CpEqual => clopper_pearson(x, n, TailSpec::equal(self.alpha)?),
            IntervalMethod::CpShortest => zielinski_shortest(x, n, self.alpha),
            IntervalMethod::Wald => wald(x, n, self.alpha),
            IntervalMethod::JeffreysHpd => jeffreys_hpd(x, n, self.alpha),
        }
    }
}

impl<F> IntervalEstimator for F
where
    F: Fn(usize, usize) -> Result<Interval> + Sync,
{
    fn interval(&self, x: usize, n: usize) -> Result<Interval> {
        self(x, n)
    }
}

/// Exact operating characteristics of an interval rule at one true `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalAudit {
    pub n: usize,
    pub p: f64,
    pub coverage: f64,
    /// Probability that the interval lies entirely above `p`.
    pub alpha_l_realized: f64,
    /// Probability that the interval lies entirely below `p`.
    pub alpha_u_realized: f64,
    /// `E[x/n - lower]`.
    pub left_half_width: f64,
    /// `E[upper - x/n]`.
    pub right_half_width: f64,
    pub expected_width: f64,
}

/// Audit from precomputed intervals, `intervals[x]` for `x = 0..=n`.
pub fn audit_intervals(intervals: &[Interval], n: usize, p: f64) -> IntervalAudit {
    assert_eq!(intervals.len(), n + 1, "need one interval per outcome");
    let mut audit = IntervalAudit {
        n,
        p,
        coverage: 0.0,
        alpha_l_realized: 0.0,
        alpha_u_realized: 0.0,
        left_half_width: 0.0,
        right_half_width: 0.0,
        expected_width: 0.0,
    };
    for (x, ci) in intervals.iter().enumerate() {
        let w = ln_binomial_pmf(n, x, p).exp();
        let est = x as f64 / n as f64;
        if ci.lower > p {
            audit.alpha_l_realized += w;
        } else if ci.upper < p {
            audit.alpha_u_realized += w;
        } else {
            audit.coverage += w;
        }
        audit.left_half_width += w * (est - ci.lower);
        audit.right_half_width += w * (ci.upper - est);
        audit.expected_width += w * (ci.upper - ci.lower);
    }
    audit
}

pub fn exact_audit(estimator: &dyn IntervalEstimator, n: usize, p: f64) -> Result<IntervalAudit> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "p must lie in [0, 1], got {p}"
        )));
    }
    Ok(audit_intervals(&estimator.all_intervals(n)?, n, p))
}

/// Test of `theta = theta0` read off the interval.
pub fn ci_test_duality(interval: &Interval, theta0: f64) -> DirectionalDecision {
    if interval.lower > theta0 {
        DirectionalDecision::ConcludeGreater
    } else if interval.upper < theta0 {
        DirectionalDecision::ConcludeLess
    } else {
        DirectionalDecision::FailToReject
    }
}

/// `{0.01, 0.02, ..., 0.99}`.
pub fn default_p_grid() -> Vec<f64> {
    (1..=99).map(|k| k as f64 / 100.0).collect()
}
