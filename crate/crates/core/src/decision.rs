//! Directional decision vocabulary and error accounting.
//!
//! A two-sided test is read directionally: a rejection together with the
//! sign of the observed effect yields one of three decisions. Against a known
//! true state each decision falls in exactly one error class, and many
//! replications aggregate into an [`ErrorDecomposition`].

use std::fmt;

use serde::{Deserialize, Serialize};

/// Sign of `theta - theta0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Less,
    Greater,
}

impl Direction {
    pub fn negate(self) -> Direction {
        match self {
            Direction::Less => Direction::Greater,
            Direction::Greater => Direction::Less,
        }
    }

    /// Sign of a real number; `None` for exact zero and NaN.
    pub fn of(value: f64) -> Option<Direction> {
        if value > 0.0 {
            Some(Direction::Greater)
        } else if value < 0.0 {
            Some(Direction::Less)
        } else {
            None
        }
    }
}

impl std::ops::Neg for Direction {
    type Output = Direction;
    fn neg(self) -> Direction {
        self.negate()
    }
}

/// The state of nature the decision is scored against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrueState {
    Null,
    Effect(Direction),
}

impl fmt::Display for TrueState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrueState::Null => f.write_str("null"),
            TrueState::Effect(Direction::Less) => f.write_str("less"),
            TrueState::Effect(Direction::Greater) => f.write_str("greater"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionalDecision {
    ConcludeLess,
    FailToReject,
    ConcludeGreater,
}

impl DirectionalDecision {
    pub fn concluded(self) -> Option<Direction> {
        match self {
            DirectionalDecision::ConcludeLess => Some(Direction::Less),
            DirectionalDecision::FailToReject => None,
            DirectionalDecision::ConcludeGreater => Some(Direction::Greater),
        }
    }

    pub fn conclude(direction: Direction) -> DirectionalDecision {
        match direction {
            Direction::Less => DirectionalDecision::ConcludeLess,
            Direction::Greater => DirectionalDecision::ConcludeGreater,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DirectionalDecision::ConcludeLess => "conclude_less",
            DirectionalDecision::FailToReject => "fail_to_reject",
            DirectionalDecision::ConcludeGreater => "conclude_greater",
        }
    }
}

impl fmt::Display for DirectionalDecision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Result of a single hypothesis test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub statistic: f64,
    pub p_value: f64,
    /// Sign of the observed effect; absent when it is exactly zero.
    pub observed_direction: Option<Direction>,
    pub permutations_used: Option<usize>,
}

impl TestOutcome {
    pub fn new(statistic: f64, p_value: f64, observed_direction: Option<Direction>) -> Self {
        debug_assert!(
            (0.0..=1.0).contains(&p_value),
            "p-value out of range: {p_value}"
        );
        TestOutcome {
            statistic,
            p_value: p_value.clamp(0.0, 1.0),
            observed_direction,
            permutations_used: None,
        }
    }

    pub fn with_permutations(mut self, n: usize) -> Self {
        self.permutations_used = Some(n);
        self
    }
}

/// Directional reading of a two-sided test: reject when `p <= alpha`, and
/// conclude in the direction of the observed effect. A significant result
/// without an observed direction is not a directional conclusion.
pub fn decide(outcome: &TestOutcome, alpha: f64) -> DirectionalDecision {
    debug_assert!(alpha > 0.0 && alpha < 1.0);
    match outcome.observed_direction {
        Some(d) if outcome.p_value <= alpha => DirectionalDecision::conclude(d),
        _ => DirectionalDecision::FailToReject,
    }
}

/// Error class of a decision given the true state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeClass {
    AlphaLeft,
    AlphaRight,
    CorrectFailUnderNull,
    Power,
    Beta,
    Gamma,
}

pub fn classify(truth: TrueState, decision: DirectionalDecision) -> OutcomeClass {
    use DirectionalDecision::*;
    match (truth, decision) {
        (TrueState::Null, ConcludeLess) => OutcomeClass::AlphaLeft,
        (TrueState::Null, ConcludeGreater) => OutcomeClass::AlphaRight,
        (TrueState::Null, FailToReject) => OutcomeClass::CorrectFailUnderNull,
        (TrueState::Effect(_), FailToReject) => OutcomeClass::Beta,
        (TrueState::Effect(d), decision) => {
            if decision.concluded() == Some(d) {
                OutcomeClass::Power
            } else {
                OutcomeClass::Gamma
            }
        }
    }
}

/// A proportion together with its Monte Carlo standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rate {
    pub count: u64,
    pub rate: f64,
    pub se: f64,
}

impl Rate {
    pub fn new(count: u64, n: u64) -> Rate {
        if n == 0 {
            return Rate {
                count,
                rate: 0.0,
                se: 0.0,
            };
        }
        let r = count as f64 / n as f64;
        Rate {
            count,
            rate: r,
            se: (r * (1.0 - r) / n as f64).sqrt(),
        }
    }
}

/// Integer tallies of decisions against a single true state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DecisionCounts {
    pub conclude_less: u64,
    pub fail_to_reject: u64,
    pub conclude_greater: u64,
}

impl DecisionCounts {
    pub fn record(&mut self, decision: DirectionalDecision) {
        match decision {
            DirectionalDecision::ConcludeLess => self.conclude_less += 1,
            DirectionalDecision::FailToReject => self.fail_to_reject += 1,
            DirectionalDecision::ConcludeGreater => self.conclude_greater += 1,
        }
    }

    pub fn merge(self, other: DecisionCounts) -> DecisionCounts {
        DecisionCounts {
            conclude_less: self.conclude_less + other.conclude_less,
            fail_to_reject: self.fail_to_reject + other.fail_to_reject,
            conclude_greater: self.conclude_greater + other.conclude_greater,
        }
    }

    pub fn total(&self) -> u64 {
        self.conclude_less + self.fail_to_reject + self.conclude_greater
    }
}

impl FromIterator<DirectionalDecision> for DecisionCounts {
    fn from_iter<I: IntoIterator<Item = DirectionalDecision>>(iter: I) -> Self {
        let mut counts = DecisionCounts::default();
        for d in iter {
            counts.record(d);
        }
        counts
    }
}

/// Directional error rates of a decision rule under one true state.
///
/// Under the null only `alpha_left`, `alpha_right` and `fail_under_null` are
/// populated; under an effect only `power`, `beta` and `gamma` are. Rates in
/// the inactive context are zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorDecomposition {
    pub context: TrueState,
    pub n_reps: u64,
    pub alpha_left: Rate,
    pub alpha_right: Rate,
    pub fail_under_null: Rate,
    pub power: Rate,
    pub beta: Rate,
    pub gamma: Rate,
}

impl ErrorDecomposition {
    pub fn from_counts(context: TrueState, counts: DecisionCounts) -> Self {
        let n = counts.total();
        let zero = Rate::new(0, n);
        let mut out = ErrorDecomposition {
            context,
            n_reps: n,
            alpha_left: zero,
            alpha_right: zero,
            fail_under_null: zero,
            power: zero,
            beta: zero,
            gamma: zero,
        };
        match context {
            TrueState::Null => {
                out.alpha_left = Rate::new(counts.conclude_less, n);
                out.alpha_right = Rate::new(counts.conclude_greater, n);
                out.fail_under_null = Rate::new(counts.fail_to_reject, n);
            }
            TrueState::Effect(d) => {
                let (right, wrong) = match d {
                    Direction::Greater => (counts.conclude_greater, counts.conclude_less),
                    Direction::Less => (counts.conclude_less, counts.conclude_greater),
                };
                out.power = Rate::new(right, n);
                out.gamma = Rate::new(wrong, n);
                out.beta = Rate::new(counts.fail_to_reject, n);
            }
        }
        out
    }

    pub fn from_decisions<I>(context: TrueState, decisions: I) -> Self
    where
        I: IntoIterator<Item = DirectionalDecision>,
    {
        Self::from_counts(context, decisions.into_iter().collect())
    }

    /// Share of replications that reached any directional conclusion.
    pub fn rejection_rate(&self) -> Rate {
        let count = match self.context {
            TrueState::Null => self.alpha_left.count + self.alpha_right.count,
            TrueState::Effect(_) => self.power.count + self.gamma.count,
        };
        Rate::new(count, self.n_reps)
    }

    /// Sum of the class counts active in this context; always `n_reps`.
    pub fn total_count(&self) -> u64 {
        match self.context {
            TrueState::Null => {
                self.alpha_left.count + self.alpha_right.count + self.fail_under_null.count
            }
            TrueState::Effect(_) => self.power.count + self.beta.count + self.gamma.count,
        }
    }
}
