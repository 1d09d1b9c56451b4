//! Directional audits of two-sided hypothesis tests and confidence intervals.
//!
//! A two-sided test or interval is usually read directionally: a rejection
//! is reported as "greater" or "less", and an interval's lower bound is
//! quoted on its own. This crate measures how such readings behave:
//!
//! * [`decision`] maps test outcomes to directional decisions and tallies
//!   partial left/right type I errors and type III (wrong sign) errors.
//! * [`roc`] and [`survival`] implement curve comparisons whose directional
//!   reading can be badly miscalibrated when curves cross.
//! * [`intervals`] builds binomial intervals and audits their one-sided miss
//!   rates and half-widths exactly.
//! * [`scenarios`] and [`harness`] run reproducible Monte Carlo experiments.

pub mod decision;
pub mod error;
pub mod harness;
pub mod intervals;
pub mod rng;
pub mod roc;
pub mod scenarios;
pub mod stats;
pub mod survival;

pub use decision::{
    classify, decide, Direction, DirectionalDecision, ErrorDecomposition, OutcomeClass, Rate,
    TestOutcome, TrueState,
};
pub use error::{Error, Result};
pub use rng::{rng_stream, RngState};
