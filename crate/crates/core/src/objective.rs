//! Scoring of emitted probability sequences.
//!
//! The objective for one decision period is
//! `Σ pᵢ − σ·ln(max pᵢ / min pᵢ)` with `σ = 1/τ*` unless the spec overrides
//! it. The clairvoyant optimum spreads the budget evenly and scores exactly
//! `b`, so the competitive ratio of a sequence is its objective divided by `b`.

use serde::{Deserialize, Serialize};

use crate::error::{OusError, Result};
use crate::problem::ProblemSpec;

/// Probabilities emitted for risk times `1..=τ*`, in arrival order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ProbabilityAssignment(Vec<f64>);

impl ProbabilityAssignment {
    pub fn new(probs: Vec<f64>) -> Self {
        Self(probs)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn is_non_increasing(&self) -> bool {
        self.0.windows(2).all(|w| w[1] <= w[0])
    }
}

impl From<Vec<f64>> for ProbabilityAssignment {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

/// Objective breakdown for one decision period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveReport {
    pub sum_probs: f64,
    pub penalty: f64,
    pub sol: f64,
    pub opt: f64,
    pub competitive_ratio: f64,
    /// Penalty evaluated with `σ = 1/τ*` regardless of any override.
    pub entropy_change: f64,
    /// Set when some probability was exactly zero: the objective is `−∞`.
    pub depleted: bool,
}

impl ObjectiveReport {
    /// Budget spent relative to `b`, ignoring the uniformity penalty.
    pub fn budget_ratio(&self) -> f64 {
        self.sum_probs / self.opt
    }
}

/// How exact zeros are treated while scoring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroPolicy {
    Reject,
    /// Score as a depleted sequence: `SOL = −∞`, penalty `+∞`.
    Sentinel,
}

/// Single-pass accumulator behind every scoring path.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ObjectiveTally {
    count: usize,
    sum: f64,
    max: f64,
    min: f64,
    zero_seen: bool,
    invalid: Option<(usize, f64)>,
}

impl ObjectiveTally {
    pub(crate) fn new() -> Self {
        Self {
            count: 0,
            sum: 0.0,
            max: f64::NEG_INFINITY,
            min: f64::INFINITY,
            zero_seen: false,
            invalid: None,
        }
    }

    #[inline]
    pub(crate) fn push(&mut self, p: f64) {
        self.push_run(p, 1);
    }

    /// `len` consecutive arrivals at probability `p`.
    #[inline]
    pub(crate) fn push_run(&mut self, p: f64, len: usize) {
        let index = self.count;
        self.count += len;
        if p == 0.0 {
            self.zero_seen = true;
        } else if !(p > 0.0 && p <= 1.0) && self.invalid.is_none() {
            self.invalid = Some((index, p));
        }
        self.sum += if len == 1 { p } else { p * len as f64 };
        self.max = self.max.max(p);
        self.min = self.min.min(p);
    }

    pub(crate) fn finish(
        &self,
        tau_star: usize,
        spec: &ProblemSpec,
        zeros: ZeroPolicy,
    ) -> Result<ObjectiveReport> {
        if tau_star == 0 || self.count != tau_star {
            return Err(OusError::InvalidInput(format!(
                "expected {tau_star} probabilities, got {}",
                self.count
            )));
        }
        if let Some((index, value)) = self.invalid {
            return Err(OusError::InvalidProbability { index, value });
        }
        let b = spec.budget();
        let inv_tau = 1.0 / tau_star as f64;
        if self.zero_seen {
            if zeros == ZeroPolicy::Reject {
                return Err(OusError::InvalidProbability { index: 0, value: 0.0 });
            }
            return Ok(ObjectiveReport {
                sum_probs: self.sum,
                penalty: f64::INFINITY,
                sol: f64::NEG_INFINITY,
                opt: b,
                competitive_ratio: f64::NEG_INFINITY,
                entropy_change: f64::INFINITY,
                depleted: true,
            });
        }
        let log_spread = (self.max / self.min).ln();
        let sigma = spec.sigma().unwrap_or(inv_tau);
        let penalty = sigma * log_spread;
        let sol = self.sum - penalty;
        Ok(ObjectiveReport {
            sum_probs: self.sum,
            penalty,
            sol,
            opt: b,
            competitive_ratio: sol / b,
            entropy_change: inv_tau * log_spread,
            depleted: false,
        })
    }
}

/// Scores `probs` against the clairvoyant optimum `b`.
///
/// Every probability must lie in `(0, 1]`. The upper end is closed because the
/// clairvoyant itself emits `b/τ* = 1` when `τ* = b`.
pub fn evaluate_objective(
    probs: &ProbabilityAssignment,
    tau_star: usize,
    spec: &ProblemSpec,
) -> Result<ObjectiveReport> {
    score(probs, tau_star, spec, ZeroPolicy::Reject)
}

/// Like [`evaluate_objective`] but maps exact zeros to the depleted sentinel.
pub fn evaluate_with_depletion(
    probs: &ProbabilityAssignment,
    tau_star: usize,
    spec: &ProblemSpec,
) -> Result<ObjectiveReport> {
    score(probs, tau_star, spec, ZeroPolicy::Sentinel)
}

fn score(
    probs: &ProbabilityAssignment,
    tau_star: usize,
    spec: &ProblemSpec,
    zeros: ZeroPolicy,
) -> Result<ObjectiveReport> {
    let mut tally = ObjectiveTally::new();
    for &p in probs.as_slice() {
        tally.push(p);
    }
    tally.finish(tau_star, spec, zeros)
}
