//! Named policies as they appear in scenario configs and CSV output.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algorithms::{BoundaryRounding, OnlinePolicy, StagedPolicy};
use crate::baselines::{
    constant_policy, seqrts_policy, ConstantPolicy, SeqRtsConfig, SeqRtsPolicy,
    SEQRTS_DEFAULT_MIN_PROBABILITY,
};
use crate::error::{OusError, Result};
use crate::objective::{ObjectiveReport, ObjectiveTally, ZeroPolicy};
use crate::problem::{PredictionInterval, ProblemSpec};
use crate::rng::RngStream;

/// Policy identifier.
///
/// Text forms: `alg1`, `alg2`, `alg1_literal`, `alg2_literal`, `const_bT`,
/// `const_bU`, `seqrts` and `seqrts:<min probability>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum PolicyKind {
    Randomized(BoundaryRounding),
    LearningAugmented(BoundaryRounding),
    ConstantOverHorizon,
    ConstantOverUpper,
    SeqRts { min_probability: f64 },
}

impl PolicyKind {
    pub const ALG1: PolicyKind = PolicyKind::Randomized(BoundaryRounding::PerStage);
    pub const ALG2: PolicyKind = PolicyKind::LearningAugmented(BoundaryRounding::PerStage);

    pub fn seqrts() -> Self {
        PolicyKind::SeqRts {
            min_probability: SEQRTS_DEFAULT_MIN_PROBABILITY,
        }
    }

    /// Whether the policy reads a prediction interval.
    pub fn needs_interval(&self) -> bool {
        matches!(
            self,
            PolicyKind::LearningAugmented(_) | PolicyKind::ConstantOverUpper | PolicyKind::SeqRts { .. }
        )
    }

    pub fn build(
        &self,
        spec: &ProblemSpec,
        interval: Option<PredictionInterval>,
        rng: RngStream,
    ) -> Result<AnyPolicy> {
        let need = |iv: Option<PredictionInterval>| {
            iv.ok_or_else(|| OusError::InvalidInput(format!("policy {self} needs a prediction interval")))
        };
        Ok(match *self {
            PolicyKind::Randomized(r) => AnyPolicy::Staged(StagedPolicy::randomized(spec, rng, r)?),
            PolicyKind::LearningAugmented(r) => {
                AnyPolicy::Staged(StagedPolicy::learning_augmented(spec, need(interval)?, rng, r)?)
            }
            PolicyKind::ConstantOverHorizon => {
                AnyPolicy::Constant(constant_policy(spec.budget() / f64::from(spec.horizon()))?)
            }
            PolicyKind::ConstantOverUpper => {
                let iv = need(interval)?;
                iv.validate_for(spec)?;
                AnyPolicy::Constant(constant_policy(spec.budget() / f64::from(iv.upper()))?)
            }
            PolicyKind::SeqRts { min_probability } => {
                let cfg = SeqRtsConfig::new(need(interval)?).with_min_probability(min_probability);
                AnyPolicy::SeqRts(seqrts_policy(spec, &cfg, rng)?)
            }
        })
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolicyKind::Randomized(BoundaryRounding::PerStage) => f.write_str("alg1"),
            PolicyKind::Randomized(BoundaryRounding::PerArrival) => f.write_str("alg1_literal"),
            PolicyKind::LearningAugmented(BoundaryRounding::PerStage) => f.write_str("alg2"),
            PolicyKind::LearningAugmented(BoundaryRounding::PerArrival) => f.write_str("alg2_literal"),
            PolicyKind::ConstantOverHorizon => f.write_str("const_bT"),
            PolicyKind::ConstantOverUpper => f.write_str("const_bU"),
            PolicyKind::SeqRts { min_probability } if *min_probability == SEQRTS_DEFAULT_MIN_PROBABILITY => {
                f.write_str("seqrts")
            }
            PolicyKind::SeqRts { min_probability } => write!(f, "seqrts:{min_probability}"),
        }
    }
}

impl FromStr for PolicyKind {
    type Err = OusError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "alg1" => PolicyKind::ALG1,
            "alg1_literal" => PolicyKind::Randomized(BoundaryRounding::PerArrival),
            "alg2" => PolicyKind::ALG2,
            "alg2_literal" => PolicyKind::LearningAugmented(BoundaryRounding::PerArrival),
            "const_bT" => PolicyKind::ConstantOverHorizon,
            "const_bU" => PolicyKind::ConstantOverUpper,
            "seqrts" => PolicyKind::seqrts(),
            other => match other.strip_prefix("seqrts:") {
                Some(eps) => {
                    let min_probability: f64 = eps
                        .parse()
                        .map_err(|_| OusError::Config(format!("bad SeqRTS minimum probability in {other:?}")))?;
                    if !(0.0..1.0).contains(&min_probability) {
                        return Err(OusError::Config(format!(
                            "SeqRTS minimum probability must lie in [0, 1), got {min_probability}"
                        )));
                    }
                    PolicyKind::SeqRts { min_probability }
                }
                None => return Err(OusError::Config(format!("unknown policy {other:?}"))),
            },
        })
    }
}

impl TryFrom<String> for PolicyKind {
    type Error = OusError;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<PolicyKind> for String {
    fn from(p: PolicyKind) -> Self {
        p.to_string()
    }
}

/// Statically dispatched union of every built-in policy.
#[derive(Debug, Clone)]
pub enum AnyPolicy {
    Staged(StagedPolicy),
    Constant(ConstantPolicy),
    SeqRts(SeqRtsPolicy),
}

impl OnlinePolicy for AnyPolicy {
    #[inline]
    fn next_probability(&mut self, i: usize) -> Result<f64> {
        match self {
            AnyPolicy::Staged(p) => p.next_probability(i),
            AnyPolicy::Constant(p) => p.next_probability(i),
            AnyPolicy::SeqRts(p) => p.next_probability(i),
        }
    }

    #[inline]
    fn next_run(&mut self, i: usize, max_len: usize) -> Result<(f64, usize)> {
        match self {
            AnyPolicy::Staged(p) => p.next_run(i, max_len),
            AnyPolicy::Constant(p) => p.next_run(i, max_len),
            AnyPolicy::SeqRts(p) => p.next_run(i, max_len),
        }
    }
}

/// Drives a policy for `tau_star` arrivals and scores it without buffering
/// the sequence, one constant run at a time. Exact zeros score as depleted.
pub fn run_and_score<P: OnlinePolicy + ?Sized>(
    policy: &mut P,
    tau_star: usize,
    spec: &ProblemSpec,
) -> Result<ObjectiveReport> {
    let mut tally = ObjectiveTally::new();
    let mut i = 1;
    while i <= tau_star {
        let (p, len) = policy.next_run(i, tau_star - i + 1)?;
        tally.push_run(p, len);
        i += len;
    }
    tally.finish(tau_star, spec, ZeroPolicy::Sentinel)
}
