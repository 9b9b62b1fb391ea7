//! Comparison policies: constant rates and the SeqRTS point-estimate heuristic.

use serde::{Deserialize, Serialize};

use crate::algorithms::{ArrivalCursor, OnlinePolicy};
use crate::error::{OusError, Result};
use crate::problem::{PredictionInterval, ProblemSpec};
use crate::rng::RngStream;

/// Floor SeqRTS assigns once its estimate is exhausted.
pub const SEQRTS_DEFAULT_MIN_PROBABILITY: f64 = 1e-6;

/// Emits the same rate at every arrival.
#[derive(Debug, Clone)]
pub struct ConstantPolicy {
    rate: f64,
    cursor: ArrivalCursor,
}

impl ConstantPolicy {
    pub fn rate(&self) -> f64 {
        self.rate
    }
}

/// Constant policy at `rate`, e.g. `b/T` or `b/U`.
///
/// A rate of exactly 1 is accepted for the degenerate `U = b` case.
pub fn constant_policy(rate: f64) -> Result<ConstantPolicy> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(OusError::InvalidParameter(format!(
            "constant rate must lie in (0, 1], got {rate}"
        )));
    }
    Ok(ConstantPolicy {
        rate,
        cursor: ArrivalCursor::default(),
    })
}

impl OnlinePolicy for ConstantPolicy {
    fn next_probability(&mut self, i: usize) -> Result<f64> {
        self.cursor.advance(i)?;
        Ok(self.rate)
    }

    fn next_run(&mut self, i: usize, max_len: usize) -> Result<(f64, usize)> {
        self.cursor.advance(i)?;
        let len = max_len.max(1);
        self.cursor.skip_to(i + len - 1);
        Ok((self.rate, len))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeqRtsConfig {
    pub min_probability: f64,
    pub interval: PredictionInterval,
}

impl SeqRtsConfig {
    pub fn new(interval: PredictionInterval) -> Self {
        Self {
            min_probability: SEQRTS_DEFAULT_MIN_PROBABILITY,
            interval,
        }
    }

    pub fn with_min_probability(mut self, eps: f64) -> Self {
        self.min_probability = eps;
        self
    }

    fn validate(&self, spec: &ProblemSpec) -> Result<()> {
        self.interval.validate_for(spec)?;
        let eps = self.min_probability;
        let floor = spec.budget() / f64::from(self.interval.upper());
        if !(0.0..1.0).contains(&eps) || eps >= floor {
            return Err(OusError::InvalidParameter(format!(
                "SeqRTS minimum probability {eps} must lie in [0, b/U = {floor})"
            )));
        }
        Ok(())
    }
}

/// SeqRTS: spend `b/τ̂` per arrival against a point estimate `τ̂` drawn
/// uniformly from `[L, U]`, then fall back to the minimum probability.
///
/// When `τ̂ < b` the rate is capped at 1 and the budget left over after `τ̂`
/// arrivals is handed out at most 1 per arrival before the fallback.
#[derive(Debug, Clone)]
pub struct SeqRtsPolicy {
    rate: f64,
    estimate: u32,
    leftover: f64,
    min_probability: f64,
    cursor: ArrivalCursor,
}

impl SeqRtsPolicy {
    pub fn estimate(&self) -> u32 {
        self.estimate
    }

    /// Policy with a given estimate instead of a random one.
    pub fn with_estimate(spec: &ProblemSpec, cfg: &SeqRtsConfig, estimate: u32) -> Result<Self> {
        cfg.validate(spec)?;
        if !cfg.interval.contains(estimate) || estimate == 0 {
            return Err(OusError::InvalidInput(format!(
                "estimate {estimate} outside [{}, {}]",
                cfg.interval.lower(),
                cfg.interval.upper()
            )));
        }
        let rate = (spec.budget() / f64::from(estimate)).min(1.0);
        let leftover = if rate == 1.0 { spec.budget() - f64::from(estimate) } else { 0.0 };
        Ok(Self {
            rate,
            estimate,
            leftover,
            min_probability: cfg.min_probability,
            cursor: ArrivalCursor::default(),
        })
    }
}

pub fn seqrts_policy(spec: &ProblemSpec, cfg: &SeqRtsConfig, mut rng: RngStream) -> Result<SeqRtsPolicy> {
    cfg.validate(spec)?;
    let lo = cfg.interval.lower().max(1);
    let estimate = rng.uniform_int(u64::from(lo), u64::from(cfg.interval.upper())) as u32;
    SeqRtsPolicy::with_estimate(spec, cfg, estimate)
}

impl OnlinePolicy for SeqRtsPolicy {
    fn next_probability(&mut self, i: usize) -> Result<f64> {
        self.cursor.advance(i)?;
        Ok(if i <= self.estimate as usize {
            self.rate
        } else if self.leftover > 0.0 {
            let p = self.leftover.min(1.0);
            self.leftover -= p;
            p.max(self.min_probability)
        } else {
            self.min_probability
        })
    }

    fn next_run(&mut self, i: usize, max_len: usize) -> Result<(f64, usize)> {
        let leftover_before = self.leftover;
        let p = self.next_probability(i)?;
        let estimate = self.estimate as usize;
        let len = if i <= estimate {
            max_len.min(estimate - i + 1)
        } else if leftover_before > 0.0 {
            1
        } else {
            max_len
        }
        .max(1);
        self.cursor.skip_to(i + len - 1);
        Ok((p, len))
    }
}
