//! Offline replay of policies over extracted user-days.

use rayon::prelude::*;

use super::extract::{UserDay, DECISIONS_PER_DAY};
use crate::catalog::{run_and_score, PolicyKind};
use crate::error::{OusError, Result};
use crate::harness::{draw_interval, SweepRow};
use crate::objective::ObjectiveReport;
use crate::problem::ProblemSpec;
use crate::rng::RngStream;

/// Smallest lower bound a replay interval may take.
pub const REPLAY_MIN_LOWER: u32 = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct ReplayConfig {
    pub budget: f64,
    pub horizon: u32,
    pub width: u32,
    pub policies: Vec<PolicyKind>,
    pub sigma: Option<f64>,
}

impl ReplayConfig {
    pub fn new(width: u32, policies: Vec<PolicyKind>) -> Self {
        Self {
            budget: 1.5,
            horizon: DECISIONS_PER_DAY as u32,
            width,
            policies,
            sigma: None,
        }
    }

    pub fn with_budget(mut self, budget: f64) -> Self {
        self.budget = budget;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplayOutcome {
    /// One row per policy, in the configured order.
    pub rows: Vec<SweepRow>,
    pub days_used: usize,
    /// Days with no available risk time.
    pub skipped_empty: usize,
    /// Days whose drawn interval ended below the budget.
    pub skipped_below_budget: usize,
}

/// Replays with the default horizon of 144 and no σ override.
pub fn replay(
    days: &[UserDay],
    policies: &[PolicyKind],
    width: u32,
    budget: f64,
    rng: &RngStream,
) -> Result<ReplayOutcome> {
    replay_with(&ReplayConfig::new(width, policies.to_vec()).with_budget(budget), days, rng)
}

/// Runs every policy over each day's `τ*` risk times and averages the scores
/// across days.
///
/// Day `d` (by position) uses substream `d` of `rng`: child 0 places the
/// interval and each policy starts from a copy of child 1. An interval is
/// placed uniformly in `[2, T]` around `max(τ*, 2)`.
pub fn replay_with(cfg: &ReplayConfig, days: &[UserDay], rng: &RngStream) -> Result<ReplayOutcome> {
    let spec = ProblemSpec::new(cfg.horizon, cfg.budget)?.with_sigma(cfg.sigma)?;
    if cfg.policies.is_empty() {
        return Err(OusError::InvalidInput("replay needs at least one policy".into()));
    }
    if cfg.width > cfg.horizon - REPLAY_MIN_LOWER {
        return Err(OusError::InvalidParameter(format!(
            "interval width {} does not fit in [{REPLAY_MIN_LOWER}, {}]",
            cfg.width, cfg.horizon
        )));
    }
    if let Some(d) = days.iter().find(|d| d.tau_star > cfg.horizon) {
        return Err(OusError::InvalidInput(format!(
            "user-day {} {} has τ* = {} above T = {}",
            d.user_id, d.date, d.tau_star, cfg.horizon
        )));
    }

    enum DayResult {
        Empty,
        BelowBudget,
        Scored(Vec<ObjectiveReport>),
    }

    let per_day: Vec<DayResult> = days
        .par_iter()
        .enumerate()
        .map(|(d, day)| {
            if day.tau_star == 0 {
                return Ok(DayResult::Empty);
            }
            let stream = rng.derive(d as u64);
            let anchor = day.tau_star.max(REPLAY_MIN_LOWER);
            let interval = draw_interval(anchor, cfg.width, REPLAY_MIN_LOWER, cfg.horizon, &mut stream.derive(0))
                .ok_or_else(|| OusError::InvalidInput(format!("no interval of width {} fits", cfg.width)))?;
            if f64::from(interval.upper()) < cfg.budget {
                return Ok(DayResult::BelowBudget);
            }
            let policy_rng = stream.derive(1);
            cfg.policies
                .iter()
                .map(|kind| {
                    let mut p = kind.build(&spec, Some(interval), policy_rng.clone())?;
                    run_and_score(&mut p, day.tau_star as usize, &spec)
                })
                .collect::<Result<Vec<_>>>()
                .map(DayResult::Scored)
        })
        .collect::<Result<_>>()?;

    let mut skipped_empty = 0;
    let mut skipped_below_budget = 0;
    let mut scored = Vec::new();
    for r in per_day {
        match r {
            DayResult::Empty => skipped_empty += 1,
            DayResult::BelowBudget => skipped_below_budget += 1,
            DayResult::Scored(reports) => scored.push(reports),
        }
    }
    let rows = cfg
        .policies
        .iter()
        .enumerate()
        .map(|(k, &kind)| {
            if scored.is_empty() {
                return SweepRow::skipped("replay", kind, &spec, None, Some(cfg.width));
            }
            let reports: Vec<ObjectiveReport> = scored.iter().map(|r| r[k]).collect();
            SweepRow::from_reports("replay", kind, &spec, None, Some(cfg.width), &reports, false)
        })
        .collect();
    Ok(ReplayOutcome {
        rows,
        days_used: scored.len(),
        skipped_empty,
        skipped_below_budget,
    })
}
