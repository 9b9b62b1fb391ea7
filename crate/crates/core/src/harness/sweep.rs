use rayon::prelude::*;
use serde::Serialize;

use super::config::{Experiment, ScenarioConfig, TauRule};
use crate::catalog::{run_and_score, PolicyKind};
use crate::error::{OusError, Result};
use crate::objective::ObjectiveReport;
use crate::problem::{PredictionInterval, ProblemSpec};
use crate::rng::RngStream;
use crate::sampling::randomized_round;
use crate::stats::MonteCarloEstimate;

/// Substream key for points without an interval.
const NO_WIDTH_KEY: u64 = u64::MAX;
/// Substream key for resolving a fractional `τ*` target.
const FIXED_TAU_KEY: u64 = u64::MAX - 1;

/// One aggregated `(policy, τ*, width)` result.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub scenario_id: String,
    pub policy: String,
    pub horizon: u32,
    pub budget: f64,
    /// Empty for replay rows, which aggregate over days with different counts.
    pub tau_star: Option<u32>,
    pub width: Option<u32>,
    /// Replications (or user-days) aggregated; 0 marks a skipped point.
    pub n_reps: usize,
    pub mean_cr: f64,
    pub stderr_cr: f64,
    pub mean_sol: f64,
    pub mean_budget: f64,
    pub mean_penalty: f64,
    /// Some replication depleted its budget to an exact zero probability.
    pub sentinel: bool,
}

impl SweepRow {
    pub(crate) fn aggregate(
        reports: &[ObjectiveReport],
        budget: f64,
        drop_penalty: bool,
    ) -> (MonteCarloEstimate, f64, f64, f64, bool) {
        let n = reports.len();
        let sums: Vec<f64> = reports.iter().map(|r| r.sum_probs).collect();
        let spent = MonteCarloEstimate::from_samples(&sums);
        if drop_penalty {
            let cr = MonteCarloEstimate::from_samples(&sums.iter().map(|s| s / budget).collect::<Vec<_>>());
            return (cr, spent.mean, spent.mean, 0.0, false);
        }
        let cr = MonteCarloEstimate::from_samples(&reports.iter().map(|r| r.competitive_ratio).collect::<Vec<_>>());
        let sol = MonteCarloEstimate::from_samples(&reports.iter().map(|r| r.sol).collect::<Vec<_>>());
        let pen = MonteCarloEstimate::from_samples(&reports.iter().map(|r| r.penalty).collect::<Vec<_>>());
        debug_assert_eq!(cr.n_reps, n);
        (cr, sol.mean, spent.mean, pen.mean, reports.iter().any(|r| r.depleted))
    }

    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_reports(
        scenario_id: &str,
        policy: PolicyKind,
        spec: &ProblemSpec,
        tau_star: Option<u32>,
        width: Option<u32>,
        reports: &[ObjectiveReport],
        drop_penalty: bool,
    ) -> Self {
        let (cr, mean_sol, mean_budget, mean_penalty, sentinel) =
            Self::aggregate(reports, spec.budget(), drop_penalty);
        Self {
            scenario_id: scenario_id.to_string(),
            policy: policy.to_string(),
            horizon: spec.horizon(),
            budget: spec.budget(),
            tau_star,
            width,
            n_reps: cr.n_reps,
            mean_cr: cr.mean,
            stderr_cr: cr.stderr,
            mean_sol,
            mean_budget,
            mean_penalty,
            sentinel,
        }
    }

    pub(crate) fn skipped(
        scenario_id: &str,
        policy: PolicyKind,
        spec: &ProblemSpec,
        tau_star: Option<u32>,
        width: Option<u32>,
    ) -> Self {
        Self {
            scenario_id: scenario_id.to_string(),
            policy: policy.to_string(),
            horizon: spec.horizon(),
            budget: spec.budget(),
            tau_star,
            width,
            n_reps: 0,
            mean_cr: f64::NAN,
            stderr_cr: f64::NAN,
            mean_sol: f64::NAN,
            mean_budget: f64::NAN,
            mean_penalty: f64::NAN,
            sentinel: false,
        }
    }

    pub fn is_skipped(&self) -> bool {
        self.n_reps == 0
    }
}

/// Range of lower bounds `L` such that `[L, L + width]` contains `tau` and
/// stays within `[min_lower, max_upper]`.
fn lower_range(tau: u32, width: u32, min_lower: u32, max_upper: u32) -> Option<(u32, u32)> {
    let lo = tau.saturating_sub(width).max(min_lower);
    let hi = tau.min(max_upper.checked_sub(width)?);
    (lo <= hi).then_some((lo, hi))
}

/// Interval of the given width containing `tau`, placed uniformly among the
/// placements that fit in `[min_lower, max_upper]`. `None` if none fits.
pub fn draw_interval(
    tau: u32,
    width: u32,
    min_lower: u32,
    max_upper: u32,
    rng: &mut RngStream,
) -> Option<PredictionInterval> {
    let (lo, hi) = lower_range(tau, width, min_lower, max_upper)?;
    let l = rng.uniform_int(u64::from(lo), u64::from(hi)) as u32;
    PredictionInterval::new(l, l + width).ok()
}

/// True counts covered by the scenario.
pub fn resolve_taus(cfg: &ScenarioConfig) -> Result<Vec<u32>> {
    let spec = &cfg.spec;
    let horizon = spec.horizon();
    match cfg.tau_rule {
        TauRule::Grid { min, max } => {
            let lo = min.unwrap_or(spec.budget().ceil() as u32).max(1);
            let default_hi = if cfg.experiment.is_audit() { horizon } else { horizon - 1 };
            let hi = max.unwrap_or(default_hi);
            if hi > horizon || lo > hi {
                return Err(OusError::Config(format!(
                    "`tau_rule`: grid [{lo}, {hi}] must be non-empty and within [1, {horizon}]"
                )));
            }
            Ok((lo..=hi).collect())
        }
        TauRule::Fixed { fraction } => {
            let target = fraction * (f64::from(horizon) + spec.budget());
            let mut rng = RngStream::new(cfg.master_seed).derive(FIXED_TAU_KEY);
            let tau = randomized_round(target, &mut rng)
                .map_err(|e| OusError::Config(format!("`tau_rule`: {e}")))?;
            if tau == 0 || tau > u64::from(horizon) {
                return Err(OusError::Config(format!(
                    "`tau_rule`: fixed fraction {fraction} gives τ* = {tau} outside [1, {horizon}]"
                )));
            }
            Ok(vec![tau as u32])
        }
    }
}

/// Replicates one `(τ*, width)` point for every policy in `policies`.
///
/// Replication `r` uses substream `r` of `point_rng`; its child 0 places the
/// interval and every policy starts from a copy of child 1, so policies are
/// compared on common random numbers. Returns one report list per policy.
fn replicate_point(
    spec: &ProblemSpec,
    policies: &[PolicyKind],
    tau: u32,
    width: Option<u32>,
    n_reps: usize,
    point_rng: &RngStream,
) -> Result<Vec<Vec<ObjectiveReport>>> {
    let per_rep: Vec<Vec<ObjectiveReport>> = (0..n_reps as u64)
        .into_par_iter()
        .map(|r| {
            let rep = point_rng.derive(r);
            let interval = match width {
                Some(w) => Some(
                    draw_interval(tau, w, 1, spec.horizon(), &mut rep.derive(0)).ok_or_else(|| {
                        OusError::InvalidInput(format!("no interval of width {w} contains τ* = {tau}"))
                    })?,
                ),
                None => None,
            };
            let policy_rng = rep.derive(1);
            policies
                .iter()
                .map(|kind| {
                    let mut p = kind.build(spec, interval, policy_rng.clone())?;
                    run_and_score(&mut p, tau as usize, spec)
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    Ok((0..policies.len())
        .map(|k| per_rep.iter().map(|reps| reps[k]).collect())
        .collect())
}

struct Point {
    tau: u32,
    width: Option<u32>,
    policies: Vec<(usize, PolicyKind)>,
}

fn run_points(cfg: &ScenarioConfig, points: Vec<Point>, drop_penalty: bool) -> Result<Vec<SweepRow>> {
    let root = RngStream::new(cfg.master_seed);
    let spec = &cfg.spec;
    let mut keyed = Vec::new();
    for pt in points {
        let kinds: Vec<PolicyKind> = pt.policies.iter().map(|&(_, k)| k).collect();
        let fits = pt
            .width
            .is_none_or(|w| lower_range(pt.tau, w, 1, spec.horizon()).is_some());
        if !fits {
            for &(idx, kind) in &pt.policies {
                keyed.push((
                    (idx, pt.tau, pt.width),
                    SweepRow::skipped(&cfg.scenario_id, kind, spec, Some(pt.tau), pt.width),
                ));
            }
            continue;
        }
        let point_rng = root
            .derive(u64::from(pt.tau))
            .derive(pt.width.map_or(NO_WIDTH_KEY, u64::from));
        let reports = replicate_point(spec, &kinds, pt.tau, pt.width, cfg.n_reps, &point_rng)?;
        for (&(idx, kind), reps) in pt.policies.iter().zip(&reports) {
            keyed.push((
                (idx, pt.tau, pt.width),
                SweepRow::from_reports(&cfg.scenario_id, kind, spec, Some(pt.tau), pt.width, reps, drop_penalty),
            ));
        }
    }
    keyed.sort_by_key(|(k, _)| *k);
    Ok(keyed.into_iter().map(|(_, row)| row).collect())
}

/// Points for sweeps over `τ*`: interval-free policies once per count,
/// interval policies once per configured width (default `[0]`).
fn tau_points(cfg: &ScenarioConfig) -> Result<Vec<Point>> {
    let widths = cfg.widths.clone().unwrap_or_else(|| vec![0]);
    let (with_iv, without): (Vec<_>, Vec<_>) = cfg
        .policies
        .iter()
        .copied()
        .enumerate()
        .partition(|(_, k)| k.needs_interval());
    let mut points = Vec::new();
    for tau in resolve_taus(cfg)? {
        if !without.is_empty() {
            points.push(Point { tau, width: None, policies: without.clone() });
        }
        if !with_iv.is_empty() {
            for &w in &widths {
                points.push(Point { tau, width: Some(w), policies: with_iv.clone() });
            }
        }
    }
    Ok(points)
}

fn expect(cfg: &ScenarioConfig, ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(OusError::Config(format!(
            "`experiment`: {what} cannot run a {:?} scenario",
            cfg.experiment
        )))
    }
}

/// Mean competitive ratio per `(policy, τ*)` over the count grid.
pub fn run_tau_sweep(cfg: &ScenarioConfig) -> Result<Vec<SweepRow>> {
    expect(cfg, cfg.experiment == Experiment::TauSweep, "tau sweep")?;
    run_points(cfg, tau_points(cfg)?, false)
}

/// Mean competitive ratio per `(policy, width)` at the configured count.
/// Every policy, interval-based or not, sees the same replications.
pub fn run_width_sweep(cfg: &ScenarioConfig) -> Result<Vec<SweepRow>> {
    expect(cfg, cfg.experiment == Experiment::WidthSweep, "width sweep")?;
    let widths = cfg
        .widths
        .clone()
        .filter(|w| !w.is_empty())
        .ok_or_else(|| OusError::Config("`widths` is required for width_sweep".into()))?;
    let all: Vec<(usize, PolicyKind)> = cfg.policies.iter().copied().enumerate().collect();
    let mut points = Vec::new();
    for tau in resolve_taus(cfg)? {
        for &w in &widths {
            points.push(Point { tau, width: Some(w), policies: all.clone() });
        }
    }
    run_points(cfg, points, false)
}

/// Expected budget spent per `(policy, τ*)`. A no-penalty sweep also
/// reports SOL and the ratio with the uniformity penalty removed.
pub fn run_budget_audit(cfg: &ScenarioConfig) -> Result<Vec<SweepRow>> {
    expect(cfg, cfg.experiment.is_audit(), "budget audit")?;
    run_points(cfg, tau_points(cfg)?, cfg.experiment == Experiment::NoPenaltySweep)
}

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<Vec<SweepRow>> {
    match cfg.experiment {
        Experiment::TauSweep => run_tau_sweep(cfg),
        Experiment::WidthSweep => run_width_sweep(cfg),
        Experiment::BudgetAudit | Experiment::NoPenaltySweep => run_budget_audit(cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(t: u32, exp: Experiment, policies: &[&str], n: usize) -> ScenarioConfig {
        ScenarioConfig::new(
            "t",
            ProblemSpec::new(t, 3.0).unwrap(),
            exp,
            policies.iter().map(|p| p.parse().unwrap()).collect(),
            n,
            11,
        )
    }

    #[test]
    fn interval_placement() {
        let mut rng = RngStream::new(0);
        for _ in 0..200 {
            let iv = draw_interval(12, 5, 1, 22, &mut rng).unwrap();
            assert!(iv.contains(12) && iv.width() == 5 && iv.upper() <= 22 && iv.lower() >= 1);
        }
        assert_eq!(draw_interval(12, 0, 1, 22, &mut rng), Some(PredictionInterval::exact(12).unwrap()));
        assert!(draw_interval(12, 22, 1, 22, &mut rng).is_none());
        // Only L ∈ [1, 3] keeps U = L + 19 within 22.
        for _ in 0..100 {
            assert!(draw_interval(12, 19, 1, 22, &mut rng).unwrap().lower() <= 3);
        }
    }

    #[test]
    fn grid_defaults() {
        let c = cfg(8, Experiment::TauSweep, &["alg1"], 1);
        assert_eq!(resolve_taus(&c).unwrap(), vec![3, 4, 5, 6, 7]);
        let c = cfg(8, Experiment::BudgetAudit, &["alg1"], 1);
        assert_eq!(resolve_taus(&c).unwrap(), vec![3, 4, 5, 6, 7, 8]);
    }

    #[test]
    fn fixed_tau_rounds_to_neighbour() {
        let c = cfg(22, Experiment::WidthSweep, &["alg1"], 1).with_tau_rule(TauRule::Fixed { fraction: 0.5 });
        let t = resolve_taus(&c).unwrap();
        assert!(t == vec![12] || t == vec![13]);
        assert_eq!(resolve_taus(&c).unwrap(), t);
    }

    #[test]
    fn constant_rows_are_exact() {
        let rows = run_tau_sweep(&cfg(8, Experiment::TauSweep, &["const_bT"], 50)).unwrap();
        assert_eq!(rows.len(), 5);
        let r7 = rows.iter().find(|r| r.tau_star == Some(7)).unwrap();
        assert_eq!(r7.mean_cr, 0.875);
        assert_eq!(r7.stderr_cr, 0.0);
        let r3 = rows.iter().find(|r| r.tau_star == Some(3)).unwrap();
        assert_eq!(r3.mean_cr, 0.375);
    }

    #[test]
    fn rows_sorted_by_policy_then_tau() {
        let rows = run_tau_sweep(&cfg(8, Experiment::TauSweep, &["alg1", "const_bT"], 20)).unwrap();
        assert_eq!(rows.len(), 10);
        assert!(rows[..5].iter().all(|r| r.policy == "alg1"));
        assert!(rows.windows(2).take(4).all(|w| w[0].tau_star < w[1].tau_star));
    }

    #[test]
    fn width_zero_is_consistent() {
        let c = cfg(22, Experiment::WidthSweep, &["alg2", "const_bU"], 200)
            .with_tau_rule(TauRule::Fixed { fraction: 0.5 })
            .with_widths(vec![0, 3]);
        let rows = run_width_sweep(&c).unwrap();
        for r in rows.iter().filter(|r| r.width == Some(0)) {
            assert!((r.mean_cr - 1.0).abs() < 1e-12, "{r:?}");
            assert_eq!(r.stderr_cr, 0.0);
        }
    }

    #[test]
    fn impossible_width_gives_skip_row() {
        let c = cfg(8, Experiment::WidthSweep, &["alg2"], 10)
            .with_tau_rule(TauRule::Fixed { fraction: 0.5 })
            .with_widths(vec![0, 8]);
        let rows = run_width_sweep(&c).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(!rows[0].is_skipped());
        assert!(rows[1].is_skipped());
    }

    #[test]
    fn no_penalty_audit_reports_spend() {
        let c = cfg(22, Experiment::NoPenaltySweep, &["alg1"], 200);
        for r in run_budget_audit(&c).unwrap() {
            assert_eq!(r.mean_sol, r.mean_budget);
            assert_eq!(r.mean_penalty, 0.0);
            assert!((r.mean_cr - r.mean_budget / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn experiment_mismatch_is_rejected() {
        assert!(run_tau_sweep(&cfg(8, Experiment::BudgetAudit, &["alg1"], 1)).is_err());
        assert!(run_budget_audit(&cfg(8, Experiment::TauSweep, &["alg1"], 1)).is_err());
    }
}
