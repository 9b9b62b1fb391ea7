use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::catalog::PolicyKind;
use crate::error::{OusError, Result};
use crate::problem::ProblemSpec;

/// Replications per `(policy, τ*, width)` point unless configured otherwise.
pub const DEFAULT_N_REPS: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    TauSweep,
    WidthSweep,
    BudgetAudit,
    NoPenaltySweep,
}

impl Experiment {
    pub fn is_audit(self) -> bool {
        matches!(self, Experiment::BudgetAudit | Experiment::NoPenaltySweep)
    }
}

/// How the true arrival counts of a scenario are chosen.
///
/// JSON forms: `"grid"`, `{"grid": {"min": 3, "max": 22}}`, `{"fixed": 0.5}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", from = "TauRuleRepr")]
pub enum TauRule {
    /// Every integer in `[min, max]`. Defaults: `min = ⌈b⌉`; `max = T − 1`
    /// for tau sweeps and `T` for audits.
    Grid { min: Option<u32>, max: Option<u32> },
    /// `τ* = Int[f·(T + b)]`, randomized rounding fixed by the scenario seed.
    Fixed { fraction: f64 },
}

impl Default for TauRule {
    fn default() -> Self {
        TauRule::Grid { min: None, max: None }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum TauRuleRepr {
    Name(String),
    Grid { grid: GridBounds },
    Fixed { fixed: f64 },
}

#[derive(Deserialize)]
struct GridBounds {
    min: Option<u32>,
    max: Option<u32>,
}

impl From<TauRuleRepr> for TauRule {
    fn from(r: TauRuleRepr) -> Self {
        match r {
            // Unknown names are caught by `ScenarioFile::resolve`.
            TauRuleRepr::Name(n) if n == "grid" => TauRule::default(),
            TauRuleRepr::Name(n) => TauRule::Fixed {
                fraction: n.parse().unwrap_or(f64::NAN),
            },
            TauRuleRepr::Grid { grid } => TauRule::Grid {
                min: grid.min,
                max: grid.max,
            },
            TauRuleRepr::Fixed { fixed } => TauRule::Fixed { fraction: fixed },
        }
    }
}

/// Scenario config as written on disk. Every field is optional so that
/// command-line flags can fill or override it before [`ScenarioFile::resolve`].
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default)]
    pub scenario_id: Option<String>,
    #[serde(rename = "T", default)]
    pub horizon: Option<u32>,
    #[serde(default)]
    pub b: Option<f64>,
    #[serde(default)]
    pub experiment: Option<Experiment>,
    #[serde(default)]
    pub policies: Option<Vec<PolicyKind>>,
    #[serde(default)]
    pub tau_rule: Option<TauRule>,
    #[serde(default)]
    pub widths: Option<Vec<u32>>,
    #[serde(default)]
    pub n_reps: Option<usize>,
    #[serde(default)]
    pub master_seed: Option<u64>,
    #[serde(default)]
    pub sigma: Option<f64>,
}

impl ScenarioFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| OusError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| OusError::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            OusError::Config(m) => OusError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn resolve(&self) -> Result<ScenarioConfig> {
        let missing = |field: &str| OusError::Config(format!("missing field `{field}`"));
        let horizon = self.horizon.ok_or_else(|| missing("T"))?;
        let b = self.b.ok_or_else(|| missing("b"))?;
        let spec = ProblemSpec::new(horizon, b)
            .and_then(|s| s.with_sigma(self.sigma))
            .map_err(|e| OusError::Config(format!("`T`/`b`/`sigma`: {e}")))?;
        let experiment = self.experiment.ok_or_else(|| missing("experiment"))?;
        let policies = self.policies.clone().ok_or_else(|| missing("policies"))?;
        if policies.is_empty() {
            return Err(OusError::Config("`policies` must not be empty".into()));
        }
        let n_reps = self.n_reps.unwrap_or(DEFAULT_N_REPS);
        if n_reps == 0 {
            return Err(OusError::Config("`n_reps` must be at least 1".into()));
        }
        let master_seed = self.master_seed.ok_or_else(|| missing("master_seed"))?;
        let tau_rule = self.tau_rule.unwrap_or_default();
        if let TauRule::Fixed { fraction } = tau_rule {
            if !(fraction.is_finite() && fraction > 0.0) {
                return Err(OusError::Config(format!(
                    "`tau_rule`: expected \"grid\", {{\"grid\": {{..}}}} or {{\"fixed\": f}} with f > 0, got fraction {fraction}"
                )));
            }
        }
        if experiment == Experiment::WidthSweep && self.widths.as_ref().is_none_or(|w| w.is_empty()) {
            return Err(OusError::Config("`widths` is required for width_sweep".into()));
        }
        let scenario_id = self.scenario_id.clone().unwrap_or_else(|| {
            let name = match experiment {
                Experiment::TauSweep => "tau_sweep",
                Experiment::WidthSweep => "width_sweep",
                Experiment::BudgetAudit => "budget_audit",
                Experiment::NoPenaltySweep => "no_penalty_sweep",
            };
            format!("{name}_T{horizon}_b{b}")
        });
        Ok(ScenarioConfig {
            scenario_id,
            spec,
            experiment,
            policies,
            tau_rule,
            widths: self.widths.clone(),
            n_reps,
            master_seed,
        })
    }
}

/// Validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario_id: String,
    pub spec: ProblemSpec,
    pub experiment: Experiment,
    pub policies: Vec<PolicyKind>,
    pub tau_rule: TauRule,
    /// Interval widths. Required for width sweeps; elsewhere they apply to
    /// interval-based policies only and default to `[0]`.
    pub widths: Option<Vec<u32>>,
    pub n_reps: usize,
    pub master_seed: u64,
}

impl ScenarioConfig {
    pub fn new(
        scenario_id: impl Into<String>,
        spec: ProblemSpec,
        experiment: Experiment,
        policies: Vec<PolicyKind>,
        n_reps: usize,
        master_seed: u64,
    ) -> Self {
        Self {
            scenario_id: scenario_id.into(),
            spec,
            experiment,
            policies,
            tau_rule: TauRule::default(),
            widths: None,
            n_reps,
            master_seed,
        }
    }

    pub fn with_tau_rule(mut self, rule: TauRule) -> Self {
        self.tau_rule = rule;
        self
    }

    pub fn with_widths(mut self, widths: Vec<u32>) -> Self {
        self.widths = Some(widths);
        self
    }
}
