//! Monte Carlo sweeps over arrival counts and interval widths.

mod config;
mod export;
mod sweep;

pub use config::{Experiment, ScenarioConfig, ScenarioFile, TauRule, DEFAULT_N_REPS};
pub use export::{export_csv, write_csv, CSV_HEADER};
pub use sweep::{
    draw_interval, run_budget_audit, run_scenario, run_tau_sweep, run_width_sweep, resolve_taus,
    SweepRow,
};
