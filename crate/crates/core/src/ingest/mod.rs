//! Minute-level step logs to per-day risk counts, and replay over user-days.

mod extract;
mod log;
mod replay;
mod synth;

pub use extract::{
    extract_user_days, read_user_days_csv, write_user_days_csv, DecisionFlags, UserDay,
    AVAILABILITY_WINDOW_MINUTES, DECISIONS_PER_DAY, DECISION_SPACING_MINUTES, FIRST_DECISION_MINUTE,
    RISK_STEP_THRESHOLD, RISK_WINDOW_MINUTES,
};
pub use log::{parse_step_log, read_step_log, write_step_log, StepLogRow};
pub use replay::{replay, replay_with, ReplayConfig, ReplayOutcome, REPLAY_MIN_LOWER};
pub use synth::generate_synthetic_log;
