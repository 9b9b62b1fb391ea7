//! Online uniform sampling: spreading an expected budget of interventions
//! evenly over an unknown number of arriving risk times.
//!
//! [`algorithms`] holds the randomized policy and its learning-augmented
//! variant, [`baselines`] the comparison policies, [`harness`] the Monte
//! Carlo sweeps and [`ingest`] the step-log pipeline and replay.

pub mod algorithms;
pub mod baselines;
pub mod catalog;
pub mod error;
pub mod harness;
pub mod ingest;
pub mod objective;
pub mod problem;
pub mod rng;
pub mod sampling;
pub mod stats;
pub mod theory;

pub use algorithms::{run_policy, OnlinePolicy};
pub use catalog::{run_and_score, AnyPolicy, PolicyKind};
pub use error::{OusError, Result};
pub use objective::{evaluate_objective, ObjectiveReport, ProbabilityAssignment};
pub use problem::{PredictionInterval, ProblemSpec};
pub use rng::RngStream;
pub use stats::MonteCarloEstimate;
