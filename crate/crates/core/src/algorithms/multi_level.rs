use super::{alg1_init, alg2_init, run_policy};
use crate::error::{OusError, Result};
use crate::objective::ProbabilityAssignment;
use crate::problem::{PredictionInterval, ProblemSpec};
use crate::rng::RngStream;

/// Runs one independent policy per risk level.
///
/// Level `k` gets substream `k` of `rng` and the learning-augmented policy
/// when it carries an interval, the randomized one otherwise.
pub fn run_multi_level(
    levels: &[(ProblemSpec, Option<PredictionInterval>)],
    taus: &[usize],
    rng: &RngStream,
) -> Result<Vec<ProbabilityAssignment>> {
    if levels.is_empty() || levels.len() != taus.len() {
        return Err(OusError::InvalidInput(format!(
            "{} levels but {} counts",
            levels.len(),
            taus.len()
        )));
    }
    levels
        .iter()
        .zip(taus)
        .enumerate()
        .map(|(k, ((spec, interval), &tau))| {
            let sub = rng.derive(k as u64);
            match interval {
                None => run_policy(&mut alg1_init(spec, sub)?, tau),
                Some(iv) => run_policy(&mut alg2_init(spec, *iv, sub)?, tau),
            }
        })
        .collect()
}
