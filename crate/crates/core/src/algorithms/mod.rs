//! Online policies that emit one probability per arriving risk time.

mod multi_level;
mod staged;

pub use multi_level::run_multi_level;
pub use staged::{alg1_init, alg2_init, BoundaryRounding, PolicyState, StagedPolicy, Subroutine};

use crate::error::{OusError, Result};
use crate::objective::ProbabilityAssignment;

/// A policy driven one arrival at a time.
///
/// `next_probability(i)` is called with `i = 1, 2, …` in order. It sees only
/// the index of the current arrival, never the final count.
pub trait OnlinePolicy {
    fn next_probability(&mut self, i: usize) -> Result<f64>;

    /// Emits the probability for arrival `i` together with the number of
    /// arrivals, from `i` and at most `max_len`, that receive it. The next
    /// call continues at `i + len`. Draws the same randomness as calling
    /// [`next_probability`](Self::next_probability) for each of them.
    fn next_run(&mut self, i: usize, _max_len: usize) -> Result<(f64, usize)> {
        Ok((self.next_probability(i)?, 1))
    }
}

impl<P: OnlinePolicy + ?Sized> OnlinePolicy for Box<P> {
    fn next_probability(&mut self, i: usize) -> Result<f64> {
        (**self).next_probability(i)
    }

    fn next_run(&mut self, i: usize, max_len: usize) -> Result<(f64, usize)> {
        (**self).next_run(i, max_len)
    }
}

/// Drives `policy` through `tau_star` arrivals and collects what it emits.
pub fn run_policy<P: OnlinePolicy + ?Sized>(
    policy: &mut P,
    tau_star: usize,
) -> Result<ProbabilityAssignment> {
    if tau_star == 0 {
        return Err(OusError::InvalidInput("tau_star must be at least 1".into()));
    }
    let probs = (1..=tau_star)
        .map(|i| policy.next_probability(i))
        .collect::<Result<Vec<_>>>()?;
    Ok(ProbabilityAssignment::new(probs))
}

/// Rejects any call other than the next one in sequence.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct ArrivalCursor {
    seen: usize,
}

impl ArrivalCursor {
    #[inline]
    pub(crate) fn advance(&mut self, i: usize) -> Result<()> {
        if i != self.seen + 1 {
            return Err(self.out_of_order(i));
        }
        self.seen = i;
        Ok(())
    }

    /// Marks arrivals up to `last` as seen after a run.
    #[inline]
    pub(crate) fn skip_to(&mut self, last: usize) {
        debug_assert!(last >= self.seen);
        self.seen = last;
    }

    #[cold]
    fn out_of_order(&self, i: usize) -> OusError {
        OusError::ContractViolation(format!("expected arrival {}, got {i}", self.seen + 1))
    }
}
