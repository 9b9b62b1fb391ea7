//! Stage-wise constant policies driven by a randomized guess of the count.
//!
//! Both policies keep a running guess `τ̃`, initialised to `α ~ 1/α` on
//! `[b, b·e)`. A stage lasts until the arrival index passes a randomized
//! rounding of the guess (shifted by the interval's lower bound `L` for the
//! learning-augmented variants); the guess is then multiplied by `e` and the
//! emitted probability is recomputed. Which update rule applies is fixed at
//! initialisation from `T` (randomized) or `[L, U]` (learning-augmented).

use std::f64::consts::E;

use serde::Serialize;

use super::{ArrivalCursor, OnlinePolicy};
use crate::error::{OusError, Result};
use crate::problem::{PredictionInterval, ProblemSpec};
use crate::rng::RngStream;
use crate::sampling::{randomized_round, sample_alpha};
use crate::theory::Regime;

/// Update rule selected at initialisation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Subroutine {
    /// `T ≤ be`: `b / min(T, τ̃(e−1))`.
    Sub1,
    /// `be < T ≤ be²`: `b / (τ̃(e−1))` for two stages, then `b / (τ̃e)`.
    Sub2,
    /// `T > be²`: `b' / (τ̃e)`, decaying `b'` by `1 − 1/e` from stage 3 on.
    Sub3,
    /// `b / min(U, τ̃ + L)`.
    Sub4,
    /// `b / min(U, τ̃e + L)`.
    Sub5,
    /// `b' / (τ̃(e−1) + L)` in stage 1, then `b' / (τ̃e)` with a decaying `b'`.
    Sub6,
}

impl Subroutine {
    fn uses_interval_offset(self) -> bool {
        matches!(self, Subroutine::Sub4 | Subroutine::Sub5 | Subroutine::Sub6)
    }
}

/// When the stage boundary `Int(τ̃)` is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum BoundaryRounding {
    /// Once at initialisation and once per transition.
    #[default]
    PerStage,
    /// Afresh at every arrival, following the loop body literally.
    PerArrival,
}

/// Mutable state of a staged policy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolicyState {
    pub regime: Subroutine,
    pub alpha: f64,
    pub tilde_tau: f64,
    pub stage: u32,
    pub working_budget: f64,
    /// Last arrival index of the current stage: `Int(τ̃)`, plus `L` where the
    /// regime uses the interval.
    pub stage_boundary: u64,
    pub interval: Option<PredictionInterval>,
}

/// Randomized (no interval) or learning-augmented staged policy.
#[derive(Debug, Clone)]
pub struct StagedPolicy {
    spec: ProblemSpec,
    state: PolicyState,
    rng: RngStream,
    rounding: BoundaryRounding,
    cursor: ArrivalCursor,
    /// Probability for the current stage.
    current: f64,
}

fn alg1_regime(spec: &ProblemSpec) -> Subroutine {
    match Regime::classify(f64::from(spec.horizon()), spec.budget()) {
        Regime::Short => Subroutine::Sub1,
        Regime::Medium => Subroutine::Sub2,
        Regime::Long => Subroutine::Sub3,
    }
}

fn alg2_regime(spec: &ProblemSpec, iv: &PredictionInterval) -> Subroutine {
    let b = spec.budget();
    let width = f64::from(iv.width());
    match Regime::classify(f64::from(iv.upper()), b) {
        Regime::Short => Subroutine::Sub4,
        Regime::Medium if width <= b * (E - 1.0) => Subroutine::Sub4,
        Regime::Medium => Subroutine::Sub2,
        Regime::Long if width <= b * (E + 1.0) => Subroutine::Sub5,
        Regime::Long => Subroutine::Sub6,
    }
}

/// Randomized policy without a prediction interval.
pub fn alg1_init(spec: &ProblemSpec, rng: RngStream) -> Result<StagedPolicy> {
    StagedPolicy::randomized(spec, rng, BoundaryRounding::PerStage)
}

/// Learning-augmented policy for the interval `[L, U]`.
pub fn alg2_init(
    spec: &ProblemSpec,
    interval: PredictionInterval,
    rng: RngStream,
) -> Result<StagedPolicy> {
    StagedPolicy::learning_augmented(spec, interval, rng, BoundaryRounding::PerStage)
}

impl StagedPolicy {
    pub fn randomized(
        spec: &ProblemSpec,
        mut rng: RngStream,
        rounding: BoundaryRounding,
    ) -> Result<Self> {
        let alpha = sample_alpha(spec.budget(), &mut rng)?;
        Self::with_alpha(spec, None, alpha, rng, rounding)
    }

    pub fn learning_augmented(
        spec: &ProblemSpec,
        interval: PredictionInterval,
        mut rng: RngStream,
        rounding: BoundaryRounding,
    ) -> Result<Self> {
        interval.validate_for(spec)?;
        let alpha = sample_alpha(spec.budget(), &mut rng)?;
        Self::with_alpha(spec, Some(interval), alpha, rng, rounding)
    }

    /// Starts from a given `α` instead of sampling it. Later roundings still
    /// draw from `rng`.
    pub fn with_alpha(
        spec: &ProblemSpec,
        interval: Option<PredictionInterval>,
        alpha: f64,
        rng: RngStream,
        rounding: BoundaryRounding,
    ) -> Result<Self> {
        let b = spec.budget();
        if !(alpha >= b && alpha <= b * E) {
            return Err(OusError::InvalidParameter(format!(
                "alpha {alpha} outside [{b}, {}]",
                b * E
            )));
        }
        let regime = match &interval {
            None => alg1_regime(spec),
            Some(iv) => {
                iv.validate_for(spec)?;
                alg2_regime(spec, iv)
            }
        };
        let mut policy = Self {
            spec: *spec,
            state: PolicyState {
                regime,
                alpha,
                tilde_tau: alpha,
                stage: 1,
                working_budget: b,
                stage_boundary: 0,
                interval,
            },
            rng,
            rounding,
            cursor: ArrivalCursor::default(),
            current: 0.0,
        };
        policy.state.stage_boundary = policy.draw_boundary()?;
        policy.current = policy.emit();
        Ok(policy)
    }

    pub fn state(&self) -> &PolicyState {
        &self.state
    }

    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    fn offset(&self) -> u64 {
        match self.state.interval {
            Some(iv) if self.state.regime.uses_interval_offset() => u64::from(iv.lower()),
            _ => 0,
        }
    }

    fn draw_boundary(&mut self) -> Result<u64> {
        Ok(randomized_round(self.state.tilde_tau, &mut self.rng)? + self.offset())
    }

    fn advance_stage(&mut self) {
        let b = self.spec.budget();
        let st = &mut self.state;
        st.stage += 1;
        match st.regime {
            Subroutine::Sub1 | Subroutine::Sub2 | Subroutine::Sub4 | Subroutine::Sub5 => {}
            Subroutine::Sub3 => {
                if st.stage >= 3 {
                    st.working_budget *= 1.0 - 1.0 / E;
                }
            }
            Subroutine::Sub6 => {
                // Uses the guess from before this transition's scaling.
                if st.stage == 2 {
                    let l = f64::from(st.interval.map_or(0, |iv| iv.lower()));
                    let t = st.tilde_tau;
                    st.working_budget *= 1.0 - (t + l - b) / (t * (E - 1.0) + l);
                } else {
                    st.working_budget *= 1.0 - 1.0 / E;
                }
            }
        }
        st.tilde_tau *= E;
    }

    fn emit(&self) -> f64 {
        let b = self.spec.budget();
        let st = &self.state;
        let t = st.tilde_tau;
        let (l, u) = st
            .interval
            .map_or((0.0, 0.0), |iv| (f64::from(iv.lower()), f64::from(iv.upper())));
        match st.regime {
            Subroutine::Sub1 => b / f64::from(self.spec.horizon()).min(t * (E - 1.0)),
            Subroutine::Sub2 if st.stage <= 2 => b / (t * (E - 1.0)),
            Subroutine::Sub2 => b / (t * E),
            Subroutine::Sub3 => st.working_budget / (t * E),
            Subroutine::Sub4 => b / u.min(t + l),
            Subroutine::Sub5 => b / u.min(t * E + l),
            Subroutine::Sub6 if st.stage == 1 => st.working_budget / (t * (E - 1.0) + l),
            Subroutine::Sub6 => st.working_budget / (t * E),
        }
    }
}

impl OnlinePolicy for StagedPolicy {
    #[inline]
    fn next_probability(&mut self, i: usize) -> Result<f64> {
        self.cursor.advance(i)?;
        if self.rounding == BoundaryRounding::PerArrival && i > 1 {
            self.state.stage_boundary = self.draw_boundary()?;
        }
        if i as u64 > self.state.stage_boundary {
            self.advance_stage();
            self.current = self.emit();
            if self.rounding == BoundaryRounding::PerStage {
                self.state.stage_boundary = self.draw_boundary()?;
            }
        }
        Ok(self.current)
    }

    fn next_run(&mut self, i: usize, max_len: usize) -> Result<(f64, usize)> {
        let p = self.next_probability(i)?;
        if self.rounding == BoundaryRounding::PerArrival {
            return Ok((p, 1));
        }
        let boundary = self.state.stage_boundary;
        let len = if boundary >= i as u64 {
            max_len.min((boundary - i as u64 + 1) as usize).max(1)
        } else {
            1
        };
        self.cursor.skip_to(i + len - 1);
        Ok((p, len))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::run_policy;

    fn spec(t: u32, b: f64) -> ProblemSpec {
        ProblemSpec::new(t, b).unwrap()
    }

    fn iv(l: u32, u: u32) -> PredictionInterval {
        PredictionInterval::new(l, u).unwrap()
    }

    #[test]
    fn alg1_dispatch() {
        let r = |t| alg1_init(&spec(t, 3.0), RngStream::new(1)).unwrap().state().regime;
        assert_eq!(r(8), Subroutine::Sub1);
        assert_eq!(r(9), Subroutine::Sub2);
        assert_eq!(r(22), Subroutine::Sub2);
        assert_eq!(r(23), Subroutine::Sub3);
        assert_eq!(r(100), Subroutine::Sub3);
    }

    #[test]
    fn alg2_dispatch() {
        let s = spec(144, 3.0);
        let r = |l, u| alg2_init(&s, iv(l, u), RngStream::new(1)).unwrap().state().regime;
        assert_eq!(r(3, 8), Subroutine::Sub4);
        assert_eq!(r(10, 14), Subroutine::Sub4);
        assert_eq!(r(2, 22), Subroutine::Sub2);
        assert_eq!(r(90, 100), Subroutine::Sub5);
        assert_eq!(r(88, 100), Subroutine::Sub6);
        // b(e−1) ≈ 5.155 and b(e+1) ≈ 11.155 split the wide and narrow cases.
        assert_eq!(r(17, 22), Subroutine::Sub4);
        assert_eq!(r(16, 22), Subroutine::Sub2);
        assert_eq!(r(89, 100), Subroutine::Sub5);
    }

    #[test]
    fn init_state() {
        let p = alg1_init(&spec(22, 3.0), RngStream::new(9)).unwrap();
        let st = p.state();
        assert!(st.alpha >= 3.0 && st.alpha < 3.0 * E);
        assert_eq!(st.tilde_tau, st.alpha);
        assert_eq!(st.stage, 1);
        assert_eq!(st.working_budget, 3.0);
        assert!(st.stage_boundary == st.alpha.floor() as u64 || st.stage_boundary == st.alpha.ceil() as u64);
    }

    #[test]
    fn alg2_boundary_includes_lower_bound() {
        let p = alg2_init(&spec(144, 3.0), iv(10, 14), RngStream::new(4)).unwrap();
        let st = p.state();
        assert!(st.stage_boundary >= 10 + st.alpha.floor() as u64);
        assert!(st.stage_boundary <= 10 + st.alpha.ceil() as u64);

        // The wide medium branch ignores L.
        let p = alg2_init(&spec(144, 3.0), iv(2, 22), RngStream::new(4)).unwrap();
        assert!(p.state().stage_boundary <= p.state().alpha.ceil() as u64);
    }

    #[test]
    fn rejects_bad_interval() {
        let s = spec(22, 3.0);
        assert!(alg2_init(&s, iv(10, 30), RngStream::new(0)).is_err());
        assert!(alg2_init(&s, iv(1, 2), RngStream::new(0)).is_err());
    }

    #[test]
    fn out_of_order_is_contract_violation() {
        let mut p = alg1_init(&spec(22, 3.0), RngStream::new(0)).unwrap();
        assert!(p.next_probability(1).is_ok());
        assert!(matches!(p.next_probability(3), Err(OusError::ContractViolation(_))));
        let mut q = alg1_init(&spec(22, 3.0), RngStream::new(0)).unwrap();
        assert!(q.next_probability(0).is_err());
    }

    #[test]
    fn sub1_first_value() {
        let mut p =
            StagedPolicy::with_alpha(&spec(8, 3.0), None, 4.0, RngStream::new(0), Default::default())
                .unwrap();
        let got = p.next_probability(1).unwrap();
        assert!((got - 3.0 / (4.0 * (E - 1.0))).abs() < 1e-15);
        assert!((got - 0.436_482_530).abs() < 1e-9);
    }

    #[test]
    fn sub3_three_stages() {
        // α = 3 is integral, so every boundary draw on the first stage is 3.
        let s = spec(100, 3.0);
        let mut p = StagedPolicy::with_alpha(&s, None, 3.0, RngStream::new(5), Default::default())
            .unwrap();
        let seq = run_policy(&mut p, 40).unwrap();
        let v = seq.as_slice();
        let stage2 = 3.0 / (3.0 * E * E);
        let stage3 = 3.0 * (1.0 - 1.0 / E) / (3.0 * E.powi(3));
        assert!(v[..3].iter().all(|&x| (x - 1.0 / E).abs() < 1e-15));
        assert!((v[3] - stage2).abs() < 1e-15);
        assert!((stage3 - 0.031_471).abs() < 1e-6);
        let first_stage3 = v.iter().position(|&x| (x - stage3).abs() < 1e-15).unwrap();
        // Second stage ends at Int(3e) ∈ {8, 9}.
        assert!(first_stage3 == 8 || first_stage3 == 9, "{first_stage3}");
    }

    #[test]
    fn tilde_tau_tracks_stage() {
        let s = spec(100, 3.0);
        let mut p = alg1_init(&s, RngStream::new(77)).unwrap();
        for i in 1..=100 {
            p.next_probability(i).unwrap();
            let st = p.state();
            let expect = st.alpha * E.powi(st.stage as i32 - 1);
            assert!((st.tilde_tau - expect).abs() <= 1e-13 * expect);
            assert!(st.working_budget > 0.0 && st.working_budget <= 3.0);
        }
    }

    #[test]
    fn per_arrival_rounding_stays_valid() {
        let s = spec(100, 3.0);
        let mut p = StagedPolicy::randomized(&s, RngStream::new(3), BoundaryRounding::PerArrival)
            .unwrap();
        let seq = run_policy(&mut p, 100).unwrap();
        assert!(seq.is_non_increasing());
        assert!(seq.as_slice().iter().all(|&x| x > 0.0 && x < 1.0));
    }
}
