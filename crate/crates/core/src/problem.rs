use serde::{Deserialize, Serialize};

use crate::error::{OusError, Result};

/// One decision period: `horizon` decision times and an expected budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    horizon: u32,
    budget: f64,
    sigma: Option<f64>,
}

impl ProblemSpec {
    pub fn new(horizon: u32, budget: f64) -> Result<Self> {
        if !(budget.is_finite() && budget > 0.0) {
            return Err(OusError::InvalidParameter(format!(
                "budget must be positive and finite, got {budget}"
            )));
        }
        if horizon < 2 {
            return Err(OusError::InvalidParameter(format!(
                "horizon must be at least 2, got {horizon}"
            )));
        }
        if budget >= f64::from(horizon) {
            return Err(OusError::InvalidParameter(format!(
                "budget {budget} must be below the horizon {horizon}"
            )));
        }
        Ok(Self {
            horizon,
            budget,
            sigma: None,
        })
    }

    /// Penalty strength override. `None` means `1/τ*` at scoring time.
    pub fn with_sigma(mut self, sigma: Option<f64>) -> Result<Self> {
        if let Some(s) = sigma {
            if !(s.is_finite() && s > 0.0) {
                return Err(OusError::InvalidParameter(format!(
                    "sigma must be positive and finite, got {s}"
                )));
            }
        }
        self.sigma = sigma;
        Ok(self)
    }

    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn sigma(&self) -> Option<f64> {
        self.sigma
    }

    /// `b·e`, the first regime boundary.
    pub fn budget_e(&self) -> f64 {
        self.budget * std::f64::consts::E
    }

    /// `b·e²`, the second regime boundary.
    pub fn budget_e2(&self) -> f64 {
        self.budget * std::f64::consts::E * std::f64::consts::E
    }
}

/// Prediction interval `[lower, upper]` assumed to contain the true count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PredictionInterval {
    lower: u32,
    upper: u32,
}

impl PredictionInterval {
    pub fn new(lower: u32, upper: u32) -> Result<Self> {
        if upper == 0 {
            return Err(OusError::InvalidInput("interval upper bound must be positive".into()));
        }
        if lower > upper {
            return Err(OusError::InvalidInput(format!(
                "interval lower bound {lower} exceeds upper bound {upper}"
            )));
        }
        Ok(Self { lower, upper })
    }

    /// Degenerate interval `[n, n]`.
    pub fn exact(n: u32) -> Result<Self> {
        Self::new(n, n)
    }

    pub fn lower(&self) -> u32 {
        self.lower
    }

    pub fn upper(&self) -> u32 {
        self.upper
    }

    pub fn width(&self) -> u32 {
        self.upper - self.lower
    }

    pub fn contains(&self, n: u32) -> bool {
        self.lower <= n && n <= self.upper
    }

    /// Checks the interval against the owning spec: `U ≤ T` and `U ≥ b`.
    pub fn validate_for(&self, spec: &ProblemSpec) -> Result<()> {
        if self.upper > spec.horizon() {
            return Err(OusError::InvalidInput(format!(
                "interval upper bound {} exceeds horizon {}",
                self.upper,
                spec.horizon()
            )));
        }
        if f64::from(self.upper) < spec.budget() {
            return Err(OusError::InvalidInput(format!(
                "interval upper bound {} is below the budget {}",
                self.upper,
                spec.budget()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_validation() {
        assert!(ProblemSpec::new(8, 3.0).is_ok());
        assert!(ProblemSpec::new(1, 0.5).is_err());
        assert!(ProblemSpec::new(8, 0.0).is_err());
        assert!(ProblemSpec::new(8, -1.0).is_err());
        assert!(ProblemSpec::new(3, 3.0).is_err());
        assert!(ProblemSpec::new(8, f64::NAN).is_err());
        let s = ProblemSpec::new(8, 3.0).unwrap();
        assert!(s.with_sigma(Some(0.0)).is_err());
        assert_eq!(s.with_sigma(Some(0.5)).unwrap().sigma(), Some(0.5));
    }

    #[test]
    fn interval_validation() {
        assert!(PredictionInterval::new(5, 4).is_err());
        assert!(PredictionInterval::new(0, 0).is_err());
        let iv = PredictionInterval::new(0, 6).unwrap();
        assert_eq!(iv.width(), 6);
        let spec = ProblemSpec::new(8, 3.0).unwrap();
        assert!(iv.validate_for(&spec).is_ok());
        assert!(PredictionInterval::new(2, 9).unwrap().validate_for(&spec).is_err());
        assert!(PredictionInterval::new(1, 2).unwrap().validate_for(&spec).is_err());
    }
}
