//! Worst-case competitive ratios of the staged policies.

use std::f64::consts::E;

use serde::Serialize;

/// Which side of the `b·e` and `b·e²` boundaries a length falls on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// `x ≤ b·e`
    Short,
    /// `b·e < x ≤ b·e²`
    Medium,
    /// `x > b·e²`
    Long,
}

impl Regime {
    pub fn classify(x: f64, budget: f64) -> Self {
        if x <= budget * E {
            Regime::Short
        } else if x <= budget * E * E {
            Regime::Medium
        } else {
            Regime::Long
        }
    }

    /// Human-readable condition, `sym` being `T` or `U`.
    pub fn label(&self, sym: &str) -> String {
        match self {
            Regime::Short => format!("{sym} ≤ be"),
            Regime::Medium => format!("be < {sym} ≤ be²"),
            Regime::Long => format!("{sym} > be²"),
        }
    }
}

/// Competitive ratio guaranteed by the randomized policy for horizon `T`.
pub fn theoretical_cr_rand(horizon: u32, budget: f64) -> f64 {
    match Regime::classify(f64::from(horizon), budget) {
        Regime::Short => ((E - 1.0).ln() + 1.0 / (E - 1.0)) / E,
        Regime::Medium => 1.0 / E,
        Regime::Long => 1.0 / E - 1.0 / (E * E),
    }
}

/// Robustness ratio of the learning-augmented policy for interval upper bound `U`.
pub fn theoretical_cr_learn(upper: u32, budget: f64) -> f64 {
    match Regime::classify(f64::from(upper), budget) {
        Regime::Short => 2f64.ln() + (E - 1.0) / E * ((E - 1.0) / E).ln(),
        Regime::Medium => 1.0 / E,
        Regime::Long => 2.0 - (E * E - E + 1.0).ln(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rand_constants() {
        assert!((theoretical_cr_rand(8, 3.0) - 0.413_24).abs() < 1e-5);
        assert!((theoretical_cr_rand(22, 3.0) - 0.367_879).abs() < 1e-6);
        assert!((theoretical_cr_rand(100, 3.0) - 0.232_544).abs() < 1e-6);
    }

    #[test]
    fn learn_constants() {
        assert!((theoretical_cr_learn(8, 3.0) - 0.403_21).abs() < 1e-5);
        assert!((theoretical_cr_learn(22, 3.0) - 0.367_879).abs() < 1e-6);
        assert!((theoretical_cr_learn(100, 3.0) - 0.264_674_336).abs() < 1e-9);
    }

    #[test]
    fn boundaries_both_sides() {
        // b = 3: be ≈ 8.155, be² ≈ 22.167.
        assert_eq!(Regime::classify(8.0, 3.0), Regime::Short);
        assert_eq!(Regime::classify(9.0, 3.0), Regime::Medium);
        assert_eq!(Regime::classify(22.0, 3.0), Regime::Medium);
        assert_eq!(Regime::classify(23.0, 3.0), Regime::Long);
        assert_ne!(theoretical_cr_rand(8, 3.0), theoretical_cr_rand(9, 3.0));
        assert_ne!(theoretical_cr_rand(22, 3.0), theoretical_cr_rand(23, 3.0));
        assert_ne!(theoretical_cr_learn(8, 3.0), theoretical_cr_learn(9, 3.0));
        assert_ne!(theoretical_cr_learn(22, 3.0), theoretical_cr_learn(23, 3.0));
        // Exact boundary is inclusive.
        assert_eq!(Regime::classify(2.0 * E, 2.0), Regime::Short);
        assert_eq!(Regime::classify(E * E, 1.0), Regime::Medium);
    }

    #[test]
    fn piecewise_constant() {
        for t in 9..=22 {
            assert_eq!(theoretical_cr_rand(t, 3.0), 1.0 / E);
        }
        for t in 23..200 {
            assert_eq!(theoretical_cr_learn(t, 3.0), theoretical_cr_learn(100, 3.0));
        }
    }
}
