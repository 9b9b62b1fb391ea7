//! Random primitives shared by the staged policies.

use crate::error::{OusError, Result};
use crate::rng::RngStream;

/// Draws `α ∈ [b, b·e)` with density `1/α` by inverting the CDF `ln(α/b)`.
pub fn sample_alpha(budget: f64, rng: &mut RngStream) -> Result<f64> {
    if !(budget.is_finite() && budget > 0.0) {
        return Err(OusError::InvalidParameter(format!(
            "alpha sampler needs a positive budget, got {budget}"
        )));
    }
    Ok(budget * rng.uniform().exp())
}

/// Unbiased integer rounding: `⌈x⌉` with probability `x − ⌊x⌋`, else `⌊x⌋`.
///
/// Always consumes exactly one draw so stream alignment does not depend on `x`.
pub fn randomized_round(x: f64, rng: &mut RngStream) -> Result<u64> {
    if !(x.is_finite() && x > 0.0) {
        return Err(OusError::InvalidParameter(format!(
            "randomized rounding needs a positive finite value, got {x}"
        )));
    }
    let floor = x.floor();
    let frac = x - floor;
    let up = rng.bernoulli(frac);
    Ok(floor as u64 + u64::from(up))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn alpha_rejects_bad_budget() {
        let mut rng = RngStream::new(0);
        assert!(sample_alpha(0.0, &mut rng).is_err());
        assert!(sample_alpha(-2.0, &mut rng).is_err());
    }

    #[test]
    fn alpha_support_and_moments() {
        let mut rng = RngStream::new(2024);
        let n = 200_000;
        let mut draws: Vec<f64> = (0..n).map(|_| sample_alpha(3.0, &mut rng).unwrap()).collect();
        assert!(draws.iter().all(|&a| (3.0..3.0 * E).contains(&a)));

        // E[α] = ∫_b^{be} α·(1/α) dα = b(e−1); Var[α] = b²(e²−1)/2 − b²(e−1)².
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = 9.0 * (E * E - 1.0) / 2.0 - 9.0 * (E - 1.0).powi(2);
        let se = (var / n as f64).sqrt();
        assert!((mean - 3.0 * (E - 1.0)).abs() < 4.0 * se, "mean {mean}");

        draws.sort_by(f64::total_cmp);
        let median = draws[n / 2];
        assert!((median - 3.0 * E.sqrt()).abs() < 0.02, "median {median}");
    }

    #[test]
    fn round_integral_is_identity() {
        let mut rng = RngStream::new(1);
        for _ in 0..1000 {
            assert_eq!(randomized_round(5.0, &mut rng).unwrap(), 5);
        }
    }

    #[test]
    fn round_takes_neighbouring_values() {
        let mut rng = RngStream::new(3);
        let n = 100_000;
        let ups = (0..n)
            .map(|_| randomized_round(5.3, &mut rng).unwrap())
            .inspect(|&k| assert!(k == 5 || k == 6))
            .filter(|&k| k == 6)
            .count();
        let p = ups as f64 / n as f64;
        let se = (0.3f64 * 0.7 / n as f64).sqrt();
        assert!((p - 0.3).abs() < 4.0 * se, "p(6) = {p}");
    }

    #[test]
    fn round_rejects_nonpositive() {
        let mut rng = RngStream::new(0);
        assert!(randomized_round(0.0, &mut rng).is_err());
        assert!(randomized_round(f64::INFINITY, &mut rng).is_err());
    }
}
