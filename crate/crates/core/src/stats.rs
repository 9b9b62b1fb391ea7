use serde::{Deserialize, Serialize};

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_reps: usize,
}

impl MonteCarloEstimate {
    /// Two-pass mean and `sd/√n` with the `n−1` sample variance.
    ///
    /// Constant samples give their common value and a standard error of
    /// exactly zero. Any non-finite sample makes the mean non-finite and the
    /// standard error infinite.
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len();
        assert!(n > 0, "estimate needs at least one sample");
        let first = xs[0];
        if xs.iter().all(|&x| x.to_bits() == first.to_bits()) {
            return Self {
                mean: first,
                stderr: if first.is_finite() { 0.0 } else { f64::INFINITY },
                n_reps: n,
            };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        if !mean.is_finite() {
            return Self {
                mean,
                stderr: f64::INFINITY,
                n_reps: n,
            };
        }
        let stderr = if n > 1 {
            let ss: f64 = xs.iter().map(|x| (x - mean).powi(2)).sum();
            (ss / (n - 1) as f64).sqrt() / (n as f64).sqrt()
        } else {
            0.0
        };
        Self {
            mean,
            stderr,
            n_reps: n,
        }
    }
}
