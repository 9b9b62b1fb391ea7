//! Synthetic minute-level step logs.

use chrono::{Duration, NaiveDate};

use super::extract::RISK_WINDOW_MINUTES;
use super::log::StepLogRow;
use crate::error::{OusError, Result};
use crate::rng::RngStream;

/// 8:20, early enough that the first decision time has a full look-back.
const FIRST_MINUTE: i64 = 8 * 60 + 20;
/// 21:00, exclusive.
const END_MINUTE: i64 = 21 * 60;

/// Emits one row per minute from 8:20 to 20:59 for each user and day.
///
/// Each minute is independently active with probability `q` chosen so that a
/// 40-minute window holds no active minute with probability
/// `sedentary_fraction`. Active minutes log 150–250 steps, idle ones 0–3, so
/// a decision time is a risk time exactly when its window is idle and the
/// expected risk count per day is `144 · sedentary_fraction`. No messages are
/// logged. User `u` draws from substream `u` of `rng`.
pub fn generate_synthetic_log(
    n_users: usize,
    n_days: usize,
    sedentary_fraction: f64,
    rng: &RngStream,
) -> Result<Vec<StepLogRow>> {
    if !(0.0..=1.0).contains(&sedentary_fraction) {
        return Err(OusError::InvalidParameter(format!(
            "sedentary fraction must lie in [0, 1], got {sedentary_fraction}"
        )));
    }
    let q = 1.0 - sedentary_fraction.powf(1.0 / RISK_WINDOW_MINUTES as f64);
    let start = NaiveDate::from_ymd_opt(2024, 1, 1).expect("valid date");
    let width = n_users.to_string().len().max(2);
    let mut rows = Vec::with_capacity(n_users * n_days * (END_MINUTE - FIRST_MINUTE) as usize);
    for u in 0..n_users {
        let mut r = rng.derive(u as u64);
        let user_id = format!("user{:0width$}", u + 1);
        for d in 0..n_days {
            let midnight = (start + Duration::days(d as i64)).and_hms_opt(0, 0, 0).expect("valid time");
            for m in FIRST_MINUTE..END_MINUTE {
                let steps = if r.uniform() < q {
                    r.uniform_int(150, 250)
                } else {
                    r.uniform_int(0, 3)
                };
                rows.push(StepLogRow {
                    user_id: user_id.clone(),
                    timestamp: midnight + Duration::minutes(m),
                    steps: steps as u32,
                    message_flag: false,
                });
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::extract_user_days;

    #[test]
    fn extremes() {
        let all = extract_user_days(generate_synthetic_log(2, 2, 1.0, &RngStream::new(1)).unwrap()).unwrap();
        assert_eq!(all.len(), 4);
        assert!(all.iter().all(|d| d.tau_star == 144));
        let none = extract_user_days(generate_synthetic_log(2, 2, 0.0, &RngStream::new(1)).unwrap()).unwrap();
        assert!(none.iter().all(|d| d.tau_star == 0));
    }

    #[test]
    fn mean_risk_count_tracks_fraction() {
        let days = extract_user_days(generate_synthetic_log(20, 10, 0.3, &RngStream::new(5)).unwrap()).unwrap();
        let mean = days.iter().map(|d| f64::from(d.tau_star)).sum::<f64>() / days.len() as f64;
        // Per-day counts are strongly correlated across the grid; 200 days
        // leave a standard error of roughly 2.
        assert!((mean - 0.3 * 144.0).abs() < 8.0, "mean {mean}");
    }

    #[test]
    fn rejects_bad_fraction() {
        assert!(generate_synthetic_log(1, 1, 1.5, &RngStream::new(0)).is_err());
        assert!(generate_synthetic_log(1, 1, f64::NAN, &RngStream::new(0)).is_err());
    }

    #[test]
    fn deterministic() {
        let a = generate_synthetic_log(3, 1, 0.5, &RngStream::new(7)).unwrap();
        let b = generate_synthetic_log(3, 1, 0.5, &RngStream::new(7)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[0].user_id, "user01");
    }
}
