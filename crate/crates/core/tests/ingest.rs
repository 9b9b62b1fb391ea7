use std::path::Path;

use ous_core::ingest::{
    extract_user_days, generate_synthetic_log, parse_step_log, read_user_days_csv, replay, write_step_log,
    write_user_days_csv, UserDay, DECISIONS_PER_DAY,
};
use ous_core::{OusError, PolicyKind, RngStream};

fn log(body: &str) -> Vec<UserDay> {
    let text = format!("user_id,timestamp,steps,message_flag\n{body}");
    extract_user_days(parse_step_log(text.as_bytes(), Path::new("log.csv")).unwrap()).unwrap()
}

/// Decision time of index k, as minutes after midnight.
fn decision_minute(k: usize) -> usize {
    9 * 60 + 5 * k
}

#[test]
fn all_zero_day_has_full_count() {
    let mut body = String::new();
    for m in 8 * 60..21 * 60 {
        body.push_str(&format!("u,2024-03-01T{:02}:{:02},0,0\n", m / 60, m % 60));
    }
    let days = log(&body);
    assert_eq!(days.len(), 1);
    assert_eq!(days[0].tau_star, 144);
}

#[test]
fn active_minute_suppresses_its_windows() {
    let days = log("u,2024-03-01T09:05,200,0\n");
    let flags = days[0].flags.as_ref().unwrap();
    let active = 9 * 60 + 5;
    for (k, f) in flags.iter().enumerate() {
        let t = decision_minute(k);
        let covered = t > active && t - 40 <= active;
        assert_eq!(f.risk, !covered, "decision time {t}");
        assert!(f.available);
    }
    assert_eq!(flags.iter().filter(|f| !f.risk).count(), 8);
    assert_eq!(days[0].tau_star, 136);
}

#[test]
fn message_suppresses_following_hour() {
    let days = log("u,2024-03-01T10:00,0,1\n");
    let flags = days[0].flags.as_ref().unwrap();
    for (k, f) in flags.iter().enumerate() {
        let t = decision_minute(k);
        assert_eq!(f.available, !(600 < t && t <= 660), "decision time {t}");
    }
    assert_eq!(days[0].tau_star, 144 - 12);
}

#[test]
fn malformed_rows_report_line() {
    let text = "user_id,timestamp,steps,message_flag\nu,2024-03-01T09:00,1,0\nu,2024-03-01T09:01,x,0\n";
    match parse_step_log(text.as_bytes(), Path::new("bad.csv")) {
        Err(OusError::Parse { line, path, .. }) => {
            assert_eq!(line, 3);
            assert_eq!(path, Path::new("bad.csv"));
        }
        other => panic!("expected parse error, got {other:?}"),
    }
    let unsorted = "user_id,timestamp,steps,message_flag\nu,2024-03-01T09:01,1,0\nu,2024-03-01T09:00,1,0\n";
    let rows = parse_step_log(unsorted.as_bytes(), Path::new("u.csv")).unwrap();
    assert!(matches!(extract_user_days(rows), Err(OusError::InvalidInput(_))));
}

#[test]
fn synthetic_pipeline_round_trips() {
    let rows = generate_synthetic_log(4, 3, 0.4, &RngStream::new(11)).unwrap();
    let mut a = Vec::new();
    write_step_log(&rows, &mut a).unwrap();
    let mut b = Vec::new();
    write_step_log(&generate_synthetic_log(4, 3, 0.4, &RngStream::new(11)).unwrap(), &mut b).unwrap();
    assert_eq!(a, b);

    let parsed = parse_step_log(a.as_slice(), Path::new("s.csv")).unwrap();
    assert_eq!(parsed, rows);
    let days = extract_user_days(parsed).unwrap();
    assert_eq!(days.len(), 12);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("days.csv");
    write_user_days_csv(&days, true, std::fs::File::create(&path).unwrap()).unwrap();
    let back = read_user_days_csv(std::fs::File::open(&path).unwrap(), &path).unwrap();
    assert_eq!(back, days);
    assert!(back.iter().all(|d| d.flags.as_ref().unwrap().len() == DECISIONS_PER_DAY));
}

#[test]
fn synthetic_extremes() {
    let full = extract_user_days(generate_synthetic_log(3, 2, 1.0, &RngStream::new(0)).unwrap()).unwrap();
    assert!(full.iter().all(|d| d.tau_star == 144));
    let none = extract_user_days(generate_synthetic_log(3, 2, 0.0, &RngStream::new(0)).unwrap()).unwrap();
    assert!(none.iter().all(|d| d.tau_star == 0));
    let out = replay(&none, &[PolicyKind::ALG1], 0, 1.5, &RngStream::new(0)).unwrap();
    assert_eq!(out.skipped_empty, 6);
    assert_eq!(out.days_used, 0);
}

#[test]
fn replay_examples() {
    let days = extract_user_days(generate_synthetic_log(6, 5, 0.3, &RngStream::new(2)).unwrap()).unwrap();
    let policies = [PolicyKind::ALG1, PolicyKind::ALG2, PolicyKind::ConstantOverUpper];
    let exact = replay(&days, &policies, 0, 1.5, &RngStream::new(1)).unwrap();
    assert!((exact.rows[1].mean_cr - 1.0).abs() < 1e-12);
    for w in [0, 20, 80] {
        let out = replay(&days, &policies, w, 1.5, &RngStream::new(1)).unwrap();
        assert!(out.rows.iter().all(|r| !r.sentinel));
        assert_eq!(out.rows[2].mean_penalty, 0.0);
    }
    let eps0 = PolicyKind::SeqRts { min_probability: 0.0 };
    let out = replay(&days, &[eps0], 100, 1.5, &RngStream::new(1)).unwrap();
    assert!(out.rows[0].sentinel);
    assert_eq!(out.rows[0].mean_cr, f64::NEG_INFINITY);
}
