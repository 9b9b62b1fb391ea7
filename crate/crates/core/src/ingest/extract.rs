//! Per-day risk and availability flags on the 5-minute decision grid.
//!
//! Decision time `t` looks back over the minutes strictly before it:
//! it is a risk time when fewer than 150 steps were logged in the prior 40
//! minutes, and it is available when no message was sent in the prior 60.
//! Minutes absent from the log count as zero steps and no message.

use std::collections::{BTreeMap, HashMap};
use std::io::{Read, Write};
use std::path::Path;

use chrono::{NaiveDate, NaiveDateTime, Timelike};

use super::log::StepLogRow;
use crate::error::{OusError, Result};

pub const DECISIONS_PER_DAY: usize = 144;
/// 9:00, in minutes after midnight.
pub const FIRST_DECISION_MINUTE: usize = 9 * 60;
pub const DECISION_SPACING_MINUTES: usize = 5;
pub const RISK_WINDOW_MINUTES: usize = 40;
pub const RISK_STEP_THRESHOLD: u64 = 150;
pub const AVAILABILITY_WINDOW_MINUTES: usize = 60;

const MINUTES_PER_DAY: usize = 24 * 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DecisionFlags {
    pub risk: bool,
    pub available: bool,
}

impl DecisionFlags {
    /// `2·risk + available`, so 3 marks an available risk time.
    pub fn code(&self) -> u8 {
        u8::from(self.risk) * 2 + u8::from(self.available)
    }

    pub fn from_code(code: u8) -> Option<Self> {
        (code <= 3).then_some(Self {
            risk: code & 2 != 0,
            available: code & 1 != 0,
        })
    }

    pub fn counts(&self) -> bool {
        self.risk && self.available
    }
}

/// One participant-day on the decision grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserDay {
    pub user_id: String,
    pub date: NaiveDate,
    /// 144 entries when known; `None` for days loaded from a summary file.
    pub flags: Option<Vec<DecisionFlags>>,
    /// Number of decision times that are both risk times and available.
    pub tau_star: u32,
}

impl UserDay {
    fn from_flags(user_id: String, date: NaiveDate, flags: Vec<DecisionFlags>) -> Self {
        debug_assert_eq!(flags.len(), DECISIONS_PER_DAY);
        let tau_star = flags.iter().filter(|f| f.counts()).count() as u32;
        Self {
            user_id,
            date,
            flags: Some(flags),
            tau_star,
        }
    }
}

struct DayMinutes {
    steps: Vec<u32>,
    messages: Vec<bool>,
}

impl DayMinutes {
    fn new() -> Self {
        Self {
            steps: vec![0; MINUTES_PER_DAY],
            messages: vec![false; MINUTES_PER_DAY],
        }
    }

    fn decision_flags(&self) -> Vec<DecisionFlags> {
        let mut step_prefix = vec![0u64; MINUTES_PER_DAY + 1];
        let mut msg_prefix = vec![0u32; MINUTES_PER_DAY + 1];
        for m in 0..MINUTES_PER_DAY {
            step_prefix[m + 1] = step_prefix[m] + u64::from(self.steps[m]);
            msg_prefix[m + 1] = msg_prefix[m] + u32::from(self.messages[m]);
        }
        (0..DECISIONS_PER_DAY)
            .map(|k| {
                let t = FIRST_DECISION_MINUTE + k * DECISION_SPACING_MINUTES;
                let recent_steps = step_prefix[t] - step_prefix[t - RISK_WINDOW_MINUTES];
                let recent_msgs = msg_prefix[t] - msg_prefix[t - AVAILABILITY_WINDOW_MINUTES];
                DecisionFlags {
                    risk: recent_steps < RISK_STEP_THRESHOLD,
                    available: recent_msgs == 0,
                }
            })
            .collect()
    }
}

/// Builds one [`UserDay`] for every (user, date) that has at least one row.
///
/// Rows of different users may interleave, but each user's timestamps must be
/// strictly increasing. Output is ordered by user id, then date.
pub fn extract_user_days<I>(rows: I) -> Result<Vec<UserDay>>
where
    I: IntoIterator<Item = StepLogRow>,
{
    let mut users: HashMap<String, (NaiveDateTime, BTreeMap<NaiveDate, DayMinutes>)> = HashMap::new();
    for row in rows {
        let date = row.timestamp.date();
        let minute = (row.timestamp.hour() * 60 + row.timestamp.minute()) as usize;
        let (last, days) = match users.get_mut(&row.user_id) {
            Some(entry) => {
                if row.timestamp <= entry.0 {
                    return Err(OusError::InvalidInput(format!(
                        "user {}: timestamp {} does not follow {}",
                        row.user_id, row.timestamp, entry.0
                    )));
                }
                entry
            }
            None => users.entry(row.user_id.clone()).or_insert((row.timestamp, BTreeMap::new())),
        };
        *last = row.timestamp;
        let day = days.entry(date).or_insert_with(DayMinutes::new);
        day.steps[minute] = row.steps;
        day.messages[minute] = row.message_flag;
    }

    let mut ids: Vec<_> = users.keys().cloned().collect();
    ids.sort();
    let mut out = Vec::new();
    for id in ids {
        let (_, days) = &users[&id];
        for (date, minutes) in days {
            out.push(UserDay::from_flags(id.clone(), *date, minutes.decision_flags()));
        }
    }
    Ok(out)
}

fn decision_column(k: usize) -> String {
    let t = FIRST_DECISION_MINUTE + k * DECISION_SPACING_MINUTES;
    format!("t{:02}{:02}", t / 60, t % 60)
}

/// Writes `user_id,date,tau_star`, plus one 0–3 flag code column per decision
/// time when `with_flags` is set.
pub fn write_user_days_csv<W: Write>(days: &[UserDay], with_flags: bool, out: W) -> Result<()> {
    let to_err = |e: csv::Error| OusError::InvalidInput(format!("writing user-days: {e}"));
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["user_id".to_string(), "date".to_string(), "tau_star".to_string()];
    if with_flags {
        header.extend((0..DECISIONS_PER_DAY).map(decision_column));
    }
    w.write_record(&header).map_err(to_err)?;
    for d in days {
        let mut rec = vec![d.user_id.clone(), d.date.format("%Y-%m-%d").to_string(), d.tau_star.to_string()];
        if with_flags {
            let flags = d.flags.as_ref().ok_or_else(|| {
                OusError::InvalidInput(format!("user-day {} {} has no flags to dump", d.user_id, d.date))
            })?;
            rec.extend(flags.iter().map(|f| f.code().to_string()));
        }
        w.write_record(&rec).map_err(to_err)?;
    }
    w.flush().map_err(|e| OusError::InvalidInput(format!("writing user-days: {e}")))?;
    Ok(())
}

/// Reads a user-day CSV written by [`write_user_days_csv`]. Flag columns,
/// when present, are decoded and checked against `tau_star`.
pub fn read_user_days_csv<R: Read>(reader: R, origin: &Path) -> Result<Vec<UserDay>> {
    let err = |line: u64, message: String| OusError::Parse {
        path: origin.to_path_buf(),
        line,
        message,
    };
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers().map_err(|e| err(1, e.to_string()))?.clone();
    if headers.len() < 3 || &headers[0] != "user_id" || &headers[1] != "date" || &headers[2] != "tau_star" {
        return Err(err(1, "expected header user_id,date,tau_star[,flags...]".into()));
    }
    let has_flags = headers.len() == 3 + DECISIONS_PER_DAY;
    if headers.len() != 3 && !has_flags {
        return Err(err(1, format!("expected 3 or {} columns, got {}", 3 + DECISIONS_PER_DAY, headers.len())));
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| err(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        let date = NaiveDate::parse_from_str(&rec[1], "%Y-%m-%d")
            .map_err(|_| err(line, format!("bad date {:?}", &rec[1])))?;
        let tau_star: u32 = rec[2]
            .parse()
            .map_err(|_| err(line, format!("bad tau_star {:?}", &rec[2])))?;
        if tau_star as usize > DECISIONS_PER_DAY {
            return Err(err(line, format!("tau_star {tau_star} exceeds {DECISIONS_PER_DAY}")));
        }
        let flags = if has_flags {
            let flags = rec
                .iter()
                .skip(3)
                .map(|c| c.parse::<u8>().ok().and_then(DecisionFlags::from_code))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| err(line, "flag codes must be 0-3".into()))?;
            if flags.iter().filter(|f| f.counts()).count() as u32 != tau_star {
                return Err(err(line, "tau_star disagrees with flag columns".into()));
            }
            Some(flags)
        } else {
            None
        };
        out.push(UserDay {
            user_id: rec[0].to_string(),
            date,
            flags,
            tau_star,
        });
    }
    Ok(out)
}
