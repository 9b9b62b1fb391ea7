use std::io::{Read, Write};
use std::path::Path;

use chrono::{NaiveDateTime, Timelike};

use crate::error::{OusError, Result};

/// One minute of a participant's step log.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepLogRow {
    pub user_id: String,
    pub timestamp: NaiveDateTime,
    pub steps: u32,
    /// An anti-sedentary message was sent during this minute.
    pub message_flag: bool,
}

const TIMESTAMP_FORMATS: [&str; 4] = ["%Y-%m-%dT%H:%M", "%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M", "%Y-%m-%d %H:%M:%S"];

fn parse_timestamp(s: &str) -> std::result::Result<NaiveDateTime, String> {
    let ts = TIMESTAMP_FORMATS
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(s.trim(), f).ok())
        .ok_or_else(|| format!("unparseable timestamp {s:?}"))?;
    if ts.second() != 0 || ts.nanosecond() != 0 {
        return Err(format!("timestamp {s:?} is not at minute resolution"));
    }
    Ok(ts)
}

fn parse_flag(s: &str) -> std::result::Result<bool, String> {
    match s.trim() {
        "0" => Ok(false),
        "1" => Ok(true),
        other => Err(format!("message_flag must be 0 or 1, got {other:?}")),
    }
}

/// Parses a `user_id,timestamp,steps,message_flag` CSV. `origin` only labels
/// error messages.
pub fn parse_step_log<R: Read>(reader: R, origin: &Path) -> Result<Vec<StepLogRow>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let header_ok = rdr
        .headers()
        .map(|h| h.iter().map(str::trim).eq(["user_id", "timestamp", "steps", "message_flag"]))
        .unwrap_or(false);
    if !header_ok {
        return Err(OusError::Parse {
            path: origin.to_path_buf(),
            line: 1,
            message: "expected header user_id,timestamp,steps,message_flag".into(),
        });
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let parse_err = |line: u64, message: String| OusError::Parse {
            path: origin.to_path_buf(),
            line,
            message,
        };
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let field = |k: usize| rec.get(k).unwrap_or("");
        let timestamp = parse_timestamp(field(1)).map_err(|m| parse_err(line, m))?;
        let steps = field(2)
            .trim()
            .parse::<u32>()
            .map_err(|_| parse_err(line, format!("steps must be a non-negative integer, got {:?}", field(2))))?;
        let message_flag = parse_flag(field(3)).map_err(|m| parse_err(line, m))?;
        rows.push(StepLogRow {
            user_id: field(0).trim().to_string(),
            timestamp,
            steps,
            message_flag,
        });
    }
    Ok(rows)
}

pub fn read_step_log(path: &Path) -> Result<Vec<StepLogRow>> {
    let file = std::fs::File::open(path).map_err(|e| OusError::io(path, e))?;
    parse_step_log(std::io::BufReader::new(file), path)
}

pub fn write_step_log<W: Write>(rows: &[StepLogRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["user_id", "timestamp", "steps", "message_flag"])?;
    for r in rows {
        w.write_record([
            r.user_id.as_str(),
            &r.timestamp.format("%Y-%m-%dT%H:%M").to_string(),
            &r.steps.to_string(),
            if r.message_flag { "1" } else { "0" },
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Vec<StepLogRow>> {
        parse_step_log(text.as_bytes(), Path::new("log.csv"))
    }

    #[test]
    fn parses_rows() {
        let rows = parse("user_id,timestamp,steps,message_flag\na,2024-01-01T09:05,200,0\na,2024-01-01 09:06:00,0,1\n").unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].steps, 200);
        assert!(rows[1].message_flag);
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse("user_id,timestamp,steps,message_flag\na,2024-01-01T09:05,200,0\na,2024-01-01T09:06,-3,0\n").unwrap_err();
        assert!(matches!(err, OusError::Parse { line: 3, .. }), "{err}");
        let err = parse("user_id,timestamp,steps,message_flag\na,2024-01-01T09:05:30,1,0\n").unwrap_err();
        assert!(err.to_string().contains("minute resolution"));
        let err = parse("user_id,timestamp,steps,message_flag\na,2024-01-01T09:05,1,2\n").unwrap_err();
        assert!(matches!(err, OusError::Parse { line: 2, .. }));
        assert!(parse("who,when\n").is_err());
    }

    #[test]
    fn write_then_parse() {
        let rows = parse("user_id,timestamp,steps,message_flag\nu,2024-03-02T10:00,12,1\n").unwrap();
        let mut buf = Vec::new();
        write_step_log(&rows, &mut buf).unwrap();
        assert_eq!(parse(std::str::from_utf8(&buf).unwrap()).unwrap(), rows);
    }
}
