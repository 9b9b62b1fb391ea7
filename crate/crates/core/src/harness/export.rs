use std::io::Write;
use std::path::Path;

use super::sweep::SweepRow;
use crate::error::{OusError, Result};

pub const CSV_HEADER: [&str; 13] = [
    "scenario_id",
    "policy",
    "T",
    "b",
    "tau_star",
    "width",
    "n_reps",
    "mean_cr",
    "stderr_cr",
    "mean_sol",
    "mean_budget",
    "mean_penalty",
    "sentinel",
];

fn opt(v: Option<u32>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes rows in the order given. Floats use the shortest round-trip form,
/// with `inf`, `-inf` and `NaN` for non-finite values.
pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.scenario_id.clone(),
            r.policy.clone(),
            r.horizon.to_string(),
            r.budget.to_string(),
            opt(r.tau_star),
            opt(r.width),
            r.n_reps.to_string(),
            r.mean_cr.to_string(),
            r.stderr_cr.to_string(),
            r.mean_sol.to_string(),
            r.mean_budget.to_string(),
            r.mean_penalty.to_string(),
            u8::from(r.sentinel).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn export_csv(rows: &[SweepRow], path: &Path) -> Result<()> {
    if rows.is_empty() {
        return Err(OusError::InvalidInput("no rows to export".into()));
    }
    let file = std::fs::File::create(path).map_err(|e| OusError::io(path, e))?;
    write_csv(rows, std::io::BufWriter::new(file)).map_err(|e| {
        let io = match e.into_kind() {
            csv::ErrorKind::Io(io) => io,
            other => std::io::Error::other(format!("{other:?}")),
        };
        OusError::io(path, io)
    })
}
