//! Trace CSV and summary JSON persistence.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::saddle::{SearchOutcome, SolveStatus, TraceRow};

/// Column order of trace files.
pub const TRACE_COLUMNS: [&str; 8] =
    ["outer_t", "step_norm", "S_x", "S_y", "W_x", "W_y", "grad_calls_cum", "proj_calls_cum"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub status: SolveStatus,
    pub tau: usize,
    #[serde(rename = "S_x_final")]
    pub s_x_final: f64,
    #[serde(rename = "S_y_final")]
    pub s_y_final: f64,
    pub grad_calls: u64,
    pub proj_calls: u64,
    /// Declared bound on gradient calls.
    pub budget: f64,
    pub wall_seconds: f64,
}

impl RunSummary {
    /// Summary of an outcome; `S_x_final`/`S_y_final` are those of the returned pair.
    pub fn from_outcome(outcome: &SearchOutcome, wall_seconds: f64) -> Self {
        let row = &outcome.trace.rows[outcome.trace.tau - 1];
        Self {
            status: outcome.trace.status,
            tau: outcome.trace.tau,
            s_x_final: row.s_x,
            s_y_final: row.s_y,
            grad_calls: outcome.counts.grad,
            proj_calls: outcome.counts.proj,
            budget: outcome.schedule.budget.grad,
            wall_seconds,
        }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

pub fn write_trace<W: Write>(out: W, rows: &[TraceRow]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    for row in rows {
        w.serialize(row).map_err(|e| Error::Internal(format!("trace serialization: {e}")))?;
    }
    if rows.is_empty() {
        w.write_record(TRACE_COLUMNS).map_err(|e| Error::Internal(format!("trace header: {e}")))?;
    }
    w.flush().map_err(|e| Error::Internal(format!("trace flush: {e}")))?;
    Ok(())
}

pub fn write_trace_csv(path: &Path, rows: &[TraceRow]) -> Result<()> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    write_trace(BufWriter::new(file), rows)
}

pub fn read_trace_csv(path: &Path) -> Result<Vec<TraceRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| io_err(path, e))?;
    let header: Vec<String> = r.headers().map_err(|e| io_err(path, e))?.iter().map(str::to_owned).collect();
    if header != TRACE_COLUMNS {
        return Err(io_err(path, format!("unexpected trace columns {header:?}")));
    }
    r.deserialize().map(|row| row.map_err(|e| io_err(path, e))).collect()
}

pub fn write_summary_json(path: &Path, summary: &RunSummary) -> Result<()> {
    let mut text = serde_json::to_string_pretty(summary).map_err(|e| Error::Internal(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| io_err(path, e))
}

pub fn read_summary_json(path: &Path) -> Result<RunSummary> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| io_err(path, e))
}
