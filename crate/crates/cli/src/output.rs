//! Trace CSVs and the summary record.
//!
//! Floats use Rust's `Debug` formatting, the shortest decimal that parses
//! back to the same bits.

use std::path::Path;

use nesterov_ode::{ContinuousTrace, IterateTrace};
use serde::Serialize;

use crate::error::{CliError, Result};

pub fn float(v: f64) -> String {
    format!("{v:?}")
}

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    csv::Writer::from_path(path).map_err(|e| CliError::io(path, e.into()))
}

fn finish(mut w: csv::Writer<std::fs::File>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| CliError::io(path, e))
}

/// `k,f_gap,step_norm,restarted`, one row per iteration.
pub fn write_iterate_csv(path: &Path, trace: &IterateTrace) -> Result<()> {
    let mut w = writer(path)?;
    let io = |e: csv::Error| CliError::io(path, e.into());
    w.write_record(["k", "f_gap", "step_norm", "restarted"]).map_err(io)?;
    for rec in &trace.records {
        w.write_record([rec.k.to_string(), float(rec.f_gap), float(rec.step_norm), u8::from(rec.restarted).to_string()])
            .map_err(io)?;
    }
    finish(w, path)
}

/// `t,f_gap,speed,restarted[,x0..]`. `restarted` marks the first sample at or
/// after each velocity reset.
pub fn write_continuous_csv(path: &Path, trace: &ContinuousTrace, x_columns: bool) -> Result<()> {
    let n = trace.dim();
    if x_columns && n > 4 {
        return Err(CliError::config(format!("x columns are limited to n ≤ 4 (n = {n})")));
    }
    let mut w = writer(path)?;
    let io = |e: csv::Error| CliError::io(path, e.into());
    let mut header: Vec<String> = ["t", "f_gap", "speed", "restarted"].map(String::from).to_vec();
    if x_columns {
        header.extend((0..n).map(|i| format!("x{i}")));
    }
    w.write_record(&header).map_err(io)?;
    let mut resets = trace.restart_times.iter().peekable();
    for i in 0..trace.len() {
        let t = trace.times[i];
        let mut restarted = false;
        while resets.peek().is_some_and(|r| **r <= t) {
            resets.next();
            restarted = true;
        }
        let mut row = vec![float(t), float(trace.f_gap[i]), float(trace.speed(i)), u8::from(restarted).to_string()];
        if x_columns {
            row.extend(trace.x(i).iter().map(|v| float(*v)));
        }
        w.write_record(&row).map_err(io)?;
    }
    finish(w, path)
}

/// Two-column `(grid, value)` report.
pub fn write_series_csv(path: &Path, header: [&str; 2], grid: &[f64], values: &[f64]) -> Result<()> {
    let mut w = writer(path)?;
    let io = |e: csv::Error| CliError::io(path, e.into());
    w.write_record(header).map_err(io)?;
    for (g, v) in grid.iter().zip(values) {
        w.write_record([float(*g), float(*v)]).map_err(io)?;
    }
    finish(w, path)
}

#[derive(Debug, Clone, Serialize)]
pub struct ProblemSummary {
    pub name: String,
    pub scale: String,
    pub seed: u64,
    pub dim: usize,
    pub lipschitz: f64,
    pub f_star: f64,
    pub confident: bool,
    pub cached: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub id: String,
    pub kind: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisSummary {
    pub id: String,
    pub op: String,
    pub runs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measured: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    /// Absent when nothing was asserted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pass: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated_unix: Option<u64>,
    pub status: String,
    pub problem: ProblemSummary,
    pub run: Vec<RunSummary>,
    pub analysis: Vec<AnalysisSummary>,
}

pub fn write_summary(path: &Path, summary: &Summary) -> Result<()> {
    let text = toml::to_string(summary).map_err(|e| CliError::config(e.to_string()))?;
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -0.0, 5e-324, f64::MAX] {
            let s = float(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
        assert_eq!(float(1.0), "1.0");
    }
}
