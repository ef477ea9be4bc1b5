//! Plain-text summary table of power-curve files.

use std::fs::File;
use std::path::{Path, PathBuf};

use crate::error::Result;

use super::csvio::{read_power, read_stopping};

/// One summarized results file.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub name: String,
    /// Checkpoint the power was read at.
    pub n: Option<u64>,
    pub power: Option<f64>,
    pub stderr: Option<f64>,
    pub mean_tau: Option<f64>,
    pub censor_rate: Option<f64>,
}

/// Companion stopping-time file of `power.csv`: `power.stopping.csv`.
pub fn stopping_path(power: &Path) -> PathBuf {
    power.with_extension("stopping.csv")
}

/// Summarize a power CSV at the largest checkpoint not above `at` (the last
/// checkpoint when `at` is `None`). Mean stopping time and censor rate come
/// from the companion stopping file when it exists.
pub fn summarize(path: &Path, at: Option<u64>) -> Result<ReportRow> {
    let points = read_power(File::open(path)?)?;
    let point = match at {
        Some(n) => points.iter().rev().find(|p| p.n <= n),
        None => points.last(),
    };
    let name = path
        .file_name()
        .map(|s| s.to_string_lossy().trim_end_matches(".csv").to_string())
        .unwrap_or_default();
    let mut row = ReportRow {
        name,
        n: point.map(|p| p.n),
        power: point.map(|p| p.reject_fraction),
        stderr: point.map(|p| p.stderr),
        mean_tau: None,
        censor_rate: None,
    };
    let sp = stopping_path(path);
    if sp.exists() {
        let rows = read_stopping(File::open(&sp)?)?;
        if !rows.is_empty() {
            let stopped: Vec<f64> = rows
                .iter()
                .filter(|r| !r.censored)
                .map(|r| r.tau as f64)
                .collect();
            row.censor_rate = Some((rows.len() - stopped.len()) as f64 / rows.len() as f64);
            if !stopped.is_empty() {
                row.mean_tau = Some(stopped.iter().sum::<f64>() / stopped.len() as f64);
            }
        }
    }
    Ok(row)
}

/// Render rows as an aligned table: names left-aligned, numbers right-aligned,
/// columns separated by two spaces.
pub fn render(rows: &[ReportRow]) -> String {
    let dash = || "-".to_string();
    let fmt = |v: Option<f64>, prec: usize| v.map_or_else(dash, |x| format!("{x:.prec$}"));
    let header = ["test", "n", "power", "stderr", "mean_tau", "censor_rate"].map(String::from);
    let mut table = vec![header.to_vec()];
    for r in rows {
        table.push(vec![
            r.name.clone(),
            r.n.map_or_else(dash, |n| n.to_string()),
            fmt(r.power, 4),
            fmt(r.stderr, 4),
            fmt(r.mean_tau, 1),
            fmt(r.censor_rate, 4),
        ]);
    }
    let widths: Vec<usize> = (0..6)
        .map(|c| table.iter().map(|row| row[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in &table {
        let cells: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, s)| {
                if c == 0 {
                    format!("{s:<w$}", w = widths[c])
                } else {
                    format!("{s:>w$}", w = widths[c])
                }
            })
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}
