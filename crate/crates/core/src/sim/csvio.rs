//! CSV results files.
//!
//! Power curves use the columns `n,reject_fraction,stderr`; stopping times
//! use `trial,tau,censored`, where a censored trial reports the horizon as
//! its `tau` and `censored = 1`. Floats are written in shortest round-trip
//! form and lines end in LF.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

use super::harness::{CurvePoint, PowerCurve};

pub const POWER_HEADER: [&str; 3] = ["n", "reject_fraction", "stderr"];
pub const STOPPING_HEADER: [&str; 3] = ["trial", "tau", "censored"];

/// One row of a stopping-times file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StoppingRow {
    pub trial: u64,
    pub tau: u64,
    pub censored: bool,
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

pub fn write_power<W: Write>(points: &[CurvePoint], w: W) -> Result<()> {
    let mut out = writer(w);
    out.write_record(POWER_HEADER).map_err(csv_err)?;
    for p in points {
        out.write_record([
            p.n.to_string(),
            p.reject_fraction.to_string(),
            p.stderr.to_string(),
        ])
        .map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_stopping<W: Write>(rows: &[StoppingRow], w: W) -> Result<()> {
    let mut out = writer(w);
    out.write_record(STOPPING_HEADER).map_err(csv_err)?;
    for r in rows {
        out.write_record([
            r.trial.to_string(),
            r.tau.to_string(),
            u8::from(r.censored).to_string(),
        ])
        .map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

/// Stopping rows of a curve, in trial order.
pub fn stopping_rows(curve: &PowerCurve) -> Vec<StoppingRow> {
    curve
        .trials
        .iter()
        .map(|t| StoppingRow {
            trial: t.trial,
            tau: t.tau.unwrap_or(curve.horizon),
            censored: t.tau.is_none(),
        })
        .collect()
}

pub fn write_power_file(curve: &PowerCurve, path: &Path) -> Result<()> {
    write_power(&curve.points, File::create(path)?)
}

pub fn write_stopping_file(curve: &PowerCurve, path: &Path) -> Result<()> {
    write_stopping(&stopping_rows(curve), File::create(path)?)
}

fn reader<R: Read>(r: R, header: &[&str; 3], what: &str) -> Result<csv::Reader<R>> {
    let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let got = rd.headers().map_err(csv_err)?.clone();
    if got.iter().ne(header.iter().copied()) {
        return Err(Error::Schema(format!(
            "expected {what} columns `{}`, found `{}`",
            header.join(","),
            got.iter().collect::<Vec<_>>().join(",")
        )));
    }
    Ok(rd)
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, k: usize, line: u64) -> Result<T> {
    rec.get(k)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Schema(format!("bad value in column {} on line {line}", k + 1)))
}

pub fn read_power<R: Read>(r: R) -> Result<Vec<CurvePoint>> {
    let mut rd = reader(r, &POWER_HEADER, "power")?;
    let mut out = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec.map_err(|e| Error::Schema(e.to_string()))?;
        let line = i as u64 + 2;
        out.push(CurvePoint {
            n: field(&rec, 0, line)?,
            reject_fraction: field(&rec, 1, line)?,
            stderr: field(&rec, 2, line)?,
        });
    }
    Ok(out)
}

pub fn read_stopping<R: Read>(r: R) -> Result<Vec<StoppingRow>> {
    let mut rd = reader(r, &STOPPING_HEADER, "stopping-time")?;
    let mut out = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec.map_err(|e| Error::Schema(e.to_string()))?;
        let line = i as u64 + 2;
        let censored: u8 = field(&rec, 2, line)?;
        if censored > 1 {
            return Err(Error::Schema(format!("censored must be 0 or 1 on line {line}")));
        }
        out.push(StoppingRow {
            trial: field(&rec, 0, line)?,
            tau: field(&rec, 1, line)?,
            censored: censored == 1,
        });
    }
    Ok(out)
}
