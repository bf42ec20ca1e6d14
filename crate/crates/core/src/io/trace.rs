//! CSV exchange for measurement traces.
//!
//! Fixed headers, version 1:
//! - current-voltage sweeps: `voltage_volts, current_amperes`
//! - pulse traces: `index, v_write_volts, t_write_seconds,
//!   r_initial_ohms, r_final_ohms, delta_r_ohms`
//!
//! Values are written with full round-trip precision. Loaders check the
//! header row column-by-column and reject non-finite numbers with the
//! offending row number.

use std::path::Path;

use crate::device_model::PulseRecord;
use crate::fitting::{IvTrace, PulseTrace, StateLabel};
use crate::io::IoError;
use crate::scalar::Real;

/// Header row of a current-voltage sweep CSV.
pub const IV_HEADERS: [&str; 2] = ["voltage_volts", "current_amperes"];

/// Header row of a pulse-trace CSV.
pub const PULSE_HEADERS: [&str; 6] = [
    "index",
    "v_write_volts",
    "t_write_seconds",
    "r_initial_ohms",
    "r_final_ohms",
    "delta_r_ohms",
];

fn check_headers(found: &csv::StringRecord, expected: &[&str]) -> Result<(), IoError> {
    for (i, want) in expected.iter().enumerate() {
        match found.get(i) {
            Some(got) if got.trim() == *want => {}
            _ => return Err(IoError::SchemaMismatch { column: (*want).into() }),
        }
    }
    if found.len() != expected.len() {
        return Err(IoError::SchemaMismatch {
            column: found.get(expected.len()).unwrap_or("<past end>").into(),
        });
    }
    Ok(())
}

fn parse_field<S: Real>(record: &csv::StringRecord, col: usize, row: usize) -> Result<S, IoError> {
    let raw = record
        .get(col)
        .ok_or_else(|| IoError::SchemaMismatch { column: format!("column {col}") })?;
    let value: f64 = raw
        .trim()
        .parse()
        .map_err(|_| IoError::NonFinite { row })?;
    if !value.is_finite() {
        return Err(IoError::NonFinite { row });
    }
    Ok(S::of(value))
}

/// Writes a current-voltage sweep.
pub fn write_iv_csv<S: Real>(trace: &IvTrace<S>, path: impl AsRef<Path>) -> Result<(), IoError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(IV_HEADERS)?;
    for &(v, i) in &trace.points {
        w.write_record(&[format!("{:?}", v.as_f64()), format!("{:?}", i.as_f64())])?;
    }
    w.flush()?;
    Ok(())
}

/// Loads a current-voltage sweep; `area` and `state_label` are per-trace
/// metadata supplied by the caller, not columns.
pub fn load_iv_csv<S: Real>(
    path: impl AsRef<Path>,
    area: S,
    state_label: StateLabel,
) -> Result<IvTrace<S>, IoError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    check_headers(reader.headers()?, &IV_HEADERS)?;
    let mut points = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        points.push((parse_field(&record, 0, row)?, parse_field(&record, 1, row)?));
    }
    let trace = IvTrace { points, area, state_label };
    trace.validate().map_err(|e| IoError::InvalidData(e.to_string()))?;
    Ok(trace)
}

/// Writes a pulse trace; `width` is the shared write width of the
/// sequence, recorded per row.
pub fn write_pulse_csv<S: Real>(
    trace: &PulseTrace<S>,
    width: S,
    path: impl AsRef<Path>,
) -> Result<(), IoError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(PULSE_HEADERS)?;
    for (index, rec) in trace.records.iter().enumerate() {
        w.write_record(&[
            index.to_string(),
            format!("{:?}", rec.v_write.as_f64()),
            format!("{:?}", width.as_f64()),
            format!("{:?}", rec.r_initial.as_f64()),
            format!("{:?}", rec.r_final.as_f64()),
            format!("{:?}", rec.delta_r.as_f64()),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Loads a pulse trace, returning the records and the write width of the
/// first row (zero for an empty trace).
pub fn load_pulse_csv<S: Real>(
    path: impl AsRef<Path>,
) -> Result<(PulseTrace<S>, S), IoError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    check_headers(reader.headers()?, &PULSE_HEADERS)?;
    let mut records = Vec::new();
    let mut width = S::zero();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let w: S = parse_field(&record, 2, row)?;
        if row == 0 {
            width = w;
        }
        records.push(PulseRecord {
            v_write: parse_field(&record, 1, row)?,
            r_initial: parse_field(&record, 3, row)?,
            r_final: parse_field(&record, 4, row)?,
            delta_r: parse_field(&record, 5, row)?,
        });
    }
    let trace = PulseTrace { records };
    trace.validate().map_err(|e| IoError::InvalidData(e.to_string()))?;
    Ok((trace, width))
}
