//! CSV schemas and readers/writers.
//!
//! Dialect: comma-separated, UTF-8, header row required, `.` decimal
//! separator, no thousands separators. Floats are written with Rust's
//! shortest round-trip formatting, so a written file re-parses to
//! bit-identical values.
//!
//! Schemas (column order free, extra columns ignored unless stated):
//!
//! * sample:   `distance,outcome`
//! * curve:    `distance,estimate,valid` (valid: 1/0)
//! * tracts:   `id,lat,lon,outcome`
//! * sources:  `lat,lon`
//! * branches: `survived,income[,<numeric covariate>...]` — every extra
//!   column is treated as a covariate for the survival model

use std::fmt::Write as _;
use std::path::Path;

use csv::{ReaderBuilder, StringRecord, Trim};
use spatial_decay_core::{CurveEstimate, GeoPoint, SpatialSample};

use crate::error::CliError;

fn open_reader(path: &Path) -> Result<csv::Reader<std::fs::File>, CliError> {
    ReaderBuilder::new()
        .trim(Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn column_index(
    headers: &StringRecord,
    name: &str,
    path: &Path,
) -> Result<usize, CliError> {
    headers
        .iter()
        .position(|h| h.eq_ignore_ascii_case(name))
        .ok_or_else(|| {
            CliError::Config(format!(
                "{}: missing required column '{name}' (found: {})",
                path.display(),
                headers.iter().collect::<Vec<_>>().join(",")
            ))
        })
}

fn record_line(record: &StringRecord) -> u64 {
    record.position().map(|p| p.line()).unwrap_or(0)
}

fn parse_field(
    record: &StringRecord,
    idx: usize,
    column: &str,
    path: &Path,
) -> Result<f64, CliError> {
    let raw = record.get(idx).unwrap_or("");
    raw.parse::<f64>().map_err(|_| CliError::Parse {
        path: path.display().to_string(),
        line: record_line(record),
        message: format!("cannot parse '{raw}' as a number for column '{column}'"),
    })
}

/// Read a `distance,outcome` sample.
pub fn read_sample(path: &Path) -> Result<SpatialSample, CliError> {
    let mut reader = open_reader(path)?;
    let headers = reader.headers().map_err(|e| CliError::io(path, e.into()))?.clone();
    let d_idx = column_index(&headers, "distance", path)?;
    let y_idx = column_index(&headers, "outcome", path)?;

    let mut distances = Vec::new();
    let mut outcomes = Vec::new();
    for result in reader.records() {
        let record = result.map_err(|e| CliError::Parse {
            path: path.display().to_string(),
            line: 0,
            message: e.to_string(),
        })?;
        let line = record_line(&record);
        let d = parse_field(&record, d_idx, "distance", path)?;
        let y = parse_field(&record, y_idx, "outcome", path)?;
        if !d.is_finite() || d < 0.0 {
            return Err(CliError::Config(format!(
                "{}, line {line}: distance must be finite and non-negative, got {d}",
                path.display()
            )));
        }
        if !y.is_finite() {
            return Err(CliError::Config(format!(
                "{}, line {line}: outcome must be finite, got {y}",
                path.display()
            )));
        }
        distances.push(d);
        outcomes.push(y);
    }
    SpatialSample::new(distances, outcomes)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn sample_to_csv(sample: &SpatialSample) -> String {
    let mut out = String::from("distance,outcome\n");
    for (d, y) in sample.pairs() {
        let _ = writeln!(out, "{d},{y}");
    }
    out
}

pub fn curve_to_csv(curve: &CurveEstimate) -> String {
    let mut out = String::from("distance,estimate,valid\n");
    for k in 0..curve.len() {
        let valid = curve.valid_mask()[k];
        let _ = writeln!(
            out,
            "{},{},{}",
            curve.grid()[k],
            curve.values()[k],
            if valid { 1 } else { 0 }
        );
    }
    out
}

/// Read a curve written by [`curve_to_csv`] (the `valid` column is
/// optional; non-finite estimates are marked invalid either way).
pub fn read_curve(path: &Path) -> Result<(Vec<f64>, Vec<f64>, Vec<bool>), CliError> {
    let mut reader = open_reader(path)?;
    let headers = reader.headers().map_err(|e| CliError::io(path, e.into()))?.clone();
    let d_idx = column_index(&headers, "distance", path)?;
    let e_idx = column_index(&headers, "estimate", path)?;
    let v_idx = headers.iter().position(|h| h.eq_ignore_ascii_case("valid"));

    let mut grid = Vec::new();
    let mut values = Vec::new();
    let mut mask = Vec::new();
    for result in reader.records() {
        let record = result.map_err(|e| CliError::Parse {
            path: path.display().to_string(),
            line: 0,
            message: e.to_string(),
        })?;
        let d = parse_field(&record, d_idx, "distance", path)?;
        let v = parse_field(&record, e_idx, "estimate", path)?;
        let declared_valid = match v_idx {
            Some(i) => parse_field(&record, i, "valid", path)? != 0.0,
            None => true,
        };
        grid.push(d);
        values.push(v);
        mask.push(declared_valid && v.is_finite());
    }
    if grid.is_empty() {
        return Err(CliError::Config(format!(
            "{}: curve file has no data rows",
            path.display()
        )));
    }
    Ok((grid, values, mask))
}

#[derive(Debug, Clone)]
pub struct TractRecord {
    pub id: String,
    pub point: GeoPoint,
    pub outcome: f64,
}

/// Read an `id,lat,lon,outcome` tract table.
pub fn read_tracts(path: &Path) -> Result<Vec<TractRecord>, CliError> {
    let mut reader = open_reader(path)?;
    let headers = reader.headers().map_err(|e| CliError::io(path, e.into()))?.clone();
    let id_idx = column_index(&headers, "id", path)?;
    let lat_idx = column_index(&headers, "lat", path)?;
    let lon_idx = column_index(&headers, "lon", path)?;
    let y_idx = column_index(&headers, "outcome", path)?;

    let mut tracts = Vec::new();
    for result in reader.records() {
        let record = result.map_err(|e| CliError::Parse {
            path: path.display().to_string(),
            line: 0,
            message: e.to_string(),
        })?;
        let line = record_line(&record);
        let lat = parse_field(&record, lat_idx, "lat", path)?;
        let lon = parse_field(&record, lon_idx, "lon", path)?;
        let outcome = parse_field(&record, y_idx, "outcome", path)?;
        let point = GeoPoint::new(lat, lon).map_err(|e| {
            CliError::Config(format!("{}, line {line}: {e}", path.display()))
        })?;
        tracts.push(TractRecord {
            id: record.get(id_idx).unwrap_or("").to_string(),
            point,
            outcome,
        });
    }
    if tracts.is_empty() {
        return Err(CliError::Config(format!(
            "{}: tract file has no data rows",
            path.display()
        )));
    }
    Ok(tracts)
}

/// Read a `lat,lon` source table.
pub fn read_sources(path: &Path) -> Result<Vec<GeoPoint>, CliError> {
    let mut reader = open_reader(path)?;
    let headers = reader.headers().map_err(|e| CliError::io(path, e.into()))?.clone();
    let lat_idx = column_index(&headers, "lat", path)?;
    let lon_idx = column_index(&headers, "lon", path)?;

    let mut sources = Vec::new();
    for result in reader.records() {
        let record = result.map_err(|e| CliError::Parse {
            path: path.display().to_string(),
            line: 0,
            message: e.to_string(),
        })?;
        let line = record_line(&record);
        let lat = parse_field(&record, lat_idx, "lat", path)?;
        let lon = parse_field(&record, lon_idx, "lon", path)?;
        sources.push(GeoPoint::new(lat, lon).map_err(|e| {
            CliError::Config(format!("{}, line {line}: {e}", path.display()))
        })?);
    }
    if sources.is_empty() {
        return Err(CliError::Config(format!(
            "{}: source file has no data rows",
            path.display()
        )));
    }
    Ok(sources)
}

#[derive(Debug, Clone)]
pub struct BranchTable {
    pub survived: Vec<bool>,
    pub income: Vec<f64>,
    /// Every additional numeric column, in header order.
    pub extras: Vec<(String, Vec<f64>)>,
}

/// Read a `survived,income[,...]` branch table.
pub fn read_branches(path: &Path) -> Result<BranchTable, CliError> {
    let mut reader = open_reader(path)?;
    let headers = reader.headers().map_err(|e| CliError::io(path, e.into()))?.clone();
    let s_idx = column_index(&headers, "survived", path)?;
    let i_idx = column_index(&headers, "income", path)?;
    let extra_columns: Vec<(usize, String)> = headers
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != s_idx && *k != i_idx)
        .map(|(k, name)| (k, name.to_string()))
        .collect();

    let mut survived = Vec::new();
    let mut income = Vec::new();
    let mut extras: Vec<(String, Vec<f64>)> = extra_columns
        .iter()
        .map(|(_, name)| (name.clone(), Vec::new()))
        .collect();
    for result in reader.records() {
        let record = result.map_err(|e| CliError::Parse {
            path: path.display().to_string(),
            line: 0,
            message: e.to_string(),
        })?;
        let line = record_line(&record);
        let s_raw = record.get(s_idx).unwrap_or("");
        let s = match s_raw {
            "0" => false,
            "1" => true,
            _ => {
                return Err(CliError::Parse {
                    path: path.display().to_string(),
                    line,
                    message: format!("column 'survived' must be 0 or 1, got '{s_raw}'"),
                })
            }
        };
        survived.push(s);
        income.push(parse_field(&record, i_idx, "income", path)?);
        for (slot, (idx, name)) in extras.iter_mut().zip(extra_columns.iter()) {
            slot.1.push(parse_field(&record, *idx, name, path)?);
        }
    }
    if survived.is_empty() {
        return Err(CliError::Config(format!(
            "{}: branch file has no data rows",
            path.display()
        )));
    }
    Ok(BranchTable {
        survived,
        income,
        extras,
    })
}
