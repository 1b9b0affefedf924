//! Readers for the UCI breast cancer (WDBC) and Pima diabetes CSV files.
//!
//! Loaders return raw, unnormalised features; [`split`](super::split)
//! normalises with training-split statistics.

use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use sha2::{Digest as _, Sha256};

use crate::domain::{Dataset, Sample};
use crate::error::{Error, Result};

pub const WBC_NAME: &str = "wbc";
pub const PIMA_NAME: &str = "pima";

pub const WBC_FEATURES: usize = 30;
pub const PIMA_FEATURES: usize = 8;

/// Sample and per-class counts of the canonical files.
pub const WBC_EXPECTED: (usize, [usize; 2]) = (569, [357, 212]);
pub const PIMA_EXPECTED: (usize, [usize; 2]) = (768, [500, 268]);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetFormat {
    /// Diagnostic Wisconsin breast cancer: id, M/B, 30 features.
    Wdbc,
    /// Pima Indians diabetes: 8 features, 0/1 outcome.
    Pima,
}

impl DatasetFormat {
    pub fn name(self) -> &'static str {
        match self {
            DatasetFormat::Wdbc => WBC_NAME,
            DatasetFormat::Pima => PIMA_NAME,
        }
    }

    pub fn variant(self) -> &'static str {
        match self {
            DatasetFormat::Wdbc => "UCI Breast Cancer Wisconsin (Diagnostic), 569x30",
            DatasetFormat::Pima => "Pima Indians Diabetes, 768x8",
        }
    }

    pub fn expected_counts(self) -> (usize, [usize; 2]) {
        match self {
            DatasetFormat::Wdbc => WBC_EXPECTED,
            DatasetFormat::Pima => PIMA_EXPECTED,
        }
    }

    pub fn load(self, path: &Path) -> Result<Dataset> {
        match self {
            DatasetFormat::Wdbc => load_wbc(path),
            DatasetFormat::Pima => load_pima(path),
        }
    }
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

fn load_error(path: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::Load {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn records<R: Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader)
}

fn parse_number(path: &Path, line: u64, column: usize, field: &str) -> Result<f64> {
    let v: f64 = field.parse().map_err(|_| {
        load_error(
            path,
            line,
            format!("column {column}: cannot parse '{field}' as a number"),
        )
    })?;
    if !v.is_finite() {
        return Err(load_error(
            path,
            line,
            format!("column {column}: non-finite value"),
        ));
    }
    Ok(v)
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    load_error(path, line, e.to_string())
}

pub fn load_wbc(path: &Path) -> Result<Dataset> {
    parse_wbc(open(path)?, path)
}

/// `origin` only labels error messages.
pub fn parse_wbc<R: Read>(reader: R, origin: &Path) -> Result<Dataset> {
    let mut samples = Vec::new();
    for rec in records(reader).records() {
        let rec = rec.map_err(|e| csv_error(origin, e))?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if rec.len() != WBC_FEATURES + 2 {
            return Err(load_error(
                origin,
                line,
                format!("expected {} columns, found {}", WBC_FEATURES + 2, rec.len()),
            ));
        }
        let label = match &rec[1] {
            "B" => 0,
            "M" => 1,
            other => {
                return Err(load_error(
                    origin,
                    line,
                    format!("unknown diagnosis '{other}'"),
                ));
            }
        };
        let features = (2..rec.len())
            .map(|c| parse_number(origin, line, c, &rec[c]))
            .collect::<Result<Vec<_>>>()?;
        samples.push(Sample::new(features, label));
    }
    if samples.is_empty() {
        return Err(load_error(origin, 0, "file contains no records"));
    }
    Dataset::new(WBC_NAME, 2, samples)
}

pub fn load_pima(path: &Path) -> Result<Dataset> {
    parse_pima(open(path)?, path)
}

/// A first row whose leading field is not numeric is taken as a header.
pub fn parse_pima<R: Read>(reader: R, origin: &Path) -> Result<Dataset> {
    let mut samples = Vec::new();
    for (i, rec) in records(reader).records().enumerate() {
        let rec = rec.map_err(|e| csv_error(origin, e))?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if i == 0 && rec.get(0).is_some_and(|f| f.parse::<f64>().is_err()) {
            continue;
        }
        if rec.len() != PIMA_FEATURES + 1 {
            return Err(load_error(
                origin,
                line,
                format!(
                    "expected {} columns, found {}",
                    PIMA_FEATURES + 1,
                    rec.len()
                ),
            ));
        }
        let features = (0..PIMA_FEATURES)
            .map(|c| parse_number(origin, line, c, &rec[c]))
            .collect::<Result<Vec<_>>>()?;
        let outcome = parse_number(origin, line, PIMA_FEATURES, &rec[PIMA_FEATURES])?;
        let label = if outcome == 0.0 {
            0
        } else if outcome == 1.0 {
            1
        } else {
            return Err(load_error(
                origin,
                line,
                format!("outcome {outcome} is not 0 or 1"),
            ));
        };
        samples.push(Sample::new(features, label));
    }
    if samples.is_empty() {
        return Err(load_error(origin, 0, "file contains no records"));
    }
    Dataset::new(PIMA_NAME, 2, samples)
}

/// Guesses the format from the column count of the first data row.
pub fn detect_format(path: &Path) -> Result<DatasetFormat> {
    let reader = BufReader::new(open(path)?);
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() == WBC_FEATURES + 2 {
            return Ok(DatasetFormat::Wdbc);
        }
        if fields.len() == PIMA_FEATURES + 1 {
            return Ok(DatasetFormat::Pima);
        }
        return Err(load_error(
            path,
            i as u64 + 1,
            format!(
                "{} columns match neither WDBC nor Pima layout",
                fields.len()
            ),
        ));
    }
    Err(load_error(path, 0, "file contains no records"))
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let mut file = open(path)?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 8192];
    loop {
        let n = file.read(&mut buf).map_err(|e| Error::io(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}
