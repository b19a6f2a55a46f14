//! Matrix file formats shared with external feature extractors.
//!
//! FVEC1 layout: the 5 ASCII bytes `FVEC1`, little-endian `u32` row count
//! `n`, little-endian `u32` column count `d`, then `n * d` little-endian
//! IEEE-754 `f32` values in row-major order. Nothing follows the payload.
//!
//! CSV: one row per sample, comma separated, with an optional header row.

use std::fs;
use std::io::Write;
use std::path::Path;

use diverscope_core::fid::FeatureMatrix;
use diverscope_core::inception::ProbMatrix;

use crate::{Error, Result};

pub const FVEC1_MAGIC: &[u8; 5] = b"FVEC1";
const HEADER_LEN: usize = 13;

/// Row-major numeric matrix as read from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct RawMatrix {
    pub n: usize,
    pub d: usize,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFormat {
    Fvec1,
    Csv,
}

impl MatrixFormat {
    /// CSV for a `.csv` extension, FVEC1 otherwise.
    pub fn for_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => MatrixFormat::Csv,
            _ => MatrixFormat::Fvec1,
        }
    }
}

fn format_err(path: &Path, reason: impl Into<String>) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

pub fn encode_fvec1(n: usize, d: usize, values: &[f64]) -> Vec<u8> {
    assert_eq!(values.len(), n * d, "matrix buffer has wrong length");
    let mut out = Vec::with_capacity(HEADER_LEN + 4 * values.len());
    out.extend_from_slice(FVEC1_MAGIC);
    out.extend_from_slice(&(n as u32).to_le_bytes());
    out.extend_from_slice(&(d as u32).to_le_bytes());
    for &v in values {
        out.extend_from_slice(&(v as f32).to_le_bytes());
    }
    out
}

pub fn decode_fvec1(bytes: &[u8], path: &Path) -> Result<RawMatrix> {
    if bytes.len() < HEADER_LEN {
        return Err(format_err(
            path,
            format!(
                "truncated header: expected {HEADER_LEN} bytes, got {}",
                bytes.len()
            ),
        ));
    }
    if &bytes[..5] != FVEC1_MAGIC {
        return Err(format_err(path, "bad magic: not an FVEC1 file"));
    }
    let n = u32::from_le_bytes(bytes[5..9].try_into().unwrap()) as usize;
    let d = u32::from_le_bytes(bytes[9..13].try_into().unwrap()) as usize;
    let expected = HEADER_LEN + 4 * n * d;
    if bytes.len() < expected {
        return Err(format_err(
            path,
            format!(
                "truncated payload: expected {expected} bytes for n={n}, d={d}, got {}",
                bytes.len()
            ),
        ));
    }
    if bytes.len() > expected {
        return Err(format_err(
            path,
            format!(
                "trailing data: expected {expected} bytes for n={n}, d={d}, got {}",
                bytes.len()
            ),
        ));
    }
    let values = bytes[HEADER_LEN..]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
        .collect();
    Ok(RawMatrix { n, d, values })
}

pub fn decode_csv(text: &str, path: &Path) -> Result<RawMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut values = Vec::new();
    let mut d = None;
    let mut n = 0;
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| format_err(path, e.to_string()))?;
        let parsed: Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        let row = match parsed {
            Ok(row) => row,
            Err(_) if line == 0 => continue,
            Err(e) => return Err(format_err(path, format!("line {}: {e}", line + 1))),
        };
        match d {
            None => d = Some(row.len()),
            Some(d) if d != row.len() => {
                return Err(format_err(
                    path,
                    format!("line {}: {} columns, expected {d}", line + 1, row.len()),
                ))
            }
            _ => {}
        }
        values.extend(row);
        n += 1;
    }
    let d = d.ok_or_else(|| format_err(path, "no data rows"))?;
    Ok(RawMatrix { n, d, values })
}

/// Reads FVEC1 (detected by magic or a `.fvec`/`.fvec1`/`.bin` extension),
/// otherwise CSV.
pub fn read_matrix(path: &Path) -> Result<RawMatrix> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let binary_ext = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| ["fvec", "fvec1", "bin"].contains(&e.to_ascii_lowercase().as_str()));
    if bytes.starts_with(FVEC1_MAGIC) || binary_ext {
        return decode_fvec1(&bytes, path);
    }
    let text = String::from_utf8(bytes).map_err(|_| format_err(path, "not UTF-8 text"))?;
    decode_csv(&text, path)
}

fn core_err(path: &Path, e: diverscope_core::Error) -> Error {
    format_err(path, e.to_string())
}

pub fn load_features(path: &Path) -> Result<FeatureMatrix> {
    let raw = read_matrix(path)?;
    FeatureMatrix::new(raw.n, raw.d, raw.values).map_err(|e| core_err(path, e))
}

pub fn load_probs(path: &Path) -> Result<ProbMatrix> {
    let raw = read_matrix(path)?;
    ProbMatrix::new(raw.n, raw.d, raw.values).map_err(|e| core_err(path, e))
}

/// Writes a matrix as FVEC1 or CSV (with an `f0,f1,...` header).
pub fn write_matrix(
    path: &Path,
    n: usize,
    d: usize,
    values: &[f64],
    format: MatrixFormat,
) -> Result<()> {
    let bytes = match format {
        MatrixFormat::Fvec1 => encode_fvec1(n, d, values),
        MatrixFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let header: Vec<String> = (0..d).map(|j| format!("f{j}")).collect();
            w.write_record(&header)
                .map_err(|e| format_err(path, e.to_string()))?;
            for row in values.chunks(d.max(1)) {
                w.write_record(row.iter().map(|v| v.to_string()))
                    .map_err(|e| format_err(path, e.to_string()))?;
            }
            w.into_inner()
                .map_err(|e| format_err(path, e.to_string()))?
        }
    };
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Per-pair MS-SSIM scores: `pair,i,j,score`.
pub fn write_pair_scores(path: &Path, pairs: &[(usize, usize)], scores: &[f64]) -> Result<()> {
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = String::from("pair,i,j,score\n");
    for (k, (&(i, j), s)) in pairs.iter().zip(scores).enumerate() {
        out.push_str(&format!("{k},{i},{j},{s:.12}\n"));
    }
    file.write_all(out.as_bytes())
        .map_err(|e| Error::io(path, e))
}
