//! File formats: Matrix Market coordinate matrices, one-value-per-line
//! vectors, binary PGM images and benchmark reports (CSV or JSON).

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::SnakeNumbering;
use crate::matrix::Matrix;

const MM_HEADER: &str = "%%MatrixMarket matrix coordinate real general";

/// Formats with 17 significant digits, enough to round-trip any `f64`.
fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_matrix_market(a: &Matrix, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).map_err(Error::file(path))?);
    write_matrix_market_to(a, &mut w)?;
    w.flush()?;
    Ok(())
}

/// Writes stored entries in row-major order with 1-based indices.
pub fn write_matrix_market_to<W: Write>(a: &Matrix, w: &mut W) -> Result<()> {
    writeln!(w, "{MM_HEADER}")?;
    let entries = a.triplets();
    writeln!(w, "{} {} {}", a.rows(), a.cols(), entries.len())?;
    for (i, j, v) in entries {
        writeln!(w, "{} {} {}", i + 1, j + 1, fmt_f64(v))?;
    }
    Ok(())
}

/// Reads a coordinate real general Matrix Market file into sparse storage.
pub fn read_matrix_market(path: &Path) -> Result<Matrix> {
    let reader = BufReader::new(File::open(path).map_err(Error::file(path))?);
    let mut lines = reader.lines().enumerate();
    let err = |line: usize, msg: String| Error::parse(path, line, msg);

    let header = match lines.next() {
        Some((_, l)) => l?,
        None => return Err(err(1, "empty file".into())),
    };
    let tokens: Vec<String> = header
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if tokens != ["%%matrixmarket", "matrix", "coordinate", "real", "general"] {
        return Err(err(
            1,
            format!("unsupported header `{header}`, expected `{MM_HEADER}`"),
        ));
    }

    let mut size: Option<(usize, usize, usize)> = None;
    let mut triplets = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = t.split_whitespace().collect();
        match size {
            None => {
                let parsed: Option<Vec<usize>> = fields.iter().map(|f| f.parse().ok()).collect();
                match parsed.as_deref() {
                    Some(&[m, n, nnz]) => size = Some((m, n, nnz)),
                    _ => {
                        return Err(err(
                            lineno,
                            format!("expected `rows cols entries`, got `{t}`"),
                        ))
                    }
                }
            }
            Some((m, n, _)) => {
                if fields.len() != 3 {
                    return Err(err(lineno, format!("expected `row col value`, got `{t}`")));
                }
                let i: usize = fields[0]
                    .parse()
                    .map_err(|_| err(lineno, format!("bad row index `{}`", fields[0])))?;
                let j: usize = fields[1]
                    .parse()
                    .map_err(|_| err(lineno, format!("bad column index `{}`", fields[1])))?;
                let v: f64 = fields[2]
                    .parse()
                    .map_err(|_| err(lineno, format!("bad value `{}`", fields[2])))?;
                if i == 0 || j == 0 || i > m || j > n {
                    return Err(err(
                        lineno,
                        format!("index ({i}, {j}) outside a {m}x{n} matrix"),
                    ));
                }
                if !v.is_finite() {
                    return Err(err(lineno, format!("non-finite value `{}`", fields[2])));
                }
                if !seen.insert((i, j)) {
                    return Err(err(lineno, format!("duplicate entry ({i}, {j})")));
                }
                triplets.push((i - 1, j - 1, v));
            }
        }
    }
    let Some((m, n, nnz)) = size else {
        return Err(err(2, "missing size line".into()));
    };
    if triplets.len() != nnz {
        return Err(err(
            0,
            format!("size line declares {nnz} entries, found {}", triplets.len()),
        ));
    }
    Matrix::from_triplets(m, n, &triplets)
}

pub fn write_vector_csv(v: &[f64], path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).map_err(Error::file(path))?);
    for x in v {
        writeln!(w, "{}", fmt_f64(*x))?;
    }
    w.flush()?;
    Ok(())
}

/// One value per line. Blank lines are only allowed at the end.
pub fn read_vector_csv(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(Error::file(path))?;
    let body = text.trim_end();
    if body.is_empty() {
        return Ok(Vec::new());
    }
    body.lines()
        .enumerate()
        .map(|(i, line)| {
            let t = line.trim();
            t.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| {
                    Error::parse(path, i + 1, format!("expected a finite number, got `{t}`"))
                })
        })
        .collect()
}

/// Rescales `values` linearly so the minimum maps to 0 and the maximum to
/// 255. A constant image maps to all zeros.
pub fn to_gray8(values: &[f64]) -> Vec<u8> {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if !(hi > lo) {
        return vec![0; values.len()];
    }
    values
        .iter()
        .map(|&v| ((v - lo) / (hi - lo) * 255.0).round().clamp(0.0, 255.0) as u8)
        .collect()
}

/// Writes a snake-ordered image as binary PGM (`P5`), top row first.
pub fn write_pgm(
    values: &[f64],
    numbering: &SnakeNumbering,
    n_x: usize,
    n_y: usize,
    path: &Path,
) -> Result<()> {
    if values.is_empty() || n_x * n_y == 0 {
        return Err(Error::EmptyShape {
            rows: n_y,
            cols: n_x,
        });
    }
    if values.len() != n_x * n_y || numbering.len() != values.len() {
        return Err(Error::DimensionMismatch {
            context: "image",
            expected: n_x * n_y,
            found: values.len(),
        });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("image"));
    }
    let pixels = to_gray8(&numbering.to_row_major(values));
    let mut w = BufWriter::new(File::create(path).map_err(Error::file(path))?);
    write!(w, "P5\n{n_x} {n_y}\n255\n")?;
    w.write_all(&pixels)?;
    w.flush()?;
    Ok(())
}

/// Parsed binary PGM: `(width, height, pixels row-major)`.
pub fn read_pgm(path: &Path) -> Result<(usize, usize, Vec<u8>)> {
    let bytes = std::fs::read(path).map_err(Error::file(path))?;
    let mut fields = Vec::new();
    let mut pos = 0;
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::parse(path, 1, "truncated PGM header"));
        }
        fields.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    pos += 1;
    if fields[0] != "P5" || fields[3] != "255" {
        return Err(Error::parse(path, 1, "expected an 8-bit P5 image"));
    }
    let w: usize = fields[1]
        .parse()
        .map_err(|_| Error::parse(path, 1, "bad width"))?;
    let h: usize = fields[2]
        .parse()
        .map_err(|_| Error::parse(path, 1, "bad height"))?;
    let data = bytes
        .get(pos..pos + w * h)
        .ok_or_else(|| Error::parse(path, 1, "truncated pixel data"))?;
    Ok((w, h, data.to_vec()))
}

pub const BENCH_COLUMNS: [&str; 10] = [
    "label",
    "rows",
    "cols",
    "nnz",
    "method",
    "mode",
    "wall_time_seconds",
    "residual_norm",
    "rel_error",
    "reps",
];

/// One benchmark measurement. Field order is the CSV column order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub label: String,
    pub rows: usize,
    pub cols: usize,
    pub nnz: usize,
    pub method: String,
    pub mode: String,
    pub wall_time_seconds: f64,
    pub residual_norm: f64,
    pub rel_error: Option<f64>,
    pub reps: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl ReportFormat {
    /// `.json` selects JSON, anything else CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => ReportFormat::Json,
            _ => ReportFormat::Csv,
        }
    }
}

pub fn write_bench_report(
    records: &[BenchRecord],
    path: &Path,
    format: ReportFormat,
) -> Result<()> {
    let file = File::create(path).map_err(Error::file(path))?;
    match format {
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(file);
            if records.is_empty() {
                w.write_record(BENCH_COLUMNS)?;
            }
            for r in records {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        ReportFormat::Json => {
            let mut w = BufWriter::new(file);
            serde_json::to_writer_pretty(&mut w, records)?;
            writeln!(w)?;
            w.flush()?;
        }
    }
    Ok(())
}

pub fn read_bench_report(path: &Path, format: ReportFormat) -> Result<Vec<BenchRecord>> {
    match format {
        ReportFormat::Csv => {
            let mut r = csv::Reader::from_path(path)?;
            Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
        }
        ReportFormat::Json => Ok(serde_json::from_reader(BufReader::new(
            File::open(path).map_err(Error::file(path))?,
        ))?),
    }
}
