//! CSV and JSON artifacts.
//!
//! Floats are written with 17 significant digits so they parse back to the
//! same double. Exact matrices are written with `p/q` entries. Matrix CSVs
//! carry a header row and a leading label column; [`read_matrix_csv`]
//! skips both when present.

use std::path::Path;

use nalgebra::DMatrix;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::dimensions::parse_rational;
use crate::error::{Error, Result};
use crate::exact::RationalMatrix;

pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    Ok(csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)?)
}

/// Writes a table given a header and string rows.
pub fn write_csv(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_rational_matrix_csv(
    path: &Path,
    corner: &str,
    row_labels: &[String],
    col_labels: &[String],
    m: &RationalMatrix,
) -> Result<()> {
    let header: Vec<String> = std::iter::once(corner.to_string())
        .chain(col_labels.iter().cloned())
        .collect();
    let rows: Vec<Vec<String>> = m
        .to_strings()
        .into_iter()
        .zip(row_labels)
        .map(|(r, l)| std::iter::once(l.clone()).chain(r).collect())
        .collect();
    write_csv(path, &header, &rows)
}

pub fn write_matrix_csv(
    path: &Path,
    corner: &str,
    row_labels: &[String],
    col_labels: &[String],
    m: &DMatrix<f64>,
) -> Result<()> {
    let header: Vec<String> = std::iter::once(corner.to_string())
        .chain(col_labels.iter().cloned())
        .collect();
    let rows: Vec<Vec<String>> = (0..m.nrows())
        .map(|i| {
            std::iter::once(row_labels[i].clone())
                .chain(m.row(i).iter().map(|&x| fmt_f64(x)))
                .collect()
        })
        .collect();
    write_csv(path, &header, &rows)
}

fn parse_number(s: &str) -> Option<f64> {
    let s = s.trim();
    s.parse::<f64>()
        .ok()
        .or_else(|| parse_rational(s).ok().and_then(|r| r.to_f64()))
}

/// Reads a numeric matrix. Rows whose fields are all non-numeric (headers)
/// are skipped, as is a leading label column.
pub fn read_matrix_csv(path: &Path) -> Result<DMatrix<f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_path(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let fields: Vec<&str> = rec.iter().collect();
        if fields.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        let parsed: Vec<Option<f64>> = fields.iter().map(|f| parse_number(f)).collect();
        if parsed.iter().all(Option::is_none) {
            continue;
        }
        let start = usize::from(parsed[0].is_none());
        let row = parsed[start..]
            .iter()
            .enumerate()
            .map(|(j, v)| {
                v.ok_or_else(|| {
                    Error::Schema(format!(
                        "{}: non-numeric field `{}`",
                        path.display(),
                        fields[start + j]
                    ))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || ncols == 0 {
        return Err(Error::Schema(format!(
            "{}: no numeric rows",
            path.display()
        )));
    }
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Schema(format!("{}: ragged rows", path.display())));
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
