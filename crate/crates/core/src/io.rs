//! CSV input for sequences and matrices, CSV output for curves.
//!
//! Sequence files hold one value per line, or `index,value` pairs whose
//! indices run 0, 1, 2, …. Blank lines and `#` comments are ignored, and a
//! non-numeric first line is treated as a header.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

fn io_error(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

fn records(path: &Path) -> Result<Vec<(usize, Vec<String>)>> {
    let file = File::open(path).map_err(|e| io_error(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(file);
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_error(path, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let fields: Vec<String> = rec.iter().map(str::to_string).collect();
        if fields.iter().all(|f| f.is_empty()) {
            continue;
        }
        out.push((line, fields));
    }
    Ok(out)
}

fn is_header(fields: &[String]) -> bool {
    fields.iter().any(|f| f.parse::<f64>().is_err())
}

fn number(path: &Path, line: usize, field: &str) -> Result<f64> {
    field
        .parse::<f64>()
        .map_err(|_| parse_error(path, line, format!("'{field}' is not a number")))
}

/// Values of a sequence file, in index order.
pub fn read_sequence_csv(path: &Path) -> Result<Vec<f64>> {
    let mut recs = records(path)?;
    if recs.first().is_some_and(|(_, f)| is_header(f)) {
        recs.remove(0);
    }
    let mut values = Vec::with_capacity(recs.len());
    for (line, fields) in &recs {
        let value = match fields.as_slice() {
            [v] => number(path, *line, v)?,
            [i, v] => {
                let idx = i
                    .parse::<usize>()
                    .map_err(|_| parse_error(path, *line, format!("'{i}' is not an index")))?;
                if idx != values.len() {
                    return Err(parse_error(
                        path,
                        *line,
                        format!("expected index {}, found {idx}", values.len()),
                    ));
                }
                number(path, *line, v)?
            }
            _ => {
                return Err(parse_error(
                    path,
                    *line,
                    format!("expected 1 or 2 fields, found {}", fields.len()),
                ))
            }
        };
        if !value.is_finite() || value < 0.0 {
            return Err(parse_error(path, *line, format!("value {value} is not finite and nonnegative")));
        }
        values.push(value);
    }
    if values.is_empty() {
        return Err(parse_error(path, 0, "no values"));
    }
    Ok(values)
}

/// Rows of a real square matrix.
pub fn read_matrix_csv(path: &Path) -> Result<Vec<Vec<f64>>> {
    let recs = records(path)?;
    let mut rows = Vec::with_capacity(recs.len());
    for (line, fields) in &recs {
        let row = fields
            .iter()
            .map(|f| number(path, *line, f))
            .collect::<Result<Vec<f64>>>()?;
        if let Some(v) = row.iter().find(|v| !v.is_finite()) {
            return Err(parse_error(path, *line, format!("entry {v} is not finite")));
        }
        rows.push(row);
    }
    let n = rows.len();
    if n == 0 {
        return Err(parse_error(path, 0, "empty matrix"));
    }
    if let Some((k, _)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(parse_error(
            path,
            recs[k].0,
            format!("row has {} entries, expected {n} (square matrix)", rows[k].len()),
        ));
    }
    Ok(rows)
}

/// `index,value` lines with 17 significant digits.
pub fn write_curve_csv(path: &Path, points: &[(f64, f64)]) -> Result<()> {
    let file = File::create(path).map_err(|e| io_error(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    writeln!(w, "index,value").map_err(|e| io_error(path, e))?;
    for (x, y) in points {
        writeln!(w, "{},{}", format_index(*x), format_real(*y)).map_err(|e| io_error(path, e))?;
    }
    w.flush().map_err(|e| io_error(path, e))
}

fn format_index(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format_real(x)
    }
}

/// Round-trippable real with 17 significant digits.
pub fn format_real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}
