//! Number formatting shared by every writer in the crate.
//!
//! JSON output carries 17 significant digits so that every `f64` survives a
//! round trip; TSV output is rounded to 12 significant digits for reading.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::{Number, Value};
use std::str::FromStr;

use crate::error::{Error, Result};

/// A JSON number with exactly 17 significant digits, or `null` when `x` is
/// not finite.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let text = format!("{:.16e}", x);
    Value::Number(Number::from_str(&text).expect("scientific notation is valid JSON"))
}

pub fn complex(z: Complex64) -> Value {
    Value::Array(vec![num(z.re), num(z.im)])
}

/// Row-major nested `[[[re, im], ...], ...]`.
pub fn matrix_rows(m: &DMatrix<Complex64>) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| complex(m[(i, j)])).collect()))
            .collect(),
    )
}

/// Column-major nested `[[[re, im], ...], ...]`: one inner array per column.
pub fn matrix_columns(m: &DMatrix<Complex64>) -> Value {
    Value::Array(
        (0..m.ncols())
            .map(|j| Value::Array((0..m.nrows()).map(|i| complex(m[(i, j)])).collect()))
            .collect(),
    )
}

/// Value rounded to 12 significant digits, printed in its shortest form.
/// Magnitudes outside [1e-4, 1e6) use scientific notation.
pub fn tsv_num(x: f64) -> String {
    if !x.is_finite() {
        return "NaN".to_string();
    }
    let rounded: f64 = format!("{:.11e}", x)
        .parse()
        .expect("round trip of formatted f64");
    let a = rounded.abs();
    if a != 0.0 && !(1e-4..1e6).contains(&a) {
        format!("{:e}", rounded)
    } else {
        format!("{}", rounded)
    }
}

pub fn to_pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializing a Value cannot fail");
    s.push('\n');
    s
}

pub(crate) fn parse_complex(v: &Value) -> Result<Complex64> {
    let pair = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| Error::Parse(format!("expected [re, im], found {}", v)))?;
    let part = |x: &Value| {
        x.as_f64()
            .ok_or_else(|| Error::Parse(format!("expected a number, found {}", x)))
    };
    Ok(Complex64::new(part(&pair[0])?, part(&pair[1])?))
}

/// Parses a row-major `[[[re, im], ...], ...]` block into `(rows, cols, entries)`.
pub(crate) fn parse_matrix_rows(v: &Value) -> Result<(usize, usize, Vec<Complex64>)> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::Parse("\"matrix\" must be an array of rows".into()))?;
    let nrows = rows.len();
    let mut ncols = None;
    let mut entries = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| Error::Parse(format!("row {} is not an array", i)))?;
        match ncols {
            None => ncols = Some(row.len()),
            Some(c) if c != row.len() => {
                return Err(Error::Parse(format!(
                    "row {} has {} entries, expected {}",
                    i,
                    row.len(),
                    c
                )))
            }
            _ => {}
        }
        for z in row {
            entries.push(parse_complex(z)?);
        }
    }
    Ok((nrows, ncols.unwrap_or(0), entries))
}

pub(crate) fn parse_json(text: &str) -> Result<Value> {
    // serde_json's message already ends with "at line L column C".
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}
