//! Text file formats.
//!
//! * Tuning curves: CSV with header `t_s,r_frac` preceded by `# key=value`
//!   metadata lines for `v_amp_V`, `t_set_C`, `f_hz` and `junction`.
//! * IV traces: CSV with header `v_V,i_A`.
//! * Breakdown points: CSV with header `t_C,v_bd_V`.
//! * Matrices: bare comma-separated rows.
//! * Grids, records and reports: JSON with unit-suffixed keys.
//!
//! Lines starting with `#` are comments wherever metadata is not expected.
//! Numbers are written in their shortest round-trip form.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::constants::{celsius_to_kelvin, kelvin_to_celsius};
use crate::curve_fitting::{RunConditions, Sample, TuningCurve};
use crate::error::{Error, Result};
use crate::junction_iv::{IvPoint, IvTrace};
use crate::phase_diagram::TuningRecord;

pub const TUNING_HEADER: &str = "t_s,r_frac";
pub const IV_HEADER: &str = "v_V,i_A";
pub const BREAKDOWN_HEADER: &str = "t_C,v_bd_V";

/// Shortest string that parses back to exactly `x`; scientific notation
/// outside `[1e-4, 1e15)`.
pub fn fmt_num(x: f64) -> String {
    let m = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&m) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn parse_num(field: &str, line: usize) -> Result<f64> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::Format(format!("line {line}: cannot parse {:?} as a number", field.trim())))
}

/// Data rows after the expected header, with 1-based line numbers.
/// `#` lines before the header are handed to `on_comment`.
fn data_rows<'a>(
    text: &'a str,
    header: &str,
    mut on_comment: impl FnMut(&'a str, usize) -> Result<()>,
) -> Result<Vec<(usize, Vec<&'a str>)>> {
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l.trim()));
    let mut saw_header = false;
    for (n, line) in lines.by_ref() {
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            on_comment(rest.trim(), n)?;
            continue;
        }
        if line.replace(' ', "") != header {
            return Err(Error::Format(format!("line {n}: expected header {header:?}, found {line:?}")));
        }
        saw_header = true;
        break;
    }
    if !saw_header {
        return Err(Error::Format(format!("missing header {header:?}")));
    }
    let width = header.split(',').count();
    let mut rows = Vec::new();
    for (n, line) in lines {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != width {
            return Err(Error::Format(format!(
                "line {n}: expected {width} fields, found {}",
                fields.len()
            )));
        }
        rows.push((n, fields));
    }
    Ok(rows)
}

/// Parses a tuning-curve CSV. The three condition keys are required; a
/// missing `junction` defaults to `"unnamed"`.
pub fn parse_tuning_csv(text: &str) -> Result<TuningCurve> {
    let mut v_amp = None;
    let mut t_set_c = None;
    let mut f_hz = None;
    let mut junction = None;
    let rows = data_rows(text, TUNING_HEADER, |meta, n| {
        let Some((key, value)) = meta.split_once('=') else {
            return Ok(());
        };
        match key.trim() {
            "v_amp_V" => v_amp = Some(parse_num(value, n)?),
            "t_set_C" => t_set_c = Some(parse_num(value, n)?),
            "f_hz" => f_hz = Some(parse_num(value, n)?),
            "junction" => junction = Some(value.trim().to_string()),
            _ => {}
        }
        Ok(())
    })?;
    let missing = |k: &str| Error::Format(format!("missing metadata line `# {k}=`"));
    let conditions = RunConditions {
        v_amp: v_amp.ok_or_else(|| missing("v_amp_V"))?,
        t_set: celsius_to_kelvin(t_set_c.ok_or_else(|| missing("t_set_C"))?),
        f_drive: f_hz.ok_or_else(|| missing("f_hz"))?,
    };
    let samples = rows
        .iter()
        .map(|(n, f)| {
            Ok(Sample {
                t: parse_num(f[0], *n)?,
                r: parse_num(f[1], *n)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    TuningCurve::new(samples, conditions, junction.unwrap_or_else(|| "unnamed".into()))
}

pub fn format_tuning_csv(curve: &TuningCurve) -> String {
    let c = &curve.conditions;
    let mut out = String::new();
    writeln!(out, "# v_amp_V={}", fmt_num(c.v_amp)).unwrap();
    writeln!(out, "# t_set_C={}", fmt_num(kelvin_to_celsius(c.t_set))).unwrap();
    writeln!(out, "# f_hz={}", fmt_num(c.f_drive)).unwrap();
    writeln!(out, "# junction={}", curve.junction_id).unwrap();
    writeln!(out, "{TUNING_HEADER}").unwrap();
    for s in curve.samples() {
        writeln!(out, "{},{}", fmt_num(s.t), fmt_num(s.r)).unwrap();
    }
    out
}

pub fn parse_iv_csv(text: &str) -> Result<IvTrace> {
    let rows = data_rows(text, IV_HEADER, |_, _| Ok(()))?;
    let points = rows
        .iter()
        .map(|(n, f)| {
            Ok(IvPoint {
                v: parse_num(f[0], *n)?,
                i: parse_num(f[1], *n)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    IvTrace::new(points)
}

pub fn format_iv_csv(trace: &IvTrace) -> String {
    let mut out = format!("{IV_HEADER}\n");
    for p in trace.points() {
        writeln!(out, "{},{}", fmt_num(p.v), fmt_num(p.i)).unwrap();
    }
    out
}

/// Breakdown points as `(T in kelvin, V_BD)` pairs.
pub fn parse_breakdown_csv(text: &str) -> Result<Vec<(f64, f64)>> {
    data_rows(text, BREAKDOWN_HEADER, |_, _| Ok(()))?
        .iter()
        .map(|(n, f)| Ok((celsius_to_kelvin(parse_num(f[0], *n)?), parse_num(f[1], *n)?)))
        .collect()
}

pub fn format_breakdown_csv(points: &[(f64, f64)]) -> String {
    let mut out = format!("{BREAKDOWN_HEADER}\n");
    for (t, v) in points {
        writeln!(out, "{},{}", fmt_num(kelvin_to_celsius(*t)), fmt_num(*v)).unwrap();
    }
    out
}

pub fn parse_matrix_csv(text: &str) -> Result<DMatrix<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(',')
            .map(|f| parse_num(f, k + 1))
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Format(format!(
                    "line {}: {} columns, expected {}",
                    k + 1,
                    row.len(),
                    first.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Format("matrix file has no rows".into()));
    }
    let ncols = rows[0].len();
    Ok(DMatrix::from_row_iterator(rows.len(), ncols, rows.into_iter().flatten()))
}

pub fn format_matrix_csv(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for row in m.row_iter() {
        let fields: Vec<String> = row.iter().map(|x| fmt_num(*x)).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn parse_records_json(text: &str) -> Result<Vec<TuningRecord>> {
    Ok(serde_json::from_str(text)?)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })
}

pub fn read_tuning_csv(path: impl AsRef<Path>) -> Result<TuningCurve> {
    let path = path.as_ref();
    parse_tuning_csv(&read(path)?).map_err(|e| annotate(path, e))
}

pub fn read_iv_csv(path: impl AsRef<Path>) -> Result<IvTrace> {
    let path = path.as_ref();
    parse_iv_csv(&read(path)?).map_err(|e| annotate(path, e))
}

pub fn read_matrix_csv(path: impl AsRef<Path>) -> Result<DMatrix<f64>> {
    let path = path.as_ref();
    parse_matrix_csv(&read(path)?).map_err(|e| annotate(path, e))
}

pub fn read_breakdown_csv(path: impl AsRef<Path>) -> Result<Vec<(f64, f64)>> {
    let path = path.as_ref();
    parse_breakdown_csv(&read(path)?).map_err(|e| annotate(path, e))
}

pub fn read_text(path: impl AsRef<Path>) -> Result<String> {
    read(path.as_ref())
}

fn annotate(path: &Path, e: Error) -> Error {
    match e {
        Error::Format(m) => Error::Format(format!("{}: {m}", path.display())),
        other => other,
    }
}
