//! Series and prediction CSV files.
//!
//! Input accepts `value` or `time,value` lines, `#` comments, blank lines,
//! an optional `time,value` header and LF or CRLF endings.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::fmt_full;
use crate::series::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GapPolicy {
    #[default]
    Error,
    LinearInterpolate,
}

impl std::str::FromStr for GapPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "error" => Ok(GapPolicy::Error),
            "linear-interpolate" => Ok(GapPolicy::LinearInterpolate),
            other => Err(Error::invalid("gap_policy", format!("unknown policy '{other}'"))),
        }
    }
}

/// A series file and how to treat missing observations in it.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesFile {
    pub path: PathBuf,
    pub missing_sentinel: Option<f64>,
    pub gap_policy: GapPolicy,
}

impl SeriesFile {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        Self {
            path: path.into(),
            missing_sentinel: None,
            gap_policy: GapPolicy::Error,
        }
    }
}

pub fn load_series_csv(file: &SeriesFile) -> Result<TimeSeries> {
    let text = fs::read_to_string(&file.path).map_err(|e| Error::io(&file.path, e))?;
    parse_series_csv(&text, file.missing_sentinel, file.gap_policy)
}

fn is_header(fields: &[&str]) -> bool {
    let lower: Vec<String> = fields.iter().map(|f| f.to_ascii_lowercase()).collect();
    matches!(lower.as_slice(), [v] if v == "value")
        || matches!(lower.as_slice(), [t, v] if t == "time" && v == "value")
}

fn parse_number<T: std::str::FromStr>(field: &str, line: usize, what: &str) -> Result<T> {
    field.parse().map_err(|_| Error::Parse {
        line,
        message: format!("invalid {what} '{field}'"),
    })
}

pub fn parse_series_csv(text: &str, sentinel: Option<f64>, policy: GapPolicy) -> Result<TimeSeries> {
    // (line number, time, value or None when missing)
    let mut rows: Vec<(usize, Option<i64>, Option<f64>)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if rows.is_empty() && is_header(&fields) {
            continue;
        }
        let (time, value_field) = match fields.as_slice() {
            [v] => (None, *v),
            [t, v] => (Some(parse_number::<i64>(t, line_no, "time")?), *v),
            _ => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected 1 or 2 fields, found {}", fields.len()),
                })
            }
        };
        let value: f64 = parse_number(value_field, line_no, "value")?;
        if !value.is_finite() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("non-finite value '{value_field}'"),
            });
        }
        let value = match sentinel {
            Some(s) if value == s => {
                if policy == GapPolicy::Error {
                    return Err(Error::Gap { line: line_no });
                }
                None
            }
            _ => Some(value),
        };
        if let Some(&(prev_line, prev_time, _)) = rows.last() {
            if prev_time.is_some() != time.is_some() {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("time column present on line {prev_line} but not here, or vice versa"),
                });
            }
        }
        rows.push((line_no, time, value));
    }
    if rows.is_empty() {
        return Err(Error::EmptyFile);
    }

    let (start, step) = match (rows[0].1, rows.get(1).and_then(|r| r.1)) {
        (Some(t0), Some(t1)) => {
            let step = t1 - t0;
            if step <= 0 {
                return Err(Error::Parse {
                    line: rows[1].0,
                    message: "time must increase".into(),
                });
            }
            for w in rows.windows(2) {
                if w[1].1.unwrap_or_default() - w[0].1.unwrap_or_default() != step {
                    return Err(Error::Parse {
                        line: w[1].0,
                        message: format!("non-uniform time step (expected {step})"),
                    });
                }
            }
            (t0, step)
        }
        (Some(t0), None) => (t0, 1),
        _ => (0, 1),
    };

    let values = fill_gaps(&rows)?;
    TimeSeries::with_time(values, start, step)
}

/// Linear interpolation between the nearest known neighbors; leading and
/// trailing gaps copy the nearest known value.
fn fill_gaps(rows: &[(usize, Option<i64>, Option<f64>)]) -> Result<Vec<f64>> {
    let known: Vec<(usize, f64)> = rows
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.2.map(|v| (i, v)))
        .collect();
    if known.is_empty() {
        return Err(Error::Gap { line: rows[0].0 });
    }
    let mut out = Vec::with_capacity(rows.len());
    let mut next = 0;
    for i in 0..rows.len() {
        while next < known.len() && known[next].0 < i {
            next += 1;
        }
        let value = match (next.checked_sub(1).map(|p| known[p]), known.get(next)) {
            (_, Some(&(j, v))) if j == i => v,
            (Some((a, va)), Some(&(b, vb))) => va + (vb - va) * (i - a) as f64 / (b - a) as f64,
            (Some((_, va)), None) => va,
            (None, Some(&(_, vb))) => vb,
            (None, None) => unreachable!("known is non-empty"),
        };
        out.push(value);
    }
    Ok(out)
}

pub fn format_series_csv(series: &TimeSeries) -> String {
    let mut out = String::from("time,value\n");
    for (i, v) in series.values().iter().enumerate() {
        let _ = writeln!(out, "{},{}", series.time_at(i), fmt_full(*v));
    }
    out
}

pub fn write_series_csv(series: &TimeSeries, path: &Path) -> Result<()> {
    fs::write(path, format_series_csv(series)).map_err(|e| Error::io(path, e))
}

/// One row of a forecast file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictionRow {
    pub time: i64,
    pub observed: f64,
    pub predicted: f64,
}

pub fn format_predictions_csv(rows: &[PredictionRow]) -> String {
    let mut out = String::from("time,observed,predicted\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{}", r.time, fmt_full(r.observed), fmt_full(r.predicted));
    }
    out
}

pub fn parse_predictions_csv(text: &str) -> Result<Vec<PredictionRow>> {
    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.eq_ignore_ascii_case("time,observed,predicted") {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let [t, o, p] = fields.as_slice() else {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 3 fields, found {}", fields.len()),
            });
        };
        rows.push(PredictionRow {
            time: parse_number(t, line_no, "time")?,
            observed: parse_number(o, line_no, "observed value")?,
            predicted: parse_number(p, line_no, "predicted value")?,
        });
    }
    if rows.is_empty() {
        return Err(Error::EmptyFile);
    }
    Ok(rows)
}
