//! The `period,value` series format.
//!
//! Header exactly `period,value`; periods `YYYY` or `YYYYQn`, consecutive and
//! of one frequency; a missing value is an empty field. Values are written in
//! shortest round-trip form, so a write/read cycle is lossless.

use std::path::Path;

use laborcast_core::{Period, Series};

use crate::error::{AppError, Result};

pub const HEADER: &str = "period,value";

/// Parses series text. `origin` names the source in error messages.
pub fn parse_series(text: &str, id: &str, origin: &str) -> Result<Series> {
    let err = |line: usize, msg: String| AppError::data(format!("{origin}:{line}: {msg}"));
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)));
    match lines.next() {
        Some((_, HEADER)) => {}
        Some((n, other)) => return Err(err(n, format!("expected header `{HEADER}`, found `{other}`"))),
        None => return Err(AppError::data(format!("{origin}: empty file"))),
    }
    let mut start: Option<Period> = None;
    let mut last: Option<Period> = None;
    let mut values = Vec::new();
    for (n, line) in lines {
        if line.is_empty() {
            continue;
        }
        let (p, v) = line.split_once(',').ok_or_else(|| err(n, format!("expected two fields, found `{line}`")))?;
        if v.contains(',') {
            return Err(err(n, format!("expected two fields, found `{line}`")));
        }
        let period: Period = p.trim().parse().map_err(|e| err(n, format!("{e}")))?;
        if let Some(prev) = last {
            if period.frequency() != prev.frequency() {
                return Err(err(n, format!("period {period} has a different frequency from {prev}")));
            }
            if period <= prev {
                return Err(err(n, format!("period {period} is duplicated or out of order after {prev}")));
            }
            if period != prev.offset(1) {
                return Err(err(n, format!("period {period} skips ahead of {prev}; encode missing values as empty fields")));
            }
        }
        let v = v.trim();
        let value = if v.is_empty() {
            None
        } else {
            let x: f64 = v.parse().map_err(|_| err(n, format!("cannot parse value `{v}`")))?;
            if !x.is_finite() {
                return Err(err(n, format!("value `{v}` is not finite")));
            }
            Some(x)
        };
        start.get_or_insert(period);
        last = Some(period);
        values.push(value);
    }
    let start = start.ok_or_else(|| AppError::data(format!("{origin}: no data rows")))?;
    if values.iter().all(Option::is_none) {
        return Err(AppError::data(format!("{origin}: every value is missing")));
    }
    Series::new(id, start, values, "").map_err(|e| AppError::from(e).context(origin))
}

pub fn read_series(path: &Path, id: &str) -> Result<Series> {
    let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    parse_series(&text, id, &path.display().to_string())
}

pub fn format_value(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

pub fn write_series(s: &Series) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    for (p, v) in s.iter() {
        out.push_str(&format!("{p},{}\n", format_value(v)));
    }
    out
}
