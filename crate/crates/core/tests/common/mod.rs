#![allow(dead_code)]

use laborcast_core::{Period, Series};

/// Reads a `period,value` fixture.
pub fn fixture(name: &str) -> Series {
    let path = format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    let mut rows = text.lines().skip(1).map(|l| {
        let (p, v) = l.split_once(',').expect("two fields");
        (p.parse::<Period>().expect("period"), v.parse::<f64>().expect("value"))
    });
    let (start, first) = rows.next().expect("non-empty");
    let mut values = vec![first];
    values.extend(rows.map(|(_, v)| v));
    Series::from_values(name.trim_end_matches(".csv"), start, &values).unwrap()
}

pub fn values(s: &Series) -> Vec<f64> {
    s.values().iter().map(|v| v.unwrap()).collect()
}

pub fn assert_close(got: f64, want: f64, tol: f64, what: &str) {
    assert!((got - want).abs() <= tol, "{what}: got {got}, want {want}");
}
