//! Tidy CSV tables and their plain-text rendering.
//!
//! Every CSV starts with a `# config-hash: <hex>` comment line, then a
//! header row. Text renderings start with the same hash line.

use crate::csvio::format_value;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Table {
        Table { columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.columns.len(), "row width does not match the header");
        self.rows.push(row);
    }

    pub fn to_csv(&self, hash: &str) -> String {
        let mut out = format!("# config-hash: {hash}\n");
        out.push_str(&csv_line(&self.columns));
        for r in &self.rows {
            out.push_str(&csv_line(r));
        }
        out
    }

    /// Left-aligned columns separated by two spaces.
    pub fn to_text(&self, title: &str, hash: &str) -> String {
        let widths: Vec<usize> = (0..self.columns.len())
            .map(|c| {
                self.rows
                    .iter()
                    .map(|r| r[c].chars().count())
                    .chain([self.columns[c].chars().count()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |cells: &[String]| {
            let mut s = cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect::<Vec<_>>()
                .join("  ");
            s.truncate(s.trim_end().len());
            s.push('\n');
            s
        };
        let mut out = format!("# config-hash: {hash}\n{title}\n\n");
        out.push_str(&line(&self.columns));
        out.push_str(&line(&widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>()));
        for r in &self.rows {
            out.push_str(&line(r));
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_line(cells: &[String]) -> String {
    let mut s = cells.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(",");
    s.push('\n');
    s
}

/// Full-precision number for CSV cells; empty when missing.
pub fn num(v: impl Into<Option<f64>>) -> String {
    format_value(v.into())
}

/// Fixed-precision number for text tables.
pub fn fixed(v: f64, places: usize) -> String {
    format!("{v:.places$}")
}
