use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

/// One cell of a result row.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i128),
    Text(String),
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Cell::Float(v) => s.serialize_f64(*v),
            Cell::Int(v) => s.serialize_i128(*v),
            Cell::Text(v) => s.serialize_str(v),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

macro_rules! int_cell {
    ($($t:ty),*) => {$(
        impl From<$t> for Cell {
            fn from(v: $t) -> Self {
                Cell::Int(v as i128)
            }
        }
    )*};
}
int_cell!(u32, u64, usize, i64);

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Int(i128::from(v))
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// Ordered record; serialized as a JSON object with columns in insertion order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Record(Vec<(String, Cell)>);

impl Record {
    pub fn new() -> Self {
        Record(Vec::new())
    }

    pub fn with(mut self, name: &str, value: impl Into<Cell>) -> Self {
        self.0.push((name.to_string(), value.into()));
        self
    }

    pub fn push(&mut self, name: &str, value: impl Into<Cell>) {
        self.0.push((name.to_string(), value.into()));
    }
}

impl Serialize for Record {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub results: Vec<Record>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub summary: BTreeMap<String, f64>,
    pub seed: u64,
    pub timestamp: String,
    pub version: String,
}

impl ExperimentReport {
    pub fn new(command: &str, seed: u64) -> Self {
        ExperimentReport {
            command: command.to_string(),
            parameters: BTreeMap::new(),
            results: Vec::new(),
            summary: BTreeMap::new(),
            seed,
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn param(&mut self, name: &str, value: impl ToString) {
        self.parameters.insert(name.to_string(), value.to_string());
    }

    /// Name of the first non-finite numeric cell, if any.
    pub fn non_finite(&self) -> Option<String> {
        let cells = self.results.iter().flat_map(|r| r.0.iter());
        let summary = self.summary.iter().map(|(k, v)| (k, *v));
        cells
            .filter_map(|(k, c)| match c {
                Cell::Float(v) => Some((k, *v)),
                _ => None,
            })
            .chain(summary)
            .find(|(_, v)| !v.is_finite())
            .map(|(k, _)| k.clone())
    }

    fn columns(&self) -> Vec<&str> {
        let mut cols: Vec<&str> = Vec::new();
        for r in &self.results {
            for (k, _) in &r.0 {
                if !cols.contains(&k.as_str()) {
                    cols.push(k);
                }
            }
        }
        cols
    }

    fn rows(&self) -> (Vec<&str>, Vec<Vec<String>>) {
        let cols = self.columns();
        let rows = self
            .results
            .iter()
            .map(|r| {
                cols.iter()
                    .map(|c| {
                        r.0.iter()
                            .find(|(k, _)| k == c)
                            .map(|(_, v)| format_cell(v))
                            .unwrap_or_default()
                    })
                    .collect()
            })
            .collect();
        (cols, rows)
    }

    /// Header line plus one line per record. No timestamp, so identical runs
    /// give identical bytes.
    pub fn to_csv(&self) -> String {
        let (cols, rows) = self.rows();
        let mut out = cols
            .iter()
            .map(|c| csv_field(c))
            .collect::<Vec<_>>()
            .join(",");
        out.push('\n');
        for row in rows {
            out.push_str(
                &row.iter()
                    .map(|c| csv_field(c))
                    .collect::<Vec<_>>()
                    .join(","),
            );
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_table(&self) -> String {
        let (cols, rows) = self.rows();
        let widths: Vec<usize> = cols
            .iter()
            .enumerate()
            .map(|(i, c)| {
                rows.iter()
                    .map(|r| r[i].len())
                    .chain([c.len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let mut out = String::new();
        let line = |cells: Vec<&str>, out: &mut String| {
            let parts: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:>w$}"))
                .collect();
            out.push_str(parts.join("  ").trim_end());
            out.push('\n');
        };
        line(cols.clone(), &mut out);
        line(
            widths
                .iter()
                .map(|w| &"----------------------------------------"[..(*w).min(40)])
                .collect(),
            &mut out,
        );
        for r in &rows {
            line(r.iter().map(String::as_str).collect(), &mut out);
        }
        for (k, v) in &self.summary {
            let _ = writeln!(out, "{k}: {}", format_float(*v));
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

fn format_cell(c: &Cell) -> String {
    match c {
        Cell::Float(v) => format_float(*v),
        Cell::Int(v) => v.to_string(),
        Cell::Text(v) => v.clone(),
    }
}

/// Plain decimal with 15 significant digits.
pub fn format_float(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return format!("{:.14}", 0.0);
    }
    let exponent = v.abs().log10().floor() as i32;
    let decimals = (14 - exponent).clamp(0, 340) as usize;
    format!("{v:.decimals$}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_keep_fifteen_digits() {
        assert_eq!(format_float(0.625), "0.625000000000000");
        assert_eq!(format_float(880.0 / 1820.0), "0.483516483516484");
        assert_eq!(format_float(1234.5), "1234.50000000000");
        assert_eq!(format_float(0.0), "0.00000000000000");
        assert_eq!(format_float(-2.5e-3), "-0.00250000000000000");
    }

    #[test]
    fn csv_and_json_layouts() {
        let mut r = ExperimentReport::new("demo", 7);
        r.param("n", 16);
        r.results.push(
            Record::new()
                .with("n", 16usize)
                .with("p", 0.5)
                .with("tag", "a,b"),
        );
        assert_eq!(r.to_csv(), "n,p,tag\n16,0.500000000000000,\"a,b\"\n");
        let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(json["seed"], 7);
        assert_eq!(json["results"][0]["n"], 16);
        assert!(json["timestamp"].as_str().unwrap().ends_with('Z'));
        assert!(r.non_finite().is_none());
        r.results.push(Record::new().with("p", f64::NAN));
        assert_eq!(r.non_finite().as_deref(), Some("p"));
    }
}
