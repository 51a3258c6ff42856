//! Table and report rendering.
//!
//! Floats are written with 17 significant digits so that every value
//! round-trips bit for bit; lines end in `\n` regardless of platform.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use nocollapse_core::Amplitude;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::Int(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

impl Cell {
    fn write_csv(&self, out: &mut String) {
        match self {
            Cell::Int(i) => write!(out, "{i}").unwrap(),
            Cell::Float(x) => out.push_str(&format_float(*x)),
            Cell::Text(s) => out.push_str(s),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(i) => json!(i),
            Cell::Float(x) => json!(x),
            Cell::Text(s) => json!(s),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format, config: &Value) -> String {
        match format {
            Format::Csv => {
                let mut out = String::with_capacity(64 * (self.rows.len() + 3));
                write!(out, "# nocollapse {VERSION}\n# config: {config}\n").unwrap();
                out.push_str(&self.columns.join(","));
                out.push('\n');
                for row in &self.rows {
                    for (i, cell) in row.iter().enumerate() {
                        if i > 0 {
                            out.push(',');
                        }
                        cell.write_csv(&mut out);
                    }
                    out.push('\n');
                }
                out
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| Value::Array(r.iter().map(Cell::to_json).collect()))
                    .collect();
                let mut doc = header(config);
                doc.insert("columns".into(), json!(self.columns));
                doc.insert("rows".into(), Value::Array(rows));
                render_json(doc)
            }
        }
    }
}

fn header(config: &Value) -> Map<String, Value> {
    let mut doc = Map::new();
    doc.insert("nocollapse".into(), json!(VERSION));
    doc.insert("config".into(), config.clone());
    doc
}

fn render_json(doc: Map<String, Value>) -> String {
    let mut s = serde_json::to_string_pretty(&Value::Object(doc)).expect("json values always serialize");
    s.push('\n');
    s
}

/// A JSON report: version and config first, then the payload's own fields.
pub fn report(config: &Value, payload: Value) -> String {
    let mut doc = header(config);
    match payload {
        Value::Object(fields) => doc.extend(fields),
        other => {
            doc.insert("result".into(), other);
        }
    }
    render_json(doc)
}

pub fn complex(a: Amplitude) -> Value {
    json!([a.re, a.im])
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        write!(s, "{b:02x}").unwrap();
        s
    })
}

/// One output file, fully rendered before anything touches the disk.
#[derive(Clone, Debug)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

impl Artifact {
    pub fn new(name: impl Into<String>, contents: String) -> Self {
        Artifact {
            name: name.into(),
            contents,
        }
    }
}

pub fn write_artifacts(dir: &Path, artifacts: &[Artifact]) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    artifacts
        .iter()
        .map(|a| {
            let path = dir.join(&a.name);
            fs::write(&path, a.contents.as_bytes()).map_err(|e| CliError::io(&path, e))?;
            Ok(path)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(format_float(0.3), "2.9999999999999999e-1");
        assert_eq!(format_float(1.0), "1.0000000000000000e0");
        assert_eq!(format_float(f64::NEG_INFINITY), "-inf");
        for x in [0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, f64::MIN_POSITIVE] {
            assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["n", "x", "tag"]);
        t.push(vec![Cell::from(3u64), Cell::from(0.5), Cell::from("a")]);
        let s = t.render(Format::Csv, &json!({"k": 1}));
        assert_eq!(
            s,
            format!("# nocollapse {VERSION}\n# config: {{\"k\":1}}\nn,x,tag\n3,5.0000000000000000e-1,a\n")
        );
    }

    #[test]
    fn json_layout() {
        let mut t = Table::new(&["n", "x"]);
        t.push(vec![Cell::from(1u64), Cell::from(f64::NEG_INFINITY)]);
        let v: Value = serde_json::from_str(&t.render(Format::Json, &json!({}))).unwrap();
        assert_eq!(v["columns"], json!(["n", "x"]));
        assert_eq!(v["rows"], json!([[1, null]]));
        assert_eq!(v["nocollapse"], json!(VERSION));
    }

    #[test]
    fn checksum() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
