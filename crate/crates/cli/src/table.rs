//! Tabular results and their CSV / JSON encodings.
//!
//! Each file starts with metadata (tool version, config echo, timestamp,
//! SHA-256 of the data section) followed by the data section proper. Only the
//! data section is covered by the hash, so reruns with the same config can be
//! compared byte for byte on it.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::config::{ExperimentConfig, OutputFormat};
use crate::error::{CliError, Result};

pub const TOOL: &str = "dwell";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
}

impl Cell {
    pub fn as_f64(self) -> f64 {
        match self {
            Cell::Int(v) => v as f64,
            Cell::Float(v) => v,
        }
    }

    fn write_csv(self, out: &mut String) {
        match self {
            Cell::Int(v) => write!(out, "{v}").unwrap(),
            // 17 significant digits.
            Cell::Float(v) => write!(out, "{v:.16e}").unwrap(),
        }
    }

    fn to_json(self) -> Value {
        match self {
            Cell::Int(v) => Value::from(v),
            Cell::Float(v) => serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

/// One output file: a named table plus scalar annotations (fit results,
/// run parameters) that go into the metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub annotations: Vec<(String, Value)>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            annotations: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn annotate(&mut self, key: impl Into<String>, value: impl Into<Value>) {
        self.annotations.push((key.into(), value.into()));
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[idx].as_f64()).collect())
    }

    pub fn annotation(&self, key: &str) -> Option<&Value> {
        self.annotations.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    /// Header row plus data rows, newline-terminated.
    pub fn csv_data(&self) -> String {
        let mut out = self.columns.join(",");
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

    pub fn json_rows(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(c, v)| (c.clone(), v.to_json()))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }

    /// The bytes covered by the determinism hash for `format`.
    pub fn data_section(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.csv_data(),
            OutputFormat::Json => {
                let mut s = serde_json::to_string(&json!({
                    "columns": self.columns,
                    "annotations": self.annotations_json(),
                    "rows": self.json_rows(),
                }))
                .expect("table serializes");
                s.push('\n');
                s
            }
        }
    }

    fn annotations_json(&self) -> Value {
        Value::Object(self.annotations.iter().cloned().collect())
    }

    pub fn render(&self, config: &ExperimentConfig, timestamp: &str) -> String {
        let data = self.data_section(config.format);
        let digest = sha256_hex(data.as_bytes());
        let config_json = serde_json::to_value(config).expect("config serializes");
        match config.format {
            OutputFormat::Csv => {
                let mut out = String::new();
                writeln!(out, "# tool: {TOOL} {VERSION}").unwrap();
                writeln!(out, "# experiment: {}", config.experiment).unwrap();
                writeln!(out, "# table: {}", self.name).unwrap();
                writeln!(out, "# config: {}", config_json).unwrap();
                for (k, v) in &self.annotations {
                    writeln!(out, "# {k}: {v}").unwrap();
                }
                writeln!(out, "# generated: {timestamp}").unwrap();
                writeln!(out, "# data_sha256: {digest}").unwrap();
                out.push_str(&data);
                out
            }
            OutputFormat::Json => {
                let doc = json!({
                    "meta": {
                        "tool": TOOL,
                        "version": VERSION,
                        "experiment": config.experiment.name(),
                        "table": self.name,
                        "config": config_json,
                        "generated": timestamp,
                        "data_sha256": digest,
                    },
                    "columns": self.columns,
                    "annotations": self.annotations_json(),
                    "rows": self.json_rows(),
                });
                let mut s = serde_json::to_string_pretty(&doc).expect("table serializes");
                s.push('\n');
                s
            }
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Data section of a rendered CSV file: everything after the `#` header.
pub fn strip_csv_metadata(text: &str) -> String {
    text.lines()
        .skip_while(|l| l.starts_with('#'))
        .flat_map(|l| [l, "\n"])
        .collect()
}

/// Writes one file per table into `config.out`, returning the paths.
pub fn write_tables(tables: &[Table], config: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let dir: &Path = &config.out;
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let timestamp = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true);
    let mut paths = Vec::with_capacity(tables.len());
    for table in tables {
        let path = dir.join(format!("{}.{}", table.name, config.format.extension()));
        std::fs::write(&path, table.render(config, &timestamp)).map_err(|e| CliError::io(&path, e))?;
        paths.push(path);
    }
    Ok(paths)
}
