//! Report rendering.
//!
//! Every output carries the resolved run configuration: as the `config`
//! member of JSON documents, as `#` comment lines on top of CSV files and as
//! an HTML comment above Markdown tables. CSV floats are written with 17
//! significant digits; JSON floats use the shortest representation that
//! parses back to the same value.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Md,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(usize),
    Real(f64),
    Text(String),
    Missing,
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Real)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Int(v as usize)
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) if v.is_finite() => format!("{v:.16e}"),
            Cell::Real(v) if v.is_nan() => "nan".into(),
            Cell::Real(v) => if *v > 0.0 { "inf" } else { "-inf" }.into(),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }

    fn markdown(&self) -> String {
        match self {
            Cell::Real(v) if v.is_finite() => format_short(*v),
            Cell::Missing => "n/a".into(),
            other => other.csv(),
        }
    }
}

/// Four decimals for moderate values, scientific notation otherwise.
fn format_short(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if (1e-3..1e6).contains(&v.abs()) {
        format!("{v:.4}")
    } else {
        format!("{v:.3e}")
    }
}

/// A rectangular table.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn with_columns(columns: Vec<String>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// CSV text with the provenance lines on top.
    pub fn to_csv(&self, provenance: &Value) -> String {
        let mut out = provenance_lines(provenance);
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_markdown(&self, provenance: &Value) -> String {
        let mut out = format!("<!-- {} -->\n\n", compact(provenance));
        out.push_str(&format!("| {} |\n", self.columns.join(" | ")));
        out.push_str(&format!("|{}\n", " ---: |".repeat(self.columns.len())));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::markdown).collect();
            out.push_str(&format!("| {} |\n", cells.join(" | ")));
        }
        out
    }
}

fn compact(v: &Value) -> String {
    serde_json::to_string(v).expect("JSON values always serialize")
}

fn provenance_lines(provenance: &Value) -> String {
    let mut out = String::new();
    if let Some(obj) = provenance.as_object() {
        for (k, v) in obj {
            out.push_str(&format!("# {k}: {}\n", compact(v)));
        }
    }
    out
}

/// A command's result: the JSON payload and its tabular view.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub config: Value,
    pub body: Map<String, Value>,
    /// Extra provenance lines for the tabular formats.
    pub notes: Map<String, Value>,
    pub table: Table,
}

impl Report {
    pub fn new(command: &'static str, config: Value) -> Self {
        Self {
            command,
            config,
            body: Map::new(),
            notes: Map::new(),
            table: Table::default(),
        }
    }

    pub fn provenance(&self) -> Value {
        provenance(self.command, &self.config)
    }

    fn annotated(&self) -> Value {
        let mut p = self.provenance();
        if let Value::Object(m) = &mut p {
            m.extend(self.notes.clone());
        }
        p
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut doc = match self.provenance() {
                    Value::Object(m) => m,
                    _ => unreachable!("provenance is an object"),
                };
                doc.extend(self.body.clone());
                let mut s = serde_json::to_string_pretty(&Value::Object(doc))
                    .expect("JSON values always serialize");
                s.push('\n');
                s
            }
            Format::Csv => self.table.to_csv(&self.annotated()),
            Format::Md => self.table.to_markdown(&self.annotated()),
        }
    }
}

pub fn provenance(command: &str, config: &Value) -> Value {
    json!({
        "tool": "autossa",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": config,
    })
}

/// Writes to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&PathBuf>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => write_file(p, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Usage(format!("cannot write to stdout: {e}")))
        }
    }
}

pub fn write_file(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text)
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}
