//! Report documents and their JSON / CSV / line renderings.
//!
//! Numbers are rounded to 15 significant digits before rendering, keys keep
//! insertion order, and files are written to a temporary sibling and then
//! renamed into place, so a failed run never leaves a partial file.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde_json::{Map, Value};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    /// First table column, one value per line.
    Lines,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "lines" => Ok(Format::Lines),
            other => Err(Error::InvalidArgument(format!("unknown format '{other}'"))),
        }
    }
}

impl Format {
    pub fn as_str(&self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Lines => "lines",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    /// Appends a row given as `(column, value)` pairs; unnamed columns stay empty.
    pub fn push(&mut self, cells: Vec<(&str, Value)>) {
        let mut row = vec![Value::Null; self.columns.len()];
        for (name, v) in cells {
            let i = self
                .columns
                .iter()
                .position(|c| c == name)
                .unwrap_or_else(|| panic!("unknown column '{name}'"));
            row[i] = v;
        }
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub version: String,
    /// Fully resolved run configuration.
    pub config: BTreeMap<String, String>,
    pub duration_seconds: Option<f64>,
    pub body: Map<String, Value>,
    pub table: Table,
}

impl Report {
    pub fn new(command: &str, config: BTreeMap<String, String>) -> Self {
        Self {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            duration_seconds: None,
            body: Map::new(),
            table: Table::default(),
        }
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.body.insert(key.to_string(), value.into());
        self
    }

    /// The JSON document, numbers already rounded.
    pub fn to_json(&self) -> Value {
        let mut doc = Map::new();
        doc.insert("command".into(), self.command.clone().into());
        doc.insert("version".into(), self.version.clone().into());
        doc.insert(
            "config".into(),
            Value::Object(self.config.iter().map(|(k, v)| (k.clone(), Value::from(v.clone()))).collect()),
        );
        doc.insert("duration_seconds".into(), self.duration_seconds.map_or(Value::Null, num));
        for (k, v) in &self.body {
            doc.insert(k.clone(), v.clone());
        }
        round_value(Value::Object(doc))
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Csv => self.render_csv(),
            Format::Lines => {
                let mut s = String::new();
                for row in &self.table.rows {
                    s.push_str(&cell(&row[0]));
                    s.push('\n');
                }
                s
            }
        }
    }

    fn render_csv(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("# command={}\n", self.command));
        s.push_str(&format!("# version={}\n", self.version));
        for (k, v) in &self.config {
            s.push_str(&format!("# config.{k}={v}\n"));
        }
        if let Some(d) = self.duration_seconds {
            s.push_str(&format!("# duration_seconds={}\n", cell(&num(d))));
        }
        s.push_str(&self.table.columns.iter().map(|c| quote(c)).collect::<Vec<_>>().join(","));
        s.push('\n');
        for row in &self.table.rows {
            s.push_str(&row.iter().map(|v| quote(&cell(&round_value(v.clone())))).collect::<Vec<_>>().join(","));
            s.push('\n');
        }
        s
    }
}

/// `x` rounded to 15 significant digits; non-finite values become null.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let rounded: f64 = format!("{x:.14e}").parse().expect("formatted float parses");
    serde_json::Number::from_f64(rounded).map_or(Value::Null, Value::Number)
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => num(n.as_f64().expect("f64 number")),
        Value::Array(a) => Value::Array(a.into_iter().map(round_value).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        other => other,
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Writes `contents` to `path` via a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}

/// Renders the report to `path`, or to standard output when `path` is `None`.
pub fn emit(report: &Report, format: Format, path: Option<&Path>) -> Result<()> {
    let text = report.render(format);
    match path {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}
