//! Column-oriented report tables with CSV and JSON renderings.
//!
//! CSV output starts with a `# key = value` header block carrying the
//! resolved configuration, followed by a fixed column header line. JSON
//! output mirrors the CSV columns as arrays under `"data"`.

use std::fmt::Write as _;

use serde_json::{Map, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => format_real(*v),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Real(v) if v.is_finite() => Value::from(*v),
            Cell::Real(v) => Value::from(format_real(*v)),
            Cell::Text(s) => Value::from(s.clone()),
            Cell::Bool(b) => Value::from(*b),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// Shortest round-trip decimal form; non-finite values spelled out.
pub fn format_real(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:?}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
    notes: Vec<(String, String)>,
}

impl Table {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.as_ref().to_string()).collect(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    /// Appends a row; panics if its width differs from the header.
    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width mismatch");
        self.rows.push(row);
    }

    /// Free-form `key = value` lines reported after the config block.
    pub fn note(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.notes.push((key.into(), value.into()));
    }

    pub fn notes(&self) -> &[(String, String)] {
        &self.notes
    }

    pub fn to_csv(&self, config: &[(String, String)]) -> String {
        let mut out = String::new();
        for (k, v) in config.iter().chain(&self.notes) {
            let _ = writeln!(out, "# {k} = {v}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn to_json(&self, config: &[(String, String)]) -> String {
        let mut cfg = Map::new();
        for (k, v) in config {
            cfg.insert(k.clone(), Value::from(v.clone()));
        }
        let mut notes = Map::new();
        for (k, v) in &self.notes {
            notes.insert(k.clone(), Value::from(v.clone()));
        }
        let mut data = Map::new();
        for (i, name) in self.columns.iter().enumerate() {
            let col: Vec<Value> = self.rows.iter().map(|r| r[i].json()).collect();
            data.insert(name.clone(), Value::Array(col));
        }
        let mut root = Map::new();
        root.insert("config".into(), Value::Object(cfg));
        root.insert("notes".into(), Value::Object(notes));
        root.insert(
            "columns".into(),
            Value::Array(self.columns.iter().cloned().map(Value::from).collect()),
        );
        root.insert("data".into(), Value::Object(data));
        let mut s = serde_json::to_string_pretty(&Value::Object(root)).expect("plain json");
        s.push('\n');
        s
    }
}
