//! CSV and JSON rendering of result tables.

use std::fmt::Write as _;

use clap::ValueEnum;
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(BigInt),
    Count(usize),
    Exact(BigRational),
    Float(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Count(v) => v.to_string(),
            // always "p/q", including integers
            Cell::Exact(r) => format!("{}/{}", r.numer(), r.denom()),
            Cell::Float(x) => format_float(*x),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Count(v) => Value::from(*v),
            Cell::Float(x) if x.is_finite() => Value::from(*x),
            other => Value::String(other.render()),
        }
    }
}

/// Shortest round-trip representation; stable across runs.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:?}")
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Bare output: no header, one value per line (CSV) or a flat array (JSON).
    pub bare: bool,
    /// Scalar results that accompany the rows.
    pub notes: Vec<(String, Cell)>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new(), bare: false, notes: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format, timestamp: Option<u64>) -> String {
        match format {
            Format::Csv => self.csv(timestamp),
            Format::Json => self.json(timestamp),
        }
    }

    fn csv(&self, timestamp: Option<u64>) -> String {
        let mut out = String::new();
        if let Some(t) = timestamp {
            let _ = writeln!(out, "# generated {t}");
        }
        if !self.bare {
            let _ = writeln!(out, "# {}", self.columns.join(","));
        }
        for (k, v) in &self.notes {
            let _ = writeln!(out, "# {k}={}", v.render());
        }
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::render).collect();
            let _ = writeln!(out, "{}", line.join(","));
        }
        out
    }

    fn json(&self, timestamp: Option<u64>) -> String {
        let data: Value = if self.bare {
            Value::Array(self.rows.iter().flat_map(|r| r.iter().map(Cell::json)).collect())
        } else {
            Value::Array(
                self.rows
                    .iter()
                    .map(|r| {
                        let obj: Map<String, Value> =
                            self.columns.iter().cloned().zip(r.iter().map(Cell::json)).collect();
                        Value::Object(obj)
                    })
                    .collect(),
            )
        };
        let value = if timestamp.is_none() && self.notes.is_empty() {
            data
        } else {
            let mut obj = Map::new();
            if let Some(t) = timestamp {
                obj.insert("generated".into(), Value::from(t));
            }
            for (k, v) in &self.notes {
                obj.insert(k.clone(), v.json());
            }
            obj.insert("data".into(), data);
            Value::Object(obj)
        };
        let mut s = serde_json::to_string_pretty(&value).expect("json values always serialise");
        s.push('\n');
        s
    }
}
