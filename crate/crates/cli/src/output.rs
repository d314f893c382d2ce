use std::io::{self, Write};

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Human,
    Json,
    Csv,
}

#[derive(Debug, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Self {
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }
}

/// One result in all three renderings.
pub struct Output {
    pub json: Value,
    pub human: String,
    pub table: Table,
}

impl Output {
    pub fn write(&self, format: Format, w: &mut impl Write) -> io::Result<()> {
        match format {
            Format::Human => {
                w.write_all(self.human.as_bytes())?;
                if !self.human.ends_with('\n') {
                    w.write_all(b"\n")?;
                }
            }
            Format::Json => {
                serde_json::to_writer_pretty(&mut *w, &self.json)?;
                w.write_all(b"\n")?;
            }
            Format::Csv => {
                let mut csv = csv::Writer::from_writer(&mut *w);
                csv.write_record(&self.table.headers)?;
                for row in &self.table.rows {
                    csv.write_record(row)?;
                }
                csv.flush()?;
            }
        }
        w.flush()
    }
}

/// Fails on integers beyond `u64`.
pub fn to_value<T: Serialize>(v: &T) -> serde_json::Result<Value> {
    serde_json::to_value(v)
}

/// Shortest float text that roundtrips; `inf`/`nan` spelled out.
pub fn float(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn join<T: ToString>(items: &[T], sep: &str) -> String {
    items.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(sep)
}
