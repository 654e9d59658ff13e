//! Rendering of command results as bare values, CSV or JSON.

use std::io::Write;

use omega_core::ideals::IdealEnumerator;
use omega_core::lattice::{BoxSieve, QuarterDisk};
use serde::Serialize;
use serde_json::Value;

use crate::config::Format;

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| {
                    let obj = self.header.iter().zip(r).map(|(h, v)| (h.to_string(), cell_json(v))).collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

fn cell_json(v: &str) -> Value {
    serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()))
}

/// Large row sets written without buffering.
pub enum Stream {
    Records(IdealEnumerator),
    BoxCells(BoxSieve),
    DiskCells(QuarterDisk),
}

pub struct Output {
    /// Bare value printed when no format is requested.
    pub scalar: Option<String>,
    pub json: Value,
    pub table: Option<Table>,
    pub stream: Option<Stream>,
}

impl Output {
    pub fn report<T: Serialize>(report: &T) -> Self {
        Output {
            scalar: None,
            json: serde_json::to_value(report).expect("reports serialize"),
            table: None,
            stream: None,
        }
    }

    pub fn with_scalar(mut self, value: impl ToString) -> Self {
        self.scalar = Some(value.to_string());
        self
    }

    pub fn with_table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }

    pub fn with_stream(mut self, stream: Stream) -> Self {
        self.stream = Some(stream);
        self
    }

    /// The format actually used when `requested` is given.
    pub fn resolve(&self, requested: Option<Format>) -> Option<Format> {
        match requested {
            Some(f) => Some(f),
            None if self.scalar.is_some() => None,
            None if self.table.is_some() || self.stream.is_some() => Some(Format::Csv),
            None => Some(Format::Json),
        }
    }

    pub fn write(&self, requested: Option<Format>, out: &mut dyn Write) -> std::io::Result<()> {
        match self.resolve(requested) {
            None => writeln!(out, "{}", self.scalar.as_deref().unwrap_or_default()),
            Some(Format::Json) => {
                let value = match (&self.table, &self.json) {
                    (Some(t), Value::Null) => t.to_json(),
                    _ => self.json.clone(),
                };
                serde_json::to_writer_pretty(&mut *out, &value)?;
                writeln!(out)
            }
            Some(Format::Csv) => {
                if let Some(stream) = &self.stream {
                    return write_stream(stream, out);
                }
                let mut w = csv::Writer::from_writer(out);
                match &self.table {
                    Some(t) => {
                        w.write_record(&t.header)?;
                        for row in &t.rows {
                            w.write_record(row)?;
                        }
                    }
                    None => {
                        let obj = self.json.as_object().cloned().unwrap_or_default();
                        w.write_record(obj.keys())?;
                        w.write_record(obj.values().map(|v| match v {
                            Value::String(s) => s.clone(),
                            other => other.to_string(),
                        }))?;
                    }
                }
                w.flush()
            }
        }
    }
}

fn write_stream(stream: &Stream, out: &mut dyn Write) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    match stream {
        Stream::Records(e) => {
            w.write_record(["norm", "big_omega", "small_omega"])?;
            for r in e.iter() {
                w.write_record(&[r.norm.to_string(), r.big_omega.to_string(), r.small_omega.to_string()])?;
            }
        }
        Stream::BoxCells(b) => {
            w.write_record(CELL_HEADER)?;
            for c in b.cells() {
                w.write_record(cell_row(&c))?;
            }
        }
        Stream::DiskCells(d) => {
            w.write_record(CELL_HEADER)?;
            for c in d.cells() {
                w.write_record(cell_row(&c))?;
            }
        }
    }
    w.flush()
}

const CELL_HEADER: [&str; 6] = ["m", "n", "s", "omega_q", "omega_gauss", "in_d"];

fn cell_row(c: &omega_core::lattice::LatticeCell) -> [String; 6] {
    [
        c.m.to_string(),
        c.n.to_string(),
        c.s.to_string(),
        c.omega_q.to_string(),
        c.omega_gauss.to_string(),
        c.in_d.to_string(),
    ]
}

/// Shortest round-trip rendering that always shows a decimal point.
pub fn float(x: f64) -> String {
    format!("{x:?}")
}

/// True when the reader went away, including failures surfaced through csv.
pub fn is_broken_pipe(e: &std::io::Error) -> bool {
    if e.kind() == std::io::ErrorKind::BrokenPipe {
        return true;
    }
    match e.get_ref().and_then(|inner| inner.downcast_ref::<csv::Error>()) {
        Some(c) => matches!(c.kind(), csv::ErrorKind::Io(io) if io.kind() == std::io::ErrorKind::BrokenPipe),
        None => false,
    }
}
