// Copyright 2026 The qbattery Authors
// SPDX-License-Identifier: Apache-2.0

//! Homogeneous result tables and their CSV/JSON encodings.
//!
//! Floats are written with 17 significant digits so that every value parses
//! back to the same bits.

use std::io::Write;
use std::path::Path;

use crate::config::Format;
use crate::RunError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(i) => Some(*i as f64),
            Cell::Float(x) => Some(*x),
            Cell::Text(_) => None,
        }
    }

    fn csv_field(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => format_float(*x),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Int(i) => serde_json::Value::from(*i),
            Cell::Float(x) => serde_json::Number::from_f64(*x).map_or(serde_json::Value::Null, serde_json::Value::Number),
            Cell::Text(s) => serde_json::Value::from(s.clone()),
        }
    }

    /// Integers stay integers; anything else numeric is a float.
    fn parse(field: &str) -> Cell {
        if let Ok(i) = field.parse::<i64>() {
            return Cell::Int(i);
        }
        match field.parse::<f64>() {
            Ok(x) => Cell::Float(x),
            Err(_) => Cell::Text(field.to_string()),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn floats(&self, name: &str) -> Result<Vec<f64>, RunError> {
        let idx = self.column(name).ok_or_else(|| RunError::Config(format!("table has no column {name:?}")))?;
        self.rows
            .iter()
            .map(|r| r[idx].as_f64().ok_or_else(|| RunError::Config(format!("column {name:?} is not numeric"))))
            .collect()
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, RunError> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.columns).map_err(io_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv_field)).map_err(io_err)?;
        }
        w.into_inner().map_err(|e| RunError::Io(e.to_string()))
    }

    /// Array of objects whose keys follow the column order.
    pub fn to_json(&self) -> Result<Vec<u8>, RunError> {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|r| {
                let obj: serde_json::Map<String, serde_json::Value> =
                    self.columns.iter().cloned().zip(r.iter().map(Cell::json)).collect();
                serde_json::Value::Object(obj)
            })
            .collect();
        let mut out = serde_json::to_vec_pretty(&rows).map_err(|e| RunError::Io(e.to_string()))?;
        out.push(b'\n');
        Ok(out)
    }

    pub fn from_csv(bytes: &[u8]) -> Result<Self, RunError> {
        let mut r = csv::ReaderBuilder::new().from_reader(bytes);
        let columns: Vec<String> = r.headers().map_err(io_err)?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(io_err)?;
            rows.push(rec.iter().map(Cell::parse).collect());
        }
        Ok(Self { columns, rows })
    }
}

fn io_err(e: csv::Error) -> RunError {
    RunError::Io(e.to_string())
}

/// Writes `table` to `path` in `format`.
pub fn emit_table(table: &Table, format: Format, path: &Path) -> Result<(), RunError> {
    let bytes = match format {
        Format::Csv => table.to_csv()?,
        Format::Json => table.to_json()?,
    };
    let mut f = std::fs::File::create(path).map_err(|e| RunError::Io(format!("{}: {e}", path.display())))?;
    f.write_all(&bytes).map_err(|e| RunError::Io(format!("{}: {e}", path.display())))
}

pub fn read_table(path: &Path) -> Result<Table, RunError> {
    let bytes = std::fs::read(path).map_err(|e| RunError::Io(format!("{}: {e}", path.display())))?;
    Table::from_csv(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_only_when_empty() {
        let t = Table::new(&["N", "P_max"]);
        assert_eq!(t.to_csv().unwrap(), b"N,P_max\n");
        assert_eq!(t.to_json().unwrap(), b"[]\n");
    }

    #[test]
    fn one_row_two_lines() {
        let mut t = Table::new(&["N", "P_max"]);
        t.push(vec![4usize.into(), 0.5.into()]);
        let csv = String::from_utf8(t.to_csv().unwrap()).unwrap();
        assert_eq!(csv, "N,P_max\n4,5.0000000000000000e-1\n");
        let json = String::from_utf8(t.to_json().unwrap()).unwrap();
        assert!(json.find("\"N\"").unwrap() < json.find("\"P_max\"").unwrap());
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let mut t = Table::new(&["i", "x", "y"]);
        let mut state = 0x9e37_79b9_7f4a_7c15u64;
        for i in 0..1000usize {
            // xorshift bits reinterpreted as finite doubles
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            let mut x = f64::from_bits(state);
            if !x.is_finite() {
                x = i as f64 * 1e-300;
            }
            t.push(vec![i.into(), x.into(), (1.0 / (i as f64 + 1.0)).into()]);
        }
        let back = Table::from_csv(&t.to_csv().unwrap()).unwrap();
        assert_eq!(back.columns, t.columns);
        for (a, b) in back.rows.iter().zip(&t.rows) {
            for (ca, cb) in a.iter().zip(b) {
                match (ca, cb) {
                    (Cell::Float(p), Cell::Float(q)) => assert_eq!(p.to_bits(), q.to_bits()),
                    _ => assert_eq!(ca, cb),
                }
            }
        }
    }

    #[test]
    fn non_finite_values() {
        let mut t = Table::new(&["x"]);
        t.push(vec![f64::NAN.into()]);
        t.push(vec![f64::INFINITY.into()]);
        let back = Table::from_csv(&t.to_csv().unwrap()).unwrap();
        assert!(back.floats("x").unwrap()[0].is_nan());
        assert_eq!(back.floats("x").unwrap()[1], f64::INFINITY);
        assert!(t.to_json().unwrap().starts_with(b"[\n  {\n    \"x\": null"));
    }

    #[test]
    fn missing_column() {
        let t = Table::new(&["N"]);
        assert!(t.floats("P_max").is_err());
    }
}
