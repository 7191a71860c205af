//! File formats: point sets as CSV with a JSON metadata header, and simple
//! tables written as CSV or JSON.
//!
//! A point-set file looks like
//!
//! ```text
//! #{"d":2,"kernel":{"d":2,"L":1},"seed":7}
//! 0.123,-0.456,0.881
//! ...
//! ```
//!
//! Floats are printed in shortest round-trip form, so reading a file back
//! reproduces the configuration bit for bit.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::sampling::PointConfiguration;

/// Metadata carried in the `#` header of a point-set file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointsHeader {
    pub d: usize,
    pub kernel: Option<KernelSpec>,
    pub seed: Option<u64>,
}

pub fn write_points_csv<W: Write>(mut w: W, x: &PointConfiguration, header: &PointsHeader) -> Result<()> {
    writeln!(w, "#{}", serde_json::to_string(header)?)?;
    for p in x.iter() {
        let row: Vec<String> = p.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

/// Reads a point-set file. The first `#` line, if any, must hold the JSON
/// header; further `#` lines are ignored.
pub fn read_points_csv<R: BufRead>(r: R) -> Result<(Option<PointsHeader>, PointConfiguration)> {
    let mut header: Option<PointsHeader> = None;
    let mut seen_comment = false;
    let mut points = Vec::new();
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if !seen_comment {
                header = Some(serde_json::from_str(rest)?);
                seen_comment = true;
            }
            continue;
        }
        let row = line
            .split(',')
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        points.push(row);
    }
    let d = match (&header, points.first()) {
        (Some(h), _) => h.d,
        (None, Some(p)) if p.len() >= 2 => p.len() - 1,
        _ => return Err(Error::Parse("cannot infer the sphere dimension of an empty file".into())),
    };
    Ok((header, PointConfiguration::new(d, points)?))
}

/// One output table: named columns, rows of JSON scalars, and free-form
/// metadata that goes into the CSV header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub meta: Value,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(meta: Value, columns: &[&str]) -> Self {
        Self {
            meta,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "#{}", serde_json::to_string(&self.meta)?)?;
        writeln!(w, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(csv_cell).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }

    /// Rows as a JSON array of objects keyed by column name.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self.columns.iter().cloned().zip(row.iter().cloned()).collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Number(n) => match n.as_f64() {
            Some(f) if n.is_f64() => f.to_string(),
            _ => n.to_string(),
        },
        other => other.to_string(),
    }
}

/// A float as a JSON value, `null` when missing or not finite.
pub fn num(v: Option<f64>) -> Value {
    v.filter(|x| x.is_finite()).map_or(Value::Null, Value::from)
}
