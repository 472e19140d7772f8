use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::LabError;

/// Rows destined for `<experiment>.csv`.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path) -> Result<(), LabError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(path)?;
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush().map_err(|e| LabError::io(path.display().to_string(), e))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OpCount {
    pub op: String,
    pub contributing: u64,
    pub excluded: u64,
}

/// Everything an experiment hands back besides its resolved parameters.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub table: Table,
    pub counts: Vec<OpCount>,
    pub metrics: BTreeMap<String, f64>,
    pub passes: BTreeMap<String, bool>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(table: Table) -> Self {
        Self {
            table,
            ..Default::default()
        }
    }

    pub fn count(&mut self, op: impl Into<String>, contributing: u64, excluded: u64) {
        self.counts.push(OpCount {
            op: op.into(),
            contributing,
            excluded,
        });
    }

    pub fn metric(&mut self, name: &str, v: f64) {
        self.metrics.insert(name.to_string(), v);
    }

    pub fn check(&mut self, name: &str, ok: bool) {
        self.passes.insert(name.to_string(), ok);
    }
}

/// Locale-free float text: plain notation in the usual range, scientific outside it.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn int<T: std::fmt::Display>(x: T) -> String {
    x.to_string()
}

pub fn cplx(z: Complex64) -> [String; 2] {
    [num(z.re), num(z.im)]
}
