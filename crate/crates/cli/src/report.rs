//! The result document every subcommand produces, and its JSON/CSV renderings.

use serde::Serialize;
use serde_json::Value;

use crate::config::{ExperimentConfig, Format};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    /// Must hold on every instance; a violation fails the run.
    Invariant,
    /// A sampling comparison; reported but never fails the run.
    Statistical,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub kind: CheckKind,
    pub checked: u64,
    pub violations: u64,
    /// The first failing instance, described.
    pub witness: Option<String>,
}

impl Check {
    pub fn new(name: impl Into<String>, kind: CheckKind) -> Self {
        Check { name: name.into(), kind, checked: 0, violations: 0, witness: None }
    }

    pub fn invariant(name: impl Into<String>) -> Self {
        Self::new(name, CheckKind::Invariant)
    }

    pub fn statistical(name: impl Into<String>) -> Self {
        Self::new(name, CheckKind::Statistical)
    }

    /// Records one instance; `witness` is evaluated only for the first failure.
    pub fn record(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.violations += 1;
            if self.witness.is_none() {
                self.witness = Some(witness());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Flat rows for CSV output.
#[derive(Debug, Clone, Default, PartialEq)]
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
}

/// Formats an optional value for CSV, empty when absent.
pub fn cell<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub artifact_version: &'static str,
    pub config: ExperimentConfig,
    pub results: Value,
    pub checks: Vec<Check>,
    /// Deterministic work counters, plus elapsed milliseconds when wall-clock reporting is on.
    pub timings: Value,
    #[serde(skip)]
    pub table: Table,
}

impl Report {
    pub fn new(config: &ExperimentConfig, results: Value, checks: Vec<Check>, timings: Value, table: Table) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            artifact_version: env!("CARGO_PKG_VERSION"),
            config: config.clone(),
            results,
            checks,
            timings,
            table,
        }
    }

    /// Invariant violations across all checks.
    pub fn violations(&self) -> u64 {
        self.checks.iter().filter(|c| c.kind == CheckKind::Invariant).map(|c| c.violations).sum()
    }

    pub fn render(&self) -> anyhow::Result<Vec<u8>> {
        match self.config.format {
            Format::Json => {
                let mut out = serde_json::to_vec_pretty(self)?;
                out.push(b'\n');
                Ok(out)
            }
            Format::Csv => {
                // provenance line; csv readers skip it with `comment(Some(b'#'))`
                let mut out = b"# ".to_vec();
                serde_json::to_writer(
                    &mut out,
                    &serde_json::json!({ "schema_version": self.schema_version, "artifact_version": self.artifact_version, "config": self.config }),
                )?;
                out.push(b'\n');
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.table.header)?;
                for row in &self.table.rows {
                    w.write_record(row)?;
                }
                Ok(w.into_inner()?)
            }
        }
    }
}
