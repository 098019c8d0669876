//! CSV tables and run manifests.
//!
//! Floats are written as `{:.16e}` (17 significant digits), so identical
//! values always produce identical bytes.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::model::DerivedConstants;

/// Version of every CSV header layout and of the manifest format.
pub const SCHEMA_VERSION: u32 = 1;

pub const MANIFEST_FILE: &str = "manifest.json";

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// An in-memory CSV table; each command builds its tables fully before writing.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub name: String,
    pub description: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(name: &str, description: &str, header: &[&str]) -> Self {
        CsvTable {
            name: name.to_string(),
            description: description.to_string(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn with_header(name: &str, description: &str, header: Vec<String>) -> Self {
        CsvTable {
            name: name.to_string(),
            description: description.to_string(),
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len(), "{}", self.name);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&str>> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k].as_str()).collect())
    }

    pub fn column_f64(&self, name: &str) -> Option<Vec<f64>> {
        self.column(name).map(|c| c.iter().map(|v| v.parse().unwrap_or(f64::NAN)).collect())
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record(r).map_err(csv_err)?;
        }
        w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
    }

    pub fn write(&self, dir: &Path) -> Result<OutputEntry> {
        let path = dir.join(&self.name);
        fs::write(&path, self.to_bytes()?)?;
        Ok(OutputEntry {
            file: self.name.clone(),
            rows: self.rows.len(),
            columns: self.header.clone(),
            description: self.description.clone(),
        })
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputEntry {
    pub file: String,
    pub rows: usize,
    pub columns: Vec<String>,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub tool_version: String,
    pub config: RunConfig,
    /// Network as parsed, in the input schema.
    pub network: Option<serde_json::Value>,
    pub constants: Option<DerivedConstants>,
    pub outputs: Vec<OutputEntry>,
    /// Event totals by kind (bursts, proposals, ...).
    pub event_counts: BTreeMap<String, u64>,
    /// Proposals with a negative raw companion-only rate.
    pub clamp_count: u64,
    /// Other counters that should stay at zero (domination violations, ...).
    pub anomalies: BTreeMap<String, u64>,
    /// Command-specific scalar results.
    pub summary: serde_json::Value,
}

impl RunManifest {
    pub fn new(config: &RunConfig) -> Self {
        RunManifest {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
            network: None,
            constants: None,
            outputs: Vec::new(),
            event_counts: BTreeMap::new(),
            clamp_count: 0,
            anomalies: BTreeMap::new(),
            summary: serde_json::Value::Null,
        }
    }

    pub fn count(&mut self, key: &str, n: u64) {
        *self.event_counts.entry(key.to_string()).or_default() += n;
    }

    pub fn anomaly(&mut self, key: &str, n: u64) {
        *self.anomalies.entry(key.to_string()).or_default() += n;
    }

    /// Writes `manifest.json` via a temporary file and a rename.
    pub fn write_atomic(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(MANIFEST_FILE);
        let tmp = dir.join(format!(".{MANIFEST_FILE}.tmp"));
        fs::write(&tmp, serde_json::to_vec_pretty(self)?)?;
        fs::rename(&tmp, &path)?;
        Ok(path)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Config {
            path: path.display().to_string(),
            reason: e.to_string(),
        })
    }
}
