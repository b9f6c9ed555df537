//! CSV tables with a one-line JSON header and the run summary.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

use crate::config::ExperimentConfig;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// File stem, e.g. `papr_ccdf`.
    pub name: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: Vec<&'static str>) -> Self {
        Self {
            name: name.into(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }

    /// CSV text preceded by `# {json header}`.
    pub fn to_csv(&self, cfg: &ExperimentConfig) -> anyhow::Result<String> {
        let mut out = format!("# {}\n", header_json(cfg)?).into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(&self.columns)?;
            for r in &self.rows {
                w.write_record(r)?;
            }
            w.flush()?;
        }
        Ok(String::from_utf8(out)?)
    }
}

#[derive(Serialize)]
struct Header<'a> {
    tool: &'static str,
    version: &'static str,
    config: &'a ExperimentConfig,
}

/// Resolved configuration without the output location.
pub fn header_json(cfg: &ExperimentConfig) -> anyhow::Result<String> {
    let mut cfg = cfg.clone();
    cfg.output = None;
    Ok(serde_json::to_string(&Header {
        tool: "agile-afdm",
        version: VERSION,
        config: &cfg,
    })?)
}

pub fn fmt(v: f64) -> String {
    format!("{v}")
}

/// Writes every table plus `summary.json` into `dir`; returns the written paths.
pub fn write_run(
    dir: &Path,
    cfg: &ExperimentConfig,
    tables: &[Table],
    summary: &serde_json::Value,
) -> anyhow::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut written = Vec::new();
    for t in tables {
        let path = dir.join(format!("{}.csv", t.name));
        fs::write(&path, t.to_csv(cfg)?).with_context(|| format!("writing {}", path.display()))?;
        written.push(path);
    }
    let path = dir.join("summary.json");
    fs::write(&path, serde_json::to_string_pretty(summary)? + "\n")
        .with_context(|| format!("writing {}", path.display()))?;
    written.push(path);
    Ok(written)
}
