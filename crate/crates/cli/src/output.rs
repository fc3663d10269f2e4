use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;
use serde_json::Value;

use crate::config::Config;

/// One row of an r-curve: (r, value, divergent_flag, error_estimate).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub r: f64,
    pub value: f64,
    pub divergent: bool,
    pub error_estimate: f64,
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

pub fn curve_table(rows: &[CurveRow]) -> Table {
    let mut t = Table::new(&["r", "value", "divergent_flag", "error_estimate"]);
    for row in rows {
        t.push(vec![num(row.r), num(row.value), u8::from(row.divergent).to_string(), num(row.error_estimate)]);
    }
    t
}

/// Shortest round-trip form, so identical runs give identical bytes.
pub fn num(x: f64) -> String {
    format!("{x}")
}

#[derive(Debug, Default)]
pub struct Outcome {
    pub summary: Vec<String>,
    pub result: Value,
    pub tables: Vec<(String, Table)>,
    pub inconclusive: bool,
}

impl Outcome {
    pub fn line(&mut self, s: impl Into<String>) {
        self.summary.push(s.into());
    }

    pub fn curve(&mut self, name: &str, rows: &[CurveRow]) {
        self.tables.push((name.to_string(), curve_table(rows)));
    }
}

#[derive(Serialize)]
struct Report<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    inconclusive: bool,
    config: &'a Config,
    result: &'a Value,
}

/// Writes `<command>.json` and `<command>_<table>.csv` under `dir`.
pub fn write(dir: &Path, command: &str, cfg: &Config, outcome: &Outcome) -> anyhow::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let stem = command.replace('-', "_");
    let report = Report {
        tool: "hg",
        version: env!("CARGO_PKG_VERSION"),
        command,
        inconclusive: outcome.inconclusive,
        config: cfg,
        result: &outcome.result,
    };
    let json_path = dir.join(format!("{stem}.json"));
    std::fs::write(&json_path, serde_json::to_string_pretty(&report)? + "\n")
        .with_context(|| format!("writing {}", json_path.display()))?;
    let mut written = vec![json_path];
    for (name, table) in &outcome.tables {
        let path = dir.join(format!("{stem}_{name}.csv"));
        let mut w = csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
        w.write_record(&table.header)?;
        for row in &table.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        written.push(path);
    }
    Ok(written)
}
