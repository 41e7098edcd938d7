//! Tabular output as JSON {meta, columns, rows} or CSV with '#' meta lines.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::{Format, RunConfig};
use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct Table {
    pub meta: Map<String, Value>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(command: &str, cfg: &RunConfig, columns: Vec<String>) -> Self {
        let mut meta = Map::new();
        meta.insert("command".into(), command.into());
        meta.insert("version".into(), env!("CARGO_PKG_VERSION").into());
        meta.insert("bits".into(), cfg.bits.into());
        meta.insert("config".into(), serde_json::to_value(cfg).expect("config serializes"));
        Self {
            meta,
            columns,
            rows: Vec::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) {
        self.meta
            .insert(key.into(), serde_json::to_value(value).expect("meta serializes"));
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).map_err(|e| CliError::Io(e.to_string()))?;
                s.push('\n');
                Ok(s)
            }
            Format::Csv => {
                let mut out = String::new();
                for (k, v) in &self.meta {
                    let v = match v {
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    };
                    out.push_str(&format!("# {k}={v}\n"));
                }
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.columns).map_err(|e| CliError::Io(e.to_string()))?;
                for r in &self.rows {
                    w.write_record(r).map_err(|e| CliError::Io(e.to_string()))?;
                }
                let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
                out.push_str(&String::from_utf8(bytes).expect("utf-8 cells"));
                Ok(out)
            }
        }
    }
}

/// Writes to `out`, or stdout when absent.
pub fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
            }
            std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))
        }
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes())
                .and_then(|_| so.flush())
                .map_err(|e| CliError::Io(e.to_string()))
        }
    }
}
