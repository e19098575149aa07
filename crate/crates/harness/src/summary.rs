//! Per-run JSON summary.

use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::record::write_text;

/// One pass/fail claim checked by a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub command: String,
    pub tool_version: &'static str,
    pub config_hash: String,
    pub runtime_s: f64,
    pub records: usize,
    pub skipped: usize,
    pub max: Option<f64>,
    pub argmax: Option<serde_json::Value>,
    pub files: Vec<String>,
    pub checks: Vec<Check>,
}

impl RunSummary {
    pub fn new(command: impl Into<String>, config_hash: String) -> Self {
        Self {
            command: command.into(),
            tool_version: env!("CARGO_PKG_VERSION"),
            config_hash,
            runtime_s: 0.0,
            records: 0,
            skipped: 0,
            max: None,
            argmax: None,
            files: Vec::new(),
            checks: Vec::new(),
        }
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        write_text(path, &text)
    }
}
