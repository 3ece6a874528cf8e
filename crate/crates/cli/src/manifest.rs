use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::args::Command;
use crate::error::{CliError, Result};
use crate::ingest::write_atomic;

pub const MANIFEST_FILE: &str = "manifest.json";

/// Everything needed to rerun a command, plus what it produced and how long
/// it took. Wall-clock figures live here only, so the other outputs of a
/// replay are byte-identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub invocation: Command,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub methods: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub var_threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub runtime_seconds: f64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub method_runtimes: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl RunManifest {
    pub fn new(invocation: Command) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            invocation,
            methods: Vec::new(),
            window: None,
            depth: None,
            weights: None,
            var_threshold: None,
            seed: None,
            inputs: Vec::new(),
            outputs: Vec::new(),
            runtime_seconds: 0.0,
            method_runtimes: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::data("manifest encoding", e))?;
        write_atomic(path, json.as_bytes())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| CliError::data(path.display().to_string(), e))
    }
}
