//! Report envelopes and file output.
//!
//! Every JSON report carries the tool version, the hash of the graph it was
//! computed on, and the full run configuration. File writes go through a
//! temp-file-plus-rename so readers never observe a half-written report.

use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use crate::config::RunConfig;

pub const TOOL_NAME: &str = "magschro";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// The envelope around every JSON result.
#[derive(Debug, Serialize)]
pub struct Report<T: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    /// SHA-256 of the canonical serialization of the graph the command ran on.
    pub graph_hash: String,
    pub config: RunConfig,
    pub result: T,
}

impl<T: Serialize> Report<T> {
    pub fn new(graph_hash: String, config: RunConfig, result: T) -> Self {
        Report { tool: TOOL_NAME, version: TOOL_VERSION, graph_hash, config, result }
    }

    /// Deterministic pretty JSON: field order follows the struct
    /// definitions, maps are sorted, so equal configs give equal bytes.
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self).context("serializing report")?;
        s.push('\n');
        Ok(s)
    }
}

/// Writes `bytes` to `path` atomically: a unique temp file in the same
/// directory is written first and then renamed over the target.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let name = path
        .file_name()
        .with_context(|| format!("output path {} has no file name", path.display()))?;
    let tmp = dir.join(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    std::fs::write(&tmp, bytes)
        .with_context(|| format!("writing temp file {}", tmp.display()))?;
    std::fs::rename(&tmp, path).with_context(|| {
        let _ = std::fs::remove_file(&tmp);
        format!("moving temp file into place at {}", path.display())
    })?;
    Ok(())
}

/// Sends rendered output to `--out` when given, else to stdout.
pub fn emit(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => atomic_write(path, content.as_bytes()),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}
