use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};
use serde::Serialize;
use serde_json::Value;

use crate::error::CliResult;

/// Run record written beside each output file. Timestamps live only
/// here so that the data files themselves are reproducible byte for byte.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub version: &'static str,
    pub started_at: String,
    pub finished_at: String,
    pub outputs: Vec<String>,
}

pub fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

/// `<path>.manifest.json`.
pub fn manifest_path(path: &Path) -> PathBuf {
    let mut name = OsString::from(path.as_os_str());
    name.push(".manifest.json");
    PathBuf::from(name)
}

impl RunManifest {
    pub fn new(
        command: &str,
        config: &impl Serialize,
        seed: Option<u64>,
        started_at: String,
    ) -> CliResult<Self> {
        Ok(RunManifest {
            command: command.to_string(),
            config: serde_json::to_value(config)?,
            seed,
            version: env!("CARGO_PKG_VERSION"),
            started_at,
            finished_at: String::new(),
            outputs: Vec::new(),
        })
    }

    /// Writes the manifest next to the first output.
    pub fn finish(mut self) -> CliResult<()> {
        let Some(first) = self.outputs.first() else {
            return Ok(());
        };
        let path = manifest_path(Path::new(first));
        self.finished_at = now();
        let mut text = serde_json::to_string_pretty(&self)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }
}

/// Writes `bytes` to `out`, or to stdout when no path is given, recording
/// the path in the manifest.
pub fn emit(out: Option<&Path>, bytes: &[u8], manifest: &mut RunManifest) -> CliResult<()> {
    match out {
        Some(path) => {
            std::fs::write(path, bytes)?;
            manifest.outputs.push(path.display().to_string());
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
        }
    }
    Ok(())
}
