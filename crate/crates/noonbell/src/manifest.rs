use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use crate::params::Parameters;

/// Record of one CLI run, written next to its primary output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Parameters,
    pub seed: Option<u64>,
    pub version: String,
    pub duration_seconds: f64,
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    pub fn new(command: &str, parameters: Parameters, duration: Duration, outputs: Vec<PathBuf>) -> Self {
        RunManifest {
            command: command.to_string(),
            seed: parameters.seed,
            parameters,
            version: env!("CARGO_PKG_VERSION").to_string(),
            duration_seconds: duration.as_secs_f64(),
            outputs,
        }
    }

    /// `<out>.manifest.json` alongside the primary output.
    pub fn path_for(out: &Path) -> PathBuf {
        let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
        name.push(".manifest.json");
        out.with_file_name(name)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = crate::output::json(self)?;
        std::fs::write(path, text).with_context(|| format!("writing manifest {}", path.display()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading manifest {}", path.display()))?;
        Ok(serde_json::from_str(&text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_path_appends_suffix() {
        assert_eq!(RunManifest::path_for(Path::new("out/run.json")), PathBuf::from("out/run.json.manifest.json"));
    }
}
