use std::collections::BTreeMap;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use phonolint_core::{Error, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

/// Everything needed to reproduce a run's outputs.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    pub dataset: Dataset,
    pub symbol_table_sha256: String,
    pub sonority_sha256: String,
    pub flags: BTreeMap<String, String>,
    pub outputs: Vec<String>,
    /// Seconds since the Unix epoch; taken from `SOURCE_DATE_EPOCH` when set.
    pub timestamp: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Dataset {
    pub path: String,
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

fn timestamp() -> u64 {
    std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or_else(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs())
        })
}

impl RunManifest {
    pub fn new(
        command: &str,
        seed: u64,
        dataset: &Path,
        dataset_bytes: &[u8],
        symbols: &str,
        sonority: &str,
    ) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            seed,
            dataset: Dataset {
                path: dataset.display().to_string(),
                sha256: sha256_hex(dataset_bytes),
            },
            symbol_table_sha256: sha256_hex(symbols.as_bytes()),
            sonority_sha256: sha256_hex(sonority.as_bytes()),
            flags: BTreeMap::new(),
            outputs: Vec::new(),
            timestamp: timestamp(),
        }
    }

    pub fn flag(&mut self, name: &str, value: impl ToString) -> &mut Self {
        self.flags.insert(name.to_string(), value.to_string());
        self
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut json =
            serde_json::to_string_pretty(self).map_err(|e| Error::Evaluation(e.to_string()))?;
        json.push('\n');
        std::fs::write(path, json).map_err(|e| Error::io(path, e))
    }
}
