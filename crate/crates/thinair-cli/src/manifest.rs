//! Run manifests: every artifact the CLI writes is accompanied by a
//! `<artifact>.manifest.json` recording the tool version, subcommand,
//! parameters, input digests, and modeling assumptions. Wall-clock time is
//! excluded unless explicitly requested, so identical runs produce
//! identical manifest bytes.

use std::collections::BTreeMap;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub name: String,
    pub source: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub subcommand: String,
    pub parameters: BTreeMap<String, String>,
    pub inputs: Vec<InputDigest>,
    pub assumptions: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp_utc_s: Option<u64>,
}

impl RunManifest {
    pub fn new(subcommand: &str) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            subcommand: subcommand.to_string(),
            parameters: BTreeMap::new(),
            inputs: Vec::new(),
            assumptions: Vec::new(),
            timestamp_utc_s: None,
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }

    pub fn input(mut self, name: &str, source: &str, contents: &[u8]) -> Self {
        self.inputs.push(InputDigest {
            name: name.to_string(),
            source: source.to_string(),
            sha256: hex::encode(Sha256::digest(contents)),
        });
        self
    }

    pub fn assumption(mut self, note: &str) -> Self {
        self.assumptions.push(note.to_string());
        self
    }

    pub fn assumptions(mut self, notes: &[&str]) -> Self {
        self.assumptions.extend(notes.iter().map(|s| s.to_string()));
        self
    }

    /// Opt-in wall-clock stamp (UTC seconds); disabled by default so runs
    /// stay byte-reproducible.
    pub fn with_timestamp(mut self, enabled: bool) -> Self {
        if enabled {
            self.timestamp_utc_s = Some(
                std::time::SystemTime::now()
                    .duration_since(std::time::UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0),
            );
        }
        self
    }

    pub fn to_json_pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    /// `<artifact>.manifest.json` next to the artifact.
    pub fn manifest_path(artifact: &Path) -> PathBuf {
        let mut name = artifact
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "out".to_string());
        name.push_str(".manifest.json");
        artifact.with_file_name(name)
    }

    /// Writes the manifest next to `artifact`.
    pub fn write_alongside(&self, artifact: &Path) -> io::Result<PathBuf> {
        let path = Self::manifest_path(artifact);
        std::fs::write(&path, self.to_json_pretty())?;
        Ok(path)
    }
}
