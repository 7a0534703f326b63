//! Every file the tool writes is accompanied by a manifest recording the
//! exact command, its parameters, the tool version, and a digest of any
//! input file, so an artifact can always be traced back to the invocation
//! that produced it.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::output::write_atomic;

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    /// Flag values as given (or defaulted), keyed by flag name. A
    /// `BTreeMap` keeps the serialization order deterministic.
    pub parameters: BTreeMap<String, String>,
    pub tool_version: String,
    /// `sha256:<hex>` over the raw bytes of the input file, or over the
    /// empty string when the command reads no file.
    pub input_digest: String,
}

pub fn digest_bytes(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    format!("sha256:{:x}", hasher.finalize())
}

impl RunManifest {
    pub fn new(command: &str, parameters: BTreeMap<String, String>) -> Self {
        Self {
            command: command.to_string(),
            parameters,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            input_digest: digest_bytes(b""),
        }
    }

    pub fn with_input_bytes(mut self, bytes: &[u8]) -> Self {
        self.input_digest = digest_bytes(bytes);
        self
    }

    /// Manifest path for an output file: the output path with
    /// `.manifest.json` appended (`sweep.csv` -> `sweep.csv.manifest.json`).
    pub fn path_for(out: &Path) -> PathBuf {
        let mut name = out.as_os_str().to_os_string();
        name.push(".manifest.json");
        PathBuf::from(name)
    }

    /// Serializes the manifest next to `out` and returns the manifest path.
    pub fn write_alongside(&self, out: &Path) -> std::io::Result<PathBuf> {
        let path = Self::path_for(out);
        let mut body = serde_json::to_string_pretty(self).expect("manifest serializes");
        body.push('\n');
        write_atomic(&path, body.as_bytes())?;
        Ok(path)
    }
}
