//! Run manifests: the provenance record written next to every file
//! output.
//!
//! A manifest captures what produced an output file: the subcommand,
//! the fully resolved configuration (defaults filled in, units
//! canonical), the tool version, a UTC timestamp, and a SHA-256 digest
//! of every input the run consumed. The payload file itself stays
//! timestamp-free so identical runs stay byte-identical; the manifest
//! is the one place allowed to differ between runs.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::{CmdResult, Failure};

/// Origin and digest of one input the command read.
#[derive(Clone, Debug, Serialize)]
pub struct InputDigest {
    /// File path, or `<inline ...>` for specs passed on the command line.
    pub source: String,
    /// SHA-256 of the raw bytes, lowercase hex.
    pub sha256: String,
}

/// The provenance record accompanying a file output.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub created_utc: String,
    pub config: serde_json::Value,
    pub inputs: Vec<InputDigest>,
}

impl RunManifest {
    pub fn new(command: &str, config: serde_json::Value, inputs: Vec<InputDigest>) -> Self {
        RunManifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            created_utc: Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true),
            config,
            inputs,
        }
    }
}

/// Lowercase hex SHA-256 of a byte slice.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// Sidecar path for an output: the output path with `.manifest.json`
/// appended, so `fit.json` is accompanied by `fit.json.manifest.json`.
pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_os_string();
    name.push(".manifest.json");
    PathBuf::from(name)
}

/// Writes a payload to `--output` (or stdout when absent). A file
/// output gets the manifest sidecar; a stdout payload stands alone.
pub fn emit(payload: &str, output: Option<&Path>, manifest: &RunManifest) -> CmdResult<()> {
    match output {
        None => {
            // a reader that stopped listening (head, a closed pager) is
            // not an error worth a panic
            let _ = std::io::stdout().write_all(payload.as_bytes());
            Ok(())
        }
        Some(path) => {
            fs::write(path, payload).map_err(|e| {
                Failure::Data(format!("cannot write {}: {e}", path.display()))
            })?;
            let side = manifest_path(path);
            let body = serde_json::to_string_pretty(manifest)
                .expect("manifest serialization cannot fail");
            fs::write(&side, body + "\n").map_err(|e| {
                Failure::Data(format!("cannot write {}: {e}", side.display()))
            })?;
            Ok(())
        }
    }
}
