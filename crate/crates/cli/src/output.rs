//! Result envelopes, the config-hash cache, and output rendering.
//!
//! Every run is keyed by the SHA-256 of its canonicalized configuration
//! (command name plus normalized arguments, serialized with sorted
//! keys). The envelope holding the payload is cached under that key and
//! replayed byte-for-byte on identical invocations; `--no-cache`
//! bypasses both the lookup and the store.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Pretty,
}

/// The envelope persisted in the cache and printed to stdout.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultEnvelope {
    pub command: String,
    pub config_hash: String,
    pub timestamp: String,
    pub payload: serde_json::Value,
    /// Bounds and cutoffs under which the payload is complete.
    pub certification: Vec<String>,
}

/// A flat table extracted from a payload for CSV rendering.
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// Canonical configuration: the command name and its normalized
/// arguments with sorted keys.
pub fn canonical_config(command: &str, args: &BTreeMap<String, serde_json::Value>) -> String {
    let mut root = BTreeMap::new();
    root.insert("command".to_string(), serde_json::json!(command));
    root.insert(
        "args".to_string(),
        serde_json::Value::Object(args.clone().into_iter().collect()),
    );
    serde_json::to_string(&root).expect("canonical config serializes")
}

pub fn config_hash(canonical: &str) -> String {
    let mut h = Sha256::new();
    h.update(canonical.as_bytes());
    let digest = h.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Cache directory: `--cache-dir`, then `MASURELAB_CACHE`, then a
/// directory under the system temp dir.
pub fn cache_dir(flag: Option<&Path>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    if let Ok(p) = std::env::var("MASURELAB_CACHE") {
        if !p.is_empty() {
            return PathBuf::from(p);
        }
    }
    std::env::temp_dir().join("masurelab-cache")
}

pub fn cache_lookup(dir: &Path, hash: &str) -> Option<ResultEnvelope> {
    let path = dir.join(format!("{hash}.json"));
    let bytes = fs::read(path).ok()?;
    serde_json::from_slice(&bytes).ok()
}

pub fn cache_store(dir: &Path, hash: &str, envelope: &ResultEnvelope) {
    if fs::create_dir_all(dir).is_err() {
        return; // cache is advisory
    }
    let path = dir.join(format!("{hash}.json"));
    let bytes = serde_json::to_vec_pretty(envelope).expect("envelope serializes");
    let _ = fs::write(path, bytes);
}

/// Renders the envelope in the requested format. CSV demands a flat
/// table; the caller supplies the extractor result.
pub fn render(
    envelope: &ResultEnvelope,
    format: OutputFormat,
    csv: Option<&CsvTable>,
) -> Result<String, String> {
    match format {
        OutputFormat::Json => {
            Ok(serde_json::to_string_pretty(envelope).expect("envelope serializes"))
        }
        OutputFormat::Csv => {
            let table = csv.ok_or_else(|| {
                "this command does not produce a flat table; use --format json".to_string()
            })?;
            let mut out = String::new();
            out.push_str(&table.header.join(","));
            out.push('\n');
            for row in &table.rows {
                out.push_str(&row.join(","));
                out.push('\n');
            }
            Ok(out)
        }
        OutputFormat::Pretty => {
            let mut out = String::new();
            out.push_str(&format!("command: {}\n", envelope.command));
            out.push_str(&format!("config:  {}\n", envelope.config_hash));
            for c in &envelope.certification {
                out.push_str(&format!("note:    {c}\n"));
            }
            out.push_str(&serde_json::to_string_pretty(&envelope.payload).unwrap());
            out.push('\n');
            Ok(out)
        }
    }
}
