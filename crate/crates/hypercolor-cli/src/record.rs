//! Result records: one self-describing JSON object per line, each embedding
//! a hash of the fully resolved command configuration and the crate
//! versions. Objects serialize with sorted keys and no timestamps, so a
//! rerun with the same configuration is byte-identical.

use anyhow::{Context, Result};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

/// Canonical form of a JSON value: compact, keys sorted. `serde_json`'s
/// default map is ordered, so plain serialization is already canonical.
pub fn canonical(value: &Value) -> String {
    serde_json::to_string(value).expect("JSON values serialize")
}

/// First 16 hex characters of the SHA-256 of the canonical configuration.
pub fn config_hash(config: &Value) -> String {
    let digest = Sha256::digest(canonical(config).as_bytes());
    let mut hex = String::with_capacity(16);
    for byte in &digest[..8] {
        hex.push_str(&format!("{byte:02x}"));
    }
    hex
}

/// Line-oriented record sink: a file path, or stdout for "-".
pub struct Records {
    out: Box<dyn Write>,
}

impl Records {
    pub fn open(path: &str) -> Result<Self> {
        let out: Box<dyn Write> = if path == "-" {
            Box::new(std::io::stdout())
        } else {
            let file = File::create(Path::new(path))
                .with_context(|| format!("cannot create record file {path}"))?;
            Box::new(BufWriter::new(file))
        };
        Ok(Self { out })
    }

    /// Emits one record line: the given fields plus `record` (the command
    /// name), `config` (the configuration hash) and both crate versions.
    pub fn emit(&mut self, record: &str, hash: &str, fields: Value) -> Result<()> {
        let mut map: Map<String, Value> = match fields {
            Value::Object(m) => m,
            other => {
                let mut m = Map::new();
                m.insert("value".into(), other);
                m
            }
        };
        map.insert("record".into(), Value::String(record.into()));
        map.insert("config".into(), Value::String(hash.into()));
        map.insert(
            "version".into(),
            Value::String(env!("CARGO_PKG_VERSION").into()),
        );
        map.insert("lib_version".into(), Value::String(hypercolor::VERSION.into()));
        let line = canonical(&Value::Object(map));
        writeln!(self.out, "{line}").context("write record")?;
        self.out.flush().context("flush records")?;
        Ok(())
    }
}
