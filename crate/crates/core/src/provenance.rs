//! Run metadata embedded in every output file.

use std::collections::BTreeMap;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Hex SHA-256 of the sorted `key=value` lines.
pub fn config_digest(entries: &BTreeMap<String, String>) -> String {
    let mut h = Sha256::new();
    for (k, v) in entries {
        h.update(k.as_bytes());
        h.update(b"=");
        h.update(v.as_bytes());
        h.update(b"\n");
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub curve: String,
    pub config_digest: String,
    pub version: String,
    /// Seconds since the Unix epoch; absent in reproducible outputs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

impl Provenance {
    pub fn new(curve: impl Into<String>, config_digest: impl Into<String>) -> Self {
        Provenance {
            curve: curve.into(),
            config_digest: config_digest.into(),
            version: format!("nearcurve {VERSION}"),
            timestamp: None,
        }
    }

    pub fn stamped(mut self) -> Self {
        self.timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .ok()
            .map(|d| d.as_secs());
        self
    }

    /// `key: value` comment lines for CSV output.
    pub fn comments(&self) -> Vec<String> {
        let mut c = vec![
            format!("curve: {}", self.curve),
            format!("config_digest: {}", self.config_digest),
            format!("version: {}", self.version),
        ];
        if let Some(t) = self.timestamp {
            c.push(format!("timestamp: {t}"));
        }
        c
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "meta": self })
    }
}
