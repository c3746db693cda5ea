//! JSON report envelope shared by all CLI outputs.

use serde::Serialize;

/// Version of the emitted report schemas.
pub const SCHEMA_VERSION: &str = "1";

/// Wraps a payload with the reproducibility metadata every output file
/// carries: schema version, the exact command configuration, and the seed.
#[derive(Debug, Clone, Serialize)]
pub struct Envelope<T: Serialize> {
    pub schema_version: &'static str,
    pub command: String,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub data: T,
}

impl<T: Serialize> Envelope<T> {
    pub fn new(command: &str, config: serde_json::Value, seed: Option<u64>, data: T) -> Self {
        Envelope {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            config,
            seed,
            data,
        }
    }

    /// Pretty JSON with a trailing newline; field order is fixed by the
    /// struct definitions, so equal inputs serialize byte-identically.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}
