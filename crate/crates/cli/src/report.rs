use serde::Serialize;
use serde_json::Value;

/// Which algorithm produced the numbers and whether any of them rest on
/// unproven assumptions, plus cache traffic. Always present so conditional
/// paths stay auditable.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub algorithm: String,
    pub unconditional: bool,
    pub cache_hits: u64,
    pub cache_misses: u64,
}

impl Provenance {
    pub fn new(algorithm: &str, unconditional: bool, cache_hits: u64, cache_misses: u64) -> Self {
        Provenance {
            algorithm: algorithm.to_string(),
            unconditional,
            cache_hits,
            cache_misses,
        }
    }
}

/// Everything one invocation produced. The deterministic part (everything
/// except timing and worker count) is the payload that golden files and the
/// determinism checks compare byte for byte.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub params: Value,
    pub result: Value,
    pub provenance: Provenance,
    pub timing_ms: f64,
    pub workers: usize,
}

impl RunReport {
    /// Canonical deterministic payload: command, params, result, provenance.
    pub fn payload_json(&self) -> String {
        let v = serde_json::json!({
            "command": self.command,
            "params": self.params,
            "result": self.result,
            "provenance": self.provenance,
        });
        serde_json::to_string_pretty(&v).expect("payload serializes")
    }

    /// Full report including timing and worker count.
    pub fn full_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
