//! Machine-readable report emitted by the command line front end.
//!
//! Result fields sit at the top level next to `subcommand`, `inputs` and
//! `provenance`, so a report reads as `{"subcommand":"solv3",…,"verdict":true}`.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Value>,
}

impl Default for Provenance {
    fn default() -> Self {
        Self { version: env!("CARGO_PKG_VERSION").to_string(), seed: None, schedule: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub subcommand: String,
    pub inputs: Value,
    #[serde(flatten)]
    pub result: Map<String, Value>,
    pub provenance: Provenance,
}

impl Report {
    pub fn new(subcommand: &str, inputs: Value) -> Self {
        Self { subcommand: subcommand.to_string(), inputs, result: Map::new(), provenance: Provenance::default() }
    }

    /// Adds a result field. Keys that collide with the envelope are rejected.
    pub fn with(mut self, key: &str, value: impl Serialize) -> Self {
        assert!(!matches!(key, "subcommand" | "inputs" | "provenance"), "reserved report key {key}");
        let v = serde_json::to_value(value).expect("report values serialize");
        self.result.insert(key.to_string(), v);
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.provenance.seed = Some(seed);
        self
    }

    pub fn schedule(mut self, schedule: Value) -> Self {
        self.provenance.schedule = Some(schedule);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn roundtrip_and_flat_layout() {
        let r = Report::new("profinite", json!({"haar": [6, 4]})).with("measure", "1/6").seed(3);
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["measure"], "1/6");
        assert_eq!(v["provenance"]["seed"], 3);
        let back: Report = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }
}
