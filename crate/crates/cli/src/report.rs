use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Summary of one command. Field order is fixed and every map is a
/// `BTreeMap`, so identical runs serialize byte-identically as long as
/// timings are off.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs_digest: String,
    pub fidelities: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bond_profile: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decoupled: Option<bool>,
    pub details: BTreeMap<String, Value>,
    pub outputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<String, f64>>,
}

impl RunReport {
    pub fn new(command: &str, digest: InputDigest) -> RunReport {
        RunReport {
            command: command.to_string(),
            inputs_digest: digest.finish(),
            fidelities: BTreeMap::new(),
            bond_profile: None,
            decoupled: None,
            details: BTreeMap::new(),
            outputs: Vec::new(),
            timings_ms: None,
        }
    }

    /// Stored clamped to `[0, 1]`; rounding can push a fidelity just past 1.
    pub fn fidelity(&mut self, name: &str, value: f64) {
        self.fidelities.insert(name.to_string(), value.clamp(0.0, 1.0));
    }

    pub fn detail(&mut self, name: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("report detail serializes");
        self.details.insert(name.to_string(), v);
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// SHA-256 over the command arguments and input file contents, each entry
/// length-prefixed.
pub struct InputDigest(Sha256);

impl InputDigest {
    pub fn new(command: &str) -> InputDigest {
        let mut d = InputDigest(Sha256::new());
        d.add("command", command.as_bytes());
        d
    }

    pub fn add(&mut self, label: &str, bytes: &[u8]) {
        for part in [label.as_bytes(), bytes] {
            self.0.update((part.len() as u64).to_le_bytes());
            self.0.update(part);
        }
    }

    pub fn arg(&mut self, label: &str, value: impl std::fmt::Debug) {
        self.add(label, format!("{value:?}").as_bytes());
    }

    fn finish(self) -> String {
        hex::encode(self.0.finalize())
    }
}

/// Wall-clock stopwatch; only reported with `--timings`.
pub struct Timings {
    enabled: bool,
    marks: BTreeMap<String, f64>,
}

impl Timings {
    pub fn new(enabled: bool) -> Timings {
        Timings { enabled, marks: BTreeMap::new() }
    }

    pub fn time<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.marks.insert(name.to_string(), start.elapsed().as_secs_f64() * 1e3);
        out
    }

    pub fn attach(self, report: &mut RunReport) {
        if self.enabled {
            report.timings_ms = Some(self.marks);
        }
    }
}
