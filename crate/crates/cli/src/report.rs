use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

/// Numeric result with the tolerance it was computed under.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Entry {
    pub value: f64,
    pub tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    /// SHA-256 of every input file, in argument order.
    pub inputs: Vec<String>,
    pub results: BTreeMap<String, Entry>,
    pub diagnostics: BTreeMap<String, Value>,
    pub seed: u64,
}

impl Report {
    pub fn new(command: &str, inputs: Vec<String>, seed: u64) -> Self {
        Self {
            command: command.to_string(),
            inputs,
            results: BTreeMap::new(),
            diagnostics: BTreeMap::new(),
            seed,
        }
    }

    pub fn result(&mut self, key: &str, value: f64, tol: f64) {
        // maps -0.0 to 0.0
        self.results.insert(key.to_string(), Entry { value: value + 0.0, tol });
    }

    pub fn diag(&mut self, key: &str, value: impl Into<Value>) {
        self.diagnostics.insert(key.to_string(), value.into());
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "command: {}", self.command);
        for d in &self.inputs {
            let _ = writeln!(s, "input: sha256:{d}");
        }
        let _ = writeln!(s, "seed: {}", self.seed);
        for (k, e) in &self.results {
            let _ = writeln!(s, "{k} = {} (tol {:e})", e.value, e.tol);
        }
        for (k, v) in &self.diagnostics {
            let _ = writeln!(s, "# {k}: {v}");
        }
        s
    }
}
