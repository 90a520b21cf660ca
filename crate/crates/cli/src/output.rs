use crate::Format;
use serde::Serialize;
use serde_json::{json, Value};
use std::io::Write;

/// Writes either human-readable lines or JSON records to stdout.
pub struct Output {
    format: Format,
}

impl Output {
    pub fn new(format: Format) -> Self {
        Output { format }
    }

    pub fn records(&self) -> bool {
        self.format == Format::Records
    }

    /// A line of the human format; dropped in record mode.
    pub fn line(&mut self, text: impl AsRef<str>) {
        if !self.records() {
            writeln!(std::io::stdout().lock(), "{}", text.as_ref()).expect("stdout writable");
        }
    }

    /// A record; dropped in human mode.
    pub fn record(&mut self, value: Value) {
        if self.records() {
            writeln!(std::io::stdout().lock(), "{value}").expect("stdout writable");
        }
    }
}

/// Identifies a run; the same manifest reproduces the same output.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Value,
    pub seed: u64,
    pub tool_version: String,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, parameters: Value, seed: u64) -> Self {
        RunManifest {
            command: command.to_string(),
            parameters,
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            outputs: Vec::new(),
        }
    }

    pub fn to_record(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("manifest serializes");
        v["record"] = json!("manifest");
        v
    }
}

#[derive(Debug, Serialize)]
struct CheckResult {
    name: String,
    passed: bool,
    detail: String,
}

/// Expected-value checks collected during a run.
#[derive(Debug, Default)]
pub struct Checks {
    results: Vec<CheckResult>,
}

impl Checks {
    pub fn expect(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.results.push(CheckResult { name: name.into(), passed, detail: detail.into() });
    }

    /// Records an equality check, with both values in the detail.
    pub fn expect_eq<T: PartialEq + std::fmt::Display>(&mut self, name: impl Into<String>, got: T, want: T) {
        let detail = format!("got {got}, expected {want}");
        self.expect(name, got == want, detail);
    }

    pub fn failed(&self) -> usize {
        self.results.iter().filter(|r| !r.passed).count()
    }

    pub fn report(&self, out: &mut Output) {
        for r in &self.results {
            let verdict = if r.passed { "PASS" } else { "FAIL" };
            out.line(format!("check {}: {verdict} ({})", r.name, r.detail));
            let mut v = serde_json::to_value(r).expect("check serializes");
            v["record"] = json!("check");
            out.record(v);
        }
        let total = self.results.len();
        out.line(format!("{} of {total} checks passed", total - self.failed()));
        out.record(json!({"record": "check-summary", "passed": total - self.failed(), "total": total}));
    }
}
