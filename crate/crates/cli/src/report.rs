//! The JSON report written by every subcommand.
//!
//! Keys are sorted (serde_json's default map is ordered), rationals are `"num/den"` strings and
//! nothing depends on time or the host, so the same command on the same spec gives the same
//! bytes.

use serde_json::{json, Map, Value};

use crate::models::LoadedModel;

/// `status` is a library verdict (`"VerifiedAtDepth"`, `"evidence-for-simple"`, …), `"hold"`
/// or `"fail"` for identity checks, and `"error"` when the computation itself failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub check: String,
    pub status: String,
}

impl Verdict {
    pub fn new(check: impl Into<String>, status: impl Into<String>) -> Self {
        Verdict { check: check.into(), status: status.into() }
    }

    pub fn holds(check: impl Into<String>, ok: bool) -> Self {
        Verdict::new(check, if ok { "hold" } else { "fail" })
    }

    pub fn is_error(&self) -> bool {
        self.status == "error"
    }
}

/// What one subcommand produced, before the document wrapper.
#[derive(Debug, Clone, Default)]
pub struct Section {
    pub parameters: Map<String, Value>,
    /// Parameter names that took their default value.
    pub defaults: Vec<String>,
    pub results: Value,
    pub verdicts: Vec<Verdict>,
    pub diagram: Option<String>,
}

impl Section {
    pub fn param(&mut self, name: &str, value: Value, defaulted: bool) {
        self.parameters.insert(name.to_string(), value);
        if defaulted {
            self.defaults.push(name.to_string());
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReportDocument {
    pub command: Vec<String>,
    pub model: Value,
    pub section: Section,
}

impl ReportDocument {
    pub fn new(command: Vec<String>, model: &LoadedModel, section: Section) -> Self {
        let model = json!({
            "name": model.handle.name(),
            "kind": model.handle.kind().to_string(),
            "source": model.source,
            "fingerprint": model.fingerprint,
        });
        ReportDocument { command, model, section }
    }

    pub fn has_error(&self) -> bool {
        self.section.verdicts.iter().any(Verdict::is_error)
    }

    pub fn to_value(&self) -> Value {
        let mut defaults = self.section.defaults.clone();
        defaults.sort();
        defaults.dedup();
        let verdicts: Vec<Value> = self
            .section
            .verdicts
            .iter()
            .map(|v| json!({ "check": v.check, "status": v.status }))
            .collect();
        json!({
            "command": self.command.join(" "),
            "model": self.model,
            "parameters": self.section.parameters,
            "defaults": defaults,
            "results": self.section.results,
            "verdicts": verdicts,
        })
    }

    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("report is valid JSON");
        s.push('\n');
        s
    }
}
