use std::collections::BTreeMap;
use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, Result};
use crate::inputs::Inputs;

pub const SCHEMA_VERSION: u32 = 1;
pub const ARTIFACT_VERSION: &str = concat!("funcineq-", env!("CARGO_PKG_VERSION"));

/// Verdict attached to every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    /// Short machine-readable status, e.g. `positive`, `pass`, `fail`.
    pub status: String,
    /// `None` for purely informational results.
    pub passed: Option<bool>,
    pub exit_code: i32,
    /// Main scalar of the result (sweep summaries use it).
    pub headline: Option<f64>,
    pub notes: Vec<String>,
}

impl Certificate {
    pub fn info(status: &str, headline: Option<f64>) -> Self {
        Certificate { status: status.into(), passed: None, exit_code: 0, headline, notes: Vec::new() }
    }

    pub fn verdict(pass: bool, headline: Option<f64>) -> Self {
        Certificate {
            status: if pass { "pass" } else { "fail" }.into(),
            passed: Some(pass),
            exit_code: if pass { 0 } else { 1 },
            headline,
            notes: Vec::new(),
        }
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}

/// What a verb computes, before timing and bookkeeping are attached.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub result: Value,
    pub certificate: Certificate,
    pub tolerances: BTreeMap<String, f64>,
    pub fingerprints: BTreeMap<String, String>,
}

/// Keys serialize in declaration order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: Value,
    pub inputs: Value,
    pub result: Value,
    pub certificate: Certificate,
    pub tolerances: BTreeMap<String, f64>,
    pub runtime_ms: u64,
    pub artifact_version: String,
    pub fingerprints: BTreeMap<String, String>,
}

impl Report {
    pub(crate) fn assemble(command: Value, inputs: &Inputs, outcome: Outcome, elapsed: Duration) -> Self {
        let mut fingerprints = outcome.fingerprints;
        fingerprints.insert("inputs".into(), inputs.fingerprint());
        Report {
            schema_version: SCHEMA_VERSION,
            command,
            inputs: serde_json::to_value(&inputs.values).expect("plain JSON"),
            result: outcome.result,
            certificate: outcome.certificate,
            tolerances: outcome.tolerances,
            runtime_ms: elapsed.as_millis() as u64,
            artifact_version: ARTIFACT_VERSION.into(),
            fingerprints,
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.certificate.exit_code
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports are plain JSON");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Everything except `runtime_ms`, serialized.
    pub fn payload(&self) -> String {
        Report { runtime_ms: 0, ..self.clone() }.to_json()
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| CliError::io(path, e))
    }
}
