use std::fs;
use std::time::Instant;

use prismkit::Error;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const SCHEMA: &str = "prismkit.report.v1";

/// Process exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Pass = 0,
    CheckFailed = 1,
    InputError = 2,
    Exhausted = 3,
}

pub fn classify(e: &Error) -> Exit {
    use Error::*;
    match e {
        InvalidSpec(_) | SpecMismatch | ShapeMismatch(_) | IndexOutOfRange { .. } | Parse(_) | UnsupportedLevel(_)
        | NonzeroConstantTerm | ZetaReducible(_) => Exit::InputError,
        PrecisionExhausted(_) | DegreeOverflow(_) | TruncationLoss(_) | DivisionFailure(_) | DerivativePrecisionLoss => {
            Exit::Exhausted
        }
        _ => Exit::CheckFailed,
    }
}

#[derive(Serialize)]
pub struct InputHash {
    pub path: String,
    pub sha256: String,
}

#[derive(Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub tool_version: &'static str,
    pub command: Vec<String>,
    pub inputs: Vec<InputHash>,
    pub checks: Vec<CheckOutcome>,
    pub result: Value,
    pub passed: bool,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub elapsed_ms: u128,
    #[serde(skip)]
    started: Option<Instant>,
    #[serde(skip)]
    exhausted: bool,
}

impl Report {
    pub fn new(command: Vec<String>) -> Self {
        Report {
            schema: SCHEMA,
            tool_version: env!("CARGO_PKG_VERSION"),
            command,
            inputs: Vec::new(),
            checks: Vec::new(),
            result: Value::Null,
            passed: false,
            exit_code: 0,
            error: None,
            elapsed_ms: 0,
            started: Some(Instant::now()),
            exhausted: false,
        }
    }

    /// Reads a JSON input, hashing its bytes. Errors carry the path and,
    /// for syntax errors, line and column.
    pub fn read_json(&mut self, path: &str) -> Result<Value, Error> {
        let bytes = fs::read(path).map_err(|e| Error::Parse(format!("{path}: {e}")))?;
        let digest = Sha256::digest(&bytes);
        self.inputs.push(InputHash {
            path: path.to_string(),
            sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
        });
        serde_json::from_slice(&bytes)
            .map_err(|e| {
                let msg = e.to_string();
                let msg = msg.split(" at line ").next().unwrap_or(&msg).to_string();
                Error::Parse(format!("{path}:{}:{}: {msg}", e.line(), e.column()))
            })
    }

    pub fn pass(&mut self, name: &str, detail: impl Into<String>) {
        self.checks.push(CheckOutcome { name: name.into(), passed: true, detail: detail.into() });
    }

    pub fn fail(&mut self, name: &str, detail: impl Into<String>) {
        self.checks.push(CheckOutcome { name: name.into(), passed: false, detail: detail.into() });
    }

    /// Budget ran out before a verdict was reached.
    pub fn exhausted(&mut self, name: &str, detail: impl Into<String>) {
        self.fail(name, detail);
        self.exhausted = true;
    }

    /// Records a check. Mathematical failures are recorded and the run
    /// continues; input and budget errors abort it.
    pub fn record(&mut self, name: &str, r: Result<String, Error>) -> Result<bool, Error> {
        match r {
            Ok(detail) => {
                self.pass(name, detail);
                Ok(true)
            }
            Err(e) if classify(&e) == Exit::CheckFailed => {
                self.fail(name, e.to_string());
                Ok(false)
            }
            Err(e) => Err(e),
        }
    }

    pub fn finish(mut self, outcome: Result<(), Error>) -> (Self, Exit) {
        let exit = match outcome {
            Err(e) => {
                let code = classify(&e);
                self.error = Some(e.to_string());
                code
            }
            Ok(()) if self.checks.iter().any(|c| !c.passed) && !self.exhausted => Exit::CheckFailed,
            Ok(()) if self.exhausted => Exit::Exhausted,
            Ok(()) => Exit::Pass,
        };
        self.passed = exit == Exit::Pass;
        self.exit_code = exit as i32;
        self.elapsed_ms = self.started.map_or(0, |s| s.elapsed().as_millis());
        (self, exit)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!("{tag} {}: {}\n", c.name, c.detail));
        }
        if !self.result.is_null() {
            out.push_str(&serde_json::to_string_pretty(&self.result).unwrap_or_default());
            out.push('\n');
        }
        out.push_str(&format!("{} (exit {})\n", if self.passed { "ok" } else { "not ok" }, self.exit_code));
        out
    }
}
