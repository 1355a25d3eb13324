//! Batch front end: problem files in, JSON result documents out.

pub mod commands;
pub mod problem;

use cartan_spectra::Tolerance;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub use commands::{cmd_cartan, cmd_fuzz, cmd_spectrum, cmd_validate, cmd_verify, Theorem};
pub use problem::{Problem, ProblemFile};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{message}")]
    Input { message: String, details: Option<Value> },
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError::Input { message: message.into(), details: None }
    }

    pub fn rejected(message: impl Into<String>, details: Value) -> Self {
        CliError::Input { message: message.into(), details: Some(details) }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input { .. } => 1,
            CliError::Numerical(_) => 2,
        }
    }

    /// Machine-readable form written to standard error.
    pub fn to_json(&self) -> Value {
        match self {
            CliError::Input { message, details } => {
                json!({ "error": { "kind": "invalid_input", "exit_code": 1, "message": message, "details": details } })
            }
            CliError::Numerical(message) => {
                json!({ "error": { "kind": "numerical_failure", "exit_code": 2, "message": message } })
            }
        }
    }
}

impl From<cartan_spectra::Error> for CliError {
    fn from(e: cartan_spectra::Error) -> Self {
        match e {
            cartan_spectra::Error::Input(m) => CliError::input(m),
            cartan_spectra::Error::Numerical(m) => CliError::Numerical(m),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub version: String,
    pub input_digest: Option<String>,
    pub command: String,
    pub parameters: Value,
    pub results: Value,
    pub tolerance: Tolerance,
    pub seed: Option<u64>,
}

impl ResultDocument {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }
}

/// A finished command: the document for stdout and the exit code.
/// Codes other than 0 come with an error object for stderr.
#[derive(Debug)]
pub struct Outcome {
    pub document: ResultDocument,
    pub error: Option<CliError>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        self.error.as_ref().map_or(0, CliError::exit_code)
    }
}

pub fn read_problem(path: &std::path::Path) -> Result<ProblemFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    ProblemFile::parse(&text)
}
