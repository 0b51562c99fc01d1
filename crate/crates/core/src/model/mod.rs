//! Assessment data model, document parsing and validation.
//!
//! A model document is a single JSON object (schema version `"1"`). Parsing
//! happens in two stages: [`parse_document`] checks syntax and field types,
//! [`validate_model`] checks cross references and invariants. [`parse_model`]
//! runs both and fails on any error-level diagnostic.

mod derive;
mod types;
mod validate;

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::error::Category;
use thiserror::Error;

pub use derive::{derive_matrices, dmap_from_matrices};
pub use types::*;
pub use validate::validate_model;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticCode {
    Syntax,
    Schema,
    Unreadable,
    SchemaVersion,
    InvalidId,
    DuplicateId,
    DanglingReference,
    OutOfRange,
    Invariant,
    NoAlternatives,
    WeightSum,
}

/// One validation finding, addressed by a dotted path into the document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: DiagnosticCode,
    pub path: String,
    pub message: String,
}

impl Diagnostic {
    pub fn error(code: DiagnosticCode, path: impl Into<String>, message: impl Into<String>) -> Self {
        Self { severity: Severity::Error, code, path: path.into(), message: message.into() }
    }

    pub fn warning(code: DiagnosticCode, path: impl Into<String>, message: impl Into<String>) -> Self {
        Self { severity: Severity::Warning, code, path: path.into(), message: message.into() }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.severity {
            Severity::Warning => "WARNING",
            Severity::Error => "ERROR",
        };
        write!(f, "{level} {}: {}", self.path, self.message)
    }
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("schema violation at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("model is invalid: {}", first_error(.0))]
    Invalid(Vec<Diagnostic>),
    #[error("quality attribute '{0}' is not defined in the model")]
    UnknownQa(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn first_error(diagnostics: &[Diagnostic]) -> String {
    let errors = diagnostics.iter().filter(|d| d.is_error()).count();
    match diagnostics.iter().find(|d| d.is_error()) {
        Some(d) if errors > 1 => format!("{d} (and {} more)", errors - 1),
        Some(d) => d.to_string(),
        None => "no errors".to_string(),
    }
}

impl ModelError {
    /// Diagnostics for reporting, including a synthesized one for syntax and
    /// schema failures.
    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        match self {
            ModelError::Invalid(diags) => diags.clone(),
            ModelError::Syntax { line, column, message } => vec![Diagnostic::error(
                DiagnosticCode::Syntax,
                format!("line {line}, column {column}"),
                message.clone(),
            )],
            ModelError::Schema { path, message } => {
                vec![Diagnostic::error(DiagnosticCode::Schema, path.clone(), message.clone())]
            }
            ModelError::UnknownQa(id) => {
                vec![Diagnostic::error(DiagnosticCode::DanglingReference, id.clone(), self.to_string())]
            }
            ModelError::Io { path, .. } => {
                vec![Diagnostic::error(DiagnosticCode::Unreadable, path.clone(), self.to_string())]
            }
        }
    }
}

/// Parses a document without cross-reference validation.
pub fn parse_document(text: &str) -> Result<AssessmentModel, ModelError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let model: AssessmentModel = serde_path_to_error::deserialize(&mut de).map_err(|err| {
        let path = err.path().to_string();
        let inner = err.into_inner();
        match inner.classify() {
            Category::Syntax | Category::Eof | Category::Io => ModelError::Syntax {
                line: inner.line(),
                column: inner.column(),
                message: strip_position(&inner.to_string()),
            },
            Category::Data => ModelError::Schema { path, message: strip_position(&inner.to_string()) },
        }
    })?;
    de.end().map_err(|err| ModelError::Syntax {
        line: err.line(),
        column: err.column(),
        message: strip_position(&err.to_string()),
    })?;
    Ok(model)
}

fn strip_position(message: &str) -> String {
    match message.rfind(" at line ") {
        Some(idx) => message[..idx].to_string(),
        None => message.to_string(),
    }
}

/// Parses and validates a document. Warnings are dropped; use
/// [`validate_model`] to see them.
pub fn parse_model(text: &str) -> Result<AssessmentModel, ModelError> {
    let model = parse_document(text)?;
    let diagnostics = validate_model(&model);
    if diagnostics.iter().any(Diagnostic::is_error) {
        return Err(ModelError::Invalid(diagnostics));
    }
    Ok(model)
}

pub fn load_model(path: impl AsRef<Path>) -> Result<AssessmentModel, ModelError> {
    parse_model(&read_document(path)?)
}

pub fn read_document(path: impl AsRef<Path>) -> Result<String, ModelError> {
    let path = path.as_ref();
    std::fs::read_to_string(path)
        .map_err(|source| ModelError::Io { path: path.display().to_string(), source })
}

pub fn to_document(model: &AssessmentModel) -> String {
    serde_json::to_string_pretty(model).expect("model serialization is infallible")
}

impl Alternative {
    /// Matrices used for scoring: the explicit ones when present, otherwise
    /// derived from the decision map.
    pub fn effective_matrices(&self, model: &AssessmentModel) -> Result<Vec<EffectMatrix>, ModelError> {
        match (&self.matrices, &self.dmap) {
            (Some(matrices), _) => {
                let mut matrices = matrices.clone();
                matrices.sort_by_key(EffectMatrix::pair);
                Ok(matrices)
            }
            (None, Some(dmap)) => derive_matrices(dmap, model),
            (None, None) => Ok(Vec::new()),
        }
    }

    /// Decision map describing the same effects as [`Self::effective_matrices`].
    pub fn effective_dmap(&self, model: &AssessmentModel) -> Result<DecisionMap, ModelError> {
        match (&self.matrices, &self.dmap) {
            (None, Some(dmap)) => Ok(dmap.clone()),
            (Some(matrices), _) => Ok(dmap_from_matrices(matrices, model)),
            (None, None) => Ok(DecisionMap::default()),
        }
    }
}
