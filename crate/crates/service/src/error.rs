use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::Serialize;
use serde_json::Value;
use siskit_core::analysis::WhatIfError;
use siskit_core::model::ModelError;
use siskit_core::scoring::ScoringError;

/// Error body shared by every endpoint: `{code, message, detail}`.
#[derive(Debug, Clone, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    pub detail: Value,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError { status, code, message: message.into(), detail: Value::Null }
    }

    pub fn with_detail(mut self, detail: Value) -> Self {
        self.detail = detail;
        self
    }

    pub fn session_not_found(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "session_not_found", format!("no session '{id}'"))
    }

    pub fn session_expired(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "session_expired", format!("session '{id}' expired after inactivity"))
    }

    pub fn bad_request(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, code, message)
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(&self)).into_response()
    }
}

impl From<ModelError> for ApiError {
    fn from(err: ModelError) -> Self {
        let diagnostics: Vec<String> = err.diagnostics().iter().map(|d| d.to_string()).collect();
        ApiError::bad_request("invalid_model", err.to_string()).with_detail(serde_json::json!({ "diagnostics": diagnostics }))
    }
}

impl From<ScoringError> for ApiError {
    fn from(err: ScoringError) -> Self {
        match err {
            ScoringError::NoTheoreticalOptimal => {
                ApiError::new(StatusCode::CONFLICT, "no_theoretical_optimal", err.to_string())
            }
            ScoringError::NotOptimal { pair, ref alternative, sis, optimal } => {
                ApiError::new(StatusCode::CONFLICT, "not_optimal", err.to_string()).with_detail(serde_json::json!({
                    "pair": pair.map(|p| p.to_string()),
                    "alternative": alternative,
                    "sis": sis,
                    "theoretical_optimal": optimal,
                }))
            }
            ScoringError::UnknownScenario(_) => ApiError::bad_request("unknown_scenario", err.to_string()),
            ScoringError::Model(inner) => inner.into(),
            other => ApiError::internal(other.to_string()),
        }
    }
}

impl From<WhatIfError> for ApiError {
    fn from(err: WhatIfError) -> Self {
        match err {
            WhatIfError::UnknownAlternative(_) => {
                ApiError::new(StatusCode::NOT_FOUND, "unknown_alternative", err.to_string())
            }
            WhatIfError::UnknownCell(_) => ApiError::new(StatusCode::NOT_FOUND, "unknown_cell", err.to_string()),
            WhatIfError::OptimalReadOnly(_) => {
                ApiError::new(StatusCode::FORBIDDEN, "optimal_readonly", err.to_string())
            }
            WhatIfError::DiagonalCell(_) => ApiError::bad_request("diagonal_cell", err.to_string()),
            WhatIfError::DuplicateOverride(_) => ApiError::bad_request("duplicate_override", err.to_string()),
            WhatIfError::Scoring(inner) => inner.into(),
            WhatIfError::Model(inner) => inner.into(),
        }
    }
}
