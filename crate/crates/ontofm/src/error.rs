use std::fmt;

use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use ontofm_core::{FsError, GraphError, OntologyError, SearchError};
use serde::Serialize;

/// Machine-readable error codes. The set is closed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    ParseError,
    ValidationError,
    UnknownInstance,
    UnknownConcept,
    InvalidConstraint,
    NotFound,
    OutsideRoot,
}

impl ErrorCode {
    pub const ALL: [ErrorCode; 7] = [
        ErrorCode::ParseError,
        ErrorCode::ValidationError,
        ErrorCode::UnknownInstance,
        ErrorCode::UnknownConcept,
        ErrorCode::InvalidConstraint,
        ErrorCode::NotFound,
        ErrorCode::OutsideRoot,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCode::ParseError => "parse_error",
            ErrorCode::ValidationError => "validation_error",
            ErrorCode::UnknownInstance => "unknown_instance",
            ErrorCode::UnknownConcept => "unknown_concept",
            ErrorCode::InvalidConstraint => "invalid_constraint",
            ErrorCode::NotFound => "not_found",
            ErrorCode::OutsideRoot => "outside_root",
        }
    }

    pub fn status(self) -> StatusCode {
        match self {
            ErrorCode::ParseError => StatusCode::BAD_REQUEST,
            ErrorCode::ValidationError | ErrorCode::InvalidConstraint => {
                StatusCode::UNPROCESSABLE_ENTITY
            }
            ErrorCode::UnknownInstance | ErrorCode::UnknownConcept | ErrorCode::NotFound => {
                StatusCode::NOT_FOUND
            }
            ErrorCode::OutsideRoot => StatusCode::FORBIDDEN,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ApiError {
    pub code: ErrorCode,
    pub message: String,
    /// Offending id or path.
    pub detail: String,
}

impl ApiError {
    pub fn new(code: ErrorCode, message: impl Into<String>, detail: impl Into<String>) -> Self {
        ApiError {
            code,
            message: message.into(),
            detail: detail.into(),
        }
    }

    pub fn parse(message: impl Into<String>) -> Self {
        ApiError::new(ErrorCode::ParseError, message, "")
    }

    pub fn validation(message: impl Into<String>, detail: impl Into<String>) -> Self {
        ApiError::new(ErrorCode::ValidationError, message, detail)
    }

    pub fn body(&self) -> serde_json::Value {
        serde_json::json!({ "error": self })
    }
}

impl fmt::Display for ApiError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code.as_str(), self.message)?;
        if !self.detail.is_empty() && !self.message.contains(&self.detail) {
            write!(f, " ({})", self.detail)?;
        }
        Ok(())
    }
}

impl std::error::Error for ApiError {}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.code.status(), Json(self.body())).into_response()
    }
}

impl From<OntologyError> for ApiError {
    fn from(e: OntologyError) -> Self {
        let message = e.to_string();
        match e {
            OntologyError::Parse { line, column, .. } => {
                ApiError::new(ErrorCode::ParseError, message, format!("{line}:{column}"))
            }
            OntologyError::Validation { id, .. } => {
                ApiError::new(ErrorCode::ValidationError, message, id)
            }
            OntologyError::UnknownConcept(id) => {
                ApiError::new(ErrorCode::UnknownConcept, message, id)
            }
            OntologyError::UnknownInstance(id) => {
                ApiError::new(ErrorCode::UnknownInstance, message, id)
            }
        }
    }
}

impl From<SearchError> for ApiError {
    fn from(e: SearchError) -> Self {
        let message = e.to_string();
        match e {
            SearchError::UnknownInstance(id) => {
                ApiError::new(ErrorCode::UnknownInstance, message, id)
            }
            SearchError::UnknownConcept(id) => {
                ApiError::new(ErrorCode::UnknownConcept, message, id)
            }
            SearchError::InvalidConstraint(_) => {
                ApiError::new(ErrorCode::InvalidConstraint, message, "")
            }
            SearchError::InvalidQuery(_) => ApiError::new(ErrorCode::ValidationError, message, ""),
        }
    }
}

impl From<GraphError> for ApiError {
    fn from(e: GraphError) -> Self {
        let message = e.to_string();
        match e {
            GraphError::UnknownInstance(id) => {
                ApiError::new(ErrorCode::UnknownInstance, message, id)
            }
            GraphError::NodeNotVisible(id) => ApiError::new(ErrorCode::NotFound, message, id),
            GraphError::InvalidState(_) => ApiError::new(ErrorCode::ValidationError, message, ""),
        }
    }
}

impl From<FsError> for ApiError {
    fn from(e: FsError) -> Self {
        let message = e.to_string();
        match e {
            FsError::NotFound(p) => ApiError::new(ErrorCode::NotFound, message, p),
            FsError::OutsideRoot(p) => ApiError::new(ErrorCode::OutsideRoot, message, p),
            FsError::Io { path, .. } => ApiError::new(ErrorCode::NotFound, message, path),
        }
    }
}
