use axum::extract::rejection::JsonRejection;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::{Deserialize, Serialize};

/// Body of every error response.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
}

#[derive(Debug, thiserror::Error)]
pub enum ApiError {
    #[error("unknown sample `{0}`")]
    UnknownSample(String),
    #[error("unknown split `{0}`")]
    UnknownSplit(String),
    #[error("unknown session `{0}`")]
    UnknownSession(String),
    #[error("session `{0}` has no samples left")]
    SessionComplete(String),
    #[error("{0}")]
    MalformedAnswer(String),
    #[error("{0}")]
    MalformedRequest(String),
    #[error("{0}")]
    Forbidden(&'static str),
    #[error("{0}")]
    Internal(String),
}

impl ApiError {
    pub fn code(&self) -> &'static str {
        match self {
            ApiError::UnknownSample(_) => "unknown_sample",
            ApiError::UnknownSplit(_) => "unknown_split",
            ApiError::UnknownSession(_) => "unknown_session",
            ApiError::SessionComplete(_) => "session_complete",
            ApiError::MalformedAnswer(_) => "malformed_answer",
            ApiError::MalformedRequest(_) => "malformed_request",
            ApiError::Forbidden(_) => "forbidden",
            ApiError::Internal(_) => "internal",
        }
    }

    pub fn status(&self) -> StatusCode {
        match self {
            ApiError::UnknownSample(_) | ApiError::UnknownSplit(_) | ApiError::UnknownSession(_) => {
                StatusCode::NOT_FOUND
            }
            ApiError::SessionComplete(_) => StatusCode::CONFLICT,
            ApiError::MalformedAnswer(_) | ApiError::MalformedRequest(_) => StatusCode::BAD_REQUEST,
            ApiError::Forbidden(_) => StatusCode::FORBIDDEN,
            ApiError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        if let ApiError::Internal(message) = &self {
            tracing::error!(%message, "request failed");
        }
        let body = ErrorBody { code: self.code().to_string(), message: self.to_string() };
        (self.status(), Json(body)).into_response()
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        ApiError::MalformedRequest(r.body_text())
    }
}

impl From<std::io::Error> for ApiError {
    fn from(e: std::io::Error) -> Self {
        ApiError::Internal(e.to_string())
    }
}
