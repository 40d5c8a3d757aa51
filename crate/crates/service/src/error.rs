use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use boardforge::engine::Move;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ApiError {
    #[error("no session {0}")]
    UnknownSession(u64),
    #[error("unknown game '{0}'")]
    UnknownGame(String),
    #[error("malformed request: {0}")]
    BadRequest(String),
    #[error("{reason}")]
    Rejected {
        reason: String,
        alternatives: Vec<Move>,
    },
    #[error("{0}")]
    Conflict(String),
    #[error("internal error: {0}")]
    Internal(String),
}

#[derive(Serialize)]
struct Body<'a> {
    error: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    alternatives: Option<&'a [Move]>,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = match &self {
            ApiError::UnknownSession(_) => StatusCode::NOT_FOUND,
            ApiError::UnknownGame(_) | ApiError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ApiError::Rejected { .. } | ApiError::Conflict(_) => StatusCode::CONFLICT,
            ApiError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        let alternatives = match &self {
            ApiError::Rejected { alternatives, .. } => Some(alternatives.as_slice()),
            _ => None,
        };
        (
            status,
            Json(Body {
                error: self.to_string(),
                alternatives,
            }),
        )
            .into_response()
    }
}

/// Errors raised while starting the service.
#[derive(Debug, Error)]
pub enum StartupError {
    #[error("ratings store {path}: {source}")]
    Ratings {
        path: String,
        source: std::io::Error,
    },
    #[error("ratings store {path} line {line}: {reason}")]
    RatingsFormat {
        path: String,
        line: usize,
        reason: String,
    },
    #[error("archive {path}: {reason}")]
    Archive { path: String, reason: String },
}
