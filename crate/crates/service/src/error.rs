//! Service errors with stable machine-readable codes.

use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    InvalidRequest,
    NotFound,
    StaleToken,
    SessionFinished,
    NoPendingDuel,
    AssumptionViolated,
    InconsistentFeedback,
    Persistence,
    Internal,
}

impl ErrorCode {
    pub fn status(self) -> StatusCode {
        match self {
            ErrorCode::InvalidRequest => StatusCode::BAD_REQUEST,
            ErrorCode::NotFound => StatusCode::NOT_FOUND,
            ErrorCode::StaleToken | ErrorCode::SessionFinished | ErrorCode::NoPendingDuel => {
                StatusCode::CONFLICT
            }
            ErrorCode::AssumptionViolated | ErrorCode::InconsistentFeedback => {
                StatusCode::UNPROCESSABLE_ENTITY
            }
            ErrorCode::Persistence | ErrorCode::Internal => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }
}

#[derive(Debug, Clone, thiserror::Error)]
#[error("{code:?}: {message}")]
pub struct ServiceError {
    pub code: ErrorCode,
    pub message: String,
}

pub type Result<T, E = ServiceError> = std::result::Result<T, E>;

impl ServiceError {
    pub fn new(code: ErrorCode, message: impl Into<String>) -> Self {
        ServiceError { code, message: message.into() }
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        Self::new(ErrorCode::InvalidRequest, message)
    }

    pub fn not_found(id: &str) -> Self {
        Self::new(ErrorCode::NotFound, format!("no session with id {id}"))
    }
}

impl From<crashpbo::Error> for ServiceError {
    fn from(e: crashpbo::Error) -> Self {
        use crashpbo::Error as E;
        let code = match &e {
            E::Input(_) | E::DimensionMismatch { .. } | E::SchemaVersion { .. } | E::Json(_) => {
                ErrorCode::InvalidRequest
            }
            E::NoFeasiblePoint(_) => ErrorCode::AssumptionViolated,
            E::Consistency(_) => ErrorCode::InconsistentFeedback,
            E::State(_) => ErrorCode::NoPendingDuel,
            E::Io(_) => ErrorCode::Persistence,
            _ => ErrorCode::Internal,
        };
        ServiceError::new(code, e.to_string())
    }
}

#[derive(Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: ErrorDetail,
}

#[derive(Serialize, Deserialize)]
pub struct ErrorDetail {
    pub code: ErrorCode,
    pub message: String,
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let body = ErrorBody { error: ErrorDetail { code: self.code, message: self.message } };
        (self.code.status(), Json(body)).into_response()
    }
}
