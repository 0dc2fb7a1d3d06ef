use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("session `{0}` not found")]
    SessionNotFound(String),
    #[error("frame {0} not found")]
    FrameNotFound(usize),
    #[error("no route for {0}")]
    RouteNotFound(String),
    #[error("{0}")]
    InvalidRequest(String),
    #[error("{0}")]
    InvalidState(String),
    #[error("incomplete frames: {}", list(.0))]
    IncompleteFrames(Vec<usize>),
    #[error("If-Match header with the session version is required")]
    VersionRequired,
    #[error("session is at version {actual}, request was based on {expected}")]
    VersionConflict { expected: u64, actual: u64 },
    #[error("{0}")]
    Import(String),
    #[error(transparent)]
    Engine(#[from] goalie_core::Error),
    #[error("storage failure: {0}")]
    Storage(String),
}

fn list(frames: &[usize]) -> String {
    frames.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(", ")
}

impl ServiceError {
    pub fn invalid(msg: impl Into<String>) -> ServiceError {
        ServiceError::InvalidRequest(msg.into())
    }

    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::SessionNotFound(_) | ServiceError::FrameNotFound(_) | ServiceError::RouteNotFound(_) => {
                "not_found"
            }
            ServiceError::InvalidRequest(_) => "invalid_request",
            ServiceError::InvalidState(_) => "invalid_state",
            ServiceError::IncompleteFrames(_) => "incomplete_frames",
            ServiceError::VersionRequired => "version_required",
            ServiceError::VersionConflict { .. } => "version_conflict",
            ServiceError::Import(_) => "import_failed",
            ServiceError::Engine(_) => "correction_failed",
            ServiceError::Storage(_) => "storage_error",
        }
    }

    pub fn status(&self) -> StatusCode {
        match self {
            ServiceError::SessionNotFound(_) | ServiceError::FrameNotFound(_) | ServiceError::RouteNotFound(_) => {
                StatusCode::NOT_FOUND
            }
            ServiceError::InvalidRequest(_) | ServiceError::Import(_) => StatusCode::BAD_REQUEST,
            ServiceError::InvalidState(_) | ServiceError::IncompleteFrames(_) | ServiceError::VersionConflict { .. } => {
                StatusCode::CONFLICT
            }
            ServiceError::VersionRequired => StatusCode::PRECONDITION_REQUIRED,
            ServiceError::Engine(_) => StatusCode::UNPROCESSABLE_ENTITY,
            ServiceError::Storage(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }

    fn details(&self) -> Value {
        match self {
            ServiceError::IncompleteFrames(f) => json!({ "frames": f }),
            ServiceError::VersionConflict { expected, actual } => json!({ "expected": expected, "actual": actual }),
            ServiceError::FrameNotFound(f) => json!({ "frame": f }),
            ServiceError::SessionNotFound(id) => json!({ "session_id": id }),
            _ => json!({}),
        }
    }
}

impl From<std::io::Error> for ServiceError {
    fn from(e: std::io::Error) -> Self {
        ServiceError::Storage(e.to_string())
    }
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let body = json!({
            "error": {
                "code": self.code(),
                "message": self.to_string(),
                "details": self.details(),
            }
        });
        (self.status(), Json(body)).into_response()
    }
}
