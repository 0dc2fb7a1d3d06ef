//! HTTP API under `/api/v1/sessions`. Mutations carry the session version
//! they were based on in `If-Match`; responses carry the new one in `ETag`.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::{FromRequest, Path, Request, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use goalie_core::correct::{correct, CorrectionConfig, CorrectionReport};
use goalie_core::document::SequenceDocument;
use goalie_core::model::denormalize_point;
use goalie_core::optimizer::OptimizerConfig;
use goalie_core::{FrameDims, PixelPoint};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::ServiceError;
use crate::import::{import_session, ImportOptions};
use crate::session::{AnnotationSession, GoalOverrides};
use crate::store::Store;

pub type AppState = Arc<Store>;

/// JSON body whose rejections come back as structured errors.
pub struct JsonBody<T>(pub T);

impl<S: Send + Sync, T: DeserializeOwned> FromRequest<S> for JsonBody<T> {
    type Rejection = ServiceError;

    async fn from_request(req: Request, state: &S) -> Result<Self, Self::Rejection> {
        match Json::<T>::from_request(req, state).await {
            Ok(Json(v)) => Ok(JsonBody(v)),
            Err(e) => Err(ServiceError::invalid(e.body_text())),
        }
    }
}

pub fn router(store: AppState) -> Router {
    let frame = "/api/v1/sessions/{id}/frames/{frame}";
    Router::new()
        .route("/api/v1/sessions", get(list_sessions).post(create_session))
        .route("/api/v1/sessions/{id}", get(get_session))
        .route(&format!("{frame}/image"), get(frame_image))
        .route(&format!("{frame}/candidate"), get(candidate))
        .route(&format!("{frame}/accept"), post(accept))
        .route(&format!("{frame}/reject"), post(reject))
        .route(&format!("{frame}/joints"), post(place_joint).delete(undo_joint))
        .route(&format!("{frame}/ball"), put(set_ball))
        .route("/api/v1/sessions/{id}/overrides", put(set_overrides))
        .route("/api/v1/sessions/{id}/correct", post(run_correction))
        .route("/api/v1/sessions/{id}/export", get(export))
        .fallback(|method: axum::http::Method, uri: axum::http::Uri| async move {
            ServiceError::RouteNotFound(format!("{method} {uri}"))
        })
        .with_state(store)
}

fn if_match(headers: &HeaderMap) -> Result<u64, ServiceError> {
    let raw = headers.get(header::IF_MATCH).ok_or(ServiceError::VersionRequired)?;
    let text = raw.to_str().map_err(|_| ServiceError::invalid("If-Match is not valid text"))?;
    let text = text.trim().trim_start_matches("W/").trim_matches('"');
    text.parse()
        .map_err(|_| ServiceError::invalid(format!("If-Match must be a session version, got `{text}`")))
}

fn parse_frame(frame: &str) -> Result<usize, ServiceError> {
    frame.parse().map_err(|_| ServiceError::invalid(format!("frame index must be an integer, got `{frame}`")))
}

/// Session JSON plus the derived per-frame fields a client needs.
fn session_view(s: &AnnotationSession) -> Value {
    let mut v = serde_json::to_value(s).expect("session serializes");
    if let Some(frames) = v.get_mut("frames").and_then(Value::as_array_mut) {
        for (fv, slot) in frames.iter_mut().zip(&s.frames) {
            fv["next_joint"] = serde_json::to_value(slot.next_joint()).expect("joint serializes");
            fv["complete"] = Value::Bool(slot.is_complete());
        }
    }
    v["incomplete_frames"] = serde_json::to_value(s.incomplete_frames()).expect("list serializes");
    v
}

fn with_version(status: StatusCode, s: &AnnotationSession) -> Response {
    let etag = HeaderValue::from_str(&format!("\"{}\"", s.version)).expect("digits are a valid header");
    (status, [(header::ETAG, etag)], Json(session_view(s))).into_response()
}

async fn list_sessions(State(store): State<AppState>) -> Result<Response, ServiceError> {
    Ok(Json(store.list()?).into_response())
}

#[derive(Debug, Deserialize)]
pub struct CreateSession {
    pub detections_dir: PathBuf,
    pub images_dir: PathBuf,
    pub width: u32,
    pub height: u32,
    #[serde(flatten)]
    pub options: ImportOptions,
}

pub fn new_session_id() -> String {
    uuid::Uuid::new_v4().simple().to_string()
}

async fn create_session(
    State(store): State<AppState>,
    JsonBody(req): JsonBody<CreateSession>,
) -> Result<Response, ServiceError> {
    let dims = FrameDims::new(req.width, req.height)?;
    let plan = import_session(&new_session_id(), &req.detections_dir, &req.images_dir, dims, &req.options)?;
    store.create(&plan.session, &plan.images)?;
    tracing::info!(session = %plan.session.session_id, "session created");
    Ok(with_version(StatusCode::CREATED, &plan.session))
}

async fn get_session(State(store): State<AppState>, Path(id): Path<String>) -> Result<Response, ServiceError> {
    Ok(with_version(StatusCode::OK, &store.load(&id)?))
}

pub fn content_type(path: &std::path::Path) -> &'static str {
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("png") => "image/png",
        Some("jpg" | "jpeg") => "image/jpeg",
        Some("webp") => "image/webp",
        Some("gif") => "image/gif",
        _ => "application/octet-stream",
    }
}

async fn frame_image(
    State(store): State<AppState>,
    Path((id, frame)): Path<(String, String)>,
) -> Result<Response, ServiceError> {
    let path = store.image_path(&id, parse_frame(&frame)?)?;
    let bytes = std::fs::read(&path)?;
    Ok(([(header::CONTENT_TYPE, content_type(&path))], bytes).into_response())
}

#[derive(Debug, Serialize)]
struct CandidateView {
    frame: usize,
    rank: usize,
    of: usize,
    score: f64,
    source_person: usize,
    /// Pixel coordinates over the frame image.
    joints: BTreeMap<&'static str, PixelPoint>,
}

async fn candidate(
    State(store): State<AppState>,
    Path((id, frame)): Path<(String, String)>,
) -> Result<Response, ServiceError> {
    let session = store.load(&id)?;
    let index = parse_frame(&frame)?;
    let slot = session.frame(index)?;
    let c = slot
        .current_candidate()
        .ok_or_else(|| ServiceError::InvalidState(format!("frame {index} has no candidate under review")))?;
    let mut joints = BTreeMap::new();
    for (j, p) in c.skeleton.iter() {
        joints.insert(j.name(), denormalize_point(p, session.dims)?);
    }
    Ok(Json(CandidateView {
        frame: index,
        rank: slot.cursor,
        of: slot.candidates.len(),
        score: c.score,
        source_person: c.source_person,
        joints,
    })
    .into_response())
}

fn mutate(
    store: &Store,
    id: &str,
    headers: &HeaderMap,
    f: impl FnOnce(&mut AnnotationSession) -> Result<(), ServiceError>,
) -> Result<Response, ServiceError> {
    let (session, ()) = store.update(id, if_match(headers)?, f)?;
    Ok(with_version(StatusCode::OK, &session))
}

async fn accept(
    State(store): State<AppState>,
    Path((id, frame)): Path<(String, String)>,
    headers: HeaderMap,
) -> Result<Response, ServiceError> {
    let index = parse_frame(&frame)?;
    mutate(&store, &id, &headers, |s| s.accept(index))
}

async fn reject(
    State(store): State<AppState>,
    Path((id, frame)): Path<(String, String)>,
    headers: HeaderMap,
) -> Result<Response, ServiceError> {
    let index = parse_frame(&frame)?;
    mutate(&store, &id, &headers, |s| s.reject(index))
}

async fn place_joint(
    State(store): State<AppState>,
    Path((id, frame)): Path<(String, String)>,
    headers: HeaderMap,
    JsonBody(at): JsonBody<PixelPoint>,
) -> Result<Response, ServiceError> {
    let index = parse_frame(&frame)?;
    mutate(&store, &id, &headers, |s| s.place_joint(index, at).map(drop))
}

async fn undo_joint(
    State(store): State<AppState>,
    Path((id, frame)): Path<(String, String)>,
    headers: HeaderMap,
) -> Result<Response, ServiceError> {
    let index = parse_frame(&frame)?;
    mutate(&store, &id, &headers, |s| s.undo_joint(index).map(drop))
}

async fn set_ball(
    State(store): State<AppState>,
    Path((id, frame)): Path<(String, String)>,
    headers: HeaderMap,
    JsonBody(at): JsonBody<PixelPoint>,
) -> Result<Response, ServiceError> {
    let index = parse_frame(&frame)?;
    mutate(&store, &id, &headers, |s| s.set_ball(index, at))
}

async fn set_overrides(
    State(store): State<AppState>,
    Path(id): Path<String>,
    headers: HeaderMap,
    JsonBody(overrides): JsonBody<GoalOverrides>,
) -> Result<Response, ServiceError> {
    mutate(&store, &id, &headers, |s| s.set_overrides(overrides))
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorrectRequest {
    pub iterations: Option<usize>,
    pub tolerance: Option<f64>,
}

#[derive(Debug, Serialize)]
struct CorrectResponse {
    report: CorrectionReport,
    original: SequenceDocument,
    corrected: SequenceDocument,
}

/// Runs the correction for preview; nothing is stored.
async fn run_correction(
    State(store): State<AppState>,
    Path(id): Path<String>,
    body: axum::body::Bytes,
) -> Result<Response, ServiceError> {
    // the body is optional
    let req: CorrectRequest = if body.iter().all(u8::is_ascii_whitespace) {
        CorrectRequest::default()
    } else {
        serde_json::from_slice(&body).map_err(|e| ServiceError::invalid(e.to_string()))?
    };
    let session = store.load(&id)?;
    let seq = session.to_sequence()?;
    let defaults = OptimizerConfig::default();
    let cfg = CorrectionConfig {
        goal_frame: session.overrides.goal_frame,
        blocking_joint: session.overrides.blocking_joint,
        optimizer: OptimizerConfig {
            iterations: req.iterations.unwrap_or(defaults.iterations),
            convergence_tol: req.tolerance.unwrap_or(defaults.convergence_tol),
            ..defaults
        },
        ..Default::default()
    };
    let out = correct(&seq, &cfg)?;
    Ok(Json(CorrectResponse {
        report: out.report,
        original: SequenceDocument::from_sequence(&seq),
        corrected: SequenceDocument::from_sequence(&out.sequence),
    })
    .into_response())
}

async fn export(State(store): State<AppState>, Path(id): Path<String>) -> Result<Response, ServiceError> {
    let session = store.load(&id)?;
    let doc = SequenceDocument::from_sequence(&session.to_sequence()?);
    Ok(Json(doc).into_response())
}
