//! Building a session from a directory of per-frame detection documents
//! and the matching frame images.

use std::fs;
use std::path::{Path, PathBuf};

use goalie_core::ingest::{rank_candidates, RawDetection, DEFAULT_MIN_CONFIDENCE};
use goalie_core::model::{sample_frame_indices, FRAME_COUNT};
use goalie_core::{FrameDims, Label};
use serde::Deserialize;

use crate::error::ServiceError;
use crate::session::{AnnotationSession, FrameSlot};

pub const IMAGE_EXTENSIONS: [&str; 5] = ["png", "jpg", "jpeg", "webp", "gif"];

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default)]
pub struct ImportOptions {
    pub source_id: Option<String>,
    pub label: Label,
    pub min_confidence: f64,
    /// Length of the source clip in frames, used for keyframe times.
    pub total_frames: usize,
    pub fps: f64,
}

impl Default for ImportOptions {
    fn default() -> Self {
        ImportOptions {
            source_id: None,
            label: Label::Hit,
            min_confidence: DEFAULT_MIN_CONFIDENCE,
            total_frames: FRAME_COUNT,
            fps: 30.0,
        }
    }
}

/// A session ready to be stored, with the images to copy alongside it.
#[derive(Debug, Clone)]
pub struct ImportPlan {
    pub session: AnnotationSession,
    pub images: Vec<PathBuf>,
}

fn sorted_files(dir: &Path, keep: impl Fn(&str) -> bool) -> Result<Vec<PathBuf>, ServiceError> {
    let entries = fs::read_dir(dir).map_err(|e| ServiceError::Import(format!("{}: {e}", dir.display())))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| ServiceError::Import(e.to_string()))?.path();
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("").to_ascii_lowercase();
        if path.is_file() && keep(&ext) {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

pub fn import_session(
    session_id: &str,
    detections_dir: &Path,
    images_dir: &Path,
    dims: FrameDims,
    opts: &ImportOptions,
) -> Result<ImportPlan, ServiceError> {
    dims.validate()?;
    if !(opts.fps.is_finite() && opts.fps > 0.0) {
        return Err(ServiceError::invalid("fps must be positive"));
    }
    let detections = sorted_files(detections_dir, |ext| ext == "json")?;
    if detections.len() != FRAME_COUNT {
        return Err(ServiceError::Import(format!(
            "expected {FRAME_COUNT} frames, found {} detection documents in {}",
            detections.len(),
            detections_dir.display()
        )));
    }
    let images = sorted_files(images_dir, |ext| IMAGE_EXTENSIONS.contains(&ext))?;
    if images.len() != FRAME_COUNT {
        return Err(ServiceError::Import(format!(
            "expected {FRAME_COUNT} frames, found {} images in {}",
            images.len(),
            images_dir.display()
        )));
    }
    let sampled = sample_frame_indices(opts.total_frames, FRAME_COUNT)?;

    let mut slots = Vec::with_capacity(FRAME_COUNT);
    let mut previous = None;
    for (i, (det, img)) in detections.iter().zip(&images).enumerate() {
        let text = fs::read_to_string(det).map_err(|e| ServiceError::Import(format!("{}: {e}", det.display())))?;
        let raw = RawDetection::from_json(&text).map_err(|e| ServiceError::Import(format!("{}: {e}", det.display())))?;
        // until a human accepts frame i-1, its best proposal stands in
        let candidates = rank_candidates(i, &raw, previous.as_ref(), dims, opts.min_confidence);
        previous = candidates.first().map(|c| c.skeleton);
        let ext = img.extension().and_then(|e| e.to_str()).unwrap_or("png").to_ascii_lowercase();
        slots.push(FrameSlot::new(
            format!("frame_{i:02}.{ext}"),
            sampled[i] as f64 / opts.fps,
            candidates,
        ));
    }

    let source_id = opts.source_id.clone().unwrap_or_else(|| {
        detections_dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| session_id.to_string())
    });
    let session = AnnotationSession::new(session_id, source_id, opts.label, dims, slots)?;
    Ok(ImportPlan { session, images })
}
