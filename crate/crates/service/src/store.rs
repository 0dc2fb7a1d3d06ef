//! One directory per session under the data directory: `session.json` plus
//! the frame images. Writes go through a temporary file and a rename, so a
//! crash leaves either the old or the new document.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use serde::Serialize;
use tempfile::NamedTempFile;

use crate::error::ServiceError;
use crate::session::{now, AnnotationSession, FrameState};

const SESSION_FILE: &str = "session.json";
const IMAGE_DIR: &str = "images";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SessionSummary {
    pub session_id: String,
    pub source_id: String,
    pub version: u64,
    pub accepted_frames: usize,
    pub pending_frames: usize,
    pub updated_at: u64,
}

impl SessionSummary {
    fn of(s: &AnnotationSession) -> SessionSummary {
        let accepted = s.frames.iter().filter(|f| f.state == FrameState::Accepted).count();
        SessionSummary {
            session_id: s.session_id.clone(),
            source_id: s.source_id.clone(),
            version: s.version,
            accepted_frames: accepted,
            pending_frames: s.frames.len() - accepted,
            updated_at: s.updated_at,
        }
    }
}

#[derive(Debug)]
pub struct Store {
    root: PathBuf,
    locks: Mutex<HashMap<String, Arc<Mutex<()>>>>,
}

impl Store {
    pub fn open(root: impl Into<PathBuf>) -> Result<Store, ServiceError> {
        let root = root.into();
        fs::create_dir_all(&root)?;
        Ok(Store {
            root,
            locks: Mutex::new(HashMap::new()),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn dir(&self, id: &str) -> Result<PathBuf, ServiceError> {
        // ids are generated here; anything else is not ours
        if id.is_empty() || !id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-') {
            return Err(ServiceError::SessionNotFound(id.to_string()));
        }
        Ok(self.root.join(id))
    }

    fn lock(&self, id: &str) -> Arc<Mutex<()>> {
        let mut locks = self.locks.lock().unwrap_or_else(|e| e.into_inner());
        locks.entry(id.to_string()).or_default().clone()
    }

    /// Persists a new session and copies `images[i]` to the name recorded in
    /// frame slot `i`.
    pub fn create(&self, session: &AnnotationSession, images: &[PathBuf]) -> Result<(), ServiceError> {
        if images.len() != session.frames.len() {
            return Err(ServiceError::Import(format!(
                "expected {} frame images, found {}",
                session.frames.len(),
                images.len()
            )));
        }
        let dir = self.dir(&session.session_id)?;
        let image_dir = dir.join(IMAGE_DIR);
        fs::create_dir_all(&image_dir)?;
        for (slot, src) in session.frames.iter().zip(images) {
            fs::copy(src, image_dir.join(&slot.image))
                .map_err(|e| ServiceError::Import(format!("{}: {e}", src.display())))?;
        }
        write_atomic(&dir.join(SESSION_FILE), session)
    }

    pub fn load(&self, id: &str) -> Result<AnnotationSession, ServiceError> {
        let path = self.dir(id)?.join(SESSION_FILE);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return Err(ServiceError::SessionNotFound(id.to_string()))
            }
            Err(e) => return Err(e.into()),
        };
        serde_json::from_str(&text).map_err(|e| ServiceError::Storage(format!("{}: {e}", path.display())))
    }

    pub fn list(&self) -> Result<Vec<SessionSummary>, ServiceError> {
        let mut out = Vec::new();
        for entry in fs::read_dir(&self.root)? {
            let entry = entry?;
            if !entry.path().join(SESSION_FILE).is_file() {
                continue;
            }
            let id = entry.file_name().to_string_lossy().into_owned();
            out.push(SessionSummary::of(&self.load(&id)?));
        }
        out.sort_by(|a, b| a.session_id.cmp(&b.session_id));
        Ok(out)
    }

    pub fn image_path(&self, id: &str, frame: usize) -> Result<PathBuf, ServiceError> {
        let session = self.load(id)?;
        let slot = session.frame(frame)?;
        Ok(self.dir(id)?.join(IMAGE_DIR).join(&slot.image))
    }

    /// Applies `f` to the stored session if it is still at `expected`,
    /// then bumps the version and persists. Mutations of one session are
    /// serialized.
    pub fn update<T>(
        &self,
        id: &str,
        expected: u64,
        f: impl FnOnce(&mut AnnotationSession) -> Result<T, ServiceError>,
    ) -> Result<(AnnotationSession, T), ServiceError> {
        let lock = self.lock(id);
        let _guard = lock.lock().unwrap_or_else(|e| e.into_inner());
        let mut session = self.load(id)?;
        if session.version != expected {
            return Err(ServiceError::VersionConflict {
                expected,
                actual: session.version,
            });
        }
        let out = f(&mut session)?;
        session.version += 1;
        session.updated_at = now();
        write_atomic(&self.dir(id)?.join(SESSION_FILE), &session)?;
        Ok((session, out))
    }
}

fn write_atomic(path: &Path, value: &impl Serialize) -> Result<(), ServiceError> {
    let dir = path.parent().expect("session file has a parent");
    let mut tmp = NamedTempFile::new_in(dir)?;
    serde_json::to_writer_pretty(&mut tmp, value).map_err(|e| ServiceError::Storage(e.to_string()))?;
    tmp.write_all(b"\n")?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| ServiceError::Storage(e.to_string()))?;
    Ok(())
}
