//! Annotation sessions for confirming detector proposals and clicking
//! joints and balls, persisted per session and served over HTTP.

pub mod api;
pub mod error;
pub mod import;
pub mod session;
pub mod store;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

pub use api::router;
pub use error::ServiceError;
pub use session::{AnnotationSession, FrameState};
pub use store::Store;

/// Serves the API until the process is stopped.
pub async fn serve(addr: SocketAddr, data_dir: PathBuf) -> Result<(), ServiceError> {
    let store = Arc::new(Store::open(data_dir)?);
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(addr = %listener.local_addr()?, data_dir = %store.root().display(), "listening");
    axum::serve(listener, router(store)).await?;
    Ok(())
}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/annotation.md")]
mod book_annotation {}
