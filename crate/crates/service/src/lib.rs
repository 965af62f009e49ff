//! HTTP service over a generated dataset.
//!
//! Routes:
//!
//! | method | path | body / result |
//! |---|---|---|
//! | GET | `/health` | sample count |
//! | GET | `/vocabulary` | the 33 transformation values |
//! | GET | `/samples/{id}` | sample without its reference (with it in trusted mode) |
//! | GET | `/samples/{id}/schematic/{initial\|final}?view=` | SVG |
//! | GET | `/samples/{id}/solution` | solver output, trusted mode only |
//! | POST | `/evaluate` | `{predictions}` → evaluation report |
//! | POST | `/reward` | one query or `{queries}` → reward(s) |
//! | GET | `/stats/{split}` | statistics report |
//! | POST | `/sessions` | create a test or practice session |
//! | GET | `/sessions/{id}/next` | schematics, attribute table, vocabulary |
//! | POST | `/sessions/{id}/answer` | score the answer and advance |
//! | GET | `/sessions/{id}/report` | per-sample scores and aggregate |
//! | GET | `/sessions/{id}/solution` | current solution, practice sessions only |
//!
//! Errors are `{code, message}` with a matching HTTP status.

mod api;
mod error;
mod routes;
mod sessions;

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::routing::{get, post};
use axum::Router;
use tvr_core::io::{read_dataset, stats_report, Dataset, IoError, StatsReport};
use tvr_core::Sample;

pub use api::*;
pub use error::{ApiError, ErrorBody};
pub use sessions::{Session, SessionAnswer, SessionMode, SessionStore};

pub struct AppState {
    pub dataset: Dataset,
    index: HashMap<String, usize>,
    stats: HashMap<String, StatsReport>,
    pub sessions: SessionStore,
    /// Serve references and solutions to every client.
    pub trusted: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error(transparent)]
    Dataset(#[from] IoError),
    #[error("session store {path}: {source}")]
    Sessions {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl AppState {
    pub fn new(dataset: Dataset, sessions: SessionStore, trusted: bool) -> Self {
        let index = dataset.samples.iter().enumerate().map(|(i, s)| (s.id.clone(), i)).collect();
        let stats = dataset
            .manifest
            .splits
            .iter()
            .map(|split| {
                let members: Vec<Sample> = dataset.split(&split.name).into_iter().cloned().collect();
                (split.name.clone(), stats_report(&members))
            })
            .collect();
        AppState { dataset, index, stats, sessions, trusted }
    }

    /// Reads the dataset under `data_dir`; sessions default to `data_dir/sessions`.
    pub fn load(data_dir: &Path, session_dir: Option<&Path>, trusted: bool) -> Result<Self, LoadError> {
        let dataset = read_dataset(data_dir)?;
        let path = session_dir.map(Path::to_path_buf).unwrap_or_else(|| data_dir.join("sessions"));
        let sessions = SessionStore::open(&path).map_err(|source| LoadError::Sessions { path, source })?;
        Ok(AppState::new(dataset, sessions, trusted))
    }

    pub fn sample(&self, id: &str) -> Result<&Sample, ApiError> {
        self.index.get(id).map(|&i| &self.dataset.samples[i]).ok_or_else(|| ApiError::UnknownSample(id.to_string()))
    }

    pub fn by_id(&self) -> HashMap<&str, &Sample> {
        self.dataset.by_id()
    }

    /// `test` when present, otherwise the first split of the manifest.
    pub fn default_split(&self) -> Option<String> {
        let splits = &self.dataset.manifest.splits;
        splits.iter().find(|s| s.name == "test").or(splits.first()).map(|s| s.name.clone())
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/health", get(routes::health))
        .route("/vocabulary", get(routes::get_vocabulary))
        .route("/samples/{id}", get(routes::get_sample))
        .route("/samples/{id}/schematic/{which}", get(routes::get_schematic))
        .route("/samples/{id}/solution", get(routes::get_solution))
        .route("/evaluate", post(routes::post_evaluate))
        .route("/reward", post(routes::post_reward))
        .route("/stats/{split}", get(routes::get_stats))
        .route("/sessions", post(routes::post_session))
        .route("/sessions/{id}/next", get(routes::get_next))
        .route("/sessions/{id}/answer", post(routes::post_answer))
        .route("/sessions/{id}/report", get(routes::get_report))
        .route("/sessions/{id}/solution", get(routes::get_session_solution))
        .with_state(state)
}

/// Binds `addr` and serves until ctrl-c.
pub async fn serve(addr: SocketAddr, state: Arc<AppState>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

/// Serves on an already bound listener until the task is dropped.
pub async fn serve_on(listener: tokio::net::TcpListener, state: Arc<AppState>) -> std::io::Result<()> {
    axum::serve(listener, router(state)).await
}
