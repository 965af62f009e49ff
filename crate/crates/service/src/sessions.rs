//! Human test sessions, persisted as one JSON file per session.
//!
//! A session is an ordered list of sample ids plus the answers given so far;
//! the next sample to show is the first one without an answer. Every read or
//! update of a session holds that session's lock, and files are replaced by
//! rename so a crash never leaves a half-written session behind.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use parking_lot::Mutex;
use serde::{Deserialize, Serialize};
use tvr_core::{MultiScore, Transformation};

use crate::error::ApiError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionAnswer {
    pub sample_id: String,
    pub transformations: Transformation,
    pub score: MultiScore,
    /// Time the tester spent on the sample, as reported by the client.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

/// Practice sessions may reveal solutions; test sessions never do.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SessionMode {
    Practice,
    #[default]
    Test,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub id: String,
    #[serde(default)]
    pub mode: SessionMode,
    pub sample_ids: Vec<String>,
    pub answers: Vec<SessionAnswer>,
}

impl Session {
    pub fn cursor(&self) -> usize {
        self.answers.len()
    }

    pub fn current(&self) -> Option<&str> {
        self.sample_ids.get(self.cursor()).map(String::as_str)
    }
}

pub struct SessionStore {
    dir: PathBuf,
    locks: Mutex<HashMap<String, Arc<Mutex<()>>>>,
}

fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.len() <= 64 && id.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'-')
}

impl SessionStore {
    pub fn open(dir: impl Into<PathBuf>) -> std::io::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(SessionStore { dir, locks: Mutex::new(HashMap::new()) })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, id: &str) -> PathBuf {
        self.dir.join(format!("{id}.json"))
    }

    fn lock_for(&self, id: &str) -> Arc<Mutex<()>> {
        self.locks.lock().entry(id.to_string()).or_default().clone()
    }

    fn write(&self, session: &Session) -> Result<(), ApiError> {
        let tmp = self.dir.join(format!("{}.json.tmp", session.id));
        let body = serde_json::to_vec_pretty(session).map_err(|e| ApiError::Internal(e.to_string()))?;
        fs::write(&tmp, body)?;
        fs::rename(&tmp, self.path(&session.id))?;
        Ok(())
    }

    fn read(&self, id: &str) -> Result<Session, ApiError> {
        if !valid_id(id) {
            return Err(ApiError::UnknownSession(id.to_string()));
        }
        let bytes = match fs::read(self.path(id)) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Err(ApiError::UnknownSession(id.to_string())),
            Err(e) => return Err(e.into()),
        };
        serde_json::from_slice(&bytes).map_err(|e| ApiError::Internal(format!("session `{id}` is corrupt: {e}")))
    }

    pub fn create(&self, mode: SessionMode, sample_ids: Vec<String>) -> Result<Session, ApiError> {
        let session = Session { id: uuid::Uuid::new_v4().to_string(), mode, sample_ids, answers: Vec::new() };
        let lock = self.lock_for(&session.id);
        let _guard = lock.lock();
        self.write(&session)?;
        Ok(session)
    }

    pub fn get(&self, id: &str) -> Result<Session, ApiError> {
        let lock = self.lock_for(id);
        let _guard = lock.lock();
        self.read(id)
    }

    /// Runs `f` on the stored session and persists the result if `f` succeeds.
    pub fn update<T>(&self, id: &str, f: impl FnOnce(&mut Session) -> Result<T, ApiError>) -> Result<T, ApiError> {
        let lock = self.lock_for(id);
        let _guard = lock.lock();
        let mut session = self.read(id)?;
        let out = f(&mut session)?;
        self.write(&session)?;
        Ok(out)
    }
}
