use std::collections::{HashMap, HashSet};
use std::sync::{Arc, Mutex as StdMutex};
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use siskit_core::analysis::{WhatIfOptions, WhatIfPatch};
use siskit_core::AssessmentModel;
use tokio::sync::{Mutex, OwnedMutexGuard};
use uuid::Uuid;

use crate::error::ApiError;

pub struct Session {
    pub id: String,
    pub baseline: AssessmentModel,
    pub pending: WhatIfPatch,
    pub options: WhatIfOptions,
    pub created_at: SystemTime,
    pub last_touched: Instant,
}

#[derive(Debug, Clone, Serialize)]
pub struct SessionInfo {
    pub session_id: String,
    pub created_at: u64,
    pub idle_seconds: u64,
    pub pending_overrides: usize,
    pub options: WhatIfOptions,
}

impl Session {
    pub fn info(&self) -> SessionInfo {
        SessionInfo {
            session_id: self.id.clone(),
            created_at: self.created_at.duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
            idle_seconds: self.last_touched.elapsed().as_secs(),
            pending_overrides: self.pending.overrides.len(),
            options: self.options.clone(),
        }
    }
}

/// Live sessions. Each one sits behind its own FIFO mutex, so requests on a
/// session run one at a time in arrival order while other sessions proceed.
pub struct SessionStore {
    idle_timeout: Duration,
    sessions: StdMutex<HashMap<String, Arc<Mutex<Session>>>>,
    expired: StdMutex<HashSet<String>>,
}

impl SessionStore {
    pub fn new(idle_timeout: Duration) -> Self {
        SessionStore { idle_timeout, sessions: StdMutex::default(), expired: StdMutex::default() }
    }

    pub fn create(&self, baseline: AssessmentModel, options: WhatIfOptions) -> String {
        let id = Uuid::new_v4().simple().to_string();
        let session = Session {
            id: id.clone(),
            baseline,
            pending: WhatIfPatch::default(),
            options,
            created_at: SystemTime::now(),
            last_touched: Instant::now(),
        };
        self.sessions.lock().expect("session map poisoned").insert(id.clone(), Arc::new(Mutex::new(session)));
        id
    }

    /// Locks a session for one request and marks it as touched.
    pub async fn acquire(&self, id: &str) -> Result<OwnedMutexGuard<Session>, ApiError> {
        let slot = self.sessions.lock().expect("session map poisoned").get(id).cloned();
        let Some(slot) = slot else {
            return Err(if self.expired.lock().expect("expired set poisoned").contains(id) {
                ApiError::session_expired(id)
            } else {
                ApiError::session_not_found(id)
            });
        };
        let mut session = slot.lock_owned().await;
        if session.last_touched.elapsed() > self.idle_timeout {
            drop(session);
            self.expire(id);
            return Err(ApiError::session_expired(id));
        }
        session.last_touched = Instant::now();
        Ok(session)
    }

    pub fn remove(&self, id: &str) -> bool {
        self.sessions.lock().expect("session map poisoned").remove(id).is_some()
    }

    fn expire(&self, id: &str) {
        self.remove(id);
        self.expired.lock().expect("expired set poisoned").insert(id.to_string());
    }

    /// Drops sessions idle for longer than the timeout. Sessions busy with a
    /// request are skipped; they are in use.
    pub fn reap(&self) -> usize {
        let stale: Vec<String> = self
            .sessions
            .lock()
            .expect("session map poisoned")
            .iter()
            .filter_map(|(id, slot)| {
                let session = slot.try_lock().ok()?;
                (session.last_touched.elapsed() > self.idle_timeout).then(|| id.clone())
            })
            .collect();
        for id in &stale {
            self.expire(id);
        }
        stale.len()
    }

    pub fn len(&self) -> usize {
        self.sessions.lock().expect("session map poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
