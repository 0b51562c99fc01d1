//! HTTP companion service for interactive what-if editing.
//!
//! A session holds a baseline model plus a pending patch of cell overrides.
//! Clients toggle cells, read scores with or without the pending edits, and
//! commit or reset. All bodies are JSON; errors are `{code, message, detail}`.

mod error;
mod routes;
mod session;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use axum::routing::{get, patch, post};
use axum::Router;
use tokio::net::TcpListener;
use tower_http::cors::CorsLayer;

pub use error::ApiError;
pub use session::{Session, SessionInfo, SessionStore};

pub const DEFAULT_IDLE_TIMEOUT: Duration = Duration::from_secs(60 * 60);

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub idle_timeout: Duration,
    /// Committed models are written to `<dir>/<session_id>.json` when set.
    pub snapshot_dir: Option<PathBuf>,
    /// Cross-check every pending score against a from-scratch rescore.
    pub verify_rescore: bool,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig { idle_timeout: DEFAULT_IDLE_TIMEOUT, snapshot_dir: None, verify_rescore: false }
    }
}

pub struct AppState {
    pub sessions: SessionStore,
    pub config: ServiceConfig,
}

impl AppState {
    pub fn new(config: ServiceConfig) -> Arc<Self> {
        Arc::new(AppState { sessions: SessionStore::new(config.idle_timeout), config })
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/health", get(routes::health))
        .route("/sessions", post(routes::create_session))
        .route("/sessions/{id}", get(routes::get_session).delete(routes::delete_session))
        .route("/sessions/{id}/model", get(routes::get_model))
        .route("/sessions/{id}/scores", get(routes::get_scores))
        .route("/sessions/{id}/matrices", get(routes::get_matrices))
        .route("/sessions/{id}/cells", patch(routes::patch_cell))
        .route("/sessions/{id}/commit", post(routes::commit))
        .route("/sessions/{id}/reset", post(routes::reset))
        .route("/sessions/{id}/analysis", get(routes::get_analysis))
        .fallback(routes::not_found)
        .layer(CorsLayer::permissive())
        .with_state(state)
}

/// Serves until Ctrl-C, reaping idle sessions in the background.
pub async fn serve(listener: TcpListener, config: ServiceConfig) -> std::io::Result<()> {
    let state = AppState::new(config);
    let reaper = {
        let state = state.clone();
        let period = state.config.idle_timeout.min(Duration::from_secs(60)).max(Duration::from_millis(100));
        tokio::spawn(async move {
            let mut tick = tokio::time::interval(period);
            loop {
                tick.tick().await;
                let n = state.sessions.reap();
                if n > 0 {
                    tracing::info!(expired = n, "reaped idle sessions");
                }
            }
        })
    };
    let addr: Option<SocketAddr> = listener.local_addr().ok();
    tracing::info!(?addr, "listening");
    let result = axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await;
    reaper.abort();
    result
}
