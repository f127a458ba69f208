//! HTTP authoring service.
//!
//! Holds working presentations in memory (one [`Workspace`] each, with a
//! revision counter), and exposes editing, conflict analysis, the slide
//! repository, jargon checks and asset storage as JSON endpoints.

mod config;
mod error;
mod routes;
mod workspace;

use std::net::SocketAddr;
use std::sync::Arc;
use std::time::Duration;

use axum::extract::DefaultBodyLimit;
use axum::Router;
use parking_lot::Mutex;
use tokio::net::TcpListener;
use tokio::sync::{oneshot, Semaphore};
use tokio::task::JoinHandle;

pub use config::{JargonSettings, ServiceConfig, StartupError};
pub use error::ApiError;
pub use workspace::{dirty_slides, PresentationView, Sessions, Workspace};

use crate::jargon::{JargonProvider, MockProvider};
use crate::repository::{FileStore, Repository};

/// Largest request body accepted (assets included).
pub const MAX_BODY_BYTES: usize = 32 * 1024 * 1024;

pub struct AppState {
    pub repo: Arc<Repository>,
    pub provider: Arc<dyn JargonProvider>,
    pub sessions: Mutex<Sessions>,
    provider_slots: Semaphore,
    provider_timeout: Duration,
}

impl AppState {
    pub fn new(repo: Arc<Repository>, provider: Arc<dyn JargonProvider>) -> Self {
        Self::with_limits(repo, provider, 4, Duration::from_secs(30))
    }

    pub fn with_limits(
        repo: Arc<Repository>,
        provider: Arc<dyn JargonProvider>,
        max_in_flight: usize,
        provider_timeout: Duration,
    ) -> Self {
        Self {
            repo,
            provider,
            sessions: Mutex::new(Sessions::default()),
            provider_slots: Semaphore::new(max_in_flight.max(1)),
            provider_timeout,
        }
    }

    /// In-memory repository and the bundled offline provider.
    pub fn ephemeral() -> Self {
        Self::new(Arc::new(Repository::in_memory()), Arc::new(MockProvider::bundled()))
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    routes::routes()
        .fallback(|| async { ApiError::not_found() })
        .method_not_allowed_fallback(|| async {
            ApiError::new("method_not_allowed", "method not allowed on this route")
        })
        .layer(DefaultBodyLimit::max(MAX_BODY_BYTES))
        .with_state(state)
}

/// A server running on a background task.
pub struct RunningService {
    pub addr: SocketAddr,
    pub state: Arc<AppState>,
    shutdown: oneshot::Sender<()>,
    handle: JoinHandle<std::io::Result<()>>,
}

impl RunningService {
    pub fn url(&self) -> String {
        format!("http://{}", self.addr)
    }

    /// Stops accepting connections and waits for in-flight requests.
    pub async fn shutdown(self) -> std::io::Result<()> {
        let _ = self.shutdown.send(());
        self.handle
            .await
            .map_err(|e| std::io::Error::other(e.to_string()))?
    }
}

pub async fn serve(state: Arc<AppState>, bind_addr: &str) -> Result<RunningService, StartupError> {
    let listener = TcpListener::bind(bind_addr).await?;
    let addr = listener.local_addr()?;
    let (tx, rx) = oneshot::channel::<()>();
    let app = router(state.clone());
    let handle = tokio::spawn(async move {
        axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = rx.await;
            })
            .await
    });
    tracing::info!(%addr, "authoring service listening");
    Ok(RunningService {
        addr,
        state,
        shutdown: tx,
        handle,
    })
}

/// Opens the store, builds the provider and starts listening.
pub async fn start(config: &ServiceConfig) -> Result<RunningService, StartupError> {
    let repo = match &config.store_dir {
        Some(dir) => Repository::open(FileStore::open(dir)?)?,
        None => Repository::in_memory(),
    };
    let provider = config.build_provider()?;
    let state = AppState::with_limits(
        Arc::new(repo),
        provider,
        config.jargon.max_in_flight,
        config.provider_timeout(),
    );
    serve(Arc::new(state), &config.bind_addr).await
}
