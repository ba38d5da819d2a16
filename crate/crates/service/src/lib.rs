//! HTTP API over the prediction engine: interactive sessions, stateless
//! predictions, benchmark runs and stored reports.

pub mod api;
mod error;
mod routes;
pub mod store;

pub use error::ApiError;
pub use routes::router;
pub use store::{Store, StoreError};

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::{Arc, Mutex};

use protopredict::corpus::DesignCase;
use protopredict::gateway::Gateway;
use protopredict::predictor::DEFAULT_PARALLELISM;
use protopredict::retrieval::{VectorIndex, DEFAULT_K};
use protopredict::usability::UsabilityScorer;
use protopredict::{assets, gateway::MockProfile};

/// Everything a running service needs.
#[derive(Debug)]
pub struct ServiceConfig {
    pub gateway: Gateway,
    pub index: Arc<VectorIndex>,
    pub cases: Vec<DesignCase>,
    pub store: Store,
    pub scorer: UsabilityScorer,
    pub parallelism: usize,
    pub k: usize,
}

impl ServiceConfig {
    /// Mock backend with `profile`, bundled index and cases, in-memory store.
    pub fn mock(profile: MockProfile) -> Self {
        ServiceConfig {
            gateway: Gateway::mock(profile),
            index: assets::default_index(),
            cases: assets::bench_cases(),
            store: Store::in_memory(),
            scorer: assets::default_scorer(),
            parallelism: DEFAULT_PARALLELISM,
            k: DEFAULT_K,
        }
    }
}

pub type SharedState = Arc<AppState>;

#[derive(Debug)]
pub struct AppState {
    pub config: ServiceConfig,
    session_locks: Mutex<HashMap<String, Arc<tokio::sync::Mutex<()>>>>,
}

impl AppState {
    pub fn new(config: ServiceConfig) -> SharedState {
        Arc::new(AppState {
            config,
            session_locks: Mutex::default(),
        })
    }

    /// Serializes writers to one session in arrival order.
    fn session_lock(&self, id: &str) -> Arc<tokio::sync::Mutex<()>> {
        self.session_locks
            .lock()
            .unwrap_or_else(|p| p.into_inner())
            .entry(id.to_owned())
            .or_default()
            .clone()
    }
}

pub async fn serve(addr: SocketAddr, state: SharedState) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(%addr, "listening");
    axum::serve(listener, router(state)).await
}
