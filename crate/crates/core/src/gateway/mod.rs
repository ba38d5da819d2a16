//! COSTAR prompt assembly and completion backends.
//!
//! Backends implement [`CompletionBackend`]; the [`Gateway`] wraps one with an
//! optional shared rate limiter. Completions are returned verbatim.

mod limiter;
mod mock;
mod prompt;
mod remote;

pub use limiter::TokenBucket;
#[cfg(test)]
pub(crate) use mock::format_usd;
pub use mock::{
    draw_items, mock_complete, MockBackend, MockProfile, NumericTarget, RefineProfile, UsabilityProfile,
    MOCK_PROFILE_SCHEMA,
};
pub use prompt::{
    assemble_costar_prompt, Costar, DesignBrief, EvidenceItem, ImageAttachment, PromptBundle, RenderedPrompt,
    DEFAULT_AUDIENCE, DEFAULT_STYLE, DEFAULT_TONE, MAX_IMAGE_BYTES,
};
pub use remote::{RemoteBackend, RemoteConfig, API_KEY_ENV, BASE_URL_ENV};

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Cost,
    Performance,
    Usability,
    Refine,
}

impl Task {
    pub const ALL: [Task; 4] = [Task::Cost, Task::Performance, Task::Usability, Task::Refine];

    pub fn as_str(self) -> &'static str {
        match self {
            Task::Cost => "cost",
            Task::Performance => "performance",
            Task::Usability => "usability",
            Task::Refine => "refine",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Task::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("unknown task {s:?} (expected cost, performance, usability or refine)"))
    }
}

#[derive(Debug, Error)]
pub enum GatewayError {
    #[error("invalid brief: {0}")]
    InvalidBrief(String),
    #[error("task performance requires an expected unit")]
    MissingUnit,
    #[error("invalid completion parameters: {0}")]
    InvalidParams(String),
    #[error("image attachment: {0}")]
    Image(String),
    #[error("mock profile has no entry for task {0}")]
    ProfileMissing(Task),
    #[error("mock profile: {0}")]
    Profile(String),
    #[error("backend configuration: {0}")]
    Config(String),
    #[error("authentication rejected by backend (HTTP {status})")]
    Auth { status: u16 },
    #[error("backend unreachable after {attempts} attempt(s): {message}")]
    Transport { attempts: u32, message: String },
    #[error("backend returned HTTP {status} after {attempts} attempt(s): {body}")]
    Http { status: u16, attempts: u32, body: String },
    #[error("malformed backend response: missing or invalid field {field}")]
    Protocol { field: String },
}

impl GatewayError {
    /// True for failures of the backend itself, as opposed to bad input.
    pub fn is_backend(&self) -> bool {
        matches!(
            self,
            GatewayError::Auth { .. }
                | GatewayError::Transport { .. }
                | GatewayError::Http { .. }
                | GatewayError::Protocol { .. }
        )
    }
}

pub const DEFAULT_TEMPERATURE: f64 = 1.0;
pub const DEFAULT_MAX_OUTPUT_UNITS: u32 = 512;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompletionParams {
    pub temperature: f64,
    pub seed: Option<u64>,
    pub max_output_units: u32,
}

impl Default for CompletionParams {
    fn default() -> Self {
        CompletionParams {
            temperature: DEFAULT_TEMPERATURE,
            seed: None,
            max_output_units: DEFAULT_MAX_OUTPUT_UNITS,
        }
    }
}

impl CompletionParams {
    pub fn validate(&self) -> Result<(), GatewayError> {
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return Err(GatewayError::InvalidParams(format!(
                "temperature must be a finite value >= 0, got {}",
                self.temperature
            )));
        }
        if self.max_output_units == 0 {
            return Err(GatewayError::InvalidParams("max_output_units must be > 0".into()));
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CallMeta {
    pub backend: String,
    pub latency_ms: u64,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Completion {
    pub text: String,
    pub meta: CallMeta,
}

pub trait CompletionBackend: Send + Sync {
    fn id(&self) -> String;
    fn complete(&self, bundle: &PromptBundle, params: &CompletionParams) -> Result<Completion, GatewayError>;
}

/// A backend plus an optional token bucket shared by every caller.
#[derive(Clone)]
pub struct Gateway {
    backend: Arc<dyn CompletionBackend>,
    limiter: Option<Arc<TokenBucket>>,
}

impl fmt::Debug for Gateway {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Gateway")
            .field("backend", &self.backend.id())
            .field("rate_limited", &self.limiter.is_some())
            .finish()
    }
}

impl Gateway {
    pub fn new(backend: Arc<dyn CompletionBackend>) -> Self {
        Gateway { backend, limiter: None }
    }

    pub fn mock(profile: MockProfile) -> Self {
        Gateway::new(Arc::new(MockBackend::new(profile)))
    }

    pub fn with_rate_limit(mut self, limiter: Arc<TokenBucket>) -> Self {
        self.limiter = Some(limiter);
        self
    }

    pub fn backend_id(&self) -> String {
        self.backend.id()
    }

    pub fn complete(&self, bundle: &PromptBundle, params: &CompletionParams) -> Result<Completion, GatewayError> {
        params.validate()?;
        if let Some(l) = &self.limiter {
            l.acquire();
        }
        self.backend.complete(bundle, params)
    }
}

pub(crate) fn backoff(attempt: u32, base: Duration) -> Duration {
    base.saturating_mul(1 << attempt.min(16))
}
