use std::time::{Duration, Instant};

use serde_json::{json, Value};

use super::{backoff, CallMeta, Completion, CompletionBackend, CompletionParams, GatewayError, PromptBundle};

pub const BASE_URL_ENV: &str = "PROTOPREDICT_LLM_BASE_URL";
pub const API_KEY_ENV: &str = "PROTOPREDICT_LLM_API_KEY";
pub const MODEL_ENV: &str = "PROTOPREDICT_LLM_MODEL";
const DEFAULT_MODEL: &str = "gpt-4o";

#[derive(Debug, Clone, PartialEq)]
pub struct RemoteConfig {
    pub base_url: String,
    pub api_key: Option<String>,
    pub model: String,
    pub timeout: Duration,
    pub max_attempts: u32,
    pub backoff_base: Duration,
}

impl RemoteConfig {
    pub fn new(base_url: impl Into<String>) -> Self {
        RemoteConfig {
            base_url: base_url.into(),
            api_key: None,
            model: DEFAULT_MODEL.into(),
            timeout: Duration::from_secs(120),
            max_attempts: 3,
            backoff_base: Duration::from_millis(500),
        }
    }

    /// Reads `PROTOPREDICT_LLM_BASE_URL`, `PROTOPREDICT_LLM_API_KEY` and
    /// optionally `PROTOPREDICT_LLM_MODEL`.
    pub fn from_env() -> Result<Self, GatewayError> {
        let base =
            std::env::var(BASE_URL_ENV).map_err(|_| GatewayError::Config(format!("{BASE_URL_ENV} is not set")))?;
        let mut cfg = RemoteConfig::new(base);
        cfg.api_key = std::env::var(API_KEY_ENV).ok().filter(|k| !k.is_empty());
        if let Ok(m) = std::env::var(MODEL_ENV) {
            cfg.model = m;
        }
        Ok(cfg)
    }
}

/// OpenAI-compatible chat-completions client.
pub struct RemoteBackend {
    cfg: RemoteConfig,
    client: reqwest::blocking::Client,
}

impl RemoteBackend {
    pub fn new(cfg: RemoteConfig) -> Result<Self, GatewayError> {
        if cfg.max_attempts == 0 {
            return Err(GatewayError::Config("max_attempts must be at least 1".into()));
        }
        let client = reqwest::blocking::Client::builder()
            .timeout(cfg.timeout)
            .build()
            .map_err(|e| GatewayError::Config(e.to_string()))?;
        Ok(RemoteBackend { cfg, client })
    }

    fn endpoint(&self) -> String {
        let base = self.cfg.base_url.trim_end_matches('/');
        let base = base.strip_suffix("/v1").unwrap_or(base);
        format!("{base}/v1/chat/completions")
    }

    fn request_body(&self, bundle: &PromptBundle, params: &CompletionParams) -> Value {
        let rendered = bundle.render();
        let mut parts = vec![json!({ "type": "text", "text": rendered.user })];
        if let Some(img) = &bundle.image {
            parts.push(json!({ "type": "image_url", "image_url": { "url": img.data_url() } }));
        }
        let mut body = json!({
            "model": self.cfg.model,
            "messages": [
                { "role": "system", "content": rendered.system },
                { "role": "user", "content": parts },
            ],
            "temperature": params.temperature,
            "max_tokens": params.max_output_units,
        });
        if let Some(s) = params.seed {
            // Most compatible servers accept a signed 64-bit seed.
            body["seed"] = json!(s as i64);
        }
        body
    }
}

enum Attempt {
    Done(Result<String, GatewayError>),
    Retry(GatewayError),
}

impl RemoteBackend {
    fn attempt(&self, body: &Value, attempt_no: u32) -> Attempt {
        let mut req = self.client.post(self.endpoint()).json(body);
        if let Some(k) = &self.cfg.api_key {
            req = req.bearer_auth(k);
        }
        let resp = match req.send() {
            Ok(r) => r,
            Err(e) => {
                return Attempt::Retry(GatewayError::Transport {
                    attempts: attempt_no,
                    message: e.to_string(),
                })
            }
        };
        let status = resp.status().as_u16();
        if status == 401 || status == 403 {
            return Attempt::Done(Err(GatewayError::Auth { status }));
        }
        let text = match resp.text() {
            Ok(t) => t,
            Err(e) => {
                return Attempt::Retry(GatewayError::Transport {
                    attempts: attempt_no,
                    message: e.to_string(),
                })
            }
        };
        if !(200..300).contains(&status) {
            let err = GatewayError::Http {
                status,
                attempts: attempt_no,
                body: text.chars().take(200).collect(),
            };
            return if status == 429 || status >= 500 {
                Attempt::Retry(err)
            } else {
                Attempt::Done(Err(err))
            };
        }
        Attempt::Done(extract_content(&text))
    }
}

fn extract_content(body: &str) -> Result<String, GatewayError> {
    let v: Value = serde_json::from_str(body).map_err(|_| GatewayError::Protocol { field: "<body>".into() })?;
    let missing = |f: &str| GatewayError::Protocol { field: f.into() };
    let choices = v.get("choices").ok_or_else(|| missing("choices"))?;
    let first = choices.get(0).ok_or_else(|| missing("choices[0]"))?;
    let msg = first.get("message").ok_or_else(|| missing("choices[0].message"))?;
    let content = msg
        .get("content")
        .ok_or_else(|| missing("choices[0].message.content"))?;
    content
        .as_str()
        .map(str::to_owned)
        .ok_or_else(|| missing("choices[0].message.content"))
}

impl CompletionBackend for RemoteBackend {
    fn id(&self) -> String {
        format!("remote:{}", self.cfg.model)
    }

    fn complete(&self, bundle: &PromptBundle, params: &CompletionParams) -> Result<Completion, GatewayError> {
        let body = self.request_body(bundle, params);
        let started = Instant::now();
        let mut last = None;
        for n in 1..=self.cfg.max_attempts {
            match self.attempt(&body, n) {
                Attempt::Done(r) => {
                    let text = r?;
                    return Ok(Completion {
                        text,
                        meta: CallMeta {
                            backend: self.id(),
                            latency_ms: started.elapsed().as_millis() as u64,
                            seed: params.seed,
                        },
                    });
                }
                Attempt::Retry(e) => {
                    tracing::warn!(attempt = n, error = %e, "transient backend failure");
                    last = Some(e);
                    if n < self.cfg.max_attempts {
                        std::thread::sleep(backoff(n - 1, self.cfg.backoff_base));
                    }
                }
            }
        }
        Err(last.expect("at least one attempt"))
    }
}
