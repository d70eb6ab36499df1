//! Chat-completion client.
//!
//! [`LlmClient`] wraps a [`ChatBackend`] with request checks, an optional
//! on-disk reply cache and a call counter. Two backends ship: the
//! OpenAI-compatible HTTP one and a scripted [`MockBackend`].

mod cache;
mod mock;
mod openai;

use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use cache::FileCache;
pub use mock::{Fault, FaultKind, MockBackend, PLAN_MALFORMED_FUNCTION};
pub use openai::{OpenAiBackend, API_KEY_ENV, DEFAULT_BASE_URL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: Role,
    pub content: String,
}

impl ChatMessage {
    pub fn system(content: impl Into<String>) -> Self {
        Self { role: Role::System, content: content.into() }
    }

    pub fn user(content: impl Into<String>) -> Self {
        Self { role: Role::User, content: content.into() }
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        Self { role: Role::Assistant, content: content.into() }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LlmError {
    #[error("request timed out after {0:?}")]
    Timeout(Duration),
    #[error("transport error: {0}")]
    Transport(String),
    #[error("server answered {code}: {body}")]
    BadStatus { code: u16, body: String },
    #[error("environment variable {API_KEY_ENV} is not set")]
    MissingApiKey,
    #[error("bad request: {0}")]
    BadRequest(String),
    #[error("unexpected response: {0}")]
    BadResponse(String),
    #[error("mock backend has no script for this prompt")]
    Unscripted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    OpenAiCompatible,
    Mock,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LlmConfig {
    pub backend: BackendKind,
    pub model: String,
    pub temperature: f64,
    pub timeout: Duration,
    pub cache_dir: Option<PathBuf>,
    pub base_url: Option<String>,
    pub seed: Option<i64>,
}

pub const DEFAULT_MODEL: &str = "gpt-4o-2024-08-06";

impl Default for LlmConfig {
    fn default() -> Self {
        Self {
            backend: BackendKind::Mock,
            model: DEFAULT_MODEL.to_owned(),
            temperature: 0.0,
            timeout: Duration::from_secs(60),
            cache_dir: None,
            base_url: None,
            seed: Some(42),
        }
    }
}

impl LlmConfig {
    pub fn check(&self) -> Result<(), LlmError> {
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return Err(LlmError::BadRequest(format!("temperature {} must be >= 0", self.temperature)));
        }
        if self.timeout.is_zero() {
            return Err(LlmError::BadRequest("timeout must be positive".into()));
        }
        Ok(())
    }
}

/// Something that turns a chat into an assistant reply.
pub trait ChatBackend: Send + Sync {
    fn complete(&self, messages: &[ChatMessage], config: &LlmConfig) -> Result<String, LlmError>;
}

/// Digest over model, temperature, seed and the ordered messages.
pub fn cache_key(messages: &[ChatMessage], config: &LlmConfig) -> String {
    let hasher = Sha256::new().chain_update(request_json(messages, config).to_string());
    hex::encode(hasher.finalize())
}

fn request_json(messages: &[ChatMessage], config: &LlmConfig) -> serde_json::Value {
    serde_json::json!({
        "model": config.model,
        "temperature": config.temperature,
        "seed": config.seed,
        "messages": messages,
    })
}

fn check_messages(messages: &[ChatMessage]) -> Result<(), LlmError> {
    match messages.first() {
        None => return Err(LlmError::BadRequest("no messages".into())),
        Some(m) if m.role != Role::System => {
            return Err(LlmError::BadRequest("first message must be the system message".into()))
        }
        _ => {}
    }
    if let Some(i) = messages
        .iter()
        .position(|m| m.role != Role::Assistant && m.content.trim().is_empty())
    {
        return Err(LlmError::BadRequest(format!("message {i} is empty")));
    }
    Ok(())
}

/// Backend plus cache. Cheap to clone; clones share the call counter.
#[derive(Clone)]
pub struct LlmClient {
    config: LlmConfig,
    backend: Arc<dyn ChatBackend>,
    cache: Option<FileCache>,
    backend_calls: Arc<AtomicUsize>,
}

impl LlmClient {
    /// Builds the backend named in `config`. The mock gets no faults.
    pub fn new(config: LlmConfig) -> Result<Self, LlmError> {
        let backend: Arc<dyn ChatBackend> = match config.backend {
            BackendKind::Mock => Arc::new(MockBackend::default()),
            BackendKind::OpenAiCompatible => Arc::new(OpenAiBackend::from_env(&config)?),
        };
        Self::with_backend(config, backend)
    }

    pub fn with_backend(config: LlmConfig, backend: Arc<dyn ChatBackend>) -> Result<Self, LlmError> {
        config.check()?;
        let cache = match &config.cache_dir {
            Some(dir) => Some(FileCache::open(dir).map_err(|e| LlmError::Transport(format!("cache dir: {e}")))?),
            None => None,
        };
        Ok(Self {
            config,
            backend,
            cache,
            backend_calls: Arc::new(AtomicUsize::new(0)),
        })
    }

    pub fn config(&self) -> &LlmConfig {
        &self.config
    }

    /// Number of requests that reached the backend (cache hits excluded).
    pub fn backend_calls(&self) -> usize {
        self.backend_calls.load(Ordering::SeqCst)
    }

    pub fn complete(&self, messages: &[ChatMessage]) -> Result<String, LlmError> {
        check_messages(messages)?;
        let key = self.cache.as_ref().map(|_| cache_key(messages, &self.config));
        if let (Some(cache), Some(key)) = (&self.cache, &key) {
            if let Some(hit) = cache.get(key) {
                return Ok(hit);
            }
        }
        self.backend_calls.fetch_add(1, Ordering::SeqCst);
        let reply = self.backend.complete(messages, &self.config)?;
        if let (Some(cache), Some(key)) = (&self.cache, &key) {
            // a failed cache write only costs a future miss
            let _ = cache.put(key, &request_json(messages, &self.config), &reply);
        }
        Ok(reply)
    }
}

impl std::fmt::Debug for LlmClient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LlmClient")
            .field("config", &self.config)
            .field("backend_calls", &self.backend_calls())
            .finish_non_exhaustive()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Echo;

    impl ChatBackend for Echo {
        fn complete(&self, messages: &[ChatMessage], _: &LlmConfig) -> Result<String, LlmError> {
            Ok(messages.last().unwrap().content.to_uppercase())
        }
    }

    fn chat() -> Vec<ChatMessage> {
        vec![ChatMessage::system("sys"), ChatMessage::user("a"), ChatMessage::user("b")]
    }

    #[test]
    fn key_sensitivity() {
        let cfg = LlmConfig::default();
        let k = cache_key(&chat(), &cfg);
        assert_eq!(k, cache_key(&chat(), &cfg));
        assert_eq!(k.len(), 64);
        let hot = LlmConfig { temperature: 1.0, ..cfg.clone() };
        assert_ne!(k, cache_key(&chat(), &hot));
        let mut swapped = chat();
        swapped.swap(1, 2);
        assert_ne!(k, cache_key(&swapped, &cfg));
        let other_seed = LlmConfig { seed: Some(7), ..cfg.clone() };
        assert_ne!(k, cache_key(&chat(), &other_seed));
    }

    #[test]
    fn cache_serves_second_call() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = LlmConfig { cache_dir: Some(dir.path().to_owned()), ..LlmConfig::default() };
        let client = LlmClient::with_backend(cfg.clone(), Arc::new(Echo)).unwrap();
        assert_eq!(client.complete(&chat()).unwrap(), "B");
        assert_eq!(client.complete(&chat()).unwrap(), "B");
        assert_eq!(client.backend_calls(), 1);
        // a fresh client over the same directory also hits
        let again = LlmClient::with_backend(cfg, Arc::new(Echo)).unwrap();
        assert_eq!(again.complete(&chat()).unwrap(), "B");
        assert_eq!(again.backend_calls(), 0);
    }

    #[test]
    fn request_checks() {
        let client = LlmClient::with_backend(LlmConfig::default(), Arc::new(Echo)).unwrap();
        assert!(matches!(client.complete(&[]), Err(LlmError::BadRequest(_))));
        assert!(matches!(client.complete(&[ChatMessage::user("x")]), Err(LlmError::BadRequest(_))));
        assert!(matches!(
            client.complete(&[ChatMessage::system("s"), ChatMessage::user(" ")]),
            Err(LlmError::BadRequest(_))
        ));
        let bad = LlmConfig { temperature: -1.0, ..LlmConfig::default() };
        assert!(LlmClient::with_backend(bad, Arc::new(Echo)).is_err());
        let bad = LlmConfig { timeout: Duration::ZERO, ..LlmConfig::default() };
        assert!(LlmClient::with_backend(bad, Arc::new(Echo)).is_err());
    }
}
