//! Chat-completion access: message types, token accounting, pricing, and
//! providers (remote API, transcript replay, recording wrapper).

mod remote;
mod replay;

use std::collections::BTreeMap;
use std::fs;
use std::ops::{Add, AddAssign};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use remote::{
    HttpTransport, RateLimiter, RemoteProvider, RetryPolicy, Transport, TransportError, DEFAULT_API_BASE, DEFAULT_API_KEY_ENV,
};
pub use replay::{read_transcript, write_transcript, RecordingProvider, ReplayProvider, ScriptedProvider, TranscriptEntry};

pub const DEFAULT_TEMPERATURE: f64 = 0.2;
pub const DEFAULT_MAX_TOKENS: u32 = 4096;

#[derive(Debug, Error)]
pub enum LlmError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("authentication error: {0}")]
    Auth(String),
    #[error("transport error after {attempts} attempt(s): {message}")]
    Transport { attempts: u32, message: String },
    #[error("replay mismatch at entry {index}: transcript has digest {expected}, request has digest {actual}")]
    ReplayMismatch {
        index: usize,
        expected: String,
        actual: String,
    },
    #[error("transcript error: {0}")]
    Fixture(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: Role,
    pub content: String,
}

impl ChatMessage {
    /// Panics on empty content; use [`ChatMessage::try_new`] for untrusted
    /// text.
    pub fn new(role: Role, content: impl Into<String>) -> Self {
        Self::try_new(role, content).expect("chat message content must be nonempty")
    }

    pub fn try_new(role: Role, content: impl Into<String>) -> Result<Self, LlmError> {
        let content = content.into();
        if content.trim().is_empty() {
            return Err(LlmError::Config(format!("{role:?} message has empty content")));
        }
        Ok(Self { role, content })
    }

    pub fn system(content: impl Into<String>) -> Self {
        Self::new(Role::System, content)
    }

    pub fn user(content: impl Into<String>) -> Self {
        Self::new(Role::User, content)
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        Self::new(Role::Assistant, content)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProviderKind {
    RemoteApi,
    Replay,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub model_name: String,
    #[serde(default = "default_temperature")]
    pub temperature: f64,
    #[serde(default = "default_max_tokens")]
    pub max_tokens: u32,
    pub provider: ProviderKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transcript: Option<PathBuf>,
}

fn default_temperature() -> f64 {
    DEFAULT_TEMPERATURE
}

fn default_max_tokens() -> u32 {
    DEFAULT_MAX_TOKENS
}

impl ModelConfig {
    pub fn new(model_name: impl Into<String>, provider: ProviderKind) -> Self {
        Self {
            model_name: model_name.into(),
            temperature: DEFAULT_TEMPERATURE,
            max_tokens: DEFAULT_MAX_TOKENS,
            provider,
            transcript: None,
        }
    }

    pub fn validate(&self) -> Result<(), LlmError> {
        if self.model_name.trim().is_empty() {
            return Err(LlmError::Config("model_name is empty".into()));
        }
        if !self.temperature.is_finite() || self.temperature < 0.0 {
            return Err(LlmError::Config(format!("temperature must be >= 0, got {}", self.temperature)));
        }
        if self.max_tokens == 0 {
            return Err(LlmError::Config("max_tokens must be positive".into()));
        }
        if self.provider == ProviderKind::Replay && self.transcript.is_none() {
            return Err(LlmError::Config("the replay provider requires a transcript path".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Usage {
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
}

impl Add for Usage {
    type Output = Usage;

    fn add(self, rhs: Usage) -> Usage {
        Usage {
            prompt_tokens: self.prompt_tokens + rhs.prompt_tokens,
            completion_tokens: self.completion_tokens + rhs.completion_tokens,
        }
    }
}

impl AddAssign for Usage {
    fn add_assign(&mut self, rhs: Usage) {
        *self = *self + rhs;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Completion {
    pub text: String,
    pub usage: Usage,
}

/// Dollars per million tokens.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelPrice {
    pub prompt: f64,
    pub completion: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PricingTable {
    pub models: BTreeMap<String, ModelPrice>,
}

impl PricingTable {
    pub fn from_json(text: &str) -> Result<Self, LlmError> {
        let table: PricingTable =
            serde_json::from_str(text).map_err(|e| LlmError::Config(format!("pricing table: {e}")))?;
        for (model, p) in &table.models {
            if !(p.prompt >= 0.0 && p.completion >= 0.0) {
                return Err(LlmError::Config(format!("pricing table: negative price for {model}")));
            }
        }
        Ok(table)
    }

    pub fn load(path: &Path) -> Result<Self, LlmError> {
        let text = fs::read_to_string(path).map_err(|e| LlmError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_json(&text)
    }

    pub fn insert(&mut self, model: impl Into<String>, prompt: f64, completion: f64) {
        self.models.insert(model.into(), ModelPrice { prompt, completion });
    }
}

/// Dollar cost of `usage`; `None` when the model has no price entry.
pub fn cost(usage: Usage, model: &str, pricing: &PricingTable) -> Option<f64> {
    let p = pricing.models.get(model)?;
    Some(usage.prompt_tokens as f64 * p.prompt / 1e6 + usage.completion_tokens as f64 * p.completion / 1e6)
}

/// Hex SHA-256 over the model name, temperature and messages.
pub fn request_digest(model: &str, temperature: f64, messages: &[ChatMessage]) -> String {
    #[derive(Serialize)]
    struct Request<'a> {
        model: &'a str,
        temperature: f64,
        messages: &'a [ChatMessage],
    }
    let body = serde_json::to_vec(&Request {
        model,
        temperature,
        messages,
    })
    .expect("request serializes");
    hex::encode(Sha256::digest(&body))
}

pub trait ChatProvider: Send + Sync {
    fn complete(&self, messages: &[ChatMessage], config: &ModelConfig) -> Result<Completion, LlmError>;
}

impl<P: ChatProvider + ?Sized> ChatProvider for Box<P> {
    fn complete(&self, messages: &[ChatMessage], config: &ModelConfig) -> Result<Completion, LlmError> {
        (**self).complete(messages, config)
    }
}

impl<P: ChatProvider + ?Sized> ChatProvider for std::sync::Arc<P> {
    fn complete(&self, messages: &[ChatMessage], config: &ModelConfig) -> Result<Completion, LlmError> {
        (**self).complete(messages, config)
    }
}
