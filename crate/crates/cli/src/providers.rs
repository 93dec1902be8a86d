use std::sync::Arc;
use std::time::Duration;

use clap::ValueEnum;

use routebench_core::llm::{HttpTransport, ModelConfig, ProviderKind, RemoteProvider};

use crate::config::{positive_secs, HarnessConfig};
use crate::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TranscriptMode {
    /// Serve recorded transcripts; no network.
    Replay,
    /// Call the remote API and save a transcript per run.
    Record,
    /// Call the remote API without saving transcripts.
    Live,
}

impl TranscriptMode {
    pub fn is_remote(self) -> bool {
        self != TranscriptMode::Replay
    }
}

/// The remote provider with its credential checked up front.
pub fn remote(cfg: &HarnessConfig) -> CliResult<Arc<RemoteProvider>> {
    let timeout = match cfg.request_timeout_secs {
        Some(s) => positive_secs(s, "request_timeout_secs")?,
        None => Duration::from_secs(120),
    };
    let mut provider = RemoteProvider::new(Box::new(HttpTransport::new(timeout)?));
    if let Some(base) = &cfg.api_base {
        provider.api_base = base.clone();
    }
    if let Some(var) = &cfg.api_key_env {
        provider.api_key_env = var.clone();
    }
    provider
        .credential()
        .map_err(|e| CliError::Environment(format!("{e}; remote mode needs an API key")))?;
    Ok(Arc::new(provider))
}

pub fn model_config(
    name: &str,
    mode: TranscriptMode,
    cfg: &HarnessConfig,
    temperature: Option<f64>,
    max_tokens: Option<u32>,
    transcript: Option<std::path::PathBuf>,
) -> CliResult<ModelConfig> {
    let kind = if mode.is_remote() { ProviderKind::RemoteApi } else { ProviderKind::Replay };
    let mut m = ModelConfig::new(name.to_string(), kind);
    if let Some(t) = temperature.or(cfg.temperature) {
        m.temperature = t;
    }
    if let Some(t) = max_tokens.or(cfg.max_tokens) {
        m.max_tokens = t;
    }
    m.transcript = transcript;
    m.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(m)
}
