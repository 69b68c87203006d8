//! Text embedding providers and cosine similarity.
//!
//! The mock provider embeds a text as a 256-dimension bag-of-words count
//! vector: tokens (lowercased alphanumeric runs) are bucketed by
//! `fnv1a_64(token) % 256` and each bucket accumulates its token counts.
//! Distinct tokens can collide on a bucket; for collision-free vocabularies
//! the cosine equals the exact bag-of-words cosine, which is what the test
//! oracles check.

use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::ReflexError;
use crate::config::{load_toml, ConfigError};
use crate::metrics::tokenize;
use crate::net::{retry_with_backoff, RetryClass, RetryPolicy};
use crate::summarize::backend::fnv1a_64;

/// Dimension of the mock provider's count vectors.
pub const MOCK_EMBEDDING_DIM: usize = 256;

/// A dense embedding, comparable only against vectors from the same provider
/// with the same dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingVector {
    values: Vec<f64>,
    provider_id: String,
}

impl EmbeddingVector {
    pub fn new(values: Vec<f64>, provider_id: String) -> Result<EmbeddingVector, ReflexError> {
        if values.is_empty() {
            return Err(ReflexError::InvalidEmbedding("embedding has zero dimensions".into()));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(ReflexError::InvalidEmbedding(format!("non-finite entry {bad}")));
        }
        Ok(EmbeddingVector { values, provider_id })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn provider_id(&self) -> &str {
        &self.provider_id
    }

    pub fn dimension(&self) -> usize {
        self.values.len()
    }
}

/// Cosine similarity plus a degeneracy flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cosine {
    pub value: f64,
    /// Set when either vector had zero norm; the value is 0.0 then.
    pub zero_norm: bool,
}

/// `(a . b) / (‖a‖ ‖b‖)`, clamped to `[-1, 1]` against rounding. Zero-norm
/// inputs yield 0.0 with the warning flag instead of an error, and identical
/// nonzero vectors yield exactly 1.0.
pub fn cosine_similarity(a: &EmbeddingVector, b: &EmbeddingVector) -> Result<Cosine, ReflexError> {
    if a.provider_id != b.provider_id || a.dimension() != b.dimension() {
        return Err(ReflexError::ProviderMismatch {
            left: format!("{} (dim {})", a.provider_id, a.dimension()),
            right: format!("{} (dim {})", b.provider_id, b.dimension()),
        });
    }
    let norm_a_sq: f64 = a.values.iter().map(|v| v * v).sum();
    let norm_b_sq: f64 = b.values.iter().map(|v| v * v).sum();
    if norm_a_sq == 0.0 || norm_b_sq == 0.0 {
        return Ok(Cosine { value: 0.0, zero_norm: true });
    }
    if a.values == b.values {
        return Ok(Cosine { value: 1.0, zero_norm: false });
    }
    let dot: f64 = a.values.iter().zip(&b.values).map(|(x, y)| x * y).sum();
    let value = (dot / (norm_a_sq.sqrt() * norm_b_sq.sqrt())).clamp(-1.0, 1.0);
    Ok(Cosine { value, zero_norm: false })
}

/// A text-to-vector provider.
pub trait EmbeddingProvider: Send + Sync {
    fn provider_id(&self) -> &str;
    fn embed_text(&self, text: &str) -> Result<EmbeddingVector, ReflexError>;
}

/// Embed non-empty text with the given provider.
pub fn embed(text: &str, provider: &dyn EmbeddingProvider) -> Result<EmbeddingVector, ReflexError> {
    if text.trim().is_empty() {
        return Err(ReflexError::EmptyText);
    }
    provider.embed_text(text)
}

/// How an embedding provider is reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProviderKind {
    #[default]
    Mock,
    Http,
}

/// Settings for one embedding provider.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProviderConfig {
    pub provider_id: String,
    #[serde(default)]
    pub kind: ProviderKind,
    #[serde(default)]
    pub endpoint: String,
    #[serde(default)]
    pub model_name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub api_key_env: Option<String>,
    /// Expected dimension; when set, responses of any other size are rejected.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    #[serde(default = "default_timeout_secs")]
    pub timeout_secs: u64,
    #[serde(default = "default_max_retries")]
    pub max_retries: u32,
    #[serde(default = "default_backoff_ms")]
    pub backoff_initial_ms: u64,
}

fn default_timeout_secs() -> u64 {
    30
}
fn default_max_retries() -> u32 {
    2
}
fn default_backoff_ms() -> u64 {
    1000
}

impl ProviderConfig {
    pub fn mock(provider_id: &str) -> ProviderConfig {
        ProviderConfig {
            provider_id: provider_id.to_string(),
            kind: ProviderKind::Mock,
            endpoint: String::new(),
            model_name: String::new(),
            api_key_env: None,
            dimension: None,
            timeout_secs: default_timeout_secs(),
            max_retries: 0,
            backoff_initial_ms: 0,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.provider_id.is_empty() {
            return Err("provider_id must not be empty".to_string());
        }
        if self.kind == ProviderKind::Http && self.endpoint.is_empty() {
            return Err("http providers require an endpoint".to_string());
        }
        Ok(())
    }

    pub fn from_path(path: &Path) -> Result<ProviderConfig, ConfigError> {
        let config: ProviderConfig = load_toml(path)?;
        config.validate().map_err(|m| ConfigError::invalid(path, m))?;
        Ok(config)
    }
}

/// Instantiate the provider described by a config.
pub fn build_provider(config: &ProviderConfig) -> Result<Box<dyn EmbeddingProvider>, ConfigError> {
    match config.kind {
        ProviderKind::Mock => Ok(Box::new(MockEmbeddingProvider::new(config.provider_id.clone()))),
        ProviderKind::Http => Ok(Box::new(HttpEmbeddingProvider::new(config.clone()))),
    }
}

/// Deterministic bag-of-words provider; see the module docs for the layout.
pub struct MockEmbeddingProvider {
    provider_id: String,
}

impl MockEmbeddingProvider {
    pub fn new(provider_id: String) -> MockEmbeddingProvider {
        MockEmbeddingProvider { provider_id }
    }
}

impl EmbeddingProvider for MockEmbeddingProvider {
    fn provider_id(&self) -> &str {
        &self.provider_id
    }

    fn embed_text(&self, text: &str) -> Result<EmbeddingVector, ReflexError> {
        let mut values = vec![0.0; MOCK_EMBEDDING_DIM];
        for token in tokenize(text).tokens() {
            let bucket = (fnv1a_64(token.as_bytes()) % MOCK_EMBEDDING_DIM as u64) as usize;
            values[bucket] += 1.0;
        }
        EmbeddingVector::new(values, self.provider_id.clone())
    }
}

/// Minimal HTTP embedding client: `{"model": ..., "input": text}` in,
/// `{"embedding": [..]}` out.
pub struct HttpEmbeddingProvider {
    config: ProviderConfig,
    agent: ureq::Agent,
}

impl HttpEmbeddingProvider {
    pub fn new(config: ProviderConfig) -> HttpEmbeddingProvider {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(config.timeout_secs)))
            .build()
            .into();
        HttpEmbeddingProvider { config, agent }
    }
}

impl EmbeddingProvider for HttpEmbeddingProvider {
    fn provider_id(&self) -> &str {
        &self.config.provider_id
    }

    fn embed_text(&self, text: &str) -> Result<EmbeddingVector, ReflexError> {
        let api_key = match &self.config.api_key_env {
            None => None,
            Some(env) => Some(std::env::var(env).map_err(|_| {
                ReflexError::Transport {
                    message: format!("environment variable {env} is not set"),
                    attempts: 0,
                }
            })?),
        };
        let body = serde_json::json!({
            "model": self.config.model_name,
            "input": text,
        });
        let policy = RetryPolicy {
            max_retries: self.config.max_retries,
            initial_delay: Duration::from_millis(self.config.backoff_initial_ms),
        };
        let outcome = retry_with_backoff(&policy, |_| {
            let mut request = self.agent.post(&self.config.endpoint);
            if let Some(key) = &api_key {
                request = request.header("authorization", &format!("Bearer {key}"));
            }
            match request.send_json(&body) {
                Ok(mut response) => response
                    .body_mut()
                    .read_to_string()
                    .map_err(|e| (e.to_string(), RetryClass::Transient)),
                Err(ureq::Error::StatusCode(code)) => {
                    let class = if code == 408 || code == 429 || code >= 500 {
                        RetryClass::Transient
                    } else {
                        RetryClass::Permanent
                    };
                    Err((format!("HTTP status {code}"), class))
                }
                Err(other) => Err((other.to_string(), RetryClass::Transient)),
            }
        });
        let (raw, _attempts) = outcome.map_err(|(message, attempts)| ReflexError::Transport {
            message,
            attempts,
        })?;

        let parsed: serde_json::Value = serde_json::from_str(&raw)
            .map_err(|e| ReflexError::InvalidEmbedding(e.to_string()))?;
        let values: Vec<f64> = parsed["embedding"]
            .as_array()
            .ok_or_else(|| ReflexError::InvalidEmbedding("missing `embedding` array".into()))?
            .iter()
            .map(|v| v.as_f64().ok_or_else(|| ReflexError::InvalidEmbedding("non-numeric entry".into())))
            .collect::<Result<_, _>>()?;
        if let Some(expected) = self.config.dimension {
            if values.len() != expected {
                return Err(ReflexError::InvalidEmbedding(format!(
                    "expected dimension {expected}, got {}",
                    values.len()
                )));
            }
        }
        EmbeddingVector::new(values, self.config.provider_id.clone())
    }
}
