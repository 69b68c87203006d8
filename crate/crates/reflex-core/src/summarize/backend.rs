//! Chat-completion backends: a minimal HTTP JSON client plus in-process
//! deterministic mocks that implement the same interface.
//!
//! The wire contract is a single user message in, a single text choice out:
//!
//! ```json
//! {"model": "...", "messages": [{"role": "user", "content": "..."}],
//!  "temperature": 0.3, "max_tokens": 256}
//! ```
//!
//! responses are expected as `{"choices":[{"message":{"content":"..."}}]}`
//! with an optional `usage` object. Credentials are read from the
//! environment variable named in the config, never from the config itself.

use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{load_toml, ConfigError};
use crate::net::{retry_with_backoff, RetryClass, RetryPolicy};

#[derive(Debug, Error)]
pub enum BackendError {
    #[error("transport failure after {attempts} attempt(s): {message}")]
    Transport { message: String, attempts: u32 },
    #[error("backend returned an empty completion")]
    EmptyCompletion,
    #[error("malformed backend response: {0}")]
    MalformedResponse(String),
    #[error("environment variable {0} is not set")]
    MissingApiKey(String),
}

/// How a backend is reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    #[default]
    Http,
    /// Deterministic extractive summarizer, a pure function of the prompt.
    Mock,
    /// Deterministic judge that answers with a valid verdict JSON object.
    MockJudge,
}

/// Settings for one summarization or judging backend.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BackendConfig {
    pub backend_id: String,
    #[serde(default)]
    pub kind: BackendKind,
    #[serde(default)]
    pub endpoint: String,
    #[serde(default)]
    pub model_name: String,
    #[serde(default = "default_temperature")]
    pub temperature: f64,
    #[serde(default = "default_max_output_tokens")]
    pub max_output_tokens: u32,
    #[serde(default = "default_timeout_secs")]
    pub timeout_secs: u64,
    #[serde(default = "default_max_retries")]
    pub max_retries: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub api_key_env: Option<String>,
    /// Input budget in estimated tokens; prompts over it are tail-truncated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_input_tokens: Option<usize>,
    #[serde(default = "default_backoff_ms")]
    pub backoff_initial_ms: u64,
    /// Mock only: simulate a transport failure when the prompt matches.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fail_pattern: Option<String>,
}

fn default_temperature() -> f64 {
    0.3
}
fn default_max_output_tokens() -> u32 {
    256
}
fn default_timeout_secs() -> u64 {
    30
}
fn default_max_retries() -> u32 {
    3
}
fn default_backoff_ms() -> u64 {
    1000
}

impl BackendConfig {
    /// A mock backend with defaults, mainly for tests and dry runs.
    pub fn mock(backend_id: &str) -> BackendConfig {
        BackendConfig {
            backend_id: backend_id.to_string(),
            kind: BackendKind::Mock,
            endpoint: String::new(),
            model_name: "mock".to_string(),
            temperature: default_temperature(),
            max_output_tokens: default_max_output_tokens(),
            timeout_secs: default_timeout_secs(),
            max_retries: 0,
            api_key_env: None,
            max_input_tokens: None,
            backoff_initial_ms: 0,
            fail_pattern: None,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.backend_id.is_empty() {
            return Err("backend_id must not be empty".to_string());
        }
        if !(0.0..=2.0).contains(&self.temperature) {
            return Err(format!("temperature {} outside [0.0, 2.0]", self.temperature));
        }
        if self.max_output_tokens == 0 {
            return Err("max_output_tokens must be positive".to_string());
        }
        if self.kind == BackendKind::Http && self.endpoint.is_empty() {
            return Err("http backends require an endpoint".to_string());
        }
        Ok(())
    }

    /// Load and validate a backend config from a TOML file.
    pub fn from_path(path: &Path) -> Result<BackendConfig, ConfigError> {
        let config: BackendConfig = load_toml(path)?;
        config.validate().map_err(|m| ConfigError::invalid(path, m))?;
        Ok(config)
    }

    fn retry_policy(&self) -> RetryPolicy {
        RetryPolicy {
            max_retries: self.max_retries,
            initial_delay: Duration::from_millis(self.backoff_initial_ms),
        }
    }
}

/// One completion from a backend.
#[derive(Debug, Clone)]
pub struct Completion {
    pub text: String,
    pub prompt_tokens: Option<u64>,
    pub completion_tokens: Option<u64>,
    pub attempts: u32,
}

/// A chat-completion backend. Implementations retry transient transport
/// failures internally and report how many attempts they used.
pub trait ChatBackend: Send + Sync {
    fn config(&self) -> &BackendConfig;
    fn complete(&self, prompt: &str, temperature: f64) -> Result<Completion, BackendError>;
}

/// Instantiate the backend described by a config.
pub fn build_backend(config: &BackendConfig) -> Result<Box<dyn ChatBackend>, ConfigError> {
    match config.kind {
        BackendKind::Http => Ok(Box::new(HttpChatBackend::new(config.clone()))),
        BackendKind::Mock => Ok(Box::new(MockChatBackend::new(config.clone()))),
        BackendKind::MockJudge => Ok(Box::new(crate::reflex::MockJudgeBackend::new(config.clone()))),
    }
}

// -- HTTP -------------------------------------------------------------------

pub struct HttpChatBackend {
    config: BackendConfig,
    agent: ureq::Agent,
}

impl HttpChatBackend {
    pub fn new(config: BackendConfig) -> HttpChatBackend {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(config.timeout_secs)))
            .build()
            .into();
        HttpChatBackend { config, agent }
    }

    fn api_key(&self) -> Result<Option<String>, BackendError> {
        match &self.config.api_key_env {
            None => Ok(None),
            Some(env) => std::env::var(env)
                .map(Some)
                .map_err(|_| BackendError::MissingApiKey(env.clone())),
        }
    }
}

impl ChatBackend for HttpChatBackend {
    fn config(&self) -> &BackendConfig {
        &self.config
    }

    fn complete(&self, prompt: &str, temperature: f64) -> Result<Completion, BackendError> {
        let api_key = self.api_key()?;
        let body = serde_json::json!({
            "model": self.config.model_name,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": temperature,
            "max_tokens": self.config.max_output_tokens,
        });

        let outcome = retry_with_backoff(&self.config.retry_policy(), |_| {
            let mut request = self.agent.post(&self.config.endpoint);
            if let Some(key) = &api_key {
                request = request.header("authorization", &format!("Bearer {key}"));
            }
            match request.send_json(&body) {
                Ok(mut response) => {
                    let text = response
                        .body_mut()
                        .read_to_string()
                        .map_err(|e| (e.to_string(), RetryClass::Transient))?;
                    Ok(text)
                }
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

        let (raw, attempts) = outcome.map_err(|(message, attempts)| BackendError::Transport {
            message,
            attempts,
        })?;
        let parsed: serde_json::Value = serde_json::from_str(&raw)
            .map_err(|e| BackendError::MalformedResponse(e.to_string()))?;
        let text = parsed["choices"][0]["message"]["content"]
            .as_str()
            .ok_or_else(|| {
                BackendError::MalformedResponse("missing choices[0].message.content".to_string())
            })?
            .to_string();
        if text.trim().is_empty() {
            return Err(BackendError::EmptyCompletion);
        }
        Ok(Completion {
            text,
            prompt_tokens: parsed["usage"]["prompt_tokens"].as_u64(),
            completion_tokens: parsed["usage"]["completion_tokens"].as_u64(),
            attempts,
        })
    }
}

// -- mocks ------------------------------------------------------------------

/// Deterministic extractive mock: the first clause of the first, middle, and
/// last prompt lines joined by `"; "`. Depends on nothing but the prompt
/// text, so identical prompts always produce identical summaries.
pub struct MockChatBackend {
    config: BackendConfig,
}

impl MockChatBackend {
    pub fn new(config: BackendConfig) -> MockChatBackend {
        MockChatBackend { config }
    }
}

impl ChatBackend for MockChatBackend {
    fn config(&self) -> &BackendConfig {
        &self.config
    }

    fn complete(&self, prompt: &str, _temperature: f64) -> Result<Completion, BackendError> {
        if let Some(pattern) = &self.config.fail_pattern {
            if prompt.contains(pattern.as_str()) {
                return Err(BackendError::Transport {
                    message: "injected mock failure".to_string(),
                    attempts: 1,
                });
            }
        }
        let text = extractive_summary(prompt);
        if text.is_empty() {
            return Err(BackendError::EmptyCompletion);
        }
        Ok(Completion {
            text,
            prompt_tokens: Some(crate::ingest::estimate_tokens(prompt) as u64),
            completion_tokens: None,
            attempts: 1,
        })
    }
}

fn extractive_summary(prompt: &str) -> String {
    // Everything after the instruction line is log content.
    let body = prompt.split_once('\n').map(|(_, rest)| rest).unwrap_or("");
    let lines: Vec<&str> = body.lines().filter(|l| !l.trim().is_empty()).collect();
    if lines.is_empty() {
        return String::new();
    }
    let mut picks = vec![0, lines.len() / 2, lines.len() - 1];
    picks.dedup();
    picks
        .into_iter()
        .map(|i| first_clause(lines[i]))
        .collect::<Vec<_>>()
        .join("; ")
}

/// The line up to its first clause boundary: a `;`, `:`, or `.` followed by
/// whitespace or end of line.
fn first_clause(line: &str) -> &str {
    let line = line.trim();
    let bytes = line.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        if matches!(b, b';' | b':' | b'.') {
            let boundary = match bytes.get(i + 1) {
                None => true,
                Some(next) => next.is_ascii_whitespace(),
            };
            if boundary {
                let clause = line[..i].trim_end();
                if !clause.is_empty() {
                    return clause;
                }
            }
        }
    }
    line
}

/// FNV-1a 64-bit; used to bucket tokens for the mock embedding provider and
/// to derive stable pseudo-ratings for the mock judge.
pub(crate) fn fnv1a_64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}
