//! Prompt construction and summary generation over pluggable chat backends.

pub mod backend;

pub use backend::{
    build_backend, BackendConfig, BackendError, BackendKind, ChatBackend, Completion,
    HttpChatBackend, MockChatBackend,
};

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::ingest::{estimate_tokens, LogGroup};

/// Instruction prefix every prompt begins with.
pub const PROMPT_PREFIX: &str = "Summarize the following logs:\n";

/// A fully built prompt for one log group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prompt {
    pub text: String,
    pub group_id: String,
    pub estimated_tokens: usize,
}

/// Prompt text is the fixed prefix plus the group's line messages joined by
/// single newlines, with nothing appended after the last message.
pub fn build_prompt(group: &LogGroup) -> Prompt {
    debug_assert!(!group.lines.is_empty(), "log groups carry at least one line");
    let mut text = String::with_capacity(
        PROMPT_PREFIX.len() + group.lines.iter().map(|l| l.message.len() + 1).sum::<usize>(),
    );
    text.push_str(PROMPT_PREFIX);
    for (i, message) in group.messages().enumerate() {
        if i > 0 {
            text.push('\n');
        }
        text.push_str(message);
    }
    let estimated_tokens = estimate_tokens(&text);
    Prompt {
        text,
        group_id: group.group_id.clone(),
        estimated_tokens,
    }
}

/// Cut a prompt down to a token budget, dropping bytes from the tail. The
/// instruction prefix is never truncated.
pub fn truncate_to_budget(text: String, budget_tokens: Option<usize>) -> (String, bool) {
    let Some(budget) = budget_tokens else {
        return (text, false);
    };
    if estimate_tokens(&text) <= budget {
        return (text, false);
    }
    let mut end = (budget * 4).clamp(PROMPT_PREFIX.len(), text.len());
    while !text.is_char_boundary(end) {
        end -= 1;
    }
    let mut truncated = text;
    truncated.truncate(end);
    (truncated, true)
}

/// One generated summary plus how it was obtained.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SummaryResult {
    pub group_id: String,
    pub backend_id: String,
    pub summary: String,
    pub latency_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prompt_tokens: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub completion_tokens: Option<u64>,
    pub attempt_count: u32,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub truncated: bool,
}

/// Why a (backend, group) pair produced no summary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    Transport,
    Content,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SummaryFailure {
    pub group_id: String,
    pub backend_id: String,
    pub kind: FailureKind,
    pub message: String,
}

/// Per-pair outcome: either a summary or a recorded failure. Failures never
/// abort a run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SummaryOutcome {
    Ok(SummaryResult),
    Failed(SummaryFailure),
}

impl SummaryOutcome {
    pub fn backend_id(&self) -> &str {
        match self {
            SummaryOutcome::Ok(r) => &r.backend_id,
            SummaryOutcome::Failed(f) => &f.backend_id,
        }
    }

    pub fn group_id(&self) -> &str {
        match self {
            SummaryOutcome::Ok(r) => &r.group_id,
            SummaryOutcome::Failed(f) => &f.group_id,
        }
    }
}

/// Summarize one group with one backend: build the prompt, enforce the input
/// budget, call the backend (which retries transient failures internally),
/// and normalize the output.
pub fn summarize_group(backend: &dyn ChatBackend, group: &LogGroup) -> SummaryOutcome {
    let config = backend.config();
    let prompt = build_prompt(group);
    let (text, truncated) = truncate_to_budget(prompt.text, config.max_input_tokens);
    if truncated {
        eprintln!(
            "warning: prompt for {} exceeds the {} token budget of {}; truncated",
            group.group_id,
            config.max_input_tokens.unwrap_or_default(),
            config.backend_id
        );
    }

    let started = Instant::now();
    match backend.complete(&text, config.temperature) {
        Ok(completion) => {
            let summary = completion.text.trim().to_string();
            if summary.is_empty() {
                return SummaryOutcome::Failed(SummaryFailure {
                    group_id: group.group_id.clone(),
                    backend_id: config.backend_id.clone(),
                    kind: FailureKind::Content,
                    message: "backend returned empty output".to_string(),
                });
            }
            SummaryOutcome::Ok(SummaryResult {
                group_id: group.group_id.clone(),
                backend_id: config.backend_id.clone(),
                summary,
                latency_ms: duration_ms(started.elapsed()),
                prompt_tokens: completion.prompt_tokens,
                completion_tokens: completion.completion_tokens,
                attempt_count: completion.attempts,
                truncated,
            })
        }
        Err(err) => SummaryOutcome::Failed(SummaryFailure {
            group_id: group.group_id.clone(),
            backend_id: config.backend_id.clone(),
            kind: match err {
                BackendError::EmptyCompletion | BackendError::MalformedResponse(_) => FailureKind::Content,
                _ => FailureKind::Transport,
            },
            message: err.to_string(),
        }),
    }
}

fn duration_ms(d: Duration) -> u64 {
    u64::try_from(d.as_millis()).unwrap_or(u64::MAX)
}

/// Run every backend over every group with a bounded worker pool, then sort
/// outcomes by `(backend_id, group_id)` so output order is independent of
/// scheduling.
pub fn run_backends(
    backends: &[Box<dyn ChatBackend>],
    groups: &[LogGroup],
    concurrency: usize,
) -> Vec<SummaryOutcome> {
    let mut seen = std::collections::HashSet::new();
    for backend in backends {
        assert!(
            seen.insert(backend.config().backend_id.clone()),
            "backend ids must be unique within a run: {}",
            backend.config().backend_id
        );
    }

    let jobs: Vec<(usize, &LogGroup)> = backends
        .iter()
        .enumerate()
        .flat_map(|(bi, _)| groups.iter().map(move |g| (bi, g)))
        .collect();

    let next = AtomicUsize::new(0);
    let outcomes: Mutex<Vec<SummaryOutcome>> = Mutex::new(Vec::with_capacity(jobs.len()));
    std::thread::scope(|scope| {
        for _ in 0..concurrency.max(1).min(jobs.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some((bi, group)) = jobs.get(i) else { break };
                let outcome = summarize_group(backends[*bi].as_ref(), group);
                outcomes.lock().expect("worker poisoned").push(outcome);
            });
        }
    });

    let mut outcomes = outcomes.into_inner().expect("worker poisoned");
    outcomes.sort_by(|a, b| {
        (a.backend_id(), a.group_id()).cmp(&(b.backend_id(), b.group_id()))
    });
    outcomes
}
