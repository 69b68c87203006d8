//! Summary-quality scoring beyond lexical overlap, in two modes behind one
//! score type:
//!
//! * **embedding** — cosine similarity between dense embeddings of the
//!   generated and reference summaries (reference required);
//! * **judge** — reference-free LLM rating of the (log input, summary) pair
//!   on relevance, informativeness, and coherence, 1-5 each, normalized to
//!   a `[0.2, 1.0]` overall.

pub mod embedding;
pub mod judge;

pub use embedding::{
    build_provider, cosine_similarity, embed, Cosine, EmbeddingProvider, EmbeddingVector,
    HttpEmbeddingProvider, MockEmbeddingProvider, ProviderConfig, ProviderKind,
    MOCK_EMBEDDING_DIM,
};
pub use judge::{
    build_judge_prompt, judge_pair, parse_verdict, JudgeVerdict, MockJudgeBackend,
    JUDGE_REASK_LIMIT,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::LogGroup;
use crate::summarize::ChatBackend;

#[derive(Debug, Error)]
pub enum ReflexError {
    #[error("cannot score empty text")]
    EmptyText,
    #[error("embedding mode requires a reference summary; use judge mode for reference-free scoring")]
    MissingReference,
    #[error("embeddings are not comparable: {left} vs {right}")]
    ProviderMismatch { left: String, right: String },
    #[error("invalid embedding: {0}")]
    InvalidEmbedding(String),
    #[error("provider transport failure after {attempts} attempt(s): {message}")]
    Transport { message: String, attempts: u32 },
    #[error("verdict parse error: {0}")]
    VerdictParse(String),
    #[error("judge backend error: {0}")]
    Judge(String),
}

/// Which scoring mode produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReflexMode {
    Embedding,
    Judge,
}

/// A score from either mode. Embedding values are cosines in `[-1, 1]`;
/// judge values equal the verdict's overall in `[0.2, 1.0]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReflexScore {
    pub mode: ReflexMode,
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<JudgeVerdict>,
}

/// Score a generated summary against a reference by embedding cosine.
pub fn reflex_embedding_score(
    generated: &str,
    reference: Option<&str>,
    provider: &dyn EmbeddingProvider,
) -> Result<ReflexScore, ReflexError> {
    let reference = reference.ok_or(ReflexError::MissingReference)?;
    let generated_vec = embed(generated, provider)?;
    let reference_vec = embed(reference, provider)?;
    let cosine = cosine_similarity(&generated_vec, &reference_vec)?;
    if cosine.zero_norm {
        eprintln!("warning: zero-norm embedding while scoring; value forced to 0.0");
    }
    Ok(ReflexScore {
        mode: ReflexMode::Embedding,
        value: cosine.value,
        detail: None,
    })
}

/// Score a (log group, summary) pair with an LLM judge, reference-free.
pub fn reflex_judge_score(
    group: &LogGroup,
    summary: &str,
    judge: &dyn ChatBackend,
) -> Result<ReflexScore, ReflexError> {
    let verdict = judge_pair(group, summary, judge)?;
    Ok(ReflexScore {
        mode: ReflexMode::Judge,
        value: verdict.overall,
        detail: Some(verdict),
    })
}
