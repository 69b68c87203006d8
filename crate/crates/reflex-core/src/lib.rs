//! Log summarization benchmarking toolkit.
//!
//! The pipeline has four stages, each usable on its own:
//!
//! 1. [`ingest`] — parse raw syslog/JSON/Apache/plain logs, filter noise,
//!    and chunk the survivors into fixed-size log groups.
//! 2. [`summarize`] — build prompts from log groups and obtain summaries
//!    from interchangeable chat-completion backends (HTTP or in-process
//!    deterministic mock).
//! 3. [`metrics`] / [`reflex`] — score candidate summaries with ROUGE-1/2/L,
//!    embedding-cosine similarity, or reference-free LLM-judge ratings.
//! 4. [`mod@bench`] — orchestrate datasets x backends x metrics with
//!    response caching, aggregate per-dataset means, and render report
//!    tables.
//!
//! Stages communicate through line-delimited JSON files; see
//! [`ingest::write_dataset`] and [`bench::ResultRecord`].

pub mod bench;
pub mod config;
pub mod ingest;
pub mod metrics;
pub mod net;
pub mod reflex;
pub mod summarize;
