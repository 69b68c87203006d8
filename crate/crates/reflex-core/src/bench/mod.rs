//! Benchmark orchestration: datasets x backends x metrics with response
//! caching, per-dataset aggregation, and report rendering.

mod cache;
mod report;

pub use cache::{cache_key, ResponseCache};
pub use report::{render_report, ReportFormat};

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{load_toml, ConfigError};
use crate::ingest::{read_dataset, Dataset, IngestError, LogGroup};
use crate::metrics::{rouge_l, rouge_n, tokenize, RougeMode};
use crate::reflex::{
    build_judge_prompt, build_provider, cosine_similarity, embed, parse_verdict,
    EmbeddingProvider, EmbeddingVector, ProviderConfig, ReflexError,
};
use crate::summarize::{
    build_backend, build_prompt, truncate_to_budget, BackendConfig, ChatBackend, SummaryOutcome,
    SummaryResult,
};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("config validation: {0}")]
    Validation(String),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error("cache i/o: {0}")]
    Cache(#[from] std::io::Error),
}

/// One scored (dataset, group, backend, metric) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub dataset: String,
    pub group_id: String,
    pub backend_id: String,
    pub metric: MetricKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    pub status: RecordStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure_reason: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordStatus {
    Ok,
    Failed,
}

/// Metrics the runner can compute. The declaration order is the report row
/// order: ROUGE rows before REFLEX rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MetricKind {
    #[serde(rename = "rouge1")]
    Rouge1,
    #[serde(rename = "rouge2")]
    Rouge2,
    #[serde(rename = "rougeL")]
    RougeL,
    #[serde(rename = "reflex_embedding")]
    ReflexEmbedding,
    #[serde(rename = "reflex_judge")]
    ReflexJudge,
}

impl MetricKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MetricKind::Rouge1 => "rouge1",
            MetricKind::Rouge2 => "rouge2",
            MetricKind::RougeL => "rougeL",
            MetricKind::ReflexEmbedding => "reflex_embedding",
            MetricKind::ReflexJudge => "reflex_judge",
        }
    }

    /// Human-facing row label in reports.
    pub fn display_name(self) -> &'static str {
        match self {
            MetricKind::Rouge1 => "ROUGE-1",
            MetricKind::Rouge2 => "ROUGE-2",
            MetricKind::RougeL => "ROUGE-L",
            MetricKind::ReflexEmbedding => "REFLEX(embedding)",
            MetricKind::ReflexJudge => "REFLEX(judge)",
        }
    }

    fn needs_reference(self) -> bool {
        !matches!(self, MetricKind::ReflexJudge)
    }
}

impl std::fmt::Display for MetricKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A full benchmark run, usually loaded from a TOML file.
#[derive(Debug, Clone, Deserialize)]
pub struct RunConfig {
    /// Interchange files produced by ingestion.
    pub datasets: Vec<PathBuf>,
    /// Backend config files.
    pub backends: Vec<PathBuf>,
    pub metrics: Vec<MetricKind>,
    #[serde(default)]
    pub rouge_mode: RougeMode,
    #[serde(default)]
    pub embedding_provider: Option<PathBuf>,
    #[serde(default)]
    pub judge_backend: Option<PathBuf>,
    pub cache_dir: PathBuf,
    /// Accepted for config-format stability; the mock backends are pure
    /// functions of their prompts, so nothing consumes it today.
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_formats")]
    pub output_formats: Vec<ReportFormat>,
    #[serde(default)]
    pub records_out: Option<PathBuf>,
    #[serde(default)]
    pub report_dir: Option<PathBuf>,
    #[serde(default = "default_concurrency")]
    pub concurrency: usize,
}

fn default_formats() -> Vec<ReportFormat> {
    vec![ReportFormat::Markdown]
}
fn default_concurrency() -> usize {
    4
}

impl RunConfig {
    pub fn from_path(path: &std::path::Path) -> Result<RunConfig, ConfigError> {
        load_toml(path)
    }
}

/// A validated run: configs loaded, datasets read, compatibility checked.
#[derive(Debug)]
pub struct RunPlan {
    pub config: RunConfig,
    pub datasets: Vec<Dataset>,
    pub backend_configs: Vec<BackendConfig>,
    pub provider_config: Option<ProviderConfig>,
    pub judge_config: Option<BackendConfig>,
    /// Requested metrics, deduplicated, in report row order.
    pub metrics: Vec<MetricKind>,
}

impl RunPlan {
    pub fn pair_count(&self) -> usize {
        let groups: usize = self.datasets.iter().map(|d| d.groups.len()).sum();
        groups * self.backend_configs.len()
    }

    pub fn record_count(&self) -> usize {
        self.pair_count() * self.metrics.len()
    }

    /// Summary calls a run would perform right now, probing the cache
    /// read-only. Judge/embedding calls depend on generated summaries and
    /// can only be bounded from above.
    pub fn summary_calls_needed(&self) -> usize {
        let cache_dir = &self.config.cache_dir;
        let mut needed = 0;
        for dataset in &self.datasets {
            for backend in &self.backend_configs {
                for group in &dataset.groups {
                    let prompt = build_prompt(group);
                    let (text, _) = truncate_to_budget(prompt.text, backend.max_input_tokens);
                    let key = cache_key(&backend.backend_id, &backend.model_name, backend.temperature, &text);
                    if !cache_dir.join(&key).is_file() {
                        needed += 1;
                    }
                }
            }
        }
        needed
    }
}

/// Validate a run config: every referenced file must load, ids must be
/// unique, and reference-dependent metrics require datasets whose every
/// group carries a reference summary. Nothing is written.
pub fn validate_run(config: RunConfig) -> Result<RunPlan, BenchError> {
    if config.datasets.is_empty() {
        return Err(BenchError::Validation("no datasets configured".to_string()));
    }
    if config.backends.is_empty() {
        return Err(BenchError::Validation("no backends configured".to_string()));
    }
    if config.metrics.is_empty() {
        return Err(BenchError::Validation("metrics must be non-empty".to_string()));
    }
    if config.concurrency == 0 {
        return Err(BenchError::Validation("concurrency must be at least 1".to_string()));
    }

    let metrics: Vec<MetricKind> = config.metrics.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();

    let mut datasets = Vec::new();
    let mut dataset_names = BTreeSet::new();
    for path in &config.datasets {
        let dataset = read_dataset(path)?;
        if !dataset_names.insert(dataset.name.clone()) {
            return Err(BenchError::Validation(format!(
                "duplicate dataset name {} (from {})",
                dataset.name,
                path.display()
            )));
        }
        for metric in &metrics {
            if metric.needs_reference() {
                if let Some(group) = dataset.groups.iter().find(|g| g.reference_summary.is_none()) {
                    return Err(BenchError::Validation(format!(
                        "metric {metric} needs reference summaries, but group {} in dataset {} has none",
                        group.group_id, dataset.name
                    )));
                }
            }
        }
        datasets.push(dataset);
    }

    let mut backend_configs = Vec::new();
    let mut seen = BTreeSet::new();
    for path in &config.backends {
        let backend = BackendConfig::from_path(path)?;
        if !seen.insert(backend.backend_id.clone()) {
            return Err(BenchError::Validation(format!(
                "duplicate backend_id {}",
                backend.backend_id
            )));
        }
        backend_configs.push(backend);
    }

    let provider_config = if metrics.contains(&MetricKind::ReflexEmbedding) {
        let path = config.embedding_provider.as_ref().ok_or_else(|| {
            BenchError::Validation("reflex_embedding requires an embedding_provider config".to_string())
        })?;
        Some(ProviderConfig::from_path(path)?)
    } else {
        None
    };

    let judge_config = if metrics.contains(&MetricKind::ReflexJudge) {
        let path = config.judge_backend.as_ref().ok_or_else(|| {
            BenchError::Validation("reflex_judge requires a judge_backend config".to_string())
        })?;
        Some(BackendConfig::from_path(path)?)
    } else {
        None
    };

    Ok(RunPlan {
        config,
        datasets,
        backend_configs,
        provider_config,
        judge_config,
        metrics,
    })
}

/// Counters for one benchmark run.
#[derive(Debug, Default)]
pub struct RunStats {
    /// Live provider round-trips (summaries, judge asks, embeddings).
    pub provider_calls: usize,
    pub cache_hits: usize,
    pub ok_records: usize,
    pub failed_records: usize,
}

#[derive(Default)]
struct Counters {
    provider_calls: AtomicUsize,
    cache_hits: AtomicUsize,
}

#[derive(Serialize, Deserialize)]
struct CachedCompletion {
    text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    prompt_tokens: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    completion_tokens: Option<u64>,
}

/// Execute a validated plan: obtain one summary per (backend, group) pair
/// (cache first), score it with every requested metric, and return records
/// sorted by `(dataset, group_id, backend_id, metric)`.
pub fn run_benchmark(plan: &RunPlan) -> Result<(Vec<ResultRecord>, RunStats), BenchError> {
    let cache = ResponseCache::open(&plan.config.cache_dir)?;
    let backends: Vec<Box<dyn ChatBackend>> = plan
        .backend_configs
        .iter()
        .map(|cfg| build_backend(cfg))
        .collect::<Result<_, _>>()?;
    let provider: Option<Box<dyn EmbeddingProvider>> = match &plan.provider_config {
        Some(cfg) => Some(build_provider(cfg)?),
        None => None,
    };
    let judge: Option<Box<dyn ChatBackend>> = match &plan.judge_config {
        Some(cfg) => Some(build_backend(cfg)?),
        None => None,
    };

    let counters = Counters::default();
    let jobs: Vec<(&Dataset, &LogGroup, &dyn ChatBackend)> = plan
        .datasets
        .iter()
        .flat_map(|d| {
            backends
                .iter()
                .flat_map(move |b| d.groups.iter().map(move |g| (d, g, b.as_ref())))
        })
        .collect();

    let next = AtomicUsize::new(0);
    let collected: Mutex<Vec<ResultRecord>> = Mutex::new(Vec::with_capacity(jobs.len() * plan.metrics.len()));
    std::thread::scope(|scope| {
        for _ in 0..plan.config.concurrency.max(1).min(jobs.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(&(dataset, group, backend)) = jobs.get(i) else { break };
                let records = score_pair(
                    plan,
                    &cache,
                    &counters,
                    dataset,
                    group,
                    backend,
                    provider.as_deref(),
                    judge.as_deref(),
                );
                collected.lock().expect("worker poisoned").extend(records);
            });
        }
    });

    let mut records = collected.into_inner().expect("worker poisoned");
    records.sort_by(|a, b| {
        (&a.dataset, &a.group_id, &a.backend_id, a.metric)
            .cmp(&(&b.dataset, &b.group_id, &b.backend_id, b.metric))
    });

    let stats = RunStats {
        provider_calls: counters.provider_calls.load(Ordering::SeqCst),
        cache_hits: counters.cache_hits.load(Ordering::SeqCst),
        ok_records: records.iter().filter(|r| r.status == RecordStatus::Ok).count(),
        failed_records: records.iter().filter(|r| r.status == RecordStatus::Failed).count(),
    };
    Ok((records, stats))
}

#[allow(clippy::too_many_arguments)]
fn score_pair(
    plan: &RunPlan,
    cache: &ResponseCache,
    counters: &Counters,
    dataset: &Dataset,
    group: &LogGroup,
    backend: &dyn ChatBackend,
    provider: Option<&dyn EmbeddingProvider>,
    judge: Option<&dyn ChatBackend>,
) -> Vec<ResultRecord> {
    let record = |metric: MetricKind, outcome: Result<f64, String>| {
        let (value, status, failure_reason) = match outcome {
            Ok(v) => (Some(v), RecordStatus::Ok, None),
            Err(reason) => (None, RecordStatus::Failed, Some(reason)),
        };
        ResultRecord {
            dataset: dataset.name.clone(),
            group_id: group.group_id.clone(),
            backend_id: backend.config().backend_id.to_string(),
            metric,
            value,
            status,
            failure_reason,
        }
    };

    let summary = match obtain_summary(cache, counters, group, backend) {
        SummaryOutcome::Ok(result) => result,
        SummaryOutcome::Failed(failure) => {
            return plan
                .metrics
                .iter()
                .map(|&metric| record(metric, Err(failure.message.clone())))
                .collect();
        }
    };

    plan.metrics
        .iter()
        .map(|&metric| {
            let outcome = match metric {
                MetricKind::Rouge1 | MetricKind::Rouge2 | MetricKind::RougeL => {
                    rouge_value(metric, plan.config.rouge_mode, &summary.summary, group)
                }
                MetricKind::ReflexEmbedding => {
                    let provider = provider.expect("validated: provider present");
                    embedding_value(cache, counters, provider, &summary.summary, group)
                }
                MetricKind::ReflexJudge => {
                    let judge = judge.expect("validated: judge present");
                    judge_value(cache, counters, judge, &summary.summary, group)
                }
            };
            record(metric, outcome)
        })
        .collect()
}

fn obtain_summary(
    cache: &ResponseCache,
    counters: &Counters,
    group: &LogGroup,
    backend: &dyn ChatBackend,
) -> SummaryOutcome {
    let config = backend.config();
    let prompt = build_prompt(group);
    let (text, truncated) = truncate_to_budget(prompt.text, config.max_input_tokens);
    let key = cache_key(&config.backend_id, &config.model_name, config.temperature, &text);

    if let Some(body) = cache.get(&key) {
        if let Ok(cached) = serde_json::from_str::<CachedCompletion>(&body) {
            let summary = cached.text.trim().to_string();
            if !summary.is_empty() {
                counters.cache_hits.fetch_add(1, Ordering::SeqCst);
                return SummaryOutcome::Ok(SummaryResult {
                    group_id: group.group_id.clone(),
                    backend_id: config.backend_id.clone(),
                    summary,
                    latency_ms: 0,
                    prompt_tokens: cached.prompt_tokens,
                    completion_tokens: cached.completion_tokens,
                    attempt_count: 0,
                    truncated,
                });
            }
        }
    }

    counters.provider_calls.fetch_add(1, Ordering::SeqCst);
    let started = std::time::Instant::now();
    match backend.complete(&text, config.temperature) {
        Ok(completion) => {
            let summary = completion.text.trim().to_string();
            if summary.is_empty() {
                return SummaryOutcome::Failed(crate::summarize::SummaryFailure {
                    group_id: group.group_id.clone(),
                    backend_id: config.backend_id.clone(),
                    kind: crate::summarize::FailureKind::Content,
                    message: "backend returned empty output".to_string(),
                });
            }
            let body = serde_json::to_string(&CachedCompletion {
                text: completion.text.clone(),
                prompt_tokens: completion.prompt_tokens,
                completion_tokens: completion.completion_tokens,
            })
            .expect("completion serializes");
            if let Err(e) = cache.put(&key, &body) {
                eprintln!("warning: cache write failed for {key}: {e}");
            }
            SummaryOutcome::Ok(SummaryResult {
                group_id: group.group_id.clone(),
                backend_id: config.backend_id.clone(),
                summary,
                latency_ms: started.elapsed().as_millis() as u64,
                prompt_tokens: completion.prompt_tokens,
                completion_tokens: completion.completion_tokens,
                attempt_count: completion.attempts,
                truncated,
            })
        }
        Err(err) => SummaryOutcome::Failed(crate::summarize::SummaryFailure {
            group_id: group.group_id.clone(),
            backend_id: config.backend_id.clone(),
            kind: match err {
                crate::summarize::BackendError::EmptyCompletion
                | crate::summarize::BackendError::MalformedResponse(_) => {
                    crate::summarize::FailureKind::Content
                }
                _ => crate::summarize::FailureKind::Transport,
            },
            message: err.to_string(),
        }),
    }
}

fn rouge_value(
    metric: MetricKind,
    mode: RougeMode,
    candidate: &str,
    group: &LogGroup,
) -> Result<f64, String> {
    let reference = group
        .reference_summary
        .as_deref()
        .ok_or_else(|| format!("group {} has no reference summary", group.group_id))?;
    let cand = tokenize(candidate);
    let refv = tokenize(reference);
    let score = match metric {
        MetricKind::Rouge1 => rouge_n(&cand, &refv, 1),
        MetricKind::Rouge2 => rouge_n(&cand, &refv, 2),
        MetricKind::RougeL => rouge_l(&cand, &refv),
        _ => unreachable!("rouge_value only handles rouge metrics"),
    };
    Ok(score.select(mode))
}

fn embedding_value(
    cache: &ResponseCache,
    counters: &Counters,
    provider: &dyn EmbeddingProvider,
    candidate: &str,
    group: &LogGroup,
) -> Result<f64, String> {
    let reference = group
        .reference_summary
        .as_deref()
        .ok_or_else(|| format!("group {} has no reference summary", group.group_id))?;
    let generated = cached_embed(cache, counters, provider, candidate).map_err(|e| e.to_string())?;
    let reference = cached_embed(cache, counters, provider, reference).map_err(|e| e.to_string())?;
    let cosine = cosine_similarity(&generated, &reference).map_err(|e| e.to_string())?;
    if cosine.zero_norm {
        eprintln!(
            "warning: zero-norm embedding for group {}; cosine forced to 0.0",
            group.group_id
        );
    }
    Ok(cosine.value)
}

fn cached_embed(
    cache: &ResponseCache,
    counters: &Counters,
    provider: &dyn EmbeddingProvider,
    text: &str,
) -> Result<EmbeddingVector, ReflexError> {
    let key = cache_key(provider.provider_id(), "embedding", 0.0, text);
    if let Some(body) = cache.get(&key) {
        if let Ok(values) = serde_json::from_str::<Vec<f64>>(&body) {
            if let Ok(vector) = EmbeddingVector::new(values, provider.provider_id().to_string()) {
                counters.cache_hits.fetch_add(1, Ordering::SeqCst);
                return Ok(vector);
            }
        }
    }
    counters.provider_calls.fetch_add(1, Ordering::SeqCst);
    let vector = embed(text, provider)?;
    let body = serde_json::to_string(vector.values()).expect("values serialize");
    if let Err(e) = cache.put(&key, &body) {
        eprintln!("warning: cache write failed for {key}: {e}");
    }
    Ok(vector)
}

fn judge_value(
    cache: &ResponseCache,
    counters: &Counters,
    judge: &dyn ChatBackend,
    candidate: &str,
    group: &LogGroup,
) -> Result<f64, String> {
    if candidate.trim().is_empty() {
        return Err("cannot judge an empty summary".to_string());
    }
    let config = judge.config();
    let prompt = build_judge_prompt(group, candidate);
    let key = cache_key(&config.backend_id, &config.model_name, 0.0, &prompt);

    if let Some(body) = cache.get(&key) {
        if let Ok(verdict) = parse_verdict(&body, &config.backend_id) {
            counters.cache_hits.fetch_add(1, Ordering::SeqCst);
            return Ok(verdict.overall);
        }
    }

    counters.provider_calls.fetch_add(1, Ordering::SeqCst);
    let verdict = crate::reflex::judge_pair(group, candidate, judge).map_err(|e| e.to_string())?;
    let body = serde_json::json!({
        "relevance": verdict.relevance,
        "informativeness": verdict.informativeness,
        "coherence": verdict.coherence,
        "rationale": verdict.rationale,
    })
    .to_string();
    if let Err(e) = cache.put(&key, &body) {
        eprintln!("warning: cache write failed for {key}: {e}");
    }
    Ok(verdict.overall)
}

// -- aggregation --------------------------------------------------------------

/// Mean/coverage statistics for one (metric, dataset) cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellAggregate {
    /// Arithmetic mean over ok records; absent when no record succeeded.
    pub mean: Option<f64>,
    /// Fraction of ok records among all records for this cell.
    pub coverage: f64,
    pub ok_count: usize,
    pub total_count: usize,
    pub median: Option<f64>,
    pub std_dev: Option<f64>,
    pub failure_reasons: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateRow {
    pub metric: MetricKind,
    pub cells: Vec<CellAggregate>,
}

/// Per-backend table: metrics as rows, datasets as columns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateTable {
    pub backend_id: String,
    pub datasets: Vec<String>,
    pub rows: Vec<AggregateRow>,
}

/// Aggregate records into one table per backend. Cell means ignore failed
/// records; coverage reports how much of each cell succeeded. Record order
/// never affects the output.
pub fn aggregate(records: &[ResultRecord]) -> Vec<AggregateTable> {
    let backend_ids: BTreeSet<&str> = records.iter().map(|r| r.backend_id.as_str()).collect();

    backend_ids
        .into_iter()
        .map(|backend_id| {
            let mine: Vec<&ResultRecord> =
                records.iter().filter(|r| r.backend_id == backend_id).collect();
            let datasets: Vec<String> = mine
                .iter()
                .map(|r| r.dataset.clone())
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            let metrics: Vec<MetricKind> =
                mine.iter().map(|r| r.metric).collect::<BTreeSet<_>>().into_iter().collect();

            let rows = metrics
                .into_iter()
                .map(|metric| {
                    let cells = datasets
                        .iter()
                        .map(|dataset| {
                            let cell_records: Vec<&&ResultRecord> = mine
                                .iter()
                                .filter(|r| r.metric == metric && &r.dataset == dataset)
                                .collect();
                            aggregate_cell(&cell_records)
                        })
                        .collect();
                    AggregateRow { metric, cells }
                })
                .collect();

            AggregateTable {
                backend_id: backend_id.to_string(),
                datasets,
                rows,
            }
        })
        .collect()
}

fn aggregate_cell(records: &[&&ResultRecord]) -> CellAggregate {
    let mut ok_values: Vec<f64> = records
        .iter()
        .filter(|r| r.status == RecordStatus::Ok)
        .filter_map(|r| r.value)
        .collect();
    ok_values.sort_by(|a, b| a.partial_cmp(b).expect("record values are finite"));

    let total_count = records.len();
    let ok_count = ok_values.len();
    let coverage = if total_count == 0 {
        0.0
    } else {
        ok_count as f64 / total_count as f64
    };

    let mean = if ok_values.is_empty() {
        None
    } else {
        Some(ok_values.iter().sum::<f64>() / ok_count as f64)
    };
    let median = if ok_values.is_empty() {
        None
    } else if ok_count % 2 == 1 {
        Some(ok_values[ok_count / 2])
    } else {
        Some((ok_values[ok_count / 2 - 1] + ok_values[ok_count / 2]) / 2.0)
    };
    let std_dev = mean.map(|m| {
        (ok_values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / ok_count as f64).sqrt()
    });

    let failure_reasons: Vec<String> = records
        .iter()
        .filter(|r| r.status == RecordStatus::Failed)
        .filter_map(|r| r.failure_reason.clone())
        .collect();

    CellAggregate {
        mean,
        coverage,
        ok_count,
        total_count,
        median,
        std_dev,
        failure_reasons,
    }
}

/// Serialize records one JSON object per line.
pub fn write_records(records: &[ResultRecord], out: &mut dyn std::io::Write) -> std::io::Result<()> {
    for record in records {
        let line = serde_json::to_string(record).expect("record serializes");
        out.write_all(line.as_bytes())?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Parse records from line-delimited JSON.
pub fn read_records(text: &str, path: &str) -> Result<Vec<ResultRecord>, BenchError> {
    let mut records = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: ResultRecord = serde_json::from_str(line).map_err(|e| {
            BenchError::Validation(format!("{path}:{}: malformed record: {e}", idx + 1))
        })?;
        if record.status == RecordStatus::Ok && !record.value.is_some_and(f64::is_finite) {
            return Err(BenchError::Validation(format!(
                "{path}:{}: ok record without a finite value",
                idx + 1
            )));
        }
        records.push(record);
    }
    Ok(records)
}
