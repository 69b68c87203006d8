use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use reflex_core::bench::{write_records, MetricKind, RecordStatus, ResultRecord};
use reflex_core::ingest::{LogGroup, RawLogLine, SourceFormat};
use reflex_core::metrics::{rouge_l, rouge_n, tokenize, RougeMode};
use reflex_core::reflex::{
    build_provider, reflex_embedding_score, reflex_judge_score, ProviderConfig,
};
use reflex_core::summarize::{build_backend, BackendConfig};

use crate::out::{progress, write_data};
use crate::{CliError, EvaluateReflexArgs, EvaluateRougeArgs, ReflexModeArg};

/// One line of a pairs file. `candidate` is always required; `reference`
/// feeds ROUGE and embedding mode, `messages` feeds judge mode.
#[derive(Debug, Deserialize)]
struct PairRecord {
    #[serde(default)]
    group_id: Option<String>,
    #[serde(default)]
    dataset: Option<String>,
    #[serde(default)]
    backend_id: Option<String>,
    candidate: String,
    #[serde(default)]
    reference: Option<String>,
    #[serde(default)]
    messages: Option<Vec<String>>,
}

impl PairRecord {
    fn group_id(&self, index: usize) -> String {
        self.group_id.clone().unwrap_or_else(|| format!("pair-{index:03}"))
    }

    fn dataset(&self) -> String {
        self.dataset.clone().unwrap_or_else(|| "pairs".to_string())
    }

    fn backend_id(&self) -> String {
        self.backend_id.clone().unwrap_or_else(|| "candidate".to_string())
    }
}

fn read_pairs(path: &Path) -> Result<Vec<PairRecord>, CliError> {
    if !path.is_file() {
        return Err(CliError::usage(format!("pairs file {} does not exist", path.display())));
    }
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::runtime(format!("failed to read {}: {e}", path.display())))?;
    let mut pairs = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let pair: PairRecord = serde_json::from_str(line).map_err(|e| {
            CliError::runtime(format!("{}:{}: malformed pair record: {e}", path.display(), idx + 1))
        })?;
        pairs.push(pair);
    }
    Ok(pairs)
}

fn emit(
    out: Option<&Path>,
    quiet: bool,
    records: Vec<ResultRecord>,
    mode_label: &str,
) -> Result<(), CliError> {
    // per-metric means over ok records, reported as a stderr summary
    let mut sums: BTreeMap<MetricKind, (f64, usize)> = BTreeMap::new();
    let mut failed = 0usize;
    for record in &records {
        match (record.status, record.value) {
            (RecordStatus::Ok, Some(v)) => {
                let entry = sums.entry(record.metric).or_insert((0.0, 0));
                entry.0 += v;
                entry.1 += 1;
            }
            _ => failed += 1,
        }
    }

    let mut buf = Vec::new();
    write_records(&records, &mut buf)
        .map_err(|e| CliError::runtime(format!("failed to serialize records: {e}")))?;
    write_data(out, &buf)?;

    for (metric, (sum, count)) in &sums {
        progress(
            quiet,
            format!("evaluate {mode_label}: mean {metric} = {:.4} over {count} pair(s)", sum / *count as f64),
        );
    }
    if failed > 0 {
        progress(quiet, format!("evaluate {mode_label}: {failed} failed record(s)"));
    }
    Ok(())
}

pub fn run_rouge(args: EvaluateRougeArgs, quiet: bool) -> Result<(), CliError> {
    let mode: RougeMode = args.mode.parse().map_err(CliError::Usage)?;
    let pairs = read_pairs(&args.pairs)?;

    let mut records = Vec::new();
    for (index, pair) in pairs.iter().enumerate() {
        let base = |metric: MetricKind, outcome: Result<f64, String>| {
            let (value, status, failure_reason) = match outcome {
                Ok(v) => (Some(v), RecordStatus::Ok, None),
                Err(reason) => (None, RecordStatus::Failed, Some(reason)),
            };
            ResultRecord {
                dataset: pair.dataset(),
                group_id: pair.group_id(index),
                backend_id: pair.backend_id(),
                metric,
                value,
                status,
                failure_reason,
            }
        };
        match pair.reference.as_deref() {
            Some(reference) => {
                let cand = tokenize(&pair.candidate);
                let refv = tokenize(reference);
                records.push(base(MetricKind::Rouge1, Ok(rouge_n(&cand, &refv, 1).select(mode))));
                records.push(base(MetricKind::Rouge2, Ok(rouge_n(&cand, &refv, 2).select(mode))));
                records.push(base(MetricKind::RougeL, Ok(rouge_l(&cand, &refv).select(mode))));
            }
            None => {
                let reason = "pair has no reference summary".to_string();
                records.push(base(MetricKind::Rouge1, Err(reason.clone())));
                records.push(base(MetricKind::Rouge2, Err(reason.clone())));
                records.push(base(MetricKind::RougeL, Err(reason)));
            }
        }
    }
    emit(args.out.as_deref(), quiet, records, "rouge")
}

pub fn run_reflex(args: EvaluateReflexArgs, quiet: bool) -> Result<(), CliError> {
    let pairs = read_pairs(&args.pairs)?;
    let records = match args.mode {
        ReflexModeArg::Embedding => {
            let provider_path = args
                .provider
                .as_ref()
                .ok_or_else(|| CliError::usage("--provider is required in embedding mode"))?;
            let config =
                ProviderConfig::from_path(provider_path).map_err(|e| CliError::usage(e.to_string()))?;
            let provider = build_provider(&config).map_err(|e| CliError::usage(e.to_string()))?;

            pairs
                .iter()
                .enumerate()
                .map(|(index, pair)| {
                    let outcome = reflex_embedding_score(
                        &pair.candidate,
                        pair.reference.as_deref(),
                        provider.as_ref(),
                    )
                    .map(|score| score.value)
                    .map_err(|e| e.to_string());
                    pair_record(pair, index, MetricKind::ReflexEmbedding, outcome)
                })
                .collect()
        }
        ReflexModeArg::Judge => {
            let judge_path = args
                .judge_backend
                .as_ref()
                .ok_or_else(|| CliError::usage("--judge-backend is required in judge mode"))?;
            let config =
                BackendConfig::from_path(judge_path).map_err(|e| CliError::usage(e.to_string()))?;
            let judge = build_backend(&config).map_err(|e| CliError::usage(e.to_string()))?;

            pairs
                .iter()
                .enumerate()
                .map(|(index, pair)| {
                    let outcome = match pair_group(pair, index) {
                        Ok(group) => reflex_judge_score(&group, &pair.candidate, judge.as_ref())
                            .map(|score| score.value)
                            .map_err(|e| e.to_string()),
                        Err(reason) => Err(reason),
                    };
                    pair_record(pair, index, MetricKind::ReflexJudge, outcome)
                })
                .collect()
        }
    };
    emit(args.out.as_deref(), quiet, records, "reflex")
}

fn pair_record(
    pair: &PairRecord,
    index: usize,
    metric: MetricKind,
    outcome: Result<f64, String>,
) -> ResultRecord {
    let (value, status, failure_reason) = match outcome {
        Ok(v) => (Some(v), RecordStatus::Ok, None),
        Err(reason) => (None, RecordStatus::Failed, Some(reason)),
    };
    ResultRecord {
        dataset: pair.dataset(),
        group_id: pair.group_id(index),
        backend_id: pair.backend_id(),
        metric,
        value,
        status,
        failure_reason,
    }
}

fn pair_group(pair: &PairRecord, index: usize) -> Result<LogGroup, String> {
    let messages = pair
        .messages
        .as_ref()
        .ok_or_else(|| "judge mode needs a `messages` field with the log lines".to_string())?;
    let lines: Vec<RawLogLine> = messages
        .iter()
        .filter(|m| !m.trim().is_empty())
        .map(|m| RawLogLine {
            source_format: SourceFormat::Plain,
            timestamp: None,
            level: None,
            component: None,
            message: m.trim().to_string(),
            raw: m.clone(),
        })
        .collect();
    if lines.is_empty() {
        return Err("judge mode needs at least one non-empty log line".to_string());
    }
    Ok(LogGroup {
        group_id: pair.group_id(index),
        dataset: pair.dataset(),
        lines,
        reference_summary: None,
    })
}
