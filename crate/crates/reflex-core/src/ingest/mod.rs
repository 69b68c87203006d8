//! Log ingestion: parse heterogeneous raw logs into a normalized form,
//! filter noise, and segment the survivors into fixed-size log groups.
//!
//! The output of this module is the line-delimited interchange format
//! consumed by every downstream stage: one JSON object per log group with
//! fields `group_id`, `dataset`, `lines[]`, and optional `reference_summary`.

mod interchange;
mod parse;

pub use interchange::{parse_dataset, read_dataset, write_dataset};
pub use parse::parse_line;

use std::path::Path;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default lines per group.
pub const DEFAULT_GROUP_SIZE: usize = 20;

/// Marker prefix that ends a log block in paired (gold-summary) files.
pub const PAIRED_SUMMARY_MARKER: &str = "Summary:";

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid filter pattern `{pattern}`: {source}")]
    InvalidPattern {
        pattern: String,
        #[source]
        source: Box<regex::Error>,
    },
    #[error("paired file {path}: group {ordinal} has log lines but no summary")]
    PairedGroupMissingSummary { path: String, ordinal: usize },
    #[error("paired file {path}: group {ordinal} has a summary but no log lines")]
    PairedSummaryWithoutLines { path: String, ordinal: usize },
    #[error("{path}:{line}: {reason}")]
    MalformedInterchange {
        path: String,
        line: usize,
        reason: String,
    },
    #[error("log group must contain at least one line")]
    EmptyGroup,
}

/// Wire format a raw line was parsed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceFormat {
    Syslog,
    Json,
    ApacheCommon,
    Plain,
}

/// Severity levels, ordered from least to most severe. `Unknown` covers
/// level strings outside the recognized set and never matches level filters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum LogLevel {
    Trace,
    Debug,
    Info,
    Warn,
    Error,
    Fatal,
    Unknown,
}

impl LogLevel {
    /// Case-insensitive parse of common level spellings. Returns `None` for
    /// strings that are not level names at all.
    pub fn parse(s: &str) -> Option<LogLevel> {
        match s.to_ascii_uppercase().as_str() {
            "TRACE" => Some(LogLevel::Trace),
            "DEBUG" => Some(LogLevel::Debug),
            "INFO" => Some(LogLevel::Info),
            "WARN" | "WARNING" => Some(LogLevel::Warn),
            "ERROR" | "ERR" => Some(LogLevel::Error),
            "FATAL" | "CRITICAL" | "SEVERE" => Some(LogLevel::Fatal),
            _ => None,
        }
    }
}

impl std::fmt::Display for LogLevel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            LogLevel::Trace => "TRACE",
            LogLevel::Debug => "DEBUG",
            LogLevel::Info => "INFO",
            LogLevel::Warn => "WARN",
            LogLevel::Error => "ERROR",
            LogLevel::Fatal => "FATAL",
            LogLevel::Unknown => "UNKNOWN",
        };
        f.write_str(name)
    }
}

/// One normalized log line. `raw` is the original line and is never modified
/// after construction; `message` is the extracted, trimmed payload and is
/// always non-empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawLogLine {
    pub source_format: SourceFormat,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<LogLevel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub component: Option<String>,
    pub message: String,
    pub raw: String,
}

/// An ordered window of log lines treated as one summarization unit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogGroup {
    pub group_id: String,
    pub dataset: String,
    pub lines: Vec<RawLogLine>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_summary: Option<String>,
}

impl LogGroup {
    pub fn new(
        group_id: String,
        dataset: String,
        lines: Vec<RawLogLine>,
        reference_summary: Option<String>,
    ) -> Result<LogGroup, IngestError> {
        if lines.is_empty() {
            return Err(IngestError::EmptyGroup);
        }
        Ok(LogGroup { group_id, dataset, lines, reference_summary })
    }

    /// Extracted message of every line, in original order.
    pub fn messages(&self) -> impl Iterator<Item = &str> {
        self.lines.iter().map(|l| l.message.as_str())
    }
}

/// Where a dataset came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub source: String,
    pub format: String,
}

/// A named, ordered collection of log groups.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub groups: Vec<LogGroup>,
    pub provenance: Provenance,
}

/// A noise filter. A line matched by any rule is removed.
#[derive(Debug, Clone)]
pub enum FilterRule {
    /// Matches lines whose level is at or below the threshold; lines without
    /// a level (or with `Unknown`) never match.
    LevelAtOrBelow(LogLevel),
    /// Matches lines whose message matches the regular expression.
    Pattern(Regex),
}

impl FilterRule {
    /// Compile a pattern rule, reporting bad regexes before any filtering runs.
    pub fn pattern(pattern: &str) -> Result<FilterRule, IngestError> {
        Regex::new(pattern)
            .map(FilterRule::Pattern)
            .map_err(|source| IngestError::InvalidPattern {
                pattern: pattern.to_string(),
                source: Box::new(source),
            })
    }

    fn matches(&self, line: &RawLogLine) -> bool {
        match self {
            FilterRule::LevelAtOrBelow(threshold) => match line.level {
                Some(LogLevel::Unknown) | None => false,
                Some(level) => level <= *threshold,
            },
            FilterRule::Pattern(re) => re.is_match(&line.message),
        }
    }
}

/// The stock noise rules: debug-and-below chatter and heartbeat messages.
pub fn default_filters() -> Vec<FilterRule> {
    vec![
        FilterRule::LevelAtOrBelow(LogLevel::Debug),
        FilterRule::Pattern(Regex::new("(?i)heartbeat").expect("static pattern compiles")),
    ]
}

/// Keep the subsequence of lines matched by no rule; order is preserved and
/// an empty rule list is the identity.
pub fn filter_noise(lines: Vec<RawLogLine>, rules: &[FilterRule]) -> Vec<RawLogLine> {
    if rules.is_empty() {
        return lines;
    }
    lines
        .into_iter()
        .filter(|line| !rules.iter().any(|rule| rule.matches(line)))
        .collect()
}

/// Fixed-window partition: every group has exactly `group_size` lines except
/// possibly the last; concatenating the groups reproduces the input.
///
/// Group ids are `{dataset}-{ordinal}` with the ordinal zero-padded to at
/// least three digits (wider when the dataset needs it), so ids stay unique
/// and lexicographically ordered.
pub fn chunk_into_groups(dataset: &str, lines: Vec<RawLogLine>, group_size: usize) -> Vec<LogGroup> {
    assert!(group_size >= 1, "group_size must be at least 1");
    if lines.is_empty() {
        return Vec::new();
    }
    let group_count = lines.len().div_ceil(group_size);
    let width = ordinal_width(group_count);

    let mut groups = Vec::with_capacity(group_count);
    let mut lines = lines;
    let mut ordinal = 0usize;
    while !lines.is_empty() {
        let rest = lines.split_off(lines.len().min(group_size));
        groups.push(LogGroup {
            group_id: format!("{dataset}-{ordinal:0width$}"),
            dataset: dataset.to_string(),
            lines,
            reference_summary: None,
        });
        lines = rest;
        ordinal += 1;
    }
    groups
}

fn ordinal_width(group_count: usize) -> usize {
    let mut max_ordinal = group_count.saturating_sub(1);
    let mut digits = 1;
    while max_ordinal >= 10 {
        max_ordinal /= 10;
        digits += 1;
    }
    digits.max(3)
}

/// `ceil(byte_length / 4)`; a cheap, provider-agnostic token estimate used
/// only for budget warnings and truncation.
pub fn estimate_tokens(text: &str) -> usize {
    text.len().div_ceil(4)
}

/// File-level layout of an input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Syslog,
    Json,
    Apache,
    Plain,
    /// Blocks of log lines each terminated by a `Summary:` line.
    Paired,
}

impl InputFormat {
    fn line_format(self) -> SourceFormat {
        match self {
            InputFormat::Syslog | InputFormat::Paired => SourceFormat::Syslog,
            InputFormat::Json => SourceFormat::Json,
            InputFormat::Apache => SourceFormat::ApacheCommon,
            InputFormat::Plain => SourceFormat::Plain,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            InputFormat::Syslog => "syslog",
            InputFormat::Json => "json",
            InputFormat::Apache => "apache",
            InputFormat::Plain => "plain",
            InputFormat::Paired => "paired",
        }
    }
}

/// Options for [`load_dataset`].
#[derive(Debug, Clone)]
pub struct LoadOptions {
    /// Dataset name; defaults to the input file stem.
    pub dataset_name: Option<String>,
    pub group_size: usize,
    /// Noise rules for raw inputs. Paired (gold) inputs are never filtered so
    /// blocks stay aligned with their provided summaries.
    pub filters: Vec<FilterRule>,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            dataset_name: None,
            group_size: DEFAULT_GROUP_SIZE,
            filters: default_filters(),
        }
    }
}

/// Ingestion counters, reported per input file.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IngestStats {
    pub lines_read: usize,
    pub dropped_empty: usize,
    pub parse_fallbacks: usize,
    pub filtered_out: usize,
    pub groups: usize,
}

/// Load a dataset from a raw log file (parse, filter, chunk) or a paired
/// gold-summary file (one group per block, summaries attached verbatim).
pub fn load_dataset(
    path: &Path,
    format: InputFormat,
    options: &LoadOptions,
) -> Result<(Dataset, IngestStats), IngestError> {
    let bytes = std::fs::read(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let text = String::from_utf8_lossy(&bytes);
    let name = options
        .dataset_name
        .clone()
        .unwrap_or_else(|| dataset_name_from_path(path));

    let (mut dataset, stats) = match format {
        InputFormat::Paired => parse_paired(&text, &name)?,
        _ => load_raw(&text, &name, format, options),
    };
    dataset.provenance.source = path.display().to_string();
    Ok((dataset, stats))
}

fn dataset_name_from_path(path: &Path) -> String {
    let stem = path
        .file_name()
        .map(|f| f.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string());
    stem.split('.').next().unwrap_or("dataset").to_string()
}

fn load_raw(text: &str, name: &str, format: InputFormat, options: &LoadOptions) -> (Dataset, IngestStats) {
    let mut stats = IngestStats::default();
    let line_format = format.line_format();
    let mut parsed = Vec::new();
    for raw in text.lines() {
        stats.lines_read += 1;
        match parse_line(raw, line_format) {
            Some(line) => {
                if line_format != SourceFormat::Plain && line.source_format == SourceFormat::Plain {
                    stats.parse_fallbacks += 1;
                }
                parsed.push(line);
            }
            None => stats.dropped_empty += 1,
        }
    }
    let before = parsed.len();
    let kept = filter_noise(parsed, &options.filters);
    stats.filtered_out = before - kept.len();

    let groups = chunk_into_groups(name, kept, options.group_size);
    stats.groups = groups.len();
    let dataset = Dataset {
        name: name.to_string(),
        groups,
        provenance: Provenance {
            source: String::new(),
            format: format.as_str().to_string(),
        },
    };
    (dataset, stats)
}

/// Parse paired (gold-summary) text: blocks of log lines, each terminated by
/// a `Summary:` line, blank lines separating blocks. Exposed at the text
/// level so callers (and fuzzers) can drive it without the filesystem.
pub fn parse_paired(text: &str, name: &str) -> Result<(Dataset, IngestStats), IngestError> {
    let mut stats = IngestStats::default();
    let line_format = SourceFormat::Syslog;
    let mut blocks: Vec<(Vec<RawLogLine>, String)> = Vec::new();
    let mut pending: Vec<RawLogLine> = Vec::new();

    for raw in text.lines() {
        stats.lines_read += 1;
        let trimmed = raw.trim();
        if let Some(summary) = trimmed.strip_prefix(PAIRED_SUMMARY_MARKER) {
            if pending.is_empty() {
                return Err(IngestError::PairedSummaryWithoutLines {
                    path: name.to_string(),
                    ordinal: blocks.len(),
                });
            }
            blocks.push((std::mem::take(&mut pending), summary.trim().to_string()));
        } else if trimmed.is_empty() {
            stats.dropped_empty += 1;
        } else {
            match parse_line(raw, line_format) {
                Some(line) => {
                    if line.source_format == SourceFormat::Plain {
                        stats.parse_fallbacks += 1;
                    }
                    pending.push(line);
                }
                None => stats.dropped_empty += 1,
            }
        }
    }
    if !pending.is_empty() {
        return Err(IngestError::PairedGroupMissingSummary {
            path: name.to_string(),
            ordinal: blocks.len(),
        });
    }

    let width = ordinal_width(blocks.len());
    let groups: Vec<LogGroup> = blocks
        .into_iter()
        .enumerate()
        .map(|(ordinal, (lines, summary))| LogGroup {
            group_id: format!("{name}-{ordinal:0width$}"),
            dataset: name.to_string(),
            lines,
            reference_summary: Some(summary),
        })
        .collect();
    stats.groups = groups.len();

    Ok((
        Dataset {
            name: name.to_string(),
            groups,
            provenance: Provenance {
                source: String::new(),
                format: InputFormat::Paired.as_str().to_string(),
            },
        },
        stats,
    ))
}
