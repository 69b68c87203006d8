//! Line-delimited interchange files: one JSON log group per line.
//!
//! This is the handoff format between pipeline stages, so reading validates
//! everything downstream code relies on: non-empty groups, non-empty
//! messages, unique group ids, and a consistent dataset name.

use std::collections::HashSet;
use std::io::Write;
use std::path::Path;

use super::{Dataset, IngestError, LogGroup, Provenance};

/// Serialize a dataset, one group per line, in group order.
pub fn write_dataset(dataset: &Dataset, out: &mut dyn Write) -> std::io::Result<()> {
    for group in &dataset.groups {
        let line = serde_json::to_string(group).expect("log group serializes");
        out.write_all(line.as_bytes())?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Parse an interchange file back into a dataset.
pub fn read_dataset(path: &Path) -> Result<Dataset, IngestError> {
    let text = std::fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let dataset = parse_dataset(&text, &path.display().to_string())?;
    Ok(dataset)
}

/// Parse interchange text. Exposed separately so callers (and fuzzers) can
/// drive the parser without touching the filesystem.
pub fn parse_dataset(text: &str, path: &str) -> Result<Dataset, IngestError> {
    let mut groups: Vec<LogGroup> = Vec::new();
    let mut seen_ids: HashSet<String> = HashSet::new();
    let mut name: Option<String> = None;

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let group: LogGroup = serde_json::from_str(line).map_err(|e| malformed(path, lineno, e.to_string()))?;
        if group.lines.is_empty() {
            return Err(malformed(path, lineno, format!("group {} has no lines", group.group_id)));
        }
        if group.lines.iter().any(|l| l.message.is_empty()) {
            return Err(malformed(path, lineno, format!("group {} contains an empty message", group.group_id)));
        }
        if !seen_ids.insert(group.group_id.clone()) {
            return Err(malformed(path, lineno, format!("duplicate group_id {}", group.group_id)));
        }
        match &name {
            None => name = Some(group.dataset.clone()),
            Some(expected) if *expected != group.dataset => {
                return Err(malformed(
                    path,
                    lineno,
                    format!("dataset mismatch: expected {expected}, found {}", group.dataset),
                ));
            }
            Some(_) => {}
        }
        groups.push(group);
    }

    Ok(Dataset {
        name: name.unwrap_or_else(|| "empty".to_string()),
        groups,
        provenance: Provenance {
            source: path.to_string(),
            format: "interchange".to_string(),
        },
    })
}

fn malformed(path: &str, line: usize, reason: String) -> IngestError {
    IngestError::MalformedInterchange {
        path: path.to_string(),
        line,
        reason,
    }
}
