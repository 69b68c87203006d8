//! Reference-free LLM judging of (log input, summary) pairs.

use serde::{Deserialize, Serialize};

use super::ReflexError;
use crate::ingest::LogGroup;
use crate::summarize::backend::{fnv1a_64, BackendConfig, BackendError, ChatBackend, Completion};

/// Ratings a judge must produce, one 1-5 integer per dimension.
pub const JUDGE_DIMENSIONS: [&str; 3] = ["relevance", "informativeness", "coherence"];

/// Re-asks allowed after a verdict parse failure.
pub const JUDGE_REASK_LIMIT: u32 = 2;

/// A parsed judge response. `overall` is the mean of the three ratings
/// normalized to `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgeVerdict {
    pub relevance: u8,
    pub informativeness: u8,
    pub coherence: u8,
    pub overall: f64,
    pub rationale: String,
    pub judge_backend_id: String,
}

impl JudgeVerdict {
    fn overall_of(relevance: u8, informativeness: u8, coherence: u8) -> f64 {
        f64::from(u16::from(relevance) + u16::from(informativeness) + u16::from(coherence)) / 3.0 / 5.0
    }
}

/// Build the deterministic judging prompt for one (group, summary) pair.
///
/// The prompt carries the group's messages, the candidate summary, the three
/// dimension definitions with the 1-5 scale, and the exact response shape.
pub fn build_judge_prompt(group: &LogGroup, summary: &str) -> String {
    debug_assert!(!summary.trim().is_empty(), "judge summaries must be non-empty");
    let mut prompt = String::new();
    prompt.push_str("You are evaluating the quality of a log summary.\n\nLog lines:\n");
    for message in group.messages() {
        prompt.push_str(message);
        prompt.push('\n');
    }
    prompt.push_str("\nCandidate summary:\n");
    prompt.push_str(summary);
    prompt.push_str(
        "\n\nRate the candidate summary on each dimension with an integer from 1 (poor) to 5 (excellent):\n\
         - relevance: how well the summary reflects the important events in the log lines\n\
         - informativeness: how much useful detail from the log lines the summary retains\n\
         - coherence: how clear, fluent, and logically ordered the summary is\n\
         \n\
         Answer with a single flat JSON object and nothing else, exactly in this form:\n\
         {\"relevance\": <1-5>, \"informativeness\": <1-5>, \"coherence\": <1-5>, \"rationale\": \"<one sentence>\"}",
    );
    prompt
}

/// Extract and validate the first JSON object in a judge response.
///
/// The response may wrap the object in prose or code fences; scanning walks
/// the text for balanced objects and takes the first one that parses. The
/// object must carry integer `relevance`/`informativeness`/`coherence` in
/// 1..=5 and a string `rationale`.
pub fn parse_verdict(response_text: &str, judge_backend_id: &str) -> Result<JudgeVerdict, ReflexError> {
    let object = first_json_object(response_text)
        .ok_or_else(|| ReflexError::VerdictParse("no JSON object in response".to_string()))?;

    let rating = |field: &str| -> Result<u8, ReflexError> {
        let value = object
            .get(field)
            .ok_or_else(|| ReflexError::VerdictParse(format!("missing field `{field}`")))?;
        let n = value
            .as_i64()
            .ok_or_else(|| ReflexError::VerdictParse(format!("field `{field}` is not an integer")))?;
        if !(1..=5).contains(&n) {
            return Err(ReflexError::VerdictParse(format!(
                "field `{field}` is {n}, outside 1..=5"
            )));
        }
        Ok(n as u8)
    };

    let relevance = rating("relevance")?;
    let informativeness = rating("informativeness")?;
    let coherence = rating("coherence")?;
    let rationale = object
        .get("rationale")
        .and_then(|v| v.as_str())
        .ok_or_else(|| ReflexError::VerdictParse("missing string field `rationale`".to_string()))?
        .to_string();

    Ok(JudgeVerdict {
        relevance,
        informativeness,
        coherence,
        overall: JudgeVerdict::overall_of(relevance, informativeness, coherence),
        rationale,
        judge_backend_id: judge_backend_id.to_string(),
    })
}

const MAX_OBJECT_SCAN_STARTS: usize = 128;

/// Find the first balanced `{...}` span that parses as a JSON object.
fn first_json_object(text: &str) -> Option<serde_json::Map<String, serde_json::Value>> {
    let bytes = text.as_bytes();
    let mut starts_tried = 0;
    let mut i = 0;
    while i < bytes.len() && starts_tried < MAX_OBJECT_SCAN_STARTS {
        if bytes[i] != b'{' {
            i += 1;
            continue;
        }
        starts_tried += 1;
        if let Some(end) = balanced_object_end(bytes, i) {
            if let Ok(serde_json::Value::Object(map)) =
                serde_json::from_str::<serde_json::Value>(&text[i..=end])
            {
                return Some(map);
            }
        }
        i += 1;
    }
    None
}

/// Index of the `}` closing the object opened at `start`, honoring strings
/// and escapes.
fn balanced_object_end(bytes: &[u8], start: usize) -> Option<usize> {
    let mut depth = 0usize;
    let mut in_string = false;
    let mut escaped = false;
    for (offset, &b) in bytes[start..].iter().enumerate() {
        if in_string {
            if escaped {
                escaped = false;
            } else if b == b'\\' {
                escaped = true;
            } else if b == b'"' {
                in_string = false;
            }
            continue;
        }
        match b {
            b'"' => in_string = true,
            b'{' => depth += 1,
            b'}' => {
                depth -= 1;
                if depth == 0 {
                    return Some(start + offset);
                }
            }
            _ => {}
        }
    }
    None
}

/// Judge one (group, summary) pair: build the prompt, query the judge with
/// temperature pinned to 0.0, parse the verdict. Parse failures are re-asked
/// up to [`JUDGE_REASK_LIMIT`] times; transport failures (already retried
/// inside the backend) are returned immediately.
pub fn judge_pair(
    group: &LogGroup,
    summary: &str,
    judge: &dyn ChatBackend,
) -> Result<JudgeVerdict, ReflexError> {
    if summary.trim().is_empty() {
        return Err(ReflexError::EmptyText);
    }
    let prompt = build_judge_prompt(group, summary);
    let judge_id = judge.config().backend_id.clone();

    let mut last_error = ReflexError::VerdictParse("judge was never asked".to_string());
    for _ask in 0..=JUDGE_REASK_LIMIT {
        let completion = judge.complete(&prompt, 0.0).map_err(|e| match e {
            BackendError::Transport { message, attempts } => ReflexError::Transport { message, attempts },
            other => ReflexError::Judge(other.to_string()),
        })?;
        match parse_verdict(&completion.text, &judge_id) {
            Ok(verdict) => return Ok(verdict),
            Err(err) => last_error = err,
        }
    }
    Err(last_error)
}

/// Deterministic judge mock: ratings in 3..=5 derived from an FNV-1a hash of
/// the prompt, emitted as a valid verdict object.
pub struct MockJudgeBackend {
    config: BackendConfig,
}

impl MockJudgeBackend {
    pub fn new(config: BackendConfig) -> MockJudgeBackend {
        MockJudgeBackend { config }
    }
}

impl ChatBackend for MockJudgeBackend {
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
        let hash = fnv1a_64(prompt.as_bytes());
        let relevance = 3 + (hash % 3);
        let informativeness = 3 + ((hash >> 8) % 3);
        let coherence = 3 + ((hash >> 16) % 3);
        let text = format!(
            "{{\"relevance\": {relevance}, \"informativeness\": {informativeness}, \
             \"coherence\": {coherence}, \"rationale\": \"deterministic mock rating\"}}"
        );
        Ok(Completion {
            text,
            prompt_tokens: None,
            completion_tokens: None,
            attempts: 1,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{RawLogLine, SourceFormat};
    use std::sync::atomic::{AtomicU32, Ordering};

    fn group(messages: &[&str]) -> LogGroup {
        LogGroup {
            group_id: "t-000".to_string(),
            dataset: "t".to_string(),
            lines: messages
                .iter()
                .map(|m| RawLogLine {
                    source_format: SourceFormat::Plain,
                    timestamp: None,
                    level: None,
                    component: None,
                    message: m.to_string(),
                    raw: m.to_string(),
                })
                .collect(),
            reference_summary: None,
        }
    }

    #[test]
    fn verdict_example_overall() {
        let verdict = parse_verdict(
            r#"{"relevance":4,"informativeness":5,"coherence":3,"rationale":"ok"}"#,
            "judge",
        )
        .unwrap();
        assert!((verdict.overall - 0.8).abs() < 1e-12);
        assert_eq!(verdict.rationale, "ok");
        assert_eq!(verdict.judge_backend_id, "judge");
    }

    #[test]
    fn all_fives_is_one() {
        let verdict = parse_verdict(
            r#"{"relevance":5,"informativeness":5,"coherence":5,"rationale":"perfect"}"#,
            "judge",
        )
        .unwrap();
        assert_eq!(verdict.overall, 1.0);
    }

    #[test]
    fn out_of_range_rating_is_a_parse_error() {
        let err = parse_verdict(
            r#"{"relevance":7,"informativeness":5,"coherence":3,"rationale":"ok"}"#,
            "judge",
        )
        .unwrap_err();
        assert!(matches!(err, ReflexError::VerdictParse(_)));
        assert!(err.to_string().contains("outside 1..=5"));
    }

    #[test]
    fn non_integer_rating_is_a_parse_error() {
        let err = parse_verdict(
            r#"{"relevance":4.5,"informativeness":5,"coherence":3,"rationale":"ok"}"#,
            "judge",
        )
        .unwrap_err();
        assert!(err.to_string().contains("not an integer"));
    }

    #[test]
    fn json_free_response_is_a_parse_error() {
        let err = parse_verdict("I would rate this summary quite highly.", "judge").unwrap_err();
        assert!(err.to_string().contains("no JSON object"));
    }

    #[test]
    fn object_embedded_in_prose_is_found() {
        let response = "Sure! Here is my rating:\n```json\n{\"relevance\": 4, \"informativeness\": 4, \"coherence\": 5, \"rationale\": \"covers the events\"}\n```\nLet me know if you need more.";
        let verdict = parse_verdict(response, "judge").unwrap();
        assert_eq!(verdict.relevance, 4);
        assert_eq!(verdict.coherence, 5);
    }

    #[test]
    fn earlier_non_verdict_braces_are_skipped() {
        let response = r#"The log mentions {block ids}. {"relevance":3,"informativeness":2,"coherence":4,"rationale":"terse"}"#;
        let verdict = parse_verdict(response, "judge").unwrap();
        assert_eq!(verdict.informativeness, 2);
    }

    #[test]
    fn braces_inside_strings_do_not_confuse_the_scanner() {
        let response = r#"{"relevance":2,"informativeness":2,"coherence":2,"rationale":"weird { brace } inside"}"#;
        let verdict = parse_verdict(response, "judge").unwrap();
        assert_eq!(verdict.rationale, "weird { brace } inside");
    }

    #[test]
    fn judge_prompt_is_deterministic_and_contains_required_parts() {
        let g = group(&["disk full on node 7", "retrying write"]);
        let first = build_judge_prompt(&g, "disk filled up; retry started");
        let second = build_judge_prompt(&g, "disk filled up; retry started");
        assert_eq!(first, second);
        for dimension in JUDGE_DIMENSIONS {
            assert!(first.contains(dimension));
        }
        assert!(first.contains("disk full on node 7"));
        assert!(first.contains("disk filled up; retry started"));
        assert!(first.contains("1 (poor) to 5 (excellent)"));
        assert!(first.contains("\"rationale\""));
    }

    #[test]
    fn judge_prompt_matches_golden_fixture() {
        let (dataset, _) = crate::ingest::parse_paired(
            &std::fs::read_to_string(
                std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
                    .join("tests/fixtures/hdfs_fig2.paired.log"),
            )
            .unwrap(),
            "HDFS",
        )
        .unwrap();
        let prompt = build_judge_prompt(
            &dataset.groups[0],
            dataset.groups[0].reference_summary.as_deref().unwrap(),
        );
        let golden = std::fs::read_to_string(
            std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
                .join("tests/fixtures/fig2_judge_prompt.golden"),
        )
        .unwrap();
        assert_eq!(prompt, golden);
    }

    #[test]
    fn prompts_differ_only_in_the_changed_message() {
        let a = build_judge_prompt(&group(&["one", "two"]), "s");
        let b = build_judge_prompt(&group(&["one", "three"]), "s");
        assert_ne!(a, b);
        let common_prefix = a.bytes().zip(b.bytes()).take_while(|(x, y)| x == y).count();
        assert!(a[..common_prefix].ends_with("one\nt"));
    }

    struct ScriptedJudge {
        config: BackendConfig,
        responses: Vec<String>,
        calls: AtomicU32,
    }

    impl ScriptedJudge {
        fn new(responses: Vec<String>) -> ScriptedJudge {
            ScriptedJudge {
                config: BackendConfig::mock("scripted-judge"),
                responses,
                calls: AtomicU32::new(0),
            }
        }
    }

    impl ChatBackend for ScriptedJudge {
        fn config(&self) -> &BackendConfig {
            &self.config
        }

        fn complete(&self, _prompt: &str, temperature: f64) -> Result<Completion, BackendError> {
            assert_eq!(temperature, 0.0, "judge calls pin temperature to zero");
            let idx = self.calls.fetch_add(1, Ordering::SeqCst) as usize;
            let text = self.responses[idx.min(self.responses.len() - 1)].clone();
            Ok(Completion { text, prompt_tokens: None, completion_tokens: None, attempts: 1 })
        }
    }

    #[test]
    fn fixed_verdict_mock_round_trips() {
        let judge = ScriptedJudge::new(vec![
            r#"{"relevance":4,"informativeness":5,"coherence":3,"rationale":"ok"}"#.to_string(),
        ]);
        let verdict = judge_pair(&group(&["m"]), "summary", &judge).unwrap();
        assert!((verdict.overall - 0.8).abs() < 1e-12);
    }

    #[test]
    fn parse_failures_are_reasked_then_recorded() {
        let judge = ScriptedJudge::new(vec![
            "no json here".to_string(),
            "still nothing".to_string(),
            "nope".to_string(),
            "never reached".to_string(),
        ]);
        let err = judge_pair(&group(&["m"]), "summary", &judge).unwrap_err();
        assert!(matches!(err, ReflexError::VerdictParse(_)));
        assert_eq!(judge.calls.load(Ordering::SeqCst), 1 + JUDGE_REASK_LIMIT);
    }

    #[test]
    fn recovery_on_reask() {
        let judge = ScriptedJudge::new(vec![
            "garbled".to_string(),
            r#"{"relevance":5,"informativeness":4,"coherence":4,"rationale":"fine"}"#.to_string(),
        ]);
        let verdict = judge_pair(&group(&["m"]), "summary", &judge).unwrap();
        assert_eq!(verdict.relevance, 5);
        assert_eq!(judge.calls.load(Ordering::SeqCst), 2);
    }

    #[test]
    fn mock_judge_is_deterministic_and_valid() {
        let judge = MockJudgeBackend::new(BackendConfig::mock("mock-judge"));
        let a = judge.complete("some judge prompt", 0.0).unwrap();
        let b = judge.complete("some judge prompt", 0.0).unwrap();
        assert_eq!(a.text, b.text);
        let verdict = parse_verdict(&a.text, "mock-judge").unwrap();
        for rating in [verdict.relevance, verdict.informativeness, verdict.coherence] {
            assert!((3..=5).contains(&rating));
        }
    }
}
