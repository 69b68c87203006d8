//! ROUGE-1, ROUGE-2, and ROUGE-L over candidate/reference summary pairs.
//!
//! Tokenization is deliberately simple and deterministic: lowercase, split on
//! every maximal run of non-alphanumeric characters, drop empty tokens. No
//! stemming, no stopword removal.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

/// Which ROUGE variant a score was computed with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RougeVariant {
    #[serde(rename = "rouge1")]
    Rouge1,
    #[serde(rename = "rouge2")]
    Rouge2,
    #[serde(rename = "rougeL")]
    RougeL,
}

impl std::fmt::Display for RougeVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RougeVariant::Rouge1 => write!(f, "rouge1"),
            RougeVariant::Rouge2 => write!(f, "rouge2"),
            RougeVariant::RougeL => write!(f, "rougeL"),
        }
    }
}

/// Precision/recall/F1 triple for one ROUGE variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RougeScore {
    pub variant: RougeVariant,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl RougeScore {
    /// Select one component by reporting mode.
    pub fn select(&self, mode: RougeMode) -> f64 {
        match mode {
            RougeMode::F1 => self.f1,
            RougeMode::Recall => self.recall,
            RougeMode::Precision => self.precision,
        }
    }
}

/// Which component of a ROUGE score the report layer surfaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RougeMode {
    #[default]
    F1,
    Recall,
    Precision,
}

impl std::str::FromStr for RougeMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "f1" => Ok(RougeMode::F1),
            "recall" => Ok(RougeMode::Recall),
            "precision" => Ok(RougeMode::Precision),
            other => Err(format!("unknown rouge mode `{other}` (expected f1|recall|precision)")),
        }
    }
}

/// Ordered list of normalized tokens.
///
/// Every token is non-empty, lowercase, and alphanumeric-only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenSequence {
    tokens: Vec<String>,
}

impl TokenSequence {
    /// Build a sequence from already-normalized tokens. Intended for tests;
    /// callers normally go through [`tokenize`].
    pub fn from_tokens<I, S>(tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        TokenSequence {
            tokens: tokens.into_iter().map(Into::into).collect(),
        }
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// Lowercase and split on every maximal run of non-alphanumeric characters.
pub fn tokenize(text: &str) -> TokenSequence {
    let tokens = text
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| t.to_lowercase())
        .collect();
    TokenSequence { tokens }
}

/// ROUGE-N: clipped n-gram multiset overlap.
///
/// `recall = overlap / |reference n-grams|`, `precision = overlap /
/// |candidate n-grams|`; a side with zero n-grams contributes 0 for its ratio.
pub fn rouge_n(candidate: &TokenSequence, reference: &TokenSequence, n: usize) -> RougeScore {
    assert!(n == 1 || n == 2, "rouge_n supports n in {{1, 2}}, got {n}");
    let variant = if n == 1 { RougeVariant::Rouge1 } else { RougeVariant::Rouge2 };

    let cand_grams = ngram_counts(candidate.tokens(), n);
    let ref_grams = ngram_counts(reference.tokens(), n);

    let overlap: usize = cand_grams
        .iter()
        .map(|(gram, count)| (*count).min(ref_grams.get(gram).copied().unwrap_or(0)))
        .sum();

    let cand_total = ngram_total(candidate.len(), n);
    let ref_total = ngram_total(reference.len(), n);

    let precision = ratio(overlap, cand_total);
    let recall = ratio(overlap, ref_total);

    RougeScore {
        variant,
        precision,
        recall,
        f1: f1(precision, recall),
    }
}

/// ROUGE-L: longest common subsequence of the token sequences.
pub fn rouge_l(candidate: &TokenSequence, reference: &TokenSequence) -> RougeScore {
    let lcs = lcs_length(candidate.tokens(), reference.tokens());
    let precision = ratio(lcs, candidate.len());
    let recall = ratio(lcs, reference.len());

    RougeScore {
        variant: RougeVariant::RougeL,
        precision,
        recall,
        f1: f1(precision, recall),
    }
}

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for gram in tokens.windows(n) {
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    counts
}

fn ngram_total(len: usize, n: usize) -> usize {
    len.saturating_sub(n - 1)
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn f1(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// Token-level LCS length by dynamic programming, O(|a|·|b|) time with a
/// rolling row. Summaries are short so the quadratic cost is acceptable.
fn lcs_length(a: &[String], b: &[String]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let mut prev = vec![0usize; b.len() + 1];
    let mut curr = vec![0usize; b.len() + 1];
    for ai in a {
        for (j, bj) in b.iter().enumerate() {
            curr[j + 1] = if ai == bj {
                prev[j] + 1
            } else {
                prev[j + 1].max(curr[j])
            };
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[b.len()]
}
