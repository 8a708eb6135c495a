//! Candidate scoring: fluency from the language model times adequacy.

use std::cmp::Ordering;
use std::collections::HashSet;

use serde::Serialize;
use thiserror::Error;

use crate::canonical::CanonicalTriple;
use crate::lm::NGramModel;
use crate::realize::{input_tokens, SentenceCandidate};
use crate::resources::ResourceBundle;
use crate::text;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RankError {
    #[error("no candidates to rank")]
    NoCandidates,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankResult {
    pub winner: SentenceCandidate,
    /// Every candidate, best first.
    pub all: Vec<SentenceCandidate>,
    pub triple: CanonicalTriple,
}

/// Share of the triple's content tokens that occur in the sentence (set overlap).
pub fn adequacy(i: &CanonicalTriple, s: &str, bundle: &ResourceBundle) -> f64 {
    adequacy_tokens(&input_tokens(i, bundle), s)
}

pub fn adequacy_tokens(input: &[String], s: &str) -> f64 {
    if input.is_empty() {
        return 0.0;
    }
    let sent: HashSet<String> = text::tokenize_folded(s).into_iter().collect();
    let hit = input.iter().filter(|t| sent.contains(*t)).count();
    hit as f64 / input.len() as f64
}

/// Best-first order: score, then adequacy, then fewer words, then realizer, then text.
pub fn compare(a: &SentenceCandidate, b: &SentenceCandidate) -> Ordering {
    b.score
        .total_cmp(&a.score)
        .then(b.adequacy.total_cmp(&a.adequacy))
        .then(text::word_count(&a.realized_text).cmp(&text::word_count(&b.realized_text)))
        .then(a.realizer.cmp(&b.realizer))
        .then(a.realized_text.cmp(&b.realized_text))
        .then(a.text.cmp(&b.text))
}

pub fn rank(
    cands: Vec<SentenceCandidate>,
    i: &CanonicalTriple,
    lm: &NGramModel,
    bundle: &ResourceBundle,
) -> Result<RankResult, RankError> {
    if cands.is_empty() {
        return Err(RankError::NoCandidates);
    }
    let input = input_tokens(i, bundle);
    let mut all: Vec<SentenceCandidate> = cands
        .into_iter()
        .map(|mut c| {
            c.fluency = lm.fluency(&c.realized_text);
            c.adequacy = adequacy_tokens(&input, &c.realized_text);
            c.score = c.fluency * c.adequacy;
            c
        })
        .collect();
    all.sort_by(compare);
    Ok(RankResult { winner: all[0].clone(), all, triple: i.clone() })
}
