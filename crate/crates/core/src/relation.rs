//! Rewrites relation terms into verb-friendly phrases before realization.

use serde::Serialize;

use crate::canonical::CanonicalTriple;
use crate::resources::{ResourceBundle, Tagged};
use crate::tags::Pos;
use crate::text;

/// Neighbours considered when a single-word relation is not a verb.
pub const NEAREST_K: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rewrite {
    KeptLemma,
    EmbeddingVerb,
    Reordered,
    Unchanged,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModifiedTriple {
    pub base: CanonicalTriple,
    pub relation_mod: String,
    /// Tokens of `relation_mod`.
    pub tokens: Vec<String>,
    pub relation_pos: Vec<Pos>,
    /// Tags of the original relation tokens, kept for morphology cues.
    pub original_tags: Vec<Tagged>,
    pub original_tokens: Vec<String>,
    pub rewrite: Rewrite,
    /// Scored neighbours when the embedding path ran.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub candidates: Vec<(String, f64)>,
}

impl ModifiedTriple {
    pub fn first_verb(&self) -> Option<usize> {
        self.relation_pos.iter().position(|p| *p == Pos::Verb)
    }
}

fn relation_tokens(rel: &str) -> Vec<String> {
    text::tokenize_folded(rel)
        .into_iter()
        .filter(|t| !text::is_punct(t))
        .collect()
}

/// Moves the maximal NOUN/PROPN/ADJ run directly before the first verb to the end.
/// Returns `None` when there is no verb or no such run.
pub fn reorder(tokens: &[String], pos: &[Pos]) -> Option<Vec<usize>> {
    let v = pos.iter().position(|p| *p == Pos::Verb)?;
    let mut start = v;
    while start > 0 && pos[start - 1].is_nominal() {
        start -= 1;
    }
    if start == v {
        return None;
    }
    let order: Vec<usize> = (0..start).chain(v..tokens.len()).chain(start..v).collect();
    Some(order)
}

/// Chooses among the word's nearest verbs by gloss co-occurrence.
/// Ties go to the lexicographically smaller verb; all-zero evidence yields `None`.
/// Auxiliaries listed as stopwords are scored for the trace but never chosen.
pub fn select_embedding_verb(bundle: &ResourceBundle, word: &str) -> (Option<String>, Vec<(String, f64)>) {
    let Ok(near) = bundle.nearest_verbs(word, NEAREST_K) else {
        return (None, Vec::new());
    };
    let scored: Vec<(String, f64)> = near
        .into_iter()
        .map(|v| {
            let s = bundle.co_occurrence_degree(&v, word);
            (v, s)
        })
        .collect();
    let best = scored
        .iter()
        .filter(|(v, s)| *s > 0.0 && !bundle.is_stopword(v))
        .max_by(|a, b| a.1.total_cmp(&b.1).then_with(|| b.0.cmp(&a.0)))
        .map(|(v, _)| v.clone());
    (best, scored)
}

pub fn normalize_relation(t: &CanonicalTriple, bundle: &ResourceBundle) -> ModifiedTriple {
    let original_tokens = relation_tokens(&t.relation);
    let original_tags = bundle.pos_tag(&original_tokens);
    let build = |tokens: Vec<String>, rewrite, candidates| {
        let relation_pos = bundle.coarse_tags(&tokens);
        ModifiedTriple {
            base: t.clone(),
            relation_mod: tokens.join(" "),
            tokens,
            relation_pos,
            original_tags: original_tags.clone(),
            original_tokens: original_tokens.clone(),
            rewrite,
            candidates,
        }
    };
    let unchanged = || {
        let mut m = build(original_tokens.clone(), Rewrite::Unchanged, Vec::new());
        if m.tokens.is_empty() {
            // relation made only of punctuation: keep it verbatim
            m.relation_mod = t.relation.clone();
            m.tokens = vec![t.relation.clone()];
            m.relation_pos = vec![Pos::X];
        }
        m
    };

    match original_tokens.len() {
        0 => unchanged(),
        1 => {
            let word = &original_tokens[0];
            let lemma = bundle.lemmatize(word, Pos::Verb);
            if bundle.is_verb(&lemma) {
                let mut m = build(vec![lemma], Rewrite::KeptLemma, Vec::new());
                m.relation_pos = vec![Pos::Verb];
                return m;
            }
            match select_embedding_verb(bundle, word) {
                (Some(v), cands) => {
                    let mut m = build(vec![v], Rewrite::EmbeddingVerb, cands);
                    m.relation_pos = vec![Pos::Verb];
                    m
                }
                (None, cands) => {
                    let mut m = unchanged();
                    m.candidates = cands;
                    m
                }
            }
        }
        _ => {
            let pos: Vec<Pos> = original_tags.iter().map(|t| t.pos).collect();
            match reorder(&original_tokens, &pos) {
                Some(order) => {
                    let toks = order.iter().map(|&i| original_tokens[i].clone()).collect();
                    let mut m = build(toks, Rewrite::Reordered, Vec::new());
                    m.relation_pos = order.iter().map(|&i| pos[i]).collect();
                    m
                }
                None => unchanged(),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::canonical::{tag_entity, TripleSource};
    use crate::resources::testing::tiny;
    use crate::resources::{Embeddings, ResourceBundle};

    fn triple(b: &ResourceBundle, rel: &str) -> CanonicalTriple {
        CanonicalTriple {
            e1: tag_entity("Albert Einstein", b),
            relation: rel.into(),
            e2: tag_entity("Ulm, Germany", b),
            source: TripleSource::Graph { line: 1 },
        }
    }

    fn with_vectors() -> ResourceBundle {
        let mut b = tiny();
        b.embeddings = Embeddings::from_rows(3, &[
            ("game", vec![1.0, 0.2, 0.0]),
            ("play", vec![0.9, 0.3, 0.1]),
            ("match", vec![0.95, 0.1, 0.0]),
            ("win", vec![0.2, 1.0, 0.0]),
            ("bear", vec![0.0, 0.0, 1.0]),
            ("spouse", vec![0.0, 0.1, 1.0]),
        ]);
        b
    }

    #[test]
    fn game_becomes_play() {
        let b = with_vectors();
        let m = normalize_relation(&triple(&b, "game"), &b);
        assert_eq!(m.relation_mod, "play");
        assert_eq!(m.rewrite, Rewrite::EmbeddingVerb);
    }

    #[test]
    fn zero_evidence_keeps_the_word() {
        let b = with_vectors();
        let m = normalize_relation(&triple(&b, "spouse"), &b);
        assert_eq!(m.relation_mod, "spouse");
        assert_eq!(m.rewrite, Rewrite::Unchanged);
        assert!(!m.candidates.is_empty());
    }

    #[test]
    fn verbs_keep_their_lemma() {
        let b = tiny();
        let m = normalize_relation(&triple(&b, "played"), &b);
        assert_eq!((m.relation_mod.as_str(), m.rewrite), ("play", Rewrite::KeptLemma));
    }

    #[test]
    fn noun_prefix_moves_behind_the_verb() {
        let b = tiny();
        let m = normalize_relation(&triple(&b, "country played for"), &b);
        assert_eq!(m.relation_mod, "played for country");
        assert_eq!(m.rewrite, Rewrite::Reordered);
        assert_eq!(m.relation_pos, vec![Pos::Verb, Pos::Adp, Pos::Noun]);
    }

    #[test]
    fn verbless_phrase_is_unchanged() {
        let b = tiny();
        let m = normalize_relation(&triple(&b, "birth place"), &b);
        assert_eq!((m.relation_mod.as_str(), m.rewrite), ("birth place", Rewrite::Unchanged));
    }

    #[test]
    fn no_embedding_is_unchanged() {
        let b = with_vectors();
        let m = normalize_relation(&triple(&b, "qzxv"), &b);
        assert_eq!(m.rewrite, Rewrite::Unchanged);
    }

    /// Independent oracle: scan every verb, keep the top ten by cosine, then
    /// take the best co-occurrence score.
    fn oracle(b: &ResourceBundle, word: &str) -> Option<String> {
        let e = b.embeddings();
        e.vector(word)?;
        let mut all: Vec<(f64, String)> = b
            .verbs()
            .iter()
            .filter(|v| v.as_str() != word)
            .filter_map(|v| e.cosine(word, v).map(|c| (c, v.clone())))
            .collect();
        all.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut best: Option<(f64, String)> = None;
        for (_, v) in all.into_iter().take(NEAREST_K) {
            let s = b.co_occurrence_degree(&v, word);
            let better = match &best {
                _ if b.is_stopword(&v) => false,
                None => s > 0.0,
                Some((bs, bv)) => s > *bs || (s == *bs && v < *bv),
            };
            if better {
                best = Some((s, v));
            }
        }
        best.map(|(_, v)| v)
    }

    #[test]
    fn embedding_selection_matches_oracle() {
        let b = with_vectors();
        for w in ["game", "spouse", "win", "qzxv"] {
            assert_eq!(select_embedding_verb(&b, w).0, oracle(&b, w), "{w}");
        }
    }

    proptest! {
        #[test]
        fn reorder_preserves_tokens_and_is_idempotent(
            words in proptest::collection::vec(
                prop::sample::select(vec!["country", "played", "for", "the", "birth", "place", "active", "won", "type"]),
                2..6,
            )
        ) {
            let b = tiny();
            let rel = words.join(" ");
            let m = normalize_relation(&triple(&b, &rel), &b);
            let mut a: Vec<String> = words.iter().map(|w| w.to_string()).collect();
            let mut c = m.tokens.clone();
            a.sort();
            c.sort();
            prop_assert_eq!(a, c);
            let again = normalize_relation(&triple(&b, &m.relation_mod), &b);
            prop_assert_eq!(again.relation_mod, m.relation_mod);
        }
    }
}
