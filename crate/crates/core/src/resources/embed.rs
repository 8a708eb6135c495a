use std::cmp::Ordering;
use std::collections::HashMap;

use thiserror::Error;

use super::{fold, ResourceBundle, ResourceError};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("no embedding for `{0}`")]
pub struct NoEmbedding(pub String);

/// Dense word vectors of one fixed dimension.
#[derive(Clone, Debug, Default)]
pub struct Embeddings {
    dim: usize,
    index: HashMap<String, usize>,
    data: Vec<f64>,
    norms: Vec<f64>,
}

impl Embeddings {
    pub(crate) fn parse<'a>(
        lines: impl Iterator<Item = (usize, &'a str)>,
        dim: usize,
        malformed: impl Fn(usize, String) -> ResourceError,
    ) -> Result<Self, ResourceError> {
        let mut e = Embeddings { dim, ..Default::default() };
        for (n, line) in lines {
            let mut parts = line.split_whitespace();
            let word = parts.next().ok_or_else(|| malformed(n, "empty row".into()))?;
            let start = e.data.len();
            for p in parts {
                let v: f64 = p
                    .parse()
                    .map_err(|_| malformed(n, format!("`{p}` is not a number")))?;
                e.data.push(v);
            }
            let got = e.data.len() - start;
            if got != dim {
                return Err(malformed(n, format!("expected {dim} values, found {got}")));
            }
            let key = fold(word);
            if e.index.contains_key(&key) {
                e.data.truncate(start);
                continue;
            }
            let norm = e.data[start..].iter().map(|x| x * x).sum::<f64>().sqrt();
            e.index.insert(key, e.norms.len());
            e.norms.push(norm);
        }
        Ok(e)
    }

    pub fn from_rows(dim: usize, rows: &[(&str, Vec<f64>)]) -> Self {
        let mut e = Embeddings { dim, ..Default::default() };
        for (w, v) in rows {
            assert_eq!(v.len(), dim, "row for `{w}` has wrong dimension");
            e.index.insert(fold(w), e.norms.len());
            e.norms.push(v.iter().map(|x| x * x).sum::<f64>().sqrt());
            e.data.extend_from_slice(v);
        }
        e
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.norms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.norms.is_empty()
    }

    pub fn vector(&self, word: &str) -> Option<&[f64]> {
        let i = *self.index.get(&fold(word))?;
        Some(&self.data[i * self.dim..(i + 1) * self.dim])
    }

    /// Cosine similarity; 0 when either vector is zero.
    pub fn cosine(&self, a: &str, b: &str) -> Option<f64> {
        let ia = *self.index.get(&fold(a))?;
        let ib = *self.index.get(&fold(b))?;
        Some(self.cosine_idx(ia, ib))
    }

    fn cosine_idx(&self, ia: usize, ib: usize) -> f64 {
        let (na, nb) = (self.norms[ia], self.norms[ib]);
        if na == 0.0 || nb == 0.0 {
            return 0.0;
        }
        let va = &self.data[ia * self.dim..(ia + 1) * self.dim];
        let vb = &self.data[ib * self.dim..(ib + 1) * self.dim];
        let dot: f64 = va.iter().zip(vb).map(|(x, y)| x * y).sum();
        dot / (na * nb)
    }
}

impl ResourceBundle {
    /// The `k` verbs closest to `word` by cosine, most similar first.
    ///
    /// The word itself is excluded; ties go to the lexicographically smaller lemma.
    pub fn nearest_verbs(&self, word: &str, k: usize) -> Result<Vec<String>, NoEmbedding> {
        let key = fold(word);
        let emb = &self.embeddings;
        let &iw = emb.index.get(&key).ok_or_else(|| NoEmbedding(word.to_string()))?;
        let mut scored: Vec<(f64, &String)> = self
            .verb_list
            .iter()
            .filter(|v| **v != key)
            .filter_map(|v| emb.index.get(v).map(|&iv| (emb.cosine_idx(iw, iv), v)))
            .collect();
        scored.sort_by(|a, b| {
            b.0.partial_cmp(&a.0)
                .unwrap_or(Ordering::Equal)
                .then_with(|| a.1.cmp(b.1))
        });
        Ok(scored.into_iter().take(k).map(|(_, v)| v.clone()).collect())
    }

    /// Gloss co-occurrence between a candidate verb and the original word:
    /// `count(v in F_o)/|F_o| + count(o in F_v)/|F_v|` over lemmatized gloss tokens.
    pub fn co_occurrence_degree(&self, candidate: &str, original: &str) -> f64 {
        let v = self.gloss_key(candidate);
        let o = self.gloss_key(original);
        let ratio = |lemma: &Option<String>, needle: &Option<String>| -> f64 {
            let (Some(lemma), Some(needle)) = (lemma, needle) else { return 0.0 };
            match self.gloss_tokens.get(lemma) {
                Some(toks) if !toks.is_empty() => {
                    toks.iter().filter(|t| *t == needle).count() as f64 / toks.len() as f64
                }
                _ => 0.0,
            }
        };
        // a word missing from the gloss map still counts as a needle in the other's glosses
        let v_needle = Some(self.gloss_lemma(candidate));
        let o_needle = Some(self.gloss_lemma(original));
        ratio(&o, &v_needle) + ratio(&v, &o_needle)
    }

    fn gloss_key(&self, word: &str) -> Option<String> {
        let w = fold(word);
        if self.gloss_tokens.contains_key(&w) {
            return Some(w);
        }
        let l = self.gloss_lemma(&w);
        self.gloss_tokens.contains_key(&l).then_some(l)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resources::testing::tiny;

    fn with_vectors() -> ResourceBundle {
        let mut b = tiny();
        b.embeddings = Embeddings::from_rows(3, &[
            ("game", vec![1.0, 0.2, 0.0]),
            ("play", vec![0.9, 0.3, 0.1]),
            ("match", vec![0.95, 0.1, 0.0]),
            ("win", vec![0.2, 1.0, 0.0]),
            ("bear", vec![0.0, 0.0, 1.0]),
            ("have", vec![0.0, 0.0, 1.0]),
        ]);
        b
    }

    #[test]
    fn game_neighbours_include_play_and_match() {
        let b = with_vectors();
        let near = b.nearest_verbs("game", 10).unwrap();
        assert_eq!(&near[..2], &["match".to_string(), "play".to_string()]);
        assert_eq!(near.len(), 5);
    }

    #[test]
    fn excludes_self_and_breaks_ties_by_lemma() {
        let b = with_vectors();
        assert_eq!(b.nearest_verbs("play", 1).unwrap(), vec!["match"]);
        // bear and have share a vector
        assert_eq!(b.nearest_verbs("bear", 1).unwrap(), vec!["have"]);
        let near = b.nearest_verbs("win", 6).unwrap();
        let bi = near.iter().position(|v| v == "bear").unwrap();
        let hi = near.iter().position(|v| v == "have").unwrap();
        assert!(bi < hi);
    }

    #[test]
    fn unknown_word_has_no_embedding() {
        let b = with_vectors();
        assert_eq!(b.nearest_verbs("qzxv", 10), Err(NoEmbedding("qzxv".into())));
    }

    #[test]
    fn play_beats_match_for_game() {
        let b = tiny();
        let play = b.co_occurrence_degree("play", "game");
        let mtch = b.co_occurrence_degree("match", "game");
        assert!(play > mtch, "{play} vs {mtch}");
        // game glosses hold 18 word tokens with play, play, played; play's gloss has game once in 7
        assert!((play - (3.0 / 18.0 + 1.0 / 7.0)).abs() < 1e-12);
    }

    #[test]
    fn absent_words_score_zero() {
        let b = tiny();
        assert_eq!(b.co_occurrence_degree("qq", "zz"), 0.0);
    }
}
