//! Training-pair construction for external sequence-to-sequence realizers.
//!
//! Morphkey pairs map a bag of lemmas with POS keys to the inflected,
//! entity-masked sentence; triple2text pairs map a tagged triple to its
//! concatenation. Output is one `source\ttarget` line per pair.

use std::io::{self, BufRead, Write};

use serde::Serialize;
use thiserror::Error;

use crate::canonical::{pattern_tag, tag_entity};
use crate::resources::{ResourceBundle, Tagged};
use crate::tags::{NeTag, Pos};
use crate::text;

#[derive(Debug, Error)]
pub enum PairError {
    #[error("malformed triple on line {line}: expected three tab-separated fields")]
    MalformedTriple { line: usize },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairVariant {
    MorphkeyV1,
    MorphkeyV2,
    Triple2Text,
}

impl PairVariant {
    pub const ALL: [PairVariant; 3] = [PairVariant::MorphkeyV1, PairVariant::MorphkeyV2, PairVariant::Triple2Text];

    pub fn as_str(self) -> &'static str {
        match self {
            PairVariant::MorphkeyV1 => "morphkey-v1",
            PairVariant::MorphkeyV2 => "morphkey-v2",
            PairVariant::Triple2Text => "triple2text",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.as_str() == s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrainingPair {
    pub source: Vec<String>,
    pub target: Vec<String>,
    pub origin: PairVariant,
}

impl TrainingPair {
    pub fn to_tsv(&self) -> String {
        format!("{}\t{}", self.source.join(" "), self.target.join(" "))
    }
}

/// Token range `[start, end)` replaced by one entity tag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntitySpan {
    pub start: usize,
    pub end: usize,
    pub tag: NeTag,
}

const MAX_PATTERN_WINDOW: usize = 6;

fn is_capitalized(t: &str) -> bool {
    t.chars().next().is_some_and(char::is_uppercase)
}

/// Value spans (dates, amounts, numbers), longest match first.
fn pattern_spans(tokens: &[String]) -> Vec<EntitySpan> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let hit = (1..=MAX_PATTERN_WINDOW.min(tokens.len() - i)).rev().find_map(|w| {
            let window = &tokens[i..i + w];
            if window.iter().any(|t| text::is_punct(t) && t != "$" && t != "%") {
                return None;
            }
            pattern_tag(&window.join(" ")).map(|tag| (w, tag))
        });
        match hit {
            Some((w, tag)) => {
                out.push(EntitySpan { start: i, end: i + w, tag });
                i += w;
            }
            None => i += 1,
        }
    }
    out
}

/// Capitalized, non-stopword, non-verb token: the seed of a name.
fn is_name_token(t: &str, tag: &Tagged, bundle: &ResourceBundle) -> bool {
    is_capitalized(t) && !bundle.is_stopword(t) && tag.pos != Pos::Verb && !text::is_punct(t)
}

/// Entity spans for a tokenized sentence. v1 tags each name token on its own;
/// v2 merges runs of name tokens, allowing lowercase stopwords inside a run.
pub fn entity_spans(tokens: &[String], variant: PairVariant, bundle: &ResourceBundle) -> Vec<EntitySpan> {
    let tags = bundle.pos_tag(tokens);
    let mut spans = pattern_spans(tokens);
    let taken = |spans: &[EntitySpan], i: usize| spans.iter().any(|s| s.start <= i && i < s.end);
    let mut names = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let start_ok = !taken(&spans, i)
            && (is_name_token(&tokens[i], &tags[i], bundle)
                || (variant == PairVariant::MorphkeyV2 && is_capitalized(&tokens[i]) && tags[i].pos != Pos::Verb));
        if !start_ok {
            i += 1;
            continue;
        }
        let mut end = i + 1;
        if variant == PairVariant::MorphkeyV2 {
            let mut j = i + 1;
            while j < tokens.len() && !taken(&spans, j) {
                let t = &tokens[j];
                if text::is_punct(t) || tags[j].pos == Pos::Verb {
                    break;
                }
                if is_capitalized(t) {
                    j += 1;
                    end = j;
                } else if bundle.is_stopword(t) {
                    j += 1;
                } else {
                    break;
                }
            }
        }
        let has_name = (i..end).any(|k| is_name_token(&tokens[k], &tags[k], bundle));
        if has_name {
            // a run opened by a capitalized stopword keeps it only in v2 (`A Song of Ice and Fire`)
            let surface = tokens[i..end].join(" ");
            names.push(EntitySpan { start: i, end, tag: tag_entity(&surface, bundle).tag });
        }
        i = end;
    }
    spans.extend(names);
    spans.sort_by_key(|s| s.start);
    spans
}

enum Item<'a> {
    Entity(NeTag),
    Word(&'a str, Tagged),
}

fn items<'a>(tokens: &'a [String], spans: &[EntitySpan], bundle: &ResourceBundle) -> Vec<Item<'a>> {
    let tags = bundle.pos_tag(tokens);
    let mut out = Vec::new();
    let mut i = 0;
    let mut si = 0;
    while i < tokens.len() {
        if si < spans.len() && spans[si].start == i {
            out.push(Item::Entity(spans[si].tag));
            i = spans[si].end;
            si += 1;
        } else {
            out.push(Item::Word(&tokens[i], tags[i].clone()));
            i += 1;
        }
    }
    out
}

fn entity_pos(tag: NeTag) -> &'static str {
    if tag.is_value() { Pos::Num.as_str() } else { Pos::Propn.as_str() }
}

/// Morphkey pair for one sentence, or `None` when no content words remain.
pub fn morphkey_pair(sentence: &str, variant: PairVariant, bundle: &ResourceBundle) -> Option<TrainingPair> {
    let tokens = text::tokenize(sentence);
    if tokens.is_empty() {
        return None;
    }
    let spans = entity_spans(&tokens, variant, bundle);
    let mut source = Vec::new();
    let mut target = Vec::new();
    for item in items(&tokens, &spans, bundle) {
        match item {
            Item::Entity(tag) => {
                source.push(tag.to_string());
                source.push(entity_pos(tag).to_string());
                target.push(tag.to_string());
            }
            Item::Word(w, tag) => {
                let folded = w.to_lowercase();
                let lemma = bundle.lemmatize(&folded, tag.pos);
                target.push(lemma.clone());
                if lemma != folded {
                    if let Some(p) = &tag.penn {
                        target.push(p.as_str().to_string());
                    }
                }
                if !text::is_punct(w) && !bundle.is_stopword(&folded) && !bundle.is_stopword(&lemma) {
                    source.push(lemma);
                    source.push(tag.pos.as_str().to_string());
                }
            }
        }
    }
    if source.is_empty() {
        return None;
    }
    Some(TrainingPair { source, target, origin: variant })
}

/// Pair for one `e1\trelation\te2` line.
pub fn triple2text_pair(line: &str, line_no: usize, bundle: &ResourceBundle) -> Result<TrainingPair, PairError> {
    let f: Vec<&str> = line.split('\t').map(str::trim).collect();
    if f.len() != 3 || f.iter().any(|x| x.is_empty()) {
        return Err(PairError::MalformedTriple { line: line_no });
    }
    let e1 = tag_entity(f[0], bundle).tag;
    let e2 = tag_entity(f[2], bundle).tag;
    let rel: Vec<String> = text::tokenize_folded(&f[1].replace('_', " "))
        .into_iter()
        .filter(|t| !text::is_punct(t))
        .collect();
    let rel_tags = bundle.pos_tag(&rel);
    let mut source = vec![e1.to_string(), entity_pos(e1).to_string()];
    for (w, t) in rel.iter().zip(&rel_tags) {
        if !bundle.is_stopword(w) {
            source.push(w.clone());
            source.push(t.pos.as_str().to_string());
        }
    }
    source.push(e2.to_string());
    source.push(entity_pos(e2).to_string());
    let mut target = vec![e1.to_string()];
    target.extend(rel);
    target.push(e2.to_string());
    Ok(TrainingPair { source, target, origin: PairVariant::Triple2Text })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PairStats {
    pub read: usize,
    pub emitted: usize,
    pub skipped: usize,
}

/// Streams lines from `input` to pair lines on `out`; memory does not grow with input size.
pub fn build_pairs<R: BufRead, W: Write>(
    variant: PairVariant,
    input: R,
    mut out: W,
    bundle: &ResourceBundle,
) -> Result<PairStats, PairError> {
    let mut stats = PairStats::default();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() || (variant == PairVariant::Triple2Text && line.starts_with('#')) {
            continue;
        }
        stats.read += 1;
        let pair = match variant {
            PairVariant::Triple2Text => Some(triple2text_pair(&line, i + 1, bundle)?),
            v => morphkey_pair(&line, v, bundle),
        };
        match pair {
            Some(p) => {
                writeln!(out, "{}", p.to_tsv())?;
                stats.emitted += 1;
            }
            None => stats.skipped += 1,
        }
    }
    out.flush()?;
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resources::testing::tiny;

    fn spans_text(s: &str, v: PairVariant) -> Vec<String> {
        let b = tiny();
        let toks = text::tokenize(s);
        entity_spans(&toks, v, &b).iter().map(|sp| toks[sp.start..sp.end].join(" ")).collect()
    }

    #[test]
    fn morphkey_shapes() {
        let b = tiny();
        let p = morphkey_pair("Albert played for Germany", PairVariant::MorphkeyV1, &b).unwrap();
        assert_eq!(p.source.join(" "), "UNK PROPN play VERB UNK PROPN");
        assert_eq!(p.target.join(" "), "UNK play VBD for UNK");
    }

    #[test]
    fn stopword_only_sentence_is_skipped() {
        let b = tiny();
        assert_eq!(morphkey_pair("it was the", PairVariant::MorphkeyV1, &b), None);
        let p = morphkey_pair("they played a game", PairVariant::MorphkeyV1, &b).unwrap();
        assert!(!p.source.iter().any(|t| NeTag::ALL.iter().any(|n| n.as_str() == t)));
    }

    #[test]
    fn v2_merges_name_runs() {
        assert_eq!(spans_text("Tony Blair visited Ulm", PairVariant::MorphkeyV1), ["Tony", "Blair", "Ulm"]);
        assert_eq!(spans_text("Tony Blair visited Ulm", PairVariant::MorphkeyV2), ["Tony Blair", "Ulm"]);
        assert_eq!(
            spans_text("She wrote A Song of Ice and Fire in 1996", PairVariant::MorphkeyV2),
            ["A Song of Ice and Fire", "1996"]
        );
        assert_eq!(spans_text("Ulm, Germany", PairVariant::MorphkeyV2), ["Ulm", "Germany"]);
    }

    #[test]
    fn dates_are_one_span() {
        assert_eq!(spans_text("born on 14 March 1879", PairVariant::MorphkeyV1), ["14 March 1879"]);
    }

    #[test]
    fn triple_pairs() {
        let b = tiny();
        let p = triple2text_pair("Albert Einstein\tbirth place\tUlm", 1, &b).unwrap();
        assert_eq!(p.target.join(" "), "PERSON birth place UNK");
        let p = triple2text_pair("Albert Einstein\tplay\tchess", 1, &b).unwrap();
        assert!(p.source.contains(&"play".to_string()));
        assert!(matches!(triple2text_pair("a\tb", 7, &b), Err(PairError::MalformedTriple { line: 7 })));
    }

    #[test]
    fn streaming_counts() {
        let b = tiny();
        let input = "Albert played for Germany\n\nit was the\nElsa won 3 medals\n";
        let mut out = Vec::new();
        let s = build_pairs(PairVariant::MorphkeyV2, input.as_bytes(), &mut out, &b).unwrap();
        assert_eq!(s, PairStats { read: 3, emitted: 2, skipped: 1 });
        assert_eq!(String::from_utf8(out).unwrap().lines().count(), 2);
        let mut out = Vec::new();
        let s = build_pairs(PairVariant::Triple2Text, "a\tb\tc\nx\ty\tz\n".as_bytes(), &mut out, &b).unwrap();
        assert_eq!(s.emitted, 2);
    }

    #[test]
    fn pair_invariants_hold() {
        let b = tiny();
        for s in [
            "Albert Einstein was born in Ulm, Germany on 14 March 1879.",
            "Elsa married Albert in 1919 and won 3 medals.",
            "The match was played in Ulm.",
        ] {
            for v in [PairVariant::MorphkeyV1, PairVariant::MorphkeyV2] {
                let p = morphkey_pair(s, v, &b).unwrap();
                assert!(p.source.iter().all(|t| !b.is_stopword(t)));
                for t in p.source.iter().filter(|t| NeTag::ALL.iter().any(|n| n.as_str() == t.as_str())) {
                    assert!(p.target.contains(t));
                }
                assert!(p.source.len() <= 2 * p.target.len());
            }
        }
    }
}
