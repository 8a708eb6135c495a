use std::sync::LazyLock;

use regex::Regex;
use serde::Serialize;

use super::ResourceBundle;
use crate::tags::{PennTag, Pos};
use crate::text;

static NUMERIC: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^(\d+(?:[.,:/-]\d+)*%?|\d+(?:st|nd|rd|th))$").unwrap());

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Tagged {
    pub pos: Pos,
    /// Fine tag when a rule or the lexicon determines one.
    pub penn: Option<PennTag>,
}

impl Tagged {
    fn new(pos: Pos, penn: Option<&str>) -> Self {
        Tagged { pos, penn: penn.map(PennTag::new) }
    }
}

fn is_capitalized(tok: &str) -> bool {
    tok.chars().next().is_some_and(char::is_uppercase)
}

impl ResourceBundle {
    /// Tags each token. Precedence: punctuation, numeric shapes, capitalized
    /// non-initial tokens, lexicon first sense, capitalized initial unknowns, NOUN.
    pub fn pos_tag<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<Tagged> {
        tokens
            .iter()
            .enumerate()
            .map(|(i, t)| self.tag_one(t.as_ref(), i == 0))
            .collect()
    }

    fn tag_one(&self, tok: &str, initial: bool) -> Tagged {
        if text::is_punct(tok) {
            return Tagged::new(Pos::Punct, Some(punct_tag(tok)));
        }
        if NUMERIC.is_match(tok) {
            return Tagged::new(Pos::Num, Some("CD"));
        }
        if !initial && is_capitalized(tok) {
            return Tagged::new(Pos::Propn, Some("NNP"));
        }
        if let Some(first) = self.penn_tags(tok).and_then(|ts| ts.first()) {
            return Tagged { pos: self.coarse(first), penn: Some(first.clone()) };
        }
        if is_capitalized(tok) {
            return Tagged::new(Pos::Propn, Some("NNP"));
        }
        Tagged::new(Pos::Noun, None)
    }

    pub fn coarse_tags<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<Pos> {
        self.pos_tag(tokens).into_iter().map(|t| t.pos).collect()
    }

    /// True when any token of the text tags as a verb.
    pub fn has_verb(&self, sentence: &str) -> bool {
        let toks = text::tokenize(sentence);
        self.pos_tag(&toks).iter().any(|t| t.pos == Pos::Verb)
    }
}

fn punct_tag(tok: &str) -> &'static str {
    match tok {
        "," => ",",
        "." | "!" | "?" => ".",
        _ => ":",
    }
}
