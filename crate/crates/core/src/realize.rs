//! Three rule-based surface realizers, entity restoration and candidate filtering.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::canonical::{pattern_tag, CanonicalTriple, EntityMention};
use crate::morph::VerbForm;
use crate::relation::ModifiedTriple;
use crate::resources::{ResourceBundle, Tense, Voice};
use crate::tags::{NeTag, Pos};
use crate::text;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RealizeError {
    #[error("relation `{0}` offers no verb")]
    NoVerbAvailable(String),
    #[error("placeholder `{0}` has no entity in the triple")]
    UnresolvedPlaceholder(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RealizerId {
    Concat,
    VerbFrame,
    Copular,
}

impl RealizerId {
    pub const ALL: [RealizerId; 3] = [RealizerId::Concat, RealizerId::VerbFrame, RealizerId::Copular];

    pub fn as_str(self) -> &'static str {
        match self {
            RealizerId::Concat => "concat",
            RealizerId::VerbFrame => "verb_frame",
            RealizerId::Copular => "copular",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        RealizerId::ALL.into_iter().find(|r| r.as_str() == s)
    }
}

impl fmt::Display for RealizerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Arg {
    E1,
    E2,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Piece {
    Word(String),
    Entity(Arg),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SentenceCandidate {
    pub realizer: RealizerId,
    /// Placeholder form, e.g. `PERSON was born in GPE`.
    pub text: String,
    #[serde(skip)]
    pub pieces: Vec<Piece>,
    pub realized_text: String,
    pub fluency: f64,
    pub adequacy: f64,
    pub score: f64,
}

impl SentenceCandidate {
    fn from_pieces(realizer: RealizerId, pieces: Vec<Piece>, t: &CanonicalTriple) -> Self {
        let text = pieces
            .iter()
            .map(|p| match p {
                Piece::Word(w) => w.clone(),
                Piece::Entity(Arg::E1) => t.e1.tag.to_string(),
                Piece::Entity(Arg::E2) => t.e2.tag.to_string(),
            })
            .collect::<Vec<_>>()
            .join(" ");
        SentenceCandidate {
            realizer,
            text,
            pieces,
            realized_text: String::new(),
            fluency: 0.0,
            adequacy: 0.0,
            score: 0.0,
        }
    }
}

fn words(ws: &[&str]) -> Vec<Piece> {
    ws.iter().map(|w| Piece::Word((*w).to_string())).collect()
}

/// Plural when the last word's dominant lexicon tag is a plural noun.
pub fn is_plural_surface(surface: &str, bundle: &ResourceBundle) -> bool {
    text::tokenize(surface)
        .last()
        .and_then(|w| bundle.penn_tags(w))
        .and_then(|ts| ts.first())
        .is_some_and(|t| t.is_plural_noun())
}

fn subject_plural(m: &EntityMention, bundle: &ResourceBundle) -> bool {
    m.tag == NeTag::Quantity || is_plural_surface(&m.surface, bundle)
}

fn has_past_morphology(mt: &ModifiedTriple) -> bool {
    mt.original_tags.iter().any(|t| {
        t.pos == Pos::Verb
            && t.penn
                .as_ref()
                .is_some_and(|p| matches!(p.as_str(), "VBD" | "VBG"))
    })
}

fn past_tense(mt: &ModifiedTriple) -> bool {
    mt.base.e2.tag.is_temporal() || has_past_morphology(mt)
}

/// `E1 has RELATION E2` without a verb, `E1 RELATION E2` with the verb inflected.
pub fn realize_concat(mt: &ModifiedTriple, bundle: &ResourceBundle) -> SentenceCandidate {
    let t = &mt.base;
    let plural = subject_plural(&t.e1, bundle);
    let mut pieces = vec![Piece::Entity(Arg::E1)];
    match mt.first_verb() {
        None => {
            pieces.push(Piece::Word(bundle.finite("have", false, plural)));
            pieces.extend(mt.tokens.iter().map(|w| Piece::Word(w.clone())));
            if let Some(p) = bundle.preposition_explicit("have", t.e2.tag) {
                pieces.push(Piece::Word(p));
            }
        }
        Some(v) => {
            let past = past_tense(mt);
            for (i, w) in mt.tokens.iter().enumerate() {
                if i == v {
                    let lemma = bundle.lemmatize(w, Pos::Verb);
                    pieces.push(Piece::Word(bundle.finite(&lemma, past, plural)));
                } else {
                    pieces.push(Piece::Word(w.clone()));
                }
            }
        }
    }
    pieces.push(Piece::Entity(Arg::E2));
    SentenceCandidate::from_pieces(RealizerId::Concat, pieces, t)
}

struct Frame {
    verb: String,
    voice: Voice,
    past: bool,
    /// Index of the verb in `mt.tokens`, when it came from the relation itself.
    at: Option<usize>,
}

fn derive_frame(mt: &ModifiedTriple, bundle: &ResourceBundle) -> Option<Frame> {
    let past = past_tense(mt);
    for w in &mt.original_tokens {
        if let Some(f) = bundle.verb_frame(w) {
            let past = match f.tense {
                Some(Tense::Past) => true,
                Some(Tense::Present) => false,
                None => past,
            };
            return Some(Frame { verb: f.verb.clone(), voice: f.voice, past, at: None });
        }
    }
    let v = mt.first_verb()?;
    let surface = &mt.tokens[v];
    let verb = bundle.lemmatize(surface, Pos::Verb);
    let orig = mt
        .original_tokens
        .iter()
        .zip(&mt.original_tags)
        .find(|(_, tag)| tag.pos == Pos::Verb);
    let participle_first = orig.is_some_and(|(_, tag)| tag.penn.as_ref().is_some_and(|p| p.as_str() == "VBN"));
    let single_ed = mt.original_tokens.len() == 1
        && orig.is_some_and(|(w, _)| w.ends_with("ed"))
        && mt.base.e2.tag == NeTag::Date;
    let voice = if participle_first || single_ed { Voice::Passive } else { Voice::Active };
    let past = if participle_first && !mt.base.e2.tag.is_temporal() { false } else { past };
    Some(Frame { verb, voice, past, at: Some(v) })
}

fn date_has_day(surface: &str) -> bool {
    text::tokenize(surface)
        .iter()
        .any(|t| t.len() <= 2 && t.chars().all(|c| c.is_ascii_digit()))
}

fn choose_preposition(verb: &str, voice: Voice, obj: &EntityMention, bundle: &ResourceBundle) -> Option<String> {
    let p = bundle.preposition_explicit(verb, obj.tag).or_else(|| {
        let generic = bundle.preposition(verb, obj.tag);
        // the generic fallback only helps temporal objects; otherwise passive takes an agent
        if obj.tag.is_temporal() {
            Some(generic)
        } else if voice == Voice::Passive {
            Some("by".to_string())
        } else {
            None
        }
    })?;
    if p == "in" && obj.tag == NeTag::Date && date_has_day(&obj.surface) {
        return Some("on".into());
    }
    Some(p)
}

/// `E1 <finite verb> [prep] E2`, with tense, preposition and passive auxiliary.
pub fn realize_verb_frame(
    mt: &ModifiedTriple,
    bundle: &ResourceBundle,
) -> Result<SentenceCandidate, RealizeError> {
    let t = &mt.base;
    let frame = derive_frame(mt, bundle).ok_or_else(|| RealizeError::NoVerbAvailable(t.relation.clone()))?;
    let plural = subject_plural(&t.e1, bundle);
    let mut pieces = vec![Piece::Entity(Arg::E1)];
    match frame.voice {
        Voice::Passive => {
            pieces.push(Piece::Word(bundle.finite("be", frame.past, plural)));
            pieces.push(Piece::Word(bundle.inflect(&frame.verb, VerbForm::PastParticiple)));
        }
        Voice::Active => pieces.push(Piece::Word(bundle.finite(&frame.verb, frame.past, plural))),
    }
    // particles and prepositions right after the verb travel with it; nouns are dropped
    let mut kept = Vec::new();
    let mut nouns = Vec::new();
    if let Some(v) = frame.at {
        for (w, p) in mt.tokens.iter().zip(&mt.relation_pos).skip(v + 1) {
            match p {
                Pos::Adp | Pos::Part if nouns.is_empty() => kept.push(w.clone()),
                Pos::Noun | Pos::Propn | Pos::Adj | Pos::Num => nouns.push(w.clone()),
                _ => {}
            }
        }
    }
    let numeric_object = matches!(t.e2.tag, NeTag::Cardinal | NeTag::Quantity);
    if kept.is_empty() && !(numeric_object && !nouns.is_empty()) {
        if let Some(p) = choose_preposition(&frame.verb, frame.voice, &t.e2, bundle) {
            kept.push(p);
        }
    }
    pieces.extend(kept.into_iter().map(Piece::Word));
    pieces.push(Piece::Entity(Arg::E2));
    if numeric_object {
        // "won 2 gold medals": counted nouns follow the number
        pieces.extend(nouns.into_iter().map(Piece::Word));
    }
    Ok(SentenceCandidate::from_pieces(RealizerId::VerbFrame, pieces, t))
}

/// The two copular shapes: `E1 REL is E2` (made possessive by postprocessing)
/// and `E2 is the REL of E1`.
pub fn realize_copular(mt: &ModifiedTriple, bundle: &ResourceBundle) -> [SentenceCandidate; 2] {
    let t = &mt.base;
    let cop = bundle.finite("be", false, subject_plural(&t.e2, bundle));
    let rel: Vec<Piece> = mt.original_tokens.iter().map(|w| Piece::Word(w.clone())).collect();

    let mut a = vec![Piece::Entity(Arg::E1)];
    a.extend(rel.iter().cloned());
    a.push(Piece::Word(cop.clone()));
    a.push(Piece::Entity(Arg::E2));

    let mut b = vec![Piece::Entity(Arg::E2), Piece::Word(cop), Piece::Word("the".into())];
    b.extend(rel);
    b.extend(words(&["of"]));
    b.push(Piece::Entity(Arg::E1));

    [
        SentenceCandidate::from_pieces(RealizerId::Copular, a, t),
        SentenceCandidate::from_pieces(RealizerId::Copular, b, t),
    ]
}

/// Maps a placeholder sentence back to pieces. Tags shared by both entities
/// resolve left to right as E1 then E2.
pub fn parse_placeholders(template: &str, t: &CanonicalTriple) -> Result<Vec<Piece>, RealizeError> {
    let mut seen_shared = false;
    template
        .split_whitespace()
        .map(|tok| match tok.parse::<NeTag>() {
            Ok(tag) if tag == t.e1.tag && tag == t.e2.tag => {
                let arg = if seen_shared { Arg::E2 } else { Arg::E1 };
                seen_shared = true;
                Ok(Piece::Entity(arg))
            }
            Ok(tag) if tag == t.e1.tag => Ok(Piece::Entity(Arg::E1)),
            Ok(tag) if tag == t.e2.tag => Ok(Piece::Entity(Arg::E2)),
            Ok(_) => Err(RealizeError::UnresolvedPlaceholder(tok.to_string())),
            Err(_) => Ok(Piece::Word(tok.to_string())),
        })
        .collect()
}

fn is_verb_word(w: &str, bundle: &ResourceBundle) -> bool {
    let toks = ["x".to_string(), w.to_string()];
    bundle.pos_tag(&toks)[1].pos == Pos::Verb
}

/// Restores entity surfaces, adds the possessive after the first entity when the
/// next word is not a verb, capitalizes and terminates the sentence.
pub fn postprocess(c: &SentenceCandidate, t: &CanonicalTriple, bundle: &ResourceBundle) -> SentenceCandidate {
    let mut out: Vec<String> = Vec::new();
    let mut first_entity_done = false;
    for (i, p) in c.pieces.iter().enumerate() {
        match p {
            Piece::Word(w) => out.push(w.clone()),
            Piece::Entity(arg) => {
                let m = match arg {
                    Arg::E1 => &t.e1,
                    Arg::E2 => &t.e2,
                };
                out.push(m.surface.clone());
                if !first_entity_done {
                    first_entity_done = true;
                    if let Some(Piece::Word(next)) = c.pieces.get(i + 1) {
                        if !is_verb_word(next, bundle) && !text::is_punct(next) {
                            out.push("'s".into());
                        }
                    }
                }
            }
        }
    }
    let mut s = text::capitalize_first(&join(&out));
    while s.ends_with(['.', ',', ';', ':']) && !s.ends_with("...") {
        s.pop();
    }
    if !s.ends_with(['!', '?']) {
        s.push('.');
    }
    SentenceCandidate { realized_text: s, ..c.clone() }
}

fn join(parts: &[String]) -> String {
    let mut s = String::new();
    for p in parts {
        if !s.is_empty() && p != "'s" {
            s.push(' ');
        }
        s.push_str(p);
    }
    s
}

/// Placeholder-text postprocessing for externally produced templates.
pub fn postprocess_text(
    template: &str,
    t: &CanonicalTriple,
    realizer: RealizerId,
    bundle: &ResourceBundle,
) -> Result<SentenceCandidate, RealizeError> {
    let pieces = parse_placeholders(template, t)?;
    Ok(postprocess(&SentenceCandidate::from_pieces(realizer, pieces, t), t, bundle))
}

/// Content tokens of the triple: both surfaces and the relation, folded,
/// stopwords removed, deduplicated.
pub fn input_tokens(t: &CanonicalTriple, bundle: &ResourceBundle) -> Vec<String> {
    bundle.content_tokens(&format!("{} {} {}", t.e1.surface, t.relation, t.e2.surface))
}

pub fn length_bounds(t: &CanonicalTriple, bundle: &ResourceBundle) -> (f64, f64) {
    let base = (input_tokens(t, bundle).len() + 5) as f64;
    (0.5 * base, 3.0 * base)
}

pub fn passes_filter(c: &SentenceCandidate, t: &CanonicalTriple, bundle: &ResourceBundle) -> bool {
    let s = &c.realized_text;
    let (lo, hi) = length_bounds(t, bundle);
    let n = text::word_count(s) as f64;
    bundle.has_verb(s) && s.contains(&t.e1.surface) && s.contains(&t.e2.surface) && n >= lo && n <= hi
}

#[derive(Debug, Clone, PartialEq)]
pub struct Filtered {
    pub kept: Vec<SentenceCandidate>,
    /// True when nothing survived and the concat output was kept unfiltered.
    pub fell_back: bool,
}

pub fn filter_candidates(
    cands: Vec<SentenceCandidate>,
    mt: &ModifiedTriple,
    bundle: &ResourceBundle,
) -> Filtered {
    let t = &mt.base;
    let kept: Vec<_> = cands.into_iter().filter(|c| passes_filter(c, t, bundle)).collect();
    if !kept.is_empty() {
        return Filtered { kept, fell_back: false };
    }
    let fallback = postprocess(&realize_concat(mt, bundle), t, bundle);
    Filtered { kept: vec![fallback], fell_back: true }
}

/// Runs the enabled realizers and postprocesses their output.
pub fn realize_all(
    mt: &ModifiedTriple,
    enabled: &[RealizerId],
    bundle: &ResourceBundle,
) -> Vec<SentenceCandidate> {
    let mut raw = Vec::new();
    for r in RealizerId::ALL {
        if !enabled.contains(&r) {
            continue;
        }
        match r {
            RealizerId::Concat => raw.push(realize_concat(mt, bundle)),
            RealizerId::VerbFrame => {
                if let Ok(c) = realize_verb_frame(mt, bundle) {
                    raw.push(c);
                }
            }
            RealizerId::Copular => raw.extend(realize_copular(mt, bundle)),
        }
    }
    raw.iter().map(|c| postprocess(c, &mt.base, bundle)).collect()
}

/// True when a surface is a bare value (number, date and so on).
pub fn is_value_surface(s: &str) -> bool {
    pattern_tag(s).is_some()
}
