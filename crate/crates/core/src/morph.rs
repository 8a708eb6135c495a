//! Verb inflection: irregular table first, regular spelling rules otherwise.

use serde::Serialize;

use crate::resources::{fold, ResourceBundle};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerbForm {
    Base,
    ThirdSingular,
    Past,
    PastParticiple,
    Gerund,
}

/// Verbs that double their final consonant despite several vowel groups.
const DOUBLING: &[&str] = &[
    "admit", "refer", "occur", "prefer", "control", "commit", "permit", "equip", "regret",
    "compel", "transfer", "submit", "omit", "patrol", "propel", "expel",
];

fn is_vowel(c: u8) -> bool {
    matches!(c, b'a' | b'e' | b'i' | b'o' | b'u')
}

fn vowel_groups(w: &str) -> usize {
    let b = w.as_bytes();
    (0..b.len())
        .filter(|&i| is_vowel(b[i]) && (i == 0 || !is_vowel(b[i - 1])))
        .count()
}

fn doubles(w: &str) -> bool {
    let b = w.as_bytes();
    if b.len() < 3 {
        return false;
    }
    let (a, v, c) = (b[b.len() - 3], b[b.len() - 2], b[b.len() - 1]);
    let cvc = !is_vowel(a) && is_vowel(v) && !is_vowel(c) && !matches!(c, b'w' | b'x' | b'y');
    cvc && (vowel_groups(w) == 1 || DOUBLING.contains(&w))
}

fn consonant_y(w: &str) -> bool {
    let b = w.as_bytes();
    b.len() >= 2 && b[b.len() - 1] == b'y' && !is_vowel(b[b.len() - 2])
}

pub fn regular_third_singular(v: &str) -> String {
    if ["s", "x", "z", "ch", "sh", "o"].iter().any(|s| v.ends_with(s)) {
        format!("{v}es")
    } else if consonant_y(v) {
        format!("{}ies", &v[..v.len() - 1])
    } else {
        format!("{v}s")
    }
}

pub fn regular_past(v: &str) -> String {
    if v.ends_with('e') {
        format!("{v}d")
    } else if consonant_y(v) {
        format!("{}ied", &v[..v.len() - 1])
    } else if doubles(v) {
        format!("{v}{}ed", &v[v.len() - 1..])
    } else {
        format!("{v}ed")
    }
}

pub fn regular_gerund(v: &str) -> String {
    if let Some(stem) = v.strip_suffix("ie") {
        format!("{stem}ying")
    } else if v.ends_with('e') && !v.ends_with("ee") && v != "be" {
        format!("{}ing", &v[..v.len() - 1])
    } else if doubles(v) {
        format!("{v}{}ing", &v[v.len() - 1..])
    } else {
        format!("{v}ing")
    }
}

impl ResourceBundle {
    pub fn inflect(&self, lemma: &str, form: VerbForm) -> String {
        let v = fold(lemma);
        let irr = self.irregular(&v);
        match form {
            VerbForm::Base => v,
            VerbForm::ThirdSingular => irr
                .map(|i| i.third_singular.clone())
                .unwrap_or_else(|| regular_third_singular(&v)),
            VerbForm::Past => irr.map(|i| i.past.clone()).unwrap_or_else(|| regular_past(&v)),
            VerbForm::PastParticiple => irr
                .map(|i| i.past_participle.clone())
                .unwrap_or_else(|| regular_past(&v)),
            VerbForm::Gerund => {
                if v == "be" {
                    "being".into()
                } else {
                    regular_gerund(&v)
                }
            }
        }
    }

    /// Present or past finite form agreeing with a singular or plural subject.
    pub fn finite(&self, lemma: &str, past: bool, plural: bool) -> String {
        let v = fold(lemma);
        match (v.as_str(), past, plural) {
            ("be", false, true) => "are".into(),
            ("be", true, true) => "were".into(),
            (_, true, _) => self.inflect(&v, VerbForm::Past),
            (_, false, true) => v,
            (_, false, false) => self.inflect(&v, VerbForm::ThirdSingular),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resources::testing::tiny;
    use crate::tags::Pos;

    #[test]
    fn regular_spelling_rules() {
        assert_eq!(regular_third_singular("watch"), "watches");
        assert_eq!(regular_third_singular("carry"), "carries");
        assert_eq!(regular_third_singular("play"), "plays");
        assert_eq!(regular_past("locate"), "located");
        assert_eq!(regular_past("marry"), "married");
        assert_eq!(regular_past("stop"), "stopped");
        assert_eq!(regular_past("admit"), "admitted");
        assert_eq!(regular_past("open"), "opened");
        assert_eq!(regular_past("visit"), "visited");
        assert_eq!(regular_gerund("die"), "dying");
        assert_eq!(regular_gerund("write"), "writing");
        assert_eq!(regular_gerund("see"), "seeing");
        assert_eq!(regular_gerund("run"), "running");
    }

    #[test]
    fn irregulars_and_be() {
        let b = tiny();
        assert_eq!(b.inflect("bear", VerbForm::PastParticiple), "born");
        assert_eq!(b.inflect("have", VerbForm::ThirdSingular), "has");
        assert_eq!(b.finite("be", false, false), "is");
        assert_eq!(b.finite("be", false, true), "are");
        assert_eq!(b.finite("be", true, true), "were");
        assert_eq!(b.finite("play", true, false), "played");
        assert_eq!(b.finite("play", false, false), "plays");
    }

    #[test]
    fn round_trip_through_lemmatizer_on_tiny_lexicon() {
        let b = tiny();
        for v in ["play", "locate", "open", "marry", "match"] {
            for f in [VerbForm::ThirdSingular, VerbForm::Past, VerbForm::PastParticiple] {
                assert_eq!(b.lemmatize(&b.inflect(v, f), Pos::Verb), v, "{v} {f:?}");
            }
        }
    }
}
