use super::{fold, ResourceBundle};
use crate::tags::Pos;

const VERB_RULES: &[(&str, &str)] = &[
    ("s", ""),
    ("ies", "y"),
    ("es", "e"),
    ("es", ""),
    ("ed", "e"),
    ("ed", ""),
    ("ied", "y"),
    ("ing", "e"),
    ("ing", ""),
];

const NOUN_RULES: &[(&str, &str)] = &[
    ("s", ""),
    ("ses", "s"),
    ("xes", "x"),
    ("zes", "z"),
    ("ches", "ch"),
    ("shes", "sh"),
    ("men", "man"),
    ("ies", "y"),
];

impl ResourceBundle {
    /// Base form of `word` read as `pos`. Always case-folded.
    ///
    /// Exceptions win, then known lemmas map to themselves, then suffix rules
    /// whose output is a known lemma, then doubled-consonant `-ed`/`-ing`.
    pub fn lemmatize(&self, word: &str, pos: Pos) -> String {
        let w = fold(word);
        let key_pos = if pos == Pos::Propn { Pos::Noun } else { pos };
        if let Some(l) = self.lemma_exceptions.get(&(w.clone(), key_pos)) {
            return l.clone();
        }
        match key_pos {
            Pos::Verb => self.rule_lemma(w, VERB_RULES, |c| self.verbs.contains(c)),
            Pos::Noun => self.rule_lemma(w, NOUN_RULES, |c| self.is_known_noun(c)),
            _ => w,
        }
    }

    fn rule_lemma(&self, w: String, rules: &[(&str, &str)], known: impl Fn(&str) -> bool) -> String {
        if known(&w) {
            return w;
        }
        for (suffix, repl) in rules {
            if w.len() > suffix.len() {
                if let Some(stem) = w.strip_suffix(suffix) {
                    let cand = format!("{stem}{repl}");
                    if known(&cand) {
                        return cand;
                    }
                }
            }
        }
        for suffix in ["ed", "ing"] {
            if let Some(stem) = w.strip_suffix(suffix) {
                let b = stem.as_bytes();
                if b.len() >= 2 && b[b.len() - 1] == b[b.len() - 2] {
                    let cand = &stem[..stem.len() - 1];
                    if known(cand) {
                        return cand.to_string();
                    }
                }
            }
        }
        w
    }

    /// Lemma used for gloss co-occurrence counting: the verb reading if it
    /// changes the token, else the noun reading.
    pub(crate) fn gloss_lemma(&self, token: &str) -> String {
        let v = self.lemmatize(token, Pos::Verb);
        if v != fold(token) {
            return v;
        }
        self.lemmatize(token, Pos::Noun)
    }
}
