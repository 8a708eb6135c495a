//! The tokenizer shared by the language model, the ranker and the metrics.
//!
//! Whitespace separates chunks; punctuation is split off as its own token,
//! except inside numbers (`13,916`, `54.72`, `38%`) and word-internal hyphens
//! or apostrophes. The possessive clitic `'s` becomes a separate token.

use std::sync::LazyLock;

use regex::Regex;

static TOKEN: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"(?x)
        \d+(?:[.,:]\d+)*%?            # numbers, times, percentages
      | '[sS]\b                       # possessive clitic
      | [\p{L}\p{M}]+(?:[-'][\p{L}\p{M}\d]+)*  # words
      | [^\s\p{L}\p{M}\d]             # any single other symbol
    ",
    )
    .expect("token pattern")
});

/// Byte spans of every token, for callers that need to map back to the text.
pub fn token_spans(text: &str) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for m in TOKEN.find_iter(text) {
        let t = m.as_str();
        if t.len() > 2 && (t.ends_with("'s") || t.ends_with("'S")) {
            out.push((m.start(), m.end() - 2));
            out.push((m.end() - 2, m.end()));
        } else {
            out.push((m.start(), m.end()));
        }
    }
    out
}

/// Tokens with their original casing.
pub fn tokenize(text: &str) -> Vec<String> {
    token_spans(text).into_iter().map(|(a, b)| text[a..b].to_string()).collect()
}

/// Tokens, case-folded. This is the form every scorer sees.
pub fn tokenize_folded(text: &str) -> Vec<String> {
    token_spans(text).into_iter().map(|(a, b)| text[a..b].to_lowercase()).collect()
}

pub fn is_punct(token: &str) -> bool {
    !token.is_empty() && token.chars().all(|c| !c.is_alphanumeric())
}

/// Number of non-punctuation tokens.
pub fn word_count(text: &str) -> usize {
    token_spans(text)
        .into_iter()
        .filter(|&(a, b)| !is_punct(&text[a..b]))
        .count()
}

/// Joins tokens back into readable text: no space before punctuation or `'s`.
pub fn detokenize<S: AsRef<str>>(tokens: &[S]) -> String {
    let mut out = String::new();
    for tok in tokens {
        let t = tok.as_ref();
        let attach = matches!(t, "," | "." | ";" | ":" | "!" | "?" | "%" | ")")
            || t.eq_ignore_ascii_case("'s")
            || t == "'";
        if !out.is_empty() && !attach && !out.ends_with('(') {
            out.push(' ');
        }
        out.push_str(t);
    }
    out
}

/// Uppercases the first character.
pub fn capitalize_first(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().collect::<String>() + chars.as_str(),
        None => String::new(),
    }
}

/// Collapses runs of whitespace and trims.
pub fn normalize_space(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}
