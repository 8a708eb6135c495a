//! Immutable lexical resources and the lookups built on them.
//!
//! A [`ResourceBundle`] is loaded once from a directory of flat files and then
//! shared read-only. Every key is case-folded on the way in.

mod embed;
mod gender;
mod lemma;
mod pos;

use std::collections::{HashMap, HashSet};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::tags::{NeTag, PennTag, Pos, DEFAULT_PENN_MAP};
use crate::text;

pub use embed::{Embeddings, NoEmbedding};
pub use gender::{Gender, Number, PronounKey, Possessive, Role};
pub use pos::Tagged;

#[derive(Debug, Error)]
pub enum ResourceError {
    #[error("{file}:{line}: {reason}")]
    MalformedResource {
        file: PathBuf,
        line: usize,
        reason: String,
    },
    #[error("required resource file missing: {0}")]
    MissingRequired(PathBuf),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

/// Load status of one resource file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LoadStatus {
    Loaded,
    /// Optional file absent; the corresponding map is empty.
    Missing,
    /// Optional file absent; a compiled-in default was used.
    Builtin,
}

#[derive(Clone, Debug, Serialize)]
pub struct FileReport {
    pub file: String,
    pub entries: usize,
    pub status: LoadStatus,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IrregularVerb {
    pub past: String,
    pub past_participle: String,
    pub third_singular: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Voice {
    Active,
    Passive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tense {
    Past,
    Present,
}

/// How a nominal relation word maps onto a verb (`birth` → passive past `bear`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerbFrame {
    pub verb: String,
    pub voice: Voice,
    pub tense: Option<Tense>,
}

#[derive(Clone, Debug)]
pub struct ResourceOptions {
    pub embedding_dim: usize,
}

impl Default for ResourceOptions {
    fn default() -> Self {
        ResourceOptions { embedding_dim: 300 }
    }
}

#[derive(Clone, Debug, Default)]
pub struct ResourceBundle {
    pub(crate) verbs: HashSet<String>,
    pub(crate) lemma_exceptions: HashMap<(String, Pos), String>,
    pub(crate) glosses: HashMap<String, Vec<String>>,
    /// Lemmatized, case-folded gloss tokens per lemma, precomputed for co-occurrence.
    pub(crate) gloss_tokens: HashMap<String, Vec<String>>,
    pub(crate) embeddings: Embeddings,
    pub(crate) stopwords: HashSet<String>,
    pub(crate) pos_lexicon: HashMap<String, Vec<PennTag>>,
    pub(crate) penn_map: HashMap<String, Pos>,
    pub(crate) gazetteer: HashMap<String, NeTag>,
    pub(crate) names: HashMap<String, Gender>,
    pub(crate) pronouns: HashMap<PronounKey, String>,
    pub(crate) prepositions: HashMap<(String, String), String>,
    pub(crate) irregular: HashMap<String, IrregularVerb>,
    pub(crate) verb_frames: HashMap<String, VerbFrame>,
    /// Verbs sorted once, for deterministic scans.
    pub(crate) verb_list: Vec<String>,
    pub(crate) report: Vec<FileReport>,
}

pub fn fold(s: &str) -> String {
    s.trim().to_lowercase()
}

struct Source {
    path: PathBuf,
    body: String,
}

impl Source {
    /// Data lines with 1-based numbers; blank lines and `#` comments skipped.
    fn lines(&self) -> impl Iterator<Item = (usize, &str)> {
        self.body
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
            .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
    }

    fn malformed(&self, line: usize, reason: impl Into<String>) -> ResourceError {
        ResourceError::MalformedResource {
            file: self.path.clone(),
            line,
            reason: reason.into(),
        }
    }

    fn fields<'a>(
        &self,
        line_no: usize,
        line: &'a str,
        n: usize,
    ) -> Result<Vec<&'a str>, ResourceError> {
        let parts: Vec<&str> = line.split('\t').map(str::trim).collect();
        if parts.len() != n || parts.iter().any(|p| p.is_empty()) {
            return Err(self.malformed(
                line_no,
                format!("expected {n} non-empty tab-separated fields, found {}", parts.len()),
            ));
        }
        Ok(parts)
    }
}

fn read_source(dir: &Path, name: &str, required: bool) -> Result<Option<Source>, ResourceError> {
    let path = dir.join(name);
    match fs::read_to_string(&path) {
        Ok(body) => Ok(Some(Source { path, body })),
        Err(e) if e.kind() == io::ErrorKind::NotFound => {
            if required {
                Err(ResourceError::MissingRequired(path))
            } else {
                log::warn!("optional resource {} not found; continuing without it", path.display());
                Ok(None)
            }
        }
        Err(source) => Err(ResourceError::Io { path, source }),
    }
}

pub fn load_resources(dir: &Path) -> Result<ResourceBundle, ResourceError> {
    load_resources_with(dir, &ResourceOptions::default())
}

pub fn load_resources_with(
    dir: &Path,
    opts: &ResourceOptions,
) -> Result<ResourceBundle, ResourceError> {
    let mut b = ResourceBundle::default();

    macro_rules! record {
        ($file:expr, $src:expr, $count:expr) => {{
            let status = if $src.is_some() { LoadStatus::Loaded } else { LoadStatus::Missing };
            b.report.push(FileReport { file: $file.to_string(), entries: $count, status });
        }};
    }

    // required
    let src = read_source(dir, "verbs.txt", true)?;
    if let Some(s) = &src {
        for (_, l) in s.lines() {
            b.verbs.insert(fold(l));
        }
    }
    record!("verbs.txt", src, b.verbs.len());

    let src = read_source(dir, "stopwords.txt", true)?;
    if let Some(s) = &src {
        for (_, l) in s.lines() {
            b.stopwords.insert(fold(l));
        }
    }
    record!("stopwords.txt", src, b.stopwords.len());

    let src = read_source(dir, "penn_universal.tsv", false)?;
    match &src {
        Some(s) => {
            for (n, l) in s.lines() {
                let f = s.fields(n, l, 2)?;
                let pos: Pos = f[1].parse().map_err(|e: String| s.malformed(n, e))?;
                b.penn_map.insert(f[0].to_string(), pos);
            }
            record!("penn_universal.tsv", src, b.penn_map.len());
        }
        None => {
            for (t, p) in DEFAULT_PENN_MAP {
                b.penn_map.insert((*t).to_string(), *p);
            }
            b.report.push(FileReport {
                file: "penn_universal.tsv".into(),
                entries: b.penn_map.len(),
                status: LoadStatus::Builtin,
            });
        }
    }

    let src = read_source(dir, "pos_lexicon.tsv", true)?;
    if let Some(s) = &src {
        for (n, l) in s.lines() {
            let f = s.fields(n, l, 2)?;
            let mut tags = Vec::new();
            for t in f[1].split(',').map(str::trim) {
                if !b.penn_map.contains_key(t) {
                    return Err(s.malformed(n, format!("unknown PENN tag `{t}`")));
                }
                tags.push(PennTag::new(t));
            }
            b.pos_lexicon.insert(fold(f[0]), tags);
        }
    }
    record!("pos_lexicon.tsv", src, b.pos_lexicon.len());

    let src = read_source(dir, "lemma_exceptions.tsv", true)?;
    if let Some(s) = &src {
        for (n, l) in s.lines() {
            let f = s.fields(n, l, 3)?;
            let pos: Pos = f[1].parse().map_err(|e: String| s.malformed(n, e))?;
            b.lemma_exceptions.insert((fold(f[0]), pos), fold(f[2]));
        }
    }
    record!("lemma_exceptions.tsv", src, b.lemma_exceptions.len());

    let src = read_source(dir, "pronouns.tsv", true)?;
    if let Some(s) = &src {
        for (n, l) in s.lines() {
            let f = s.fields(n, l, 5)?;
            let key = PronounKey::parse(f[0], f[1], f[2], f[3]).map_err(|e| s.malformed(n, e))?;
            b.pronouns.insert(key, f[4].to_string());
        }
        if let Some(missing) = PronounKey::all().find(|k| !b.pronouns.contains_key(k)) {
            return Err(s.malformed(0, format!("pronoun table has no entry for {missing:?}")));
        }
    }
    record!("pronouns.tsv", src, b.pronouns.len());

    // optional
    let src = read_source(dir, "verb_irregular.tsv", false)?;
    if let Some(s) = &src {
        for (n, l) in s.lines() {
            let f = s.fields(n, l, 4)?;
            b.irregular.insert(
                fold(f[0]),
                IrregularVerb {
                    past: fold(f[1]),
                    past_participle: fold(f[2]),
                    third_singular: fold(f[3]),
                },
            );
        }
    }
    record!("verb_irregular.tsv", src, b.irregular.len());

    let src = read_source(dir, "glosses.tsv", false)?;
    if let Some(s) = &src {
        for (n, l) in s.lines() {
            let f = s.fields(n, l, 3)?;
            b.glosses.entry(fold(f[0])).or_default().push(f[2].to_string());
        }
    }
    record!("glosses.tsv", src, b.glosses.len());

    let src = read_source(dir, "embeddings.txt", false)?;
    if let Some(s) = &src {
        b.embeddings = Embeddings::parse(s.lines(), opts.embedding_dim, |n, r| s.malformed(n, r))?;
    }
    record!("embeddings.txt", src, b.embeddings.len());

    let src = read_source(dir, "gazetteer.tsv", false)?;
    if let Some(s) = &src {
        for (n, l) in s.lines() {
            let f = s.fields(n, l, 2)?;
            let tag: NeTag = f[1].parse().map_err(|e: String| s.malformed(n, e))?;
            b.gazetteer.entry(fold(f[0])).or_insert(tag);
        }
    }
    record!("gazetteer.tsv", src, b.gazetteer.len());

    let src = read_source(dir, "names.tsv", false)?;
    if let Some(s) = &src {
        for (n, l) in s.lines() {
            let f = s.fields(n, l, 2)?;
            let g = match f[1] {
                "m" => Gender::Male,
                "f" => Gender::Female,
                other => return Err(s.malformed(n, format!("gender must be m or f, got `{other}`"))),
            };
            b.names.insert(fold(f[0]), g);
        }
    }
    record!("names.tsv", src, b.names.len());

    let src = read_source(dir, "prepositions.tsv", false)?;
    if let Some(s) = &src {
        for (n, l) in s.lines() {
            let f = s.fields(n, l, 3)?;
            if f[1] != "*" {
                f[1].parse::<NeTag>().map_err(|e| s.malformed(n, e))?;
            }
            b.prepositions.insert((fold(f[0]), f[1].to_string()), fold(f[2]));
        }
    }
    record!("prepositions.tsv", src, b.prepositions.len());

    let src = read_source(dir, "verb_frames.tsv", false)?;
    if let Some(s) = &src {
        for (n, l) in s.lines() {
            let f = s.fields(n, l, 4)?;
            let voice = match f[2] {
                "active" => Voice::Active,
                "passive" => Voice::Passive,
                other => return Err(s.malformed(n, format!("bad voice `{other}`"))),
            };
            let tense = match f[3] {
                "past" => Some(Tense::Past),
                "present" => Some(Tense::Present),
                "*" => None,
                other => return Err(s.malformed(n, format!("bad tense `{other}`"))),
            };
            b.verb_frames.insert(fold(f[0]), VerbFrame { verb: fold(f[1]), voice, tense });
        }
    }
    record!("verb_frames.tsv", src, b.verb_frames.len());

    b.finish();
    Ok(b)
}

impl ResourceBundle {
    /// Builds derived indexes. Called after all maps are filled.
    pub(crate) fn finish(&mut self) {
        let mut verbs: Vec<String> = self.verbs.iter().cloned().collect();
        verbs.sort();
        self.verb_list = verbs;
        let mut gloss_tokens = HashMap::new();
        for (lemma, texts) in &self.glosses {
            let toks: Vec<String> = texts
                .iter()
                .flat_map(|t| text::tokenize_folded(t))
                .filter(|t| !text::is_punct(t))
                .map(|t| self.gloss_lemma(&t))
                .collect();
            gloss_tokens.insert(lemma.clone(), toks);
        }
        self.gloss_tokens = gloss_tokens;
    }

    pub fn report(&self) -> &[FileReport] {
        &self.report
    }

    pub fn is_verb(&self, lemma: &str) -> bool {
        self.verbs.contains(&fold(lemma))
    }

    pub fn verbs(&self) -> &[String] {
        &self.verb_list
    }

    pub fn is_stopword(&self, word: &str) -> bool {
        self.stopwords.contains(&fold(word))
    }

    pub fn gazetteer_lookup(&self, surface: &str) -> Option<NeTag> {
        self.gazetteer.get(&fold(surface)).copied()
    }

    pub fn glosses(&self, lemma: &str) -> Option<&[String]> {
        self.glosses.get(&fold(lemma)).map(Vec::as_slice)
    }

    pub fn embeddings(&self) -> &Embeddings {
        &self.embeddings
    }

    pub fn irregular(&self, lemma: &str) -> Option<&IrregularVerb> {
        self.irregular.get(&fold(lemma))
    }

    pub fn verb_frame(&self, word: &str) -> Option<&VerbFrame> {
        self.verb_frames.get(&fold(word))
    }

    /// Ranked PENN tags of a word, if the lexicon knows it.
    pub fn penn_tags(&self, word: &str) -> Option<&[PennTag]> {
        self.pos_lexicon.get(&fold(word)).map(Vec::as_slice)
    }

    pub fn coarse(&self, penn: &PennTag) -> Pos {
        self.penn_map.get(penn.as_str()).copied().unwrap_or(Pos::X)
    }

    pub fn has_penn(&self, word: &str, tag: &str) -> bool {
        self.penn_tags(word)
            .is_some_and(|ts| ts.iter().any(|t| t.as_str() == tag))
    }

    pub(crate) fn is_known_noun(&self, word: &str) -> bool {
        self.has_penn(word, "NN")
    }

    /// Preposition for a verb given the object's tag.
    ///
    /// Lookup order: (verb, tag), (verb, *), (*, tag), then `of`.
    pub fn preposition(&self, verb: &str, object: NeTag) -> String {
        self.preposition_explicit(verb, object)
            .or_else(|| self.prepositions.get(&("*".to_string(), object.as_str().to_string())).cloned())
            .unwrap_or_else(|| "of".to_string())
    }

    /// Only entries keyed on the verb itself; no wildcard-verb rows and no default.
    pub fn preposition_explicit(&self, verb: &str, object: NeTag) -> Option<String> {
        let v = fold(verb);
        self.prepositions
            .get(&(v.clone(), object.as_str().to_string()))
            .or_else(|| self.prepositions.get(&(v, "*".to_string())))
            .cloned()
    }

    /// Content tokens: case-folded, punctuation and stopwords removed, deduplicated
    /// in first-seen order.
    pub fn content_tokens(&self, s: &str) -> Vec<String> {
        let mut seen = HashSet::new();
        text::tokenize_folded(s)
            .into_iter()
            .filter(|t| !text::is_punct(t) && !self.stopwords.contains(t))
            .filter(|t| seen.insert(t.clone()))
            .collect()
    }
}


#[cfg(test)]
mod tests {
    use std::io::Write;

    use super::*;

    fn write(dir: &Path, name: &str, body: &str) {
        let mut f = fs::File::create(dir.join(name)).unwrap();
        f.write_all(body.as_bytes()).unwrap();
    }

    fn pronoun_file() -> String {
        let mut s = String::from("# g\tn\tr\tp\tpronoun\n");
        for k in PronounKey::all() {
            s.push_str(&format!("{}\t{}\n", k.to_fields().join("\t"), gender::default_pronoun(k)));
        }
        s
    }

    fn minimal(dir: &Path) {
        write(dir, "verbs.txt", "play\nbe\n");
        write(dir, "stopwords.txt", "the\nof\n");
        write(dir, "pos_lexicon.tsv", "play\tVB,NN\nthe\tDT\n");
        write(dir, "lemma_exceptions.tsv", "was\tVERB\tbe\n");
        write(dir, "pronouns.tsv", &pronoun_file());
    }

    #[test]
    fn loads_required_files_and_reports_sizes() {
        let dir = tempfile::tempdir().unwrap();
        minimal(dir.path());
        let b = load_resources(dir.path()).unwrap();
        let sizes: HashMap<_, _> = b.report().iter().map(|r| (r.file.as_str(), r.entries)).collect();
        assert_eq!(sizes["verbs.txt"], 2);
        assert_eq!(sizes["pronouns.tsv"], 48);
        assert_eq!(sizes["lemma_exceptions.tsv"], 1);
        assert!(b.is_verb("PLAY"));
    }

    #[test]
    fn missing_optional_gazetteer_is_empty_with_status() {
        let dir = tempfile::tempdir().unwrap();
        minimal(dir.path());
        let b = load_resources(dir.path()).unwrap();
        let gz = b.report().iter().find(|r| r.file == "gazetteer.tsv").unwrap();
        assert_eq!(gz.status, LoadStatus::Missing);
        assert_eq!(b.gazetteer_lookup("Albert Einstein"), None);
        let pu = b.report().iter().find(|r| r.file == "penn_universal.tsv").unwrap();
        assert_eq!(pu.status, LoadStatus::Builtin);
    }

    #[test]
    fn missing_required_file_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        minimal(dir.path());
        fs::remove_file(dir.path().join("stopwords.txt")).unwrap();
        let err = load_resources(dir.path()).unwrap_err();
        assert!(matches!(err, ResourceError::MissingRequired(p) if p.ends_with("stopwords.txt")));
    }

    #[test]
    fn ragged_embedding_row_reports_its_line() {
        let dir = tempfile::tempdir().unwrap();
        minimal(dir.path());
        let row300 = vec!["0.1"; 300].join(" ");
        let row299 = vec!["0.1"; 299].join(" ");
        write(dir.path(), "embeddings.txt", &format!("play {row300}\ngame {row299}\n"));
        match load_resources(dir.path()).unwrap_err() {
            ResourceError::MalformedResource { file, line, .. } => {
                assert!(file.ends_with("embeddings.txt"));
                assert_eq!(line, 2);
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn malformed_tsv_line_is_located() {
        let dir = tempfile::tempdir().unwrap();
        minimal(dir.path());
        write(dir.path(), "gazetteer.tsv", "# c\nUlm\tGPE\nBerlin\n");
        match load_resources(dir.path()).unwrap_err() {
            ResourceError::MalformedResource { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn incomplete_pronoun_table_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        minimal(dir.path());
        let body: String = pronoun_file().lines().take(40).map(|l| format!("{l}\n")).collect();
        write(dir.path(), "pronouns.tsv", &body);
        assert!(matches!(
            load_resources(dir.path()),
            Err(ResourceError::MalformedResource { .. })
        ));
    }

    #[test]
    fn preposition_lookup_falls_back_in_order() {
        let b = testing::tiny();
        assert_eq!(b.preposition("bear", NeTag::Gpe), "in");
        assert_eq!(b.preposition("play", NeTag::Date), "in");
        assert_eq!(b.preposition("play", NeTag::Person), "of");
        assert_eq!(b.preposition_explicit("play", NeTag::Date), None);
    }
}
