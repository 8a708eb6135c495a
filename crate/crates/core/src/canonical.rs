//! Stage 1: tables, key-value records and graph triples become NE-tagged
//! canonical triples.

use std::sync::LazyLock;

use indexmap::IndexMap;
use regex::Regex;
use serde::Serialize;
use thiserror::Error;

use crate::resources::{fold, ResourceBundle};
use crate::tags::NeTag;

#[derive(Debug, Error)]
pub enum CanonError {
    #[error("table is empty")]
    EmptyTable,
    #[error("table needs at least two columns, found {0}")]
    TooFewColumns(usize),
    #[error("row {row} has {found} cells, expected {expected}")]
    RaggedTable { row: usize, found: usize, expected: usize },
    #[error("empty header in column {0}")]
    EmptyHeader(usize),
    #[error("empty cell at row {row}, column {col}")]
    EmptyCell { row: usize, col: usize },
    #[error("primary key column {col} out of range for {width} columns")]
    BadPrimaryKey { col: usize, width: usize },
    #[error("a record needs at least two key-value pairs, found {0}")]
    TooFewPairs(usize),
    #[error("line {line}: expected three non-empty tab-separated fields")]
    MalformedTriple { line: usize },
    #[error("cannot parse key-value record: {0}")]
    KvParse(String),
    #[error("cannot parse table: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    Csv,
    Tsv,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub primary_key_col: usize,
}

impl Table {
    /// Validates shape and cell contents.
    pub fn new(
        headers: Vec<String>,
        rows: Vec<Vec<String>>,
        primary_key_col: usize,
    ) -> Result<Self, CanonError> {
        let headers: Vec<String> = headers.into_iter().map(|h| h.trim().to_string()).collect();
        let n = headers.len();
        if n < 2 {
            return Err(CanonError::TooFewColumns(n));
        }
        if rows.is_empty() {
            return Err(CanonError::EmptyTable);
        }
        if let Some(i) = headers.iter().position(String::is_empty) {
            return Err(CanonError::EmptyHeader(i));
        }
        if primary_key_col >= n {
            return Err(CanonError::BadPrimaryKey { col: primary_key_col, width: n });
        }
        let mut clean = Vec::with_capacity(rows.len());
        for (r, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(CanonError::RaggedTable { row: r + 1, found: row.len(), expected: n });
            }
            let row: Vec<String> = row.into_iter().map(|c| c.trim().to_string()).collect();
            if let Some(c) = row.iter().position(String::is_empty) {
                return Err(CanonError::EmptyCell { row: r + 1, col: c });
            }
            clean.push(row);
        }
        Ok(Table { headers, rows: clean, primary_key_col })
    }

    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn n(&self) -> usize {
        self.headers.len()
    }
}

/// Parses CSV/TSV text whose first row (after optional transposition) holds the headers.
pub fn ingest_table(
    raw: &str,
    format: TableFormat,
    primary_key_col: usize,
    transpose: bool,
) -> Result<Table, CanonError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .delimiter(match format {
            TableFormat::Csv => b',',
            TableFormat::Tsv => b'\t',
        })
        .from_reader(raw.as_bytes());
    let mut grid: Vec<Vec<String>> = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        if rec.iter().all(|c| c.trim().is_empty()) {
            continue;
        }
        grid.push(rec.iter().map(str::to_string).collect());
    }
    if grid.is_empty() {
        return Err(CanonError::EmptyTable);
    }
    let width = grid[0].len();
    if let Some(r) = grid.iter().position(|row| row.len() != width) {
        return Err(CanonError::RaggedTable { row: r, found: grid[r].len(), expected: width });
    }
    if transpose {
        grid = (0..width)
            .map(|c| grid.iter().map(|row| row[c].clone()).collect())
            .collect();
    }
    let mut it = grid.into_iter();
    let headers = it.next().ok_or(CanonError::EmptyTable)?;
    Table::new(headers, it.collect(), primary_key_col)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TagSource {
    Pattern,
    Gazetteer,
    Unk,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EntityMention {
    pub surface: String,
    pub tag: NeTag,
    pub tag_source: TagSource,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum TripleSource {
    Table { row: usize, col: usize },
    Kv { index: usize },
    Graph { line: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CanonicalTriple {
    pub e1: EntityMention,
    /// Case-folded relation phrase.
    pub relation: String,
    pub e2: EntityMention,
    pub source: TripleSource,
}

impl CanonicalTriple {
    /// `<TAG1> relation <TAG2>`, the placeholder view.
    pub fn tagged(&self) -> String {
        format!("{} {} {}", self.e1.tag, self.relation, self.e2.tag)
    }
}

/// Surface → tag for every mention of one input instance. First tagging wins.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct EntityTypeMap {
    entries: IndexMap<String, (String, NeTag)>,
}

impl EntityTypeMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records a mention, returning the tag in force for its surface.
    pub fn insert(&mut self, m: &EntityMention) -> NeTag {
        self.entries
            .entry(fold(&m.surface))
            .or_insert_with(|| (m.surface.clone(), m.tag))
            .1
    }

    pub fn tag_of(&self, surface: &str) -> Option<NeTag> {
        self.entries.get(&fold(surface)).map(|(_, t)| *t)
    }

    pub fn contains(&self, surface: &str) -> bool {
        self.entries.contains_key(&fold(surface))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// (original surface, tag) pairs in insertion order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, NeTag)> {
        self.entries.values().map(|(s, t)| (s.as_str(), *t))
    }
}

fn normalize_relation_text(r: &str) -> String {
    fold(&r.replace('_', " "))
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

fn triple(
    e1: &str,
    rel: &str,
    e2: &str,
    source: TripleSource,
    bundle: &ResourceBundle,
    d: &mut EntityTypeMap,
) -> CanonicalTriple {
    let mut m1 = tag_entity(e1, bundle);
    let mut m2 = tag_entity(e2, bundle);
    m1.tag = d.insert(&m1);
    m2.tag = d.insert(&m2);
    CanonicalTriple { e1: m1, relation: normalize_relation_text(rel), e2: m2, source }
}

/// One triple per non-key cell, rows in order, columns left to right.
pub fn table_to_triples(t: &Table, bundle: &ResourceBundle) -> (Vec<CanonicalTriple>, EntityTypeMap) {
    let mut d = EntityTypeMap::new();
    let mut out = Vec::with_capacity(t.m() * (t.n() - 1));
    let pk = t.primary_key_col;
    for (r, row) in t.rows.iter().enumerate() {
        for (c, cell) in row.iter().enumerate() {
            if c == pk {
                continue;
            }
            let src = TripleSource::Table { row: r, col: c };
            out.push(triple(&row[pk], &t.headers[c], cell, src, bundle, &mut d));
        }
    }
    (out, d)
}

/// Parses a flat JSON object, keeping key order. Non-string scalars are stringified.
pub fn parse_kv(raw: &str) -> Result<Vec<(String, String)>, CanonError> {
    let v: serde_json::Value = serde_json::from_str(raw).map_err(|e| CanonError::KvParse(e.to_string()))?;
    let obj = v
        .as_object()
        .ok_or_else(|| CanonError::KvParse("expected a JSON object".into()))?;
    obj.iter()
        .map(|(k, v)| {
            let s = match v {
                serde_json::Value::String(s) => s.clone(),
                serde_json::Value::Number(n) => n.to_string(),
                serde_json::Value::Bool(b) => b.to_string(),
                other => return Err(CanonError::KvParse(format!("value of `{k}` is not a scalar: {other}"))),
            };
            Ok((k.clone(), s))
        })
        .collect()
}

/// `⟨value1, key_i, value_i⟩` for every pair after the first.
pub fn kv_to_triples(
    pairs: &[(String, String)],
    bundle: &ResourceBundle,
) -> Result<(Vec<CanonicalTriple>, EntityTypeMap), CanonError> {
    if pairs.len() < 2 {
        return Err(CanonError::TooFewPairs(pairs.len()));
    }
    let mut d = EntityTypeMap::new();
    let head = pairs[0].1.trim();
    let out = pairs[1..]
        .iter()
        .enumerate()
        .filter(|(_, (_, v))| !v.trim().is_empty())
        .map(|(i, (k, v))| triple(head, k, v.trim(), TripleSource::Kv { index: i + 1 }, bundle, &mut d))
        .collect();
    Ok((out, d))
}

/// Tab-separated `e1 rel e2` records, one per line. Blank and `#` lines are skipped.
pub fn graph_to_triples(
    raw: &str,
    bundle: &ResourceBundle,
) -> Result<(Vec<CanonicalTriple>, EntityTypeMap), CanonError> {
    let mut d = EntityTypeMap::new();
    let mut out = Vec::new();
    for (i, line) in raw.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split('\t').map(str::trim).collect();
        if f.len() != 3 || f.iter().any(|x| x.is_empty()) {
            return Err(CanonError::MalformedTriple { line: i + 1 });
        }
        out.push(triple(f[0], f[1], f[2], TripleSource::Graph { line: i + 1 }, bundle, &mut d));
    }
    Ok((out, d))
}

const MONTHS: &str = "january|february|march|april|may|june|july|august|september|october|november|december|jan|feb|mar|apr|jun|jul|aug|sep|sept|oct|nov|dec";
const UNITS: &str = "km|kilometres|kilometers|m|metres|meters|cm|mm|kg|g|tonnes|tons|lb|lbs|miles|mi|ft|feet|hectares|ha|acres|litres|liters|l|seats|points";

static PATTERNS: LazyLock<Vec<(NeTag, Regex)>> = LazyLock::new(|| {
    let p = |t, re: &str| (t, Regex::new(&format!("(?i)^(?:{re})$")).unwrap());
    let num = r"\d{1,3}(?:,\d{3})+(?:\.\d+)?|\d+(?:\.\d+)?";
    vec![
        p(NeTag::Money, &format!(r"[$€£¥]\s?(?:{num})(?:\s?(?:million|billion|thousand|m|bn|k))?|(?:{num})\s?(?:million\s|billion\s)?(?:dollars|euros|pounds|usd|eur|gbp|yen)")),
        p(NeTag::Percent, &format!(r"(?:{num})\s?(?:%|percent|per cent)")),
        p(NeTag::Time, r"\d{1,2}:\d{2}(?::\d{2})?(?:\s?[ap]\.?m\.?)?|\d{1,2}\s?[ap]\.?m\.?"),
        p(NeTag::Date, &format!(
            r"\d{{1,2}}(?:st|nd|rd|th)?\s+(?:{MONTHS})\.?,?\s+\d{{1,4}}|(?:{MONTHS})\.?\s+\d{{1,2}}(?:st|nd|rd|th)?,?\s+\d{{1,4}}|(?:{MONTHS})\s+[12]\d{{3}}|[12]\d{{3}}|[12]\d{{3}}-\d{{2}}-\d{{2}}"
        )),
        p(NeTag::Ordinal, r"\d+(?:st|nd|rd|th)|first|second|third|fourth|fifth|sixth|seventh|eighth|ninth|tenth|eleventh|twelfth"),
        p(NeTag::Quantity, &format!(r"(?:{num})\s?(?:{UNITS})")),
        p(NeTag::Cardinal, &format!(r"[+-]?(?:{num})|zero|one|two|three|four|five|six|seven|eight|nine|ten|eleven|twelve|hundred|thousand|million")),
    ]
});

/// Pattern rules, then exact case-folded gazetteer lookup, then UNK.
pub fn tag_entity(surface: &str, bundle: &ResourceBundle) -> EntityMention {
    let s = surface.trim();
    let mention = |tag, tag_source| EntityMention { surface: s.to_string(), tag, tag_source };
    if let Some((tag, _)) = PATTERNS.iter().find(|(_, re)| re.is_match(s)) {
        return mention(*tag, TagSource::Pattern);
    }
    match bundle.gazetteer_lookup(s) {
        Some(tag) => mention(tag, TagSource::Gazetteer),
        None => mention(NeTag::Unk, TagSource::Unk),
    }
}

/// Pattern-only classification, for callers without a gazetteer.
pub fn pattern_tag(surface: &str) -> Option<NeTag> {
    PATTERNS.iter().find(|(_, re)| re.is_match(surface.trim())).map(|(t, _)| *t)
}
