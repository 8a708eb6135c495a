//! End-to-end generation: canonical triples to a paragraph, with a stage trace.

use rayon::prelude::*;
use serde::Serialize;

use crate::canonical::{CanonicalTriple, EntityTypeMap};
use crate::discourse::{replace_coreferents, synthesize_paragraph, Branch, CorefReplacement, Paragraph};
use crate::lm::NGramModel;
use crate::rank::{rank, RankResult};
use crate::realize::{filter_candidates, realize_all, RealizerId, SentenceCandidate};
use crate::relation::{normalize_relation, ModifiedTriple};
use crate::resources::ResourceBundle;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipelineOptions {
    pub compounding: bool,
    pub coref: bool,
    pub realizers: Vec<RealizerId>,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions { compounding: true, coref: true, realizers: RealizerId::ALL.to_vec() }
    }
}

/// One record per stage event.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "stage", rename_all = "kebab-case")]
pub enum TraceRecord {
    Canonical { index: usize, triple: CanonicalTriple },
    Modified { index: usize, modified: ModifiedTriple },
    Candidates { index: usize, fell_back: bool, candidates: Vec<SentenceCandidate> },
    Winner { index: usize, realizer: RealizerId, sentence: String, fluency: f64, adequacy: f64, score: f64 },
    Failure { index: usize, error: String },
    Compound { sentence: usize, sources: Vec<usize>, branch: Branch, text: String },
    Coref { sentence: usize, replacement: CorefReplacement, text: String },
    Paragraph { text: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct TripleOutcome {
    pub modified: ModifiedTriple,
    pub fell_back: bool,
    pub ranked: Result<RankResult, String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Generation {
    /// Winning simple sentences in triple order (failed triples omitted).
    pub simple: Vec<String>,
    pub outcomes: Vec<TripleOutcome>,
    /// After compounding, before pronouns.
    pub compounded: Paragraph,
    pub paragraph: Paragraph,
    pub trace: Vec<TraceRecord>,
}

impl Generation {
    pub fn text(&self) -> String {
        self.paragraph.text()
    }

    pub fn winners(&self) -> impl Iterator<Item = &SentenceCandidate> {
        self.outcomes.iter().filter_map(|o| o.ranked.as_ref().ok().map(|r| &r.winner))
    }
}

/// Realizes and ranks one triple.
pub fn simple_sentence(
    t: &CanonicalTriple,
    lm: &NGramModel,
    bundle: &ResourceBundle,
    realizers: &[RealizerId],
) -> TripleOutcome {
    let modified = normalize_relation(t, bundle);
    let cands = realize_all(&modified, realizers, bundle);
    let filtered = filter_candidates(cands, &modified, bundle);
    let ranked = rank(filtered.kept, t, lm, bundle).map_err(|e| e.to_string());
    TripleOutcome { modified, fell_back: filtered.fell_back, ranked }
}

pub fn generate(
    triples: &[CanonicalTriple],
    d: &EntityTypeMap,
    lm: &NGramModel,
    bundle: &ResourceBundle,
    opts: &PipelineOptions,
) -> Generation {
    let outcomes: Vec<TripleOutcome> = triples
        .par_iter()
        .map(|t| simple_sentence(t, lm, bundle, &opts.realizers))
        .collect();

    let mut trace = Vec::new();
    let mut simple = Vec::new();
    for (i, (t, o)) in triples.iter().zip(&outcomes).enumerate() {
        trace.push(TraceRecord::Canonical { index: i, triple: t.clone() });
        trace.push(TraceRecord::Modified { index: i, modified: o.modified.clone() });
        match &o.ranked {
            Ok(r) => {
                trace.push(TraceRecord::Candidates { index: i, fell_back: o.fell_back, candidates: r.all.clone() });
                let w = &r.winner;
                trace.push(TraceRecord::Winner {
                    index: i,
                    realizer: w.realizer,
                    sentence: w.realized_text.clone(),
                    fluency: w.fluency,
                    adequacy: w.adequacy,
                    score: w.score,
                });
                simple.push(w.realized_text.clone());
            }
            Err(e) => trace.push(TraceRecord::Failure { index: i, error: e.clone() }),
        }
    }

    let compounded = if opts.compounding {
        synthesize_paragraph(&simple, d)
    } else {
        Paragraph::uncompounded(&simple)
    };
    for (k, tr) in compounded.trace.iter().enumerate() {
        if let Some(branch) = tr.branch {
            trace.push(TraceRecord::Compound {
                sentence: k,
                sources: tr.sources.clone(),
                branch,
                text: compounded.sentences[k].clone(),
            });
        }
    }
    let paragraph = if opts.coref { replace_coreferents(&compounded, d, bundle) } else { compounded.clone() };
    for (k, tr) in paragraph.trace.iter().enumerate() {
        if let Some(rep) = &tr.coref {
            trace.push(TraceRecord::Coref { sentence: k, replacement: rep.clone(), text: paragraph.sentences[k].clone() });
        }
    }
    trace.push(TraceRecord::Paragraph { text: paragraph.text() });
    Generation { simple, outcomes, compounded, paragraph, trace }
}

/// Trace as JSON lines.
pub fn trace_jsonl(trace: &[TraceRecord]) -> String {
    let mut out = String::new();
    for r in trace {
        out.push_str(&serde_json::to_string(r).expect("trace records serialize"));
        out.push('\n');
    }
    out
}
