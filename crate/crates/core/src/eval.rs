//! Multi-reference metrics and the benchmark runner.
//!
//! BLEU-4 uses +1 smoothing on orders 2 to 4 and the closest reference length
//! for the brevity penalty. ROUGE-L is the LCS F-measure with beta 1.2.
//! METEOR-lite aligns exact, lemma and gloss matches greedily.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::canonical::{ingest_table, table_to_triples, Table, TableFormat};
use crate::lm::NGramModel;
use crate::pipeline::{generate, PipelineOptions};
use crate::realize::RealizerId;
use crate::resources::ResourceBundle;
use crate::tags::Pos;
use crate::text;

pub const ROUGE_BETA: f64 = 1.2;
const BLEU_N: usize = 4;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("no references given")]
    EmptyReferences,
    #[error("benchmark directory {0} has no instances")]
    EmptyBenchmark(PathBuf),
    #[error("cannot read {path}: {reason}")]
    Io { path: PathBuf, reason: String },
}

fn toks(s: &str) -> Vec<String> {
    text::tokenize_folded(s)
}

fn ngram_counts(t: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut m = HashMap::new();
    if t.len() >= n {
        for g in t.windows(n) {
            *m.entry(g).or_default() += 1;
        }
    }
    m
}

/// Sufficient statistics for BLEU; corpus scores come from summing these.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct BleuStats {
    pub matches: [usize; BLEU_N],
    pub totals: [usize; BLEU_N],
    pub cand_len: usize,
    pub ref_len: usize,
}

impl BleuStats {
    pub fn merge(mut self, o: &BleuStats) -> BleuStats {
        for n in 0..BLEU_N {
            self.matches[n] += o.matches[n];
            self.totals[n] += o.totals[n];
        }
        self.cand_len += o.cand_len;
        self.ref_len += o.ref_len;
        self
    }

    pub fn score(&self) -> f64 {
        if self.cand_len == 0 || self.matches[0] == 0 {
            return 0.0;
        }
        let mut log_sum = (self.matches[0] as f64 / self.totals[0] as f64).ln();
        for n in 1..BLEU_N {
            log_sum += ((self.matches[n] + 1) as f64 / (self.totals[n] + 1) as f64).ln();
        }
        let c = self.cand_len as f64;
        let r = self.ref_len as f64;
        let bp = if c > r { 1.0 } else { (1.0 - r / c).exp() };
        (bp * (log_sum / BLEU_N as f64).exp()).clamp(0.0, 1.0)
    }
}

pub fn bleu_stats<S: AsRef<str>>(candidate: &str, references: &[S]) -> Result<BleuStats, EvalError> {
    if references.is_empty() {
        return Err(EvalError::EmptyReferences);
    }
    let c = toks(candidate);
    let refs: Vec<Vec<String>> = references.iter().map(|r| toks(r.as_ref())).collect();
    let mut st = BleuStats { cand_len: c.len(), ..Default::default() };
    // closest reference length, shorter on ties
    st.ref_len = refs
        .iter()
        .map(Vec::len)
        .min_by_key(|&l| (l.abs_diff(c.len()), l))
        .unwrap_or(0);
    for n in 1..=BLEU_N {
        let cc = ngram_counts(&c, n);
        let mut max_ref: HashMap<&[String], usize> = HashMap::new();
        for r in &refs {
            for (g, k) in ngram_counts(r, n) {
                let e = max_ref.entry(g).or_default();
                *e = (*e).max(k);
            }
        }
        st.matches[n - 1] = cc.iter().map(|(g, k)| (*k).min(max_ref.get(g).copied().unwrap_or(0))).sum();
        st.totals[n - 1] = c.len().saturating_sub(n - 1);
    }
    Ok(st)
}

pub fn bleu4<S: AsRef<str>>(candidate: &str, references: &[S]) -> Result<f64, EvalError> {
    Ok(bleu_stats(candidate, references)?.score())
}

fn lcs(a: &[String], b: &[String]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y { prev[j] + 1 } else { cur[j].max(prev[j + 1]) };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

fn f_beta(p: f64, r: f64, beta: f64) -> f64 {
    if p == 0.0 || r == 0.0 {
        return 0.0;
    }
    let b2 = beta * beta;
    (1.0 + b2) * p * r / (r + b2 * p)
}

pub fn rouge_l<S: AsRef<str>>(candidate: &str, references: &[S]) -> Result<f64, EvalError> {
    if references.is_empty() {
        return Err(EvalError::EmptyReferences);
    }
    let c = toks(candidate);
    Ok(references
        .iter()
        .map(|r| {
            let r = toks(r.as_ref());
            if c.is_empty() || r.is_empty() {
                return 0.0;
            }
            let l = lcs(&c, &r) as f64;
            f_beta(l / c.len() as f64, l / r.len() as f64, ROUGE_BETA)
        })
        .fold(0.0, f64::max))
}

fn lemma_of(w: &str, bundle: &ResourceBundle) -> String {
    let v = bundle.lemmatize(w, Pos::Verb);
    if v != w { v } else { bundle.lemmatize(w, Pos::Noun) }
}

fn gloss_related(a: &str, b: &str, bundle: &ResourceBundle) -> bool {
    let has = |x: &str, y: &str| bundle.gloss_tokens.get(x).is_some_and(|g| g.iter().any(|t| t == y));
    has(a, b) || has(b, a)
}

/// Greedy three-stage alignment; returns aligned (candidate, reference) index pairs.
fn align(c: &[String], r: &[String], bundle: &ResourceBundle) -> Vec<(usize, usize)> {
    let cl: Vec<String> = c.iter().map(|w| lemma_of(w, bundle)).collect();
    let rl: Vec<String> = r.iter().map(|w| lemma_of(w, bundle)).collect();
    let mut used_c = vec![false; c.len()];
    let mut used_r = vec![false; r.len()];
    let mut pairs = Vec::new();
    let stages: [&dyn Fn(usize, usize) -> bool; 3] = [
        &|i, j| c[i] == r[j],
        &|i, j| cl[i] == rl[j],
        &|i, j| !text::is_punct(&c[i]) && !bundle.is_stopword(&c[i]) && gloss_related(&cl[i], &rl[j], bundle),
    ];
    for m in stages {
        for (i, done) in used_c.iter_mut().enumerate() {
            if *done {
                continue;
            }
            if let Some(j) = (0..r.len()).find(|&j| !used_r[j] && m(i, j)) {
                *done = true;
                used_r[j] = true;
                pairs.push((i, j));
            }
        }
    }
    pairs.sort();
    pairs
}

fn meteor_one(c: &[String], r: &[String], bundle: &ResourceBundle) -> f64 {
    if c.is_empty() || r.is_empty() {
        return 0.0;
    }
    let pairs = align(c, r, bundle);
    let m = pairs.len();
    if m == 0 {
        return 0.0;
    }
    let p = m as f64 / c.len() as f64;
    let rec = m as f64 / r.len() as f64;
    let fmean = 10.0 * p * rec / (rec + 9.0 * p);
    let chunks = 1 + pairs.windows(2).filter(|w| !(w[1].0 == w[0].0 + 1 && w[1].1 == w[0].1 + 1)).count();
    let penalty = 0.5 * (chunks as f64 / m as f64).powi(3);
    fmean * (1.0 - penalty)
}

pub fn meteor_lite<S: AsRef<str>>(candidate: &str, references: &[S], bundle: &ResourceBundle) -> Result<f64, EvalError> {
    if references.is_empty() {
        return Err(EvalError::EmptyReferences);
    }
    let c = toks(candidate);
    Ok(references
        .iter()
        .map(|r| meteor_one(&c, &toks(r.as_ref()), bundle))
        .fold(0.0, f64::max))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchmarkInstance {
    pub id: String,
    pub table: Table,
    pub references: Vec<String>,
}

/// An instance id with the instance or the reason it failed to load.
pub type LoadedInstance = (String, Result<BenchmarkInstance, String>);

/// Reads `<dir>/<id>/table.csv` and `ref*.txt` for every instance directory.
/// Instances that fail to load are returned as errors alongside the good ones.
pub fn load_benchmark(dir: &Path) -> Result<Vec<LoadedInstance>, EvalError> {
    let io = |p: &Path, e: std::io::Error| EvalError::Io { path: p.to_path_buf(), reason: e.to_string() };
    let mut ids: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    ids.sort();
    if ids.is_empty() {
        return Err(EvalError::EmptyBenchmark(dir.to_path_buf()));
    }
    Ok(ids
        .into_iter()
        .map(|p| {
            let id = p.file_name().unwrap_or_default().to_string_lossy().into_owned();
            (id.clone(), load_instance(&p, id))
        })
        .collect())
}

fn load_instance(p: &Path, id: String) -> Result<BenchmarkInstance, String> {
    let raw = fs::read_to_string(p.join("table.csv")).map_err(|e| format!("table.csv: {e}"))?;
    let table = ingest_table(&raw, TableFormat::Csv, 0, false).map_err(|e| e.to_string())?;
    let mut refs: Vec<PathBuf> = fs::read_dir(p)
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|f| {
            let n = f.file_name().unwrap_or_default().to_string_lossy();
            n.starts_with("ref") && n.ends_with(".txt")
        })
        .collect();
    refs.sort();
    let references: Vec<String> = refs
        .iter()
        .map(|f| fs::read_to_string(f).map(|s| s.trim().to_string()))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    if references.is_empty() {
        return Err("no reference files".into());
    }
    Ok(BenchmarkInstance { id, table, references })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variant {
    pub name: String,
    pub options: PipelineOptions,
}

impl Variant {
    pub fn new(options: PipelineOptions) -> Self {
        let sign = |b| if b { '+' } else { '-' };
        let mut name = format!("{}CP{}CR", sign(options.compounding), sign(options.coref));
        if options.realizers.len() != RealizerId::ALL.len() {
            let rs: Vec<&str> = options.realizers.iter().map(|r| r.as_str()).collect();
            name = format!("{name}[{}]", rs.join(","));
        }
        Variant { name, options }
    }

    /// The four compounding/pronoun combinations over the given realizers.
    pub fn ablation_grid(realizers: &[RealizerId]) -> Vec<Variant> {
        [(true, true), (true, false), (false, true), (false, false)]
            .into_iter()
            .map(|(compounding, coref)| Variant::new(PipelineOptions { compounding, coref, realizers: realizers.to_vec() }))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InstanceScore {
    pub id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    pub bleu4: f64,
    pub rouge_l: f64,
    pub meteor_lite: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VariantReport {
    pub variant: String,
    pub compounding: bool,
    pub coref: bool,
    pub realizers: Vec<RealizerId>,
    /// Pooled over all instances.
    pub bleu4: f64,
    pub rouge_l: f64,
    pub meteor_lite: f64,
    /// How often each realizer produced the winning sentence.
    pub realizer_wins: BTreeMap<RealizerId, usize>,
    pub instances: Vec<InstanceScore>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricReport {
    pub variants: Vec<VariantReport>,
}

impl MetricReport {
    pub fn errors(&self) -> usize {
        self.variants.iter().flat_map(|v| &v.instances).filter(|i| i.error.is_some()).count()
    }

    pub fn variant(&self, name: &str) -> Option<&VariantReport> {
        self.variants.iter().find(|v| v.variant == name)
    }

    /// Aligned text table, one row per variant.
    pub fn to_table(&self) -> String {
        let width = self.variants.iter().map(|v| v.variant.len()).max().unwrap_or(7).max(7);
        let mut out = format!(
            "{:<width$}  {:>7}  {:>7}  {:>7}  {:>6}  {:>10}  {:>7}\n",
            "variant", "BLEU-4", "ROUGE-L", "METEOR", "concat", "verb-frame", "copular"
        );
        for v in &self.variants {
            let w = |r| v.realizer_wins.get(&r).copied().unwrap_or(0);
            let _ = writeln!(
                out,
                "{:<width$}  {:>7.4}  {:>7.4}  {:>7.4}  {:>6}  {:>10}  {:>7}",
                v.variant,
                v.bleu4,
                v.rouge_l,
                v.meteor_lite,
                w(RealizerId::Concat),
                w(RealizerId::VerbFrame),
                w(RealizerId::Copular)
            );
        }
        out
    }

    /// One JSON object per variant, one per line.
    pub fn to_jsonl(&self) -> String {
        self.variants
            .iter()
            .map(|v| serde_json::to_string(v).expect("report serializes") + "\n")
            .collect()
    }
}

fn run_variant(
    instances: &[(String, Result<BenchmarkInstance, String>)],
    v: &Variant,
    lm: &NGramModel,
    bundle: &ResourceBundle,
) -> VariantReport {
    let results: Vec<(InstanceScore, Option<BleuStats>, Vec<RealizerId>)> = instances
        .par_iter()
        .map(|(id, inst)| {
            let failed = |e: String| {
                let s = InstanceScore { id: id.clone(), output: None, bleu4: 0.0, rouge_l: 0.0, meteor_lite: 0.0, error: Some(e) };
                (s, None, Vec::new())
            };
            let inst = match inst {
                Ok(i) => i,
                Err(e) => return failed(e.clone()),
            };
            let (triples, d) = table_to_triples(&inst.table, bundle);
            let g = generate(&triples, &d, lm, bundle, &v.options);
            let out = g.text();
            let refs = &inst.references;
            let scored = (|| -> Result<_, EvalError> {
                Ok((bleu_stats(&out, refs)?, rouge_l(&out, refs)?, meteor_lite(&out, refs, bundle)?))
            })();
            match scored {
                Ok((st, rl, mt)) => {
                    let s = InstanceScore { id: id.clone(), output: Some(out), bleu4: st.score(), rouge_l: rl, meteor_lite: mt, error: None };
                    (s, Some(st), g.winners().map(|w| w.realizer).collect())
                }
                Err(e) => failed(e.to_string()),
            }
        })
        .collect();
    let pooled = results.iter().filter_map(|r| r.1).fold(BleuStats::default(), |a, b| a.merge(&b));
    let ok: Vec<&InstanceScore> = results.iter().filter(|r| r.1.is_some()).map(|r| &r.0).collect();
    let mean = |f: fn(&InstanceScore) -> f64| if ok.is_empty() { 0.0 } else { ok.iter().map(|i| f(i)).sum::<f64>() / ok.len() as f64 };
    let mut wins = BTreeMap::new();
    for r in RealizerId::ALL {
        wins.insert(r, 0);
    }
    for r in results.iter().flat_map(|r| &r.2) {
        *wins.entry(*r).or_default() += 1;
    }
    VariantReport {
        variant: v.name.clone(),
        compounding: v.options.compounding,
        coref: v.options.coref,
        realizers: v.options.realizers.clone(),
        bleu4: pooled.score(),
        rouge_l: mean(|i| i.rouge_l),
        meteor_lite: mean(|i| i.meteor_lite),
        realizer_wins: wins,
        instances: results.into_iter().map(|r| r.0).collect(),
    }
}

pub fn run_benchmark(
    dir: &Path,
    variants: &[Variant],
    lm: &NGramModel,
    bundle: &ResourceBundle,
) -> Result<MetricReport, EvalError> {
    let instances = load_benchmark(dir)?;
    Ok(MetricReport { variants: variants.iter().map(|v| run_variant(&instances, v, lm, bundle)).collect() })
}

/// Distinct tokens of a text; exposed for report tooling.
pub fn vocabulary(s: &str) -> HashSet<String> {
    toks(s).into_iter().collect()
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::resources::testing::tiny;

    #[test]
    fn bleu_pinned_cases() {
        assert_eq!(bleu4("the cat sat", &["the cat sat"]).unwrap(), 1.0);
        assert_eq!(bleu4("", &["the cat sat"]).unwrap(), 0.0);
        // all smoothed precisions are 1, brevity penalty exp(1 - 4/3)
        let got = bleu4("the cat sat", &["the cat sat down"]).unwrap();
        assert!((got - (-1.0f64 / 3.0).exp()).abs() < 1e-12);
        assert_eq!(bleu4("x", Vec::<String>::new().as_slice()), Err(EvalError::EmptyReferences));
    }

    #[test]
    fn rouge_pinned_cases() {
        assert_eq!(rouge_l("a b c", &["a b c"]).unwrap(), 1.0);
        assert_eq!(rouge_l("a b c", &["x y z"]).unwrap(), 0.0);
        let (p, r) = (0.75, 0.6);
        let want = (1.0 + 1.44) * p * r / (r + 1.44 * p);
        assert!((rouge_l("a b c d", &["a x b c y"]).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn meteor_cases() {
        let b = tiny();
        let got = meteor_lite("a b c d", &["a b c d"], &b).unwrap();
        assert!((got - (1.0 - 0.5 / 64.0)).abs() < 1e-12);
        assert_eq!(meteor_lite("a b", &["x y"], &b).unwrap(), 0.0);
        // gloss overlap: `game` glosses mention `play`
        let m = meteor_lite("they game", &["they play"], &b).unwrap();
        assert!(m > meteor_lite("they zzz", &["they play"], &b).unwrap());
        assert!(bleu4("a game of chess today", &["a play of chess today"]).unwrap() < 1.0);
    }

    #[test]
    fn pooled_bleu_is_not_averaged() {
        let a = bleu_stats("the cat sat", &["the cat sat down"]).unwrap();
        let c = bleu_stats("a dog", &["a dog ran far away"]).unwrap();
        let pooled = a.merge(&c).score();
        let avg = (a.score() + c.score()) / 2.0;
        assert!((pooled - avg).abs() > 1e-6);
    }

    proptest! {
        #[test]
        fn metrics_are_bounded_and_reference_symmetric(
            cand in "[a-d]( [a-d]){0,6}",
            r1 in "[a-d]( [a-d]){0,6}",
            r2 in "[a-d]( [a-d]){0,6}",
        ) {
            let b = tiny();
            let fwd = [r1.clone(), r2.clone()];
            let rev = [r2.clone(), r1.clone()];
            let dup = [r1.clone(), r2.clone(), r1.clone()];
            for f in [
                |c: &str, r: &[String], _b: &ResourceBundle| bleu4(c, r).unwrap(),
                |c: &str, r: &[String], _b: &ResourceBundle| rouge_l(c, r).unwrap(),
                |c: &str, r: &[String], b: &ResourceBundle| meteor_lite(c, r, b).unwrap(),
            ] {
                let s = f(&cand, &fwd, &b);
                prop_assert!((0.0..=1.0).contains(&s));
                prop_assert_eq!(s, f(&cand, &rev, &b));
                prop_assert_eq!(s, f(&cand, &dup, &b));
                prop_assert_eq!(s, f(&format!("{cand}  \n"), &fwd, &b));
            }
        }
    }
}
