//! Backoff n-gram language model: interpolated Witten-Bell training, ARPA
//! serialization and length-normalized sentence scoring.
//!
//! Log-probabilities and backoff weights are rounded to six decimals while
//! training, so a model written to ARPA and read back is identical. Backoff
//! weights are recomputed from the rounded probabilities (and the largest
//! residual is absorbed by one small entry) so every conditional distribution
//! still sums to one.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use crate::text;

pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";
pub const UNK: &str = "<unk>";
/// Log10 probability reported for words the model cannot represent.
pub const FLOOR: f64 = -99.0;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LmError {
    #[error("corpus contains no sentences")]
    EmptyCorpus,
    #[error("order must be at least 1")]
    BadOrder,
    #[error("ARPA line {line}: {reason}")]
    MalformedArpa { line: usize, reason: String },
}

#[derive(Clone, Debug)]
pub struct TrainOptions {
    /// Words seen at most this many times are mapped to `<unk>`.
    pub unk_threshold: u32,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions { unk_threshold: 1 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Entry {
    logp: f64,
    bow: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NGramModel {
    order: usize,
    vocab: Vec<String>,
    ids: HashMap<String, u32>,
    /// `grams[k]` holds the (k+1)-grams.
    grams: Vec<HashMap<Box<[u32]>, Entry>>,
    unk: Option<u32>,
    bos: Option<u32>,
    eos: Option<u32>,
}

fn q6(x: f64) -> f64 {
    let r = (x * 1e6).round() / 1e6;
    if r == 0.0 { 0.0 } else { r }
}

fn qlog(p: f64) -> f64 {
    if p <= 0.0 { FLOOR } else { q6(p.log10()).min(0.0) }
}

/// Rounds a distribution's log-probs and backoff weight so that
/// `Σ seen + 10^bow · rest` stays within rounding noise of one.
/// `seen` holds (id, exact p, lower-order p); returns rounded logs and bow.
fn quantize_context(seen: &[(u32, f64, f64)]) -> (Vec<f64>, f64) {
    let mut logs: Vec<f64> = seen.iter().map(|&(_, p, _)| qlog(p)).collect();
    let rest = 1.0 - seen.iter().map(|&(_, _, lo)| lo).sum::<f64>();
    let mass = |logs: &[f64]| logs.iter().map(|l| 10f64.powf(*l)).sum::<f64>();
    let mut bow = 0.0;
    if rest > 1e-9 {
        let left = (1.0 - mass(&logs)).max(1e-12);
        bow = q6((left / rest).log10());
    }
    let total = |logs: &[f64], bow: f64| {
        mass(logs) + if rest > 1e-9 { 10f64.powf(bow) * rest } else { 0.0 }
    };
    let err = total(&logs, bow) - 1.0;
    if err.abs() > 1e-9 {
        // nudge the smallest entry that can absorb the residual with a small relative change
        let mut order: Vec<usize> = (0..seen.len()).collect();
        order.sort_by(|&a, &b| logs[a].total_cmp(&logs[b]).then(seen[a].0.cmp(&seen[b].0)));
        for i in order {
            let p = 10f64.powf(logs[i]);
            if p > 20.0 * err.abs() {
                let cand = qlog(p - err);
                let mut trial = logs.clone();
                trial[i] = cand;
                if (total(&trial, bow) - 1.0).abs() < err.abs() {
                    logs = trial;
                }
                break;
            }
        }
    }
    (logs, bow)
}

impl NGramModel {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab.len()
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    /// Number of stored n-grams per order.
    pub fn counts(&self) -> Vec<usize> {
        self.grams.iter().map(HashMap::len).collect()
    }

    fn id(&self, w: &str) -> Option<u32> {
        self.ids.get(w).copied().or(self.unk)
    }

    /// log10 p(w | ctx), backing off through shorter contexts.
    fn logprob_ids(&self, ctx: &[u32], w: u32) -> f64 {
        let ctx = &ctx[ctx.len().saturating_sub(self.order - 1)..];
        let mut bow_sum = 0.0;
        let mut key: Vec<u32> = Vec::with_capacity(ctx.len() + 1);
        for start in 0..=ctx.len() {
            let h = &ctx[start..];
            key.clear();
            key.extend_from_slice(h);
            key.push(w);
            if let Some(e) = self.grams[h.len()].get(key.as_slice()) {
                return bow_sum + e.logp;
            }
            if !h.is_empty() {
                if let Some(e) = self.grams[h.len() - 1].get(h) {
                    bow_sum += e.bow;
                }
            }
        }
        FLOOR
    }

    /// log10 p(word | context words). Unknown words map to `<unk>` or the floor.
    pub fn logprob(&self, context: &[&str], word: &str) -> f64 {
        let ctx: Option<Vec<u32>> = context.iter().map(|c| self.id(c)).collect();
        match (ctx, self.id(word)) {
            (Some(ctx), Some(w)) => self.logprob_ids(&ctx, w),
            (None, Some(w)) => self.logprob_ids(&[], w),
            _ => FLOOR,
        }
    }

    fn sentence_ids(&self, tokens: &[String]) -> Vec<Option<u32>> {
        let mut ids = vec![self.bos];
        ids.extend(tokens.iter().map(|t| self.id(t)));
        ids.push(self.eos);
        ids
    }

    /// Sum of log10 probabilities and the number of predicted tokens (`</s>` included).
    pub fn sentence_logprob(&self, tokens: &[String]) -> (f64, usize) {
        let ids = self.sentence_ids(tokens);
        let mut total = 0.0;
        for i in 1..ids.len() {
            let lo = i.saturating_sub(self.order - 1);
            // an unrepresentable token breaks the history
            let ctx_start = (lo..i).rev().find(|&j| ids[j].is_none()).map_or(lo, |j| j + 1);
            let ctx: Vec<u32> = ids[ctx_start..i].iter().map(|x| x.unwrap()).collect();
            total += match ids[i] {
                Some(w) => self.logprob_ids(&ctx, w),
                None => FLOOR,
            };
        }
        (total, ids.len() - 1)
    }

    /// Mean per-token log10 probability of a raw sentence.
    pub fn score_sentence(&self, sentence: &str) -> f64 {
        self.score_tokens(&text::tokenize_folded(sentence))
    }

    pub fn score_tokens(&self, tokens: &[String]) -> f64 {
        let (sum, n) = self.sentence_logprob(tokens);
        sum / n as f64
    }

    /// Fluency in (0, 1]: `10^(mean log10 p)`.
    pub fn fluency(&self, sentence: &str) -> f64 {
        10f64.powf(self.score_sentence(sentence))
    }

    /// Words a conditional distribution ranges over: the vocabulary minus `<s>`.
    pub fn predictable(&self) -> impl Iterator<Item = &str> {
        self.vocab.iter().map(String::as_str).filter(|w| *w != BOS)
    }

    /// Contexts (as words) that carry a backoff weight, plus the empty context.
    pub fn contexts(&self) -> Vec<Vec<String>> {
        let mut out = vec![Vec::new()];
        for table in &self.grams[..self.order - 1] {
            let mut keys: Vec<Vec<String>> = table
                .keys()
                .filter(|k| Some(k[k.len() - 1]) != self.eos)
                .map(|k| k.iter().map(|&i| self.vocab[i as usize].clone()).collect())
                .collect();
            keys.sort();
            out.extend(keys);
        }
        out
    }
}

/// Trains an interpolated Witten-Bell model over case-folded, tokenized sentences.
pub fn train<I, S>(corpus: I, order: usize, opts: &TrainOptions) -> Result<NGramModel, LmError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    if order == 0 {
        return Err(LmError::BadOrder);
    }
    let sents: Vec<Vec<String>> = corpus
        .into_iter()
        .map(|s| text::tokenize_folded(s.as_ref()))
        .filter(|t| !t.is_empty())
        .collect();
    if sents.is_empty() {
        return Err(LmError::EmptyCorpus);
    }

    let mut freq: HashMap<&str, u32> = HashMap::new();
    for s in &sents {
        for t in s {
            *freq.entry(t.as_str()).or_default() += 1;
        }
    }
    let mut vocab: Vec<String> = freq
        .iter()
        .filter(|(w, c)| **c > opts.unk_threshold && ![BOS, EOS, UNK].contains(w))
        .map(|(w, _)| w.to_string())
        .collect();
    vocab.extend([BOS, EOS, UNK].map(String::from));
    vocab.sort();
    let ids: HashMap<String, u32> = vocab.iter().enumerate().map(|(i, w)| (w.clone(), i as u32)).collect();
    let (bos, eos, unk) = (ids[BOS], ids[EOS], ids[UNK]);

    let mut counts: Vec<HashMap<Box<[u32]>, u32>> = vec![HashMap::new(); order];
    for s in &sents {
        let mut seq = vec![bos];
        seq.extend(s.iter().map(|t| ids.get(t).copied().unwrap_or(unk)));
        seq.push(eos);
        for i in 1..seq.len() {
            for k in 1..=order.min(i + 1) {
                let g: Box<[u32]> = seq[i + 1 - k..=i].into();
                *counts[k - 1].entry(g).or_default() += 1;
            }
        }
    }

    let mut model = NGramModel {
        order,
        vocab,
        ids,
        grams: vec![HashMap::new(); order],
        unk: Some(unk),
        bos: Some(bos),
        eos: Some(eos),
    };

    // unigrams: interpolate with a uniform distribution over everything but <s>
    let uni = &counts[0];
    let total: u64 = uni.values().map(|&c| c as u64).sum();
    let types = uni.len() as f64;
    let v = (model.vocab.len() - 1) as f64;
    let mut seen: Vec<(u32, f64, f64)> = (0..model.vocab.len() as u32)
        .filter(|&w| w != bos)
        .map(|w| {
            let c = uni.get(&[w][..]).copied().unwrap_or(0) as f64;
            (w, (c + types / v) / (total as f64 + types), 1.0 / v)
        })
        .collect();
    seen.sort_by_key(|s| s.0);
    // every word is "seen" at this level, so no backoff mass remains
    let (logs, _) = quantize_context(&seen);
    for (&(w, _, _), lp) in seen.iter().zip(logs) {
        model.grams[0].insert(Box::new([w]), Entry { logp: lp, bow: 0.0 });
    }
    model.grams[0].insert(Box::new([bos]), Entry { logp: FLOOR, bow: 0.0 });

    for k in 2..=order {
        // group k-grams by context
        let mut by_ctx: HashMap<&[u32], Vec<(u32, u32)>> = HashMap::new();
        for (g, &c) in &counts[k - 1] {
            by_ctx.entry(&g[..k - 1]).or_default().push((g[k - 1], c));
        }
        let mut ctxs: Vec<&[u32]> = by_ctx.keys().copied().collect();
        ctxs.sort();
        let mut new_entries = Vec::new();
        let mut bows = Vec::new();
        for h in ctxs {
            let mut nexts = by_ctx.remove(h).unwrap();
            nexts.sort();
            let ch: f64 = nexts.iter().map(|&(_, c)| c as f64).sum();
            let th = nexts.len() as f64;
            let seen: Vec<(u32, f64, f64)> = nexts
                .iter()
                .map(|&(w, c)| {
                    let lower = 10f64.powf(model.logprob_ids(&h[1..], w));
                    (w, (c as f64 + th * lower) / (ch + th), lower)
                })
                .collect();
            let (logs, bow) = quantize_context(&seen);
            for (&(w, _, _), lp) in seen.iter().zip(logs) {
                let mut key = h.to_vec();
                key.push(w);
                new_entries.push((key.into_boxed_slice(), lp));
            }
            bows.push((h.to_vec(), bow));
        }
        for (h, bow) in bows {
            if let Some(e) = model.grams[k - 2].get_mut(h.as_slice()) {
                e.bow = bow;
            }
        }
        for (key, lp) in new_entries {
            model.grams[k - 1].insert(key, Entry { logp: lp, bow: 0.0 });
        }
    }
    Ok(model)
}

fn fmt6(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    if x == FLOOR { "-99".into() } else { format!("{x:.6}") }
}

/// Serializes to ARPA text. Entries are sorted by their word sequence.
pub fn write_arpa(m: &NGramModel) -> String {
    let mut out = String::from("\n\\data\\\n");
    for (k, table) in m.grams.iter().enumerate() {
        let _ = writeln!(out, "ngram {}={}", k + 1, table.len());
    }
    for (k, table) in m.grams.iter().enumerate() {
        let _ = write!(out, "\n\\{}-grams:\n", k + 1);
        let mut rows: BTreeMap<Vec<&str>, &Entry> = BTreeMap::new();
        for (g, e) in table {
            rows.insert(g.iter().map(|&i| m.vocab[i as usize].as_str()).collect(), e);
        }
        for (words, e) in rows {
            let _ = write!(out, "{}\t{}", fmt6(e.logp), words.join(" "));
            if k + 1 < m.order {
                let _ = write!(out, "\t{}", fmt6(e.bow));
            }
            out.push('\n');
        }
    }
    out.push_str("\n\\end\\\n");
    out
}

pub fn read_arpa(src: &str) -> Result<NGramModel, LmError> {
    let bad = |line: usize, reason: String| LmError::MalformedArpa { line, reason };
    let mut lines = src.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (n, l) = lines.find(|(_, l)| !l.is_empty()).ok_or_else(|| bad(0, "empty file".into()))?;
    if l != "\\data\\" {
        return Err(bad(n, format!("expected \\data\\, found `{l}`")));
    }
    let mut declared: Vec<usize> = Vec::new();
    let mut pending = None;
    for (n, l) in lines.by_ref() {
        if l.is_empty() {
            continue;
        }
        if let Some(rest) = l.strip_prefix("ngram ") {
            let (k, c) = rest.split_once('=').ok_or_else(|| bad(n, "bad ngram count line".into()))?;
            let k: usize = k.trim().parse().map_err(|_| bad(n, "bad order".into()))?;
            let c: usize = c.trim().parse().map_err(|_| bad(n, "bad count".into()))?;
            if k != declared.len() + 1 {
                return Err(bad(n, format!("ngram {k} out of sequence")));
            }
            declared.push(c);
        } else {
            pending = Some((n, l));
            break;
        }
    }
    if declared.is_empty() {
        return Err(bad(0, "no ngram counts declared".into()));
    }
    let order = declared.len();
    let mut vocab_ids: HashMap<String, u32> = HashMap::new();
    let mut vocab: Vec<String> = Vec::new();
    let mut grams: Vec<HashMap<Box<[u32]>, Entry>> = vec![HashMap::new(); order];
    let mut current: Option<(usize, usize)> = None; // (order, header line)
    let mut ended = false;

    let finish = |current: Option<(usize, usize)>, grams: &Vec<HashMap<Box<[u32]>, Entry>>, at: usize| {
        if let Some((k, _)) = current {
            if grams[k - 1].len() != declared[k - 1] {
                return Err(bad(
                    at,
                    format!("{k}-grams: header declares {} entries, found {}", declared[k - 1], grams[k - 1].len()),
                ));
            }
        }
        Ok(())
    };

    let rest = pending.into_iter().chain(lines);
    for (n, l) in rest {
        if l.is_empty() {
            continue;
        }
        if ended {
            return Err(bad(n, "content after \\end\\".into()));
        }
        if l == "\\end\\" {
            finish(current, &grams, n)?;
            ended = true;
            continue;
        }
        if let Some(h) = l.strip_prefix('\\').and_then(|s| s.strip_suffix("-grams:")) {
            finish(current, &grams, n)?;
            let k: usize = h.parse().map_err(|_| bad(n, format!("bad section header `{l}`")))?;
            let expected = current.map_or(1, |(p, _)| p + 1);
            if k != expected || k > order {
                return Err(bad(n, format!("unexpected section \\{k}-grams:")));
            }
            current = Some((k, n));
            continue;
        }
        let (k, _) = current.ok_or_else(|| bad(n, "entry outside a section".into()))?;
        let parts: Vec<&str> = l.split_whitespace().collect();
        if parts.len() != k + 1 && parts.len() != k + 2 {
            return Err(bad(n, format!("expected {} or {} fields", k + 1, k + 2)));
        }
        let logp: f64 = parts[0].parse().map_err(|_| bad(n, "bad log probability".into()))?;
        if logp > 0.0 {
            return Err(bad(n, "log probability above zero".into()));
        }
        let bow: f64 = match parts.get(k + 1) {
            Some(b) => b.parse().map_err(|_| bad(n, "bad backoff weight".into()))?,
            None => 0.0,
        };
        let mut key = Vec::with_capacity(k);
        for w in &parts[1..=k] {
            let id = match vocab_ids.get(*w) {
                Some(&id) => id,
                None => {
                    if k > 1 {
                        return Err(bad(n, format!("word `{w}` missing from unigrams")));
                    }
                    let id = vocab.len() as u32;
                    vocab.push(w.to_string());
                    vocab_ids.insert(w.to_string(), id);
                    id
                }
            };
            key.push(id);
        }
        if grams[k - 1].insert(key.into_boxed_slice(), Entry { logp, bow }).is_some() {
            return Err(bad(n, "duplicate entry".into()));
        }
    }
    if !ended {
        return Err(bad(src.lines().count(), "missing \\end\\".into()));
    }
    let get = |w: &str| vocab_ids.get(w).copied();
    Ok(NGramModel {
        order,
        unk: get(UNK),
        bos: get(BOS),
        eos: get(EOS),
        ids: vocab_ids,
        vocab,
        grams,
    })
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn exact() -> TrainOptions {
        TrainOptions { unk_threshold: 0 }
    }

    fn sum_over_vocab(m: &NGramModel, ctx: &[String]) -> f64 {
        let c: Vec<&str> = ctx.iter().map(String::as_str).collect();
        m.predictable().map(|w| 10f64.powf(m.logprob(&c, w))).sum()
    }

    #[test]
    fn symmetric_continuations_share_probability() {
        let m = train(["a b", "a c"], 3, &exact()).unwrap();
        assert_eq!(m.logprob(&["a"], "b"), m.logprob(&["a"], "c"));
    }

    #[test]
    fn witten_bell_by_hand() {
        // one sentence "a b": V = {</s>, <unk>, a, b} (|V| = 4 without <s>)
        // unigram counts a=1 b=1 </s>=1, N=3, T=3
        // p(a) = (1 + 3/4) / 6 = 0.291667, p(<unk>) = 0.75/6 = 0.125
        let m = train(["a b"], 2, &exact()).unwrap();
        let p = |c: &[&str], w| 10f64.powf(m.logprob(c, w));
        assert!((p(&[], "a") - 1.75 / 6.0).abs() < 1e-6);
        assert!((p(&[], "<unk>") - 0.125).abs() < 1e-6);
        // bigram after a: c(a)=1, T(a)=1; p(b|a) = (1 + p(b)) / 2
        assert!((p(&["a"], "b") - (1.0 + 1.75 / 6.0) / 2.0).abs() < 1e-6);
        // unseen after a backs off with alpha = 1/2 ... up to rounding compensation
        assert!((p(&["a"], "a") - 0.5 * 1.75 / 6.0).abs() < 1e-5);
        assert!(m.score_sentence("a b") > m.score_sentence("b a"));
    }

    #[test]
    fn distributions_normalize_exhaustively() {
        let corpus = [
            "the cat sat on the mat",
            "the dog sat on the log",
            "a cat saw a dog",
            "the mat was red",
            "a dog sat",
            "the cat ran",
        ];
        let m = train(corpus, 3, &exact()).unwrap();
        for ctx in m.contexts() {
            let s = sum_over_vocab(&m, &ctx);
            assert!((s - 1.0).abs() <= 1e-6, "context {ctx:?} sums to {s}");
        }
        let m = train(corpus, 3, &TrainOptions::default()).unwrap();
        for ctx in m.contexts() {
            let s = sum_over_vocab(&m, &ctx);
            assert!((s - 1.0).abs() <= 1e-6, "context {ctx:?} sums to {s}");
        }
    }

    #[test]
    fn probabilities_are_in_unit_interval() {
        let m = train(["x y z", "y z x", "z z z"], 3, &exact()).unwrap();
        for table in &m.grams {
            for (g, e) in table {
                if m.bos != Some(g[g.len() - 1]) {
                    assert!(e.logp <= 0.0 && e.logp > FLOOR);
                }
            }
        }
    }

    #[test]
    fn oov_gets_a_finite_score() {
        let m = train(["a b", "a b", "c"], 3, &TrainOptions::default()).unwrap();
        let s = m.score_sentence("qq zz");
        assert!(s.is_finite() && s > FLOOR);
        assert_eq!(m.score_sentence("a b"), m.score_sentence("a b"));
    }

    #[test]
    fn empty_corpus_and_bad_order() {
        assert_eq!(train(Vec::<String>::new(), 3, &exact()), Err(LmError::EmptyCorpus));
        assert_eq!(train(["a"], 0, &exact()), Err(LmError::BadOrder));
    }

    #[test]
    fn unigram_model_writes_only_unigrams() {
        let m = train(["a b", "b c"], 1, &exact()).unwrap();
        let arpa = write_arpa(&m);
        assert!(arpa.contains("ngram 1=") && !arpa.contains("ngram 2="));
        assert!(!arpa.contains("\\2-grams:"));
        assert_eq!(read_arpa(&arpa).unwrap(), m);
    }

    #[test]
    fn arpa_round_trip_is_exact_and_byte_stable() {
        let m = train(["the cat sat", "the dog sat", "a cat ran", "the cat ran"], 3, &exact()).unwrap();
        let text = write_arpa(&m);
        let back = read_arpa(&text).unwrap();
        assert_eq!(write_arpa(&back), text);
        for s in ["the cat sat", "a dog ran", "zebra", "sat the cat the"] {
            assert_eq!(back.score_sentence(s), m.score_sentence(s));
        }
    }

    #[test]
    fn malformed_arpa_is_located() {
        let m = train(["a b"], 2, &exact()).unwrap();
        let text = write_arpa(&m).replace("ngram 2=3", "ngram 2=5");
        assert!(text.contains("ngram 2=5"));
        assert!(matches!(read_arpa(&text), Err(LmError::MalformedArpa { .. })));
        let err = read_arpa("\\data\\\nngram 1=1\n\n\\1-grams:\n-0.5 a\nbogus\n\\end\\\n").unwrap_err();
        assert_eq!(err, LmError::MalformedArpa { line: 6, reason: "expected 2 or 3 fields".into() });
        assert!(read_arpa("hello").is_err());
    }

    #[test]
    fn hand_written_trigram_file() {
        let arpa = "\\data\\\nngram 1=4\nngram 2=2\nngram 3=1\n\n\\1-grams:\n-1.0\t<s>\t-0.3\n-0.5\ta\t-0.2\n-0.6\tb\t-0.1\n-0.7\t</s>\n\n\\2-grams:\n-0.2\t<s> a\t-0.15\n-0.3\ta b\t-0.05\n\n\\3-grams:\n-0.1\t<s> a b\n\n\\end\\\n";
        let m = read_arpa(arpa).unwrap();
        assert_eq!(m.order(), 3);
        assert!((m.logprob(&["<s>", "a"], "b") - -0.1).abs() < 1e-12);
        // a b -> </s>: no trigram, bow(a b) + p(</s>|b); no bigram b </s>, so bow(b) + p(</s>)
        assert!((m.logprob(&["a", "b"], "</s>") - (-0.05 + -0.1 + -0.7)).abs() < 1e-12);
        // no <unk>: unknown words hit the floor
        assert_eq!(m.logprob(&["a"], "zzz"), FLOOR);
    }

    proptest! {
        #[test]
        fn round_trip_on_random_sentences(words in proptest::collection::vec("[a-e]{1,2}( [a-e]{1,2}){0,5}", 1..12)) {
            let m = train(&words, 3, &TrainOptions::default()).unwrap();
            let back = read_arpa(&write_arpa(&m)).unwrap();
            for s in &words {
                prop_assert_eq!(back.score_sentence(s), m.score_sentence(s));
            }
        }
    }
}
