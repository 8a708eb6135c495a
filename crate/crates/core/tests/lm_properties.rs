use std::path::Path;

use paragen::lm::{self, TrainOptions};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn corpus() -> Vec<String> {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/corpus/lm_corpus.txt");
    std::fs::read_to_string(p).unwrap().lines().map(str::to_string).collect()
}

fn sample(n: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let all = corpus();
    all.choose_multiple(&mut rng, n).cloned().collect()
}

/// One more copy of a training sentence must not lower its score.
fn check_monotone(opts: &TrainOptions) {
    let base = sample(2000, 7);
    let m0 = lm::train(base.iter().map(String::as_str), 3, opts).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for s in base.choose_multiple(&mut rng, 25) {
        let m1 = lm::train(base.iter().map(String::as_str).chain([s.as_str()]), 3, opts).unwrap();
        let (a, b) = (m0.score_sentence(s), m1.score_sentence(s));
        assert!(b >= a - 1e-9, "{s:?}: {a} -> {b}");
    }
}

#[test]
fn extra_copy_never_lowers_score() {
    check_monotone(&TrainOptions { unk_threshold: 0 });
}

#[test]
fn extra_copy_never_lowers_score_with_unknown_word_estimate() {
    check_monotone(&TrainOptions::default());
}

#[test]
fn arpa_round_trip_scores_random_sentences_identically() {
    let train = sample(3000, 3);
    let m = lm::train(train.iter().map(String::as_str), 4, &TrainOptions::default()).unwrap();
    let text = lm::write_arpa(&m);
    let back = lm::read_arpa(&text).unwrap();
    assert_eq!(lm::write_arpa(&back), text);
    for s in sample(50, 99) {
        assert_eq!(m.score_sentence(&s).to_bits(), back.score_sentence(&s).to_bits(), "{s}");
    }
}
