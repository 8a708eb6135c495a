//! Fixtures shared by the benchmarks.

use std::path::{Path, PathBuf};

use paragen::lm::{self, NGramModel, TrainOptions};
use paragen::{load_resources, ResourceBundle};

pub fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn bundle() -> ResourceBundle {
    load_resources(&data_dir().join("resources")).expect("bundled resources")
}

/// The first `n` corpus sentences.
pub fn corpus(n: usize) -> Vec<String> {
    std::fs::read_to_string(data_dir().join("corpus/lm_corpus.txt"))
        .expect("bundled corpus")
        .lines()
        .take(n)
        .map(str::to_string)
        .collect()
}

pub fn model(sentences: &[String], order: usize) -> NGramModel {
    lm::train(sentences.iter().map(String::as_str), order, &TrainOptions::default()).expect("non-empty corpus")
}
