use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn data() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn paragen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_paragen"))
        .args(args)
        .env("PARAGEN_RESOURCES", data().join("resources"))
        .env_remove("RUST_LOG")
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// Small model trained through the CLI itself.
fn toy_lm(dir: &TempDir) -> String {
    let corpus = dir.path().join("corpus.txt");
    std::fs::write(
        &corpus,
        "Albert Einstein was born in Ulm , Germany .\n\
         Marie Curie was born in Warsaw .\n\
         Elsa Lowenthal is the wife of Albert Einstein .\n\
         The station is located in Leeds .\n",
    )
    .unwrap();
    let arpa = dir.path().join("toy.arpa");
    let o = paragen(&["train-lm", "--corpus", s(&corpus), "--order", "3", "--out", s(&arpa)]);
    assert!(o.status.success(), "{}", stderr(&o));
    s(&arpa).to_string()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn einstein() -> String {
    data().join("examples/einstein.csv").to_string_lossy().into_owned()
}

#[test]
fn train_lm_reports_counts() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c.txt");
    std::fs::write(&corpus, "a b\nb a\n").unwrap();
    let out = dir.path().join("m.arpa");
    let o = paragen(&["train-lm", "--corpus", s(&corpus), "--order", "2", "--unk-threshold", "0", "--out", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("1-grams=5 2-grams="), "{}", stdout(&o));
    assert!(std::fs::read_to_string(&out).unwrap().trim_start().starts_with("\\data\\"));
}

#[test]
fn train_lm_rejects_empty_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("empty.txt");
    std::fs::write(&corpus, "\n\n").unwrap();
    let o = paragen(&["train-lm", "--corpus", s(&corpus), "--out", s(&dir.path().join("m.arpa"))]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}

#[test]
fn generate_table_with_trace() {
    let dir = tempfile::tempdir().unwrap();
    let lm = toy_lm(&dir);
    let o = paragen(&["generate", "--input", &einstein(), "--lm", &lm, "--trace"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("Albert Einstein") && text.contains("Elsa Lowenthal"), "{text}");

    let records: Vec<serde_json::Value> = stderr(&o)
        .lines()
        .filter(|l| l.starts_with('{'))
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let stages: Vec<&str> = records.iter().map(|r| r["stage"].as_str().unwrap()).collect();
    assert_eq!(stages.iter().filter(|s| **s == "winner").count(), 3);
    assert!(stages.contains(&"compound"));
    assert_eq!(stages.last(), Some(&"paragraph"));
    assert_eq!(records.last().unwrap()["text"].as_str().unwrap(), text.trim_end());
}

#[test]
fn generate_without_discourse_steps_keeps_one_sentence_per_triple() {
    let dir = tempfile::tempdir().unwrap();
    let lm = toy_lm(&dir);
    let out = dir.path().join("out.txt");
    let o = paragen(&[
        "generate", "--input", &einstein(), "--lm", &lm, "--no-compounding", "--no-coref", "--output", s(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.matches("Albert Einstein").count(), 3, "{text}");
}

#[test]
fn generate_key_value_and_triples() {
    let dir = tempfile::tempdir().unwrap();
    let lm = toy_lm(&dir);
    let kv = dir.path().join("r.json");
    std::fs::write(&kv, r#"{"name": "Marie Curie", "birth place": "Warsaw"}"#).unwrap();
    let o = paragen(&["generate", "--format", "kv", "--input", s(&kv), "--lm", &lm]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("Warsaw"), "{}", stdout(&o));

    let g = dir.path().join("g.tsv");
    std::fs::write(&g, "# graph\nLeeds station\tlocation\tLeeds\n").unwrap();
    let o = paragen(&["generate", "--format", "triples", "--input", s(&g), "--lm", &lm, "--realizers", "copular"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("Leeds station"), "{}", stdout(&o));
}

#[test]
fn generate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let lm = toy_lm(&dir);

    let o = paragen(&["generate", "--input", &einstein(), "--lm", &lm, "--realizers", "neural"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let o = paragen(&["generate", "--input", &einstein(), "--lm", &lm, "--format", "kv", "--transpose"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));

    let missing = dir.path().join("missing.arpa");
    let o = paragen(&["generate", "--input", &einstein(), "--lm", s(&missing)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("missing.arpa"), "{}", stderr(&o));
    let bad = dir.path().join("bad.arpa");
    std::fs::write(&bad, "\\data\\\nngram 1=x\n").unwrap();
    let o = paragen(&["generate", "--input", &einstein(), "--lm", s(&bad)]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let o = paragen(&["generate", "--input", &einstein(), "--lm", &lm, "--resources", s(&dir.path().join("nowhere"))]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));

    let ragged = dir.path().join("ragged.csv");
    std::fs::write(&ragged, "Name,Team\nAnn,Reds,extra\n").unwrap();
    let o = paragen(&["generate", "--input", s(&ragged), "--lm", &lm]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    assert!(stderr(&o).contains("ragged.csv"), "{}", stderr(&o));
}

#[test]
fn build_pairs_variants() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("sents.txt");
    std::fs::write(&input, "Tony Blair played for Leeds United.\n\nthe end\n").unwrap();
    let out = dir.path().join("pairs.tsv");
    let o = paragen(&["build-pairs", "--variant", "morphkey-v2", "--input", s(&input), "--output", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("read=2"), "{}", stderr(&o));
    let pairs = std::fs::read_to_string(&out).unwrap();
    assert!(pairs.lines().all(|l| l.split('\t').count() == 2), "{pairs}");

    let o = paragen(&["build-pairs", "--variant", "morphkey-v3", "--input", s(&input)]);
    assert_eq!(o.status.code(), Some(2));

    let triples = dir.path().join("t.tsv");
    std::fs::write(&triples, "Leeds\tpopulation\n").unwrap();
    let o = paragen(&["build-pairs", "--variant", "triple2text", "--input", s(&triples)]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}

#[test]
fn eval_prints_table_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let lm = toy_lm(&dir);
    let report = dir.path().join("report.jsonl");
    let bench = data().join("benchmark");
    let o = paragen(&["eval", "--benchmark", s(&bench), "--lm", &lm, "--single-realizers", "--report", s(&report)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let table = stdout(&o);
    assert!(table.starts_with("variant"), "{table}");
    assert_eq!(table.lines().count(), 8, "{table}");
    let lines: Vec<serde_json::Value> = std::fs::read_to_string(&report)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 7);
    assert_eq!(lines[0]["variant"], "+CP+CR");
}

#[test]
fn eval_fails_when_an_instance_is_broken() {
    let dir = tempfile::tempdir().unwrap();
    let lm = toy_lm(&dir);
    let bench = dir.path().join("bench");
    std::fs::create_dir_all(bench.join("good")).unwrap();
    std::fs::create_dir_all(bench.join("broken")).unwrap();
    std::fs::write(bench.join("good/table.csv"), "Name,Birth Place\nMarie Curie,Warsaw\n").unwrap();
    std::fs::write(bench.join("good/ref1.txt"), "Marie Curie was born in Warsaw.").unwrap();
    std::fs::write(bench.join("broken/table.csv"), "Name,Birth Place\nMarie Curie,Warsaw\n").unwrap();
    let o = paragen(&["eval", "--benchmark", s(&bench), "--lm", &lm]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    assert!(stderr(&o).contains("broken"), "{}", stderr(&o));
    assert!(stdout(&o).contains("+CP+CR"));
}
