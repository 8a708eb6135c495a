use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};
use paragen::canonical::{self, CanonicalTriple, EntityTypeMap, TableFormat};
use paragen::corpus::{build_pairs, PairError, PairVariant};
use paragen::eval::{run_benchmark, Variant};
use paragen::lm::{self, NGramModel, TrainOptions};
use paragen::pipeline::{generate, trace_jsonl, PipelineOptions, TraceRecord};
use paragen::realize::RealizerId;
use paragen::{load_resources, ResourceBundle};

/// Exit codes for scripted callers.
const EXIT_CONFIG: u8 = 2;
const EXIT_RESOURCE: u8 = 3;
const EXIT_INPUT: u8 = 4;

#[derive(Parser)]
#[command(name = "paragen", version, about = "Describe tables, records and triples in plain paragraphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a paragraph for one input.
    Generate(GenerateArgs),
    /// Train an n-gram language model and write it as ARPA.
    TrainLm(TrainArgs),
    /// Build training pairs for external realizers.
    BuildPairs(PairArgs),
    /// Score generated paragraphs against benchmark references.
    Eval(EvalArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InputFormat {
    Table,
    Kv,
    Triples,
}

#[derive(Args)]
struct ResourceArgs {
    /// Resource directory.
    #[arg(long, env = "PARAGEN_RESOURCES", default_value = "data/resources")]
    resources: PathBuf,
    /// ARPA language model.
    #[arg(long)]
    lm: PathBuf,
}

#[derive(Args)]
struct AblationArgs {
    /// Skip sentence compounding.
    #[arg(long)]
    no_compounding: bool,
    /// Skip pronoun replacement.
    #[arg(long)]
    no_coref: bool,
    /// Realizers to run (comma separated).
    #[arg(long, value_delimiter = ',', default_values_t = ["concat".to_string(), "verb_frame".to_string(), "copular".to_string()])]
    realizers: Vec<String>,
}

impl AblationArgs {
    fn realizers(&self) -> Result<Vec<RealizerId>, Failure> {
        let mut out = Vec::new();
        for r in &self.realizers {
            let id = RealizerId::parse(r).ok_or_else(|| Failure::config(anyhow!("unknown realizer `{r}`")))?;
            if !out.contains(&id) {
                out.push(id);
            }
        }
        if out.is_empty() {
            return Err(Failure::config(anyhow!("at least one realizer is required")));
        }
        out.sort();
        Ok(out)
    }
}

#[derive(Args)]
struct GenerateArgs {
    /// Input file.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = InputFormat::Table)]
    format: InputFormat,
    /// Primary-key column (tables only).
    #[arg(long)]
    primary_key: Option<usize>,
    /// Read the table with attributes as rows (tables only).
    #[arg(long)]
    transpose: bool,
    #[command(flatten)]
    resources: ResourceArgs,
    #[command(flatten)]
    ablation: AblationArgs,
    /// Write stage records as JSON lines to standard error.
    #[arg(long)]
    trace: bool,
    /// Write stage records to this file instead.
    #[arg(long)]
    trace_file: Option<PathBuf>,
    /// Output file (standard output when omitted).
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    /// One sentence per line.
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, default_value_t = 5)]
    order: usize,
    /// Words seen at most this often train the unknown-word estimate.
    #[arg(long, default_value_t = 1)]
    unk_threshold: u32,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct PairArgs {
    /// morphkey-v1, morphkey-v2 or triple2text.
    #[arg(long)]
    variant: String,
    #[arg(long)]
    input: PathBuf,
    /// Output file (standard output when omitted).
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, env = "PARAGEN_RESOURCES", default_value = "data/resources")]
    resources: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    /// Directory with one sub-directory per instance.
    #[arg(long)]
    benchmark: PathBuf,
    #[command(flatten)]
    resources: ResourceArgs,
    /// Realizers for the ensemble (comma separated).
    #[arg(long, value_delimiter = ',', default_values_t = ["concat".to_string(), "verb_frame".to_string(), "copular".to_string()])]
    realizers: Vec<String>,
    /// Add one single-realizer column per realizer.
    #[arg(long)]
    single_realizers: bool,
    /// Machine-readable report, one JSON object per variant.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn config(error: anyhow::Error) -> Self {
        Failure { code: EXIT_CONFIG, error }
    }
    fn resource(error: anyhow::Error) -> Self {
        Failure { code: EXIT_RESOURCE, error }
    }
    fn input(error: anyhow::Error) -> Self {
        Failure { code: EXIT_INPUT, error }
    }
}

fn load_bundle(dir: &Path) -> Result<ResourceBundle, Failure> {
    let b = load_resources(dir)
        .with_context(|| format!("loading resources from {}", dir.display()))
        .map_err(Failure::resource)?;
    for r in b.report() {
        info!("{}: {:?} ({} entries)", r.file, r.status, r.entries);
    }
    Ok(b)
}

fn load_lm(path: &Path) -> Result<NGramModel, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read language model {}", path.display()))
        .map_err(Failure::resource)?;
    lm::read_arpa(&text)
        .with_context(|| format!("language model {}", path.display()))
        .map_err(Failure::resource)
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p)
                .with_context(|| format!("cannot create {}", p.display()))
                .map_err(Failure::input)?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn read_input(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(Failure::input)
}

fn canonicalize(args: &GenerateArgs, raw: &str, bundle: &ResourceBundle) -> Result<(Vec<CanonicalTriple>, EntityTypeMap)> {
    Ok(match args.format {
        InputFormat::Table => {
            let format = match args.input.extension().and_then(|e| e.to_str()) {
                Some("tsv") => TableFormat::Tsv,
                _ => TableFormat::Csv,
            };
            let table = canonical::ingest_table(raw, format, args.primary_key.unwrap_or(0), args.transpose)?;
            canonical::table_to_triples(&table, bundle)
        }
        InputFormat::Kv => canonical::kv_to_triples(&canonical::parse_kv(raw)?, bundle)?,
        InputFormat::Triples => canonical::graph_to_triples(raw, bundle)?,
    })
}

fn cmd_generate(args: GenerateArgs) -> Result<(), Failure> {
    if args.format != InputFormat::Table && (args.primary_key.is_some() || args.transpose) {
        return Err(Failure::config(anyhow!("--primary-key and --transpose apply only to --format table")));
    }
    if args.trace && args.trace_file.is_some() {
        return Err(Failure::config(anyhow!("use either --trace or --trace-file")));
    }
    let options = PipelineOptions {
        compounding: !args.ablation.no_compounding,
        coref: !args.ablation.no_coref,
        realizers: args.ablation.realizers()?,
    };
    let bundle = load_bundle(&args.resources.resources)?;
    let lm = load_lm(&args.resources.lm)?;
    let raw = read_input(&args.input)?;
    let (triples, d) = canonicalize(&args, &raw, &bundle)
        .with_context(|| format!("input {}", args.input.display()))
        .map_err(Failure::input)?;

    let g = generate(&triples, &d, &lm, &bundle, &options);
    for r in &g.trace {
        if let TraceRecord::Failure { index, error } = r {
            warn!("triple {index} skipped: {error}");
        }
    }
    let mut out = open_output(args.output.as_deref())?;
    writeln!(out, "{}", g.text()).and_then(|_| out.flush()).map_err(|e| Failure::input(e.into()))?;
    let trace = trace_jsonl(&g.trace);
    if args.trace {
        io::stderr().write_all(trace.as_bytes()).map_err(|e| Failure::input(e.into()))?;
    } else if let Some(p) = &args.trace_file {
        fs::write(p, trace)
            .with_context(|| format!("cannot write {}", p.display()))
            .map_err(Failure::input)?;
    }
    Ok(())
}

fn cmd_train_lm(args: TrainArgs) -> Result<(), Failure> {
    if args.order == 0 {
        return Err(Failure::config(anyhow!("--order must be at least 1")));
    }
    let start = Instant::now();
    let corpus = read_input(&args.corpus)?;
    let model = lm::train(corpus.lines(), args.order, &TrainOptions { unk_threshold: args.unk_threshold })
        .with_context(|| format!("corpus {}", args.corpus.display()))
        .map_err(Failure::input)?;
    fs::write(&args.out, lm::write_arpa(&model))
        .with_context(|| format!("cannot write {}", args.out.display()))
        .map_err(Failure::input)?;
    let counts: Vec<String> = model.counts().iter().enumerate().map(|(k, c)| format!("{}-grams={c}", k + 1)).collect();
    println!(
        "vocabulary={} {} time={:.2}s",
        model.vocab_size(),
        counts.join(" "),
        start.elapsed().as_secs_f64()
    );
    Ok(())
}

fn cmd_build_pairs(args: PairArgs) -> Result<(), Failure> {
    let variant = PairVariant::parse(&args.variant).ok_or_else(|| {
        Failure::config(anyhow!("unknown variant `{}` (expected morphkey-v1, morphkey-v2 or triple2text)", args.variant))
    })?;
    let bundle = load_bundle(&args.resources)?;
    let input = File::open(&args.input)
        .with_context(|| format!("cannot read {}", args.input.display()))
        .map_err(Failure::input)?;
    let out = open_output(args.output.as_deref())?;
    let stats = build_pairs(variant, BufReader::new(input), out, &bundle).map_err(|e| match e {
        PairError::MalformedTriple { .. } => Failure::input(anyhow!(e).context(args.input.display().to_string())),
        PairError::Io(_) => Failure::input(e.into()),
    })?;
    eprintln!("read={} emitted={} skipped={}", stats.read, stats.emitted, stats.skipped);
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<(), Failure> {
    let realizers = AblationArgs { no_compounding: false, no_coref: false, realizers: args.realizers.clone() }.realizers()?;
    let bundle = load_bundle(&args.resources.resources)?;
    let lm = load_lm(&args.resources.lm)?;
    let mut variants = Variant::ablation_grid(&realizers);
    if args.single_realizers {
        for r in &realizers {
            variants.push(Variant::new(PipelineOptions { compounding: true, coref: true, realizers: vec![*r] }));
        }
    }
    let start = Instant::now();
    let report = run_benchmark(&args.benchmark, &variants, &lm, &bundle)
        .with_context(|| format!("benchmark {}", args.benchmark.display()))
        .map_err(Failure::input)?;
    print!("{}", report.to_table());
    info!("evaluated in {:.2}s", start.elapsed().as_secs_f64());
    if let Some(p) = &args.report {
        fs::write(p, report.to_jsonl())
            .with_context(|| format!("cannot write {}", p.display()))
            .map_err(Failure::input)?;
    }
    let errors = report.errors();
    if errors > 0 {
        for v in &report.variants {
            for i in v.instances.iter().filter(|i| i.error.is_some()) {
                eprintln!("{} / {}: {}", v.variant, i.id, i.error.as_deref().unwrap_or_default());
            }
        }
        return Err(Failure::input(anyhow!("{errors} instance runs failed")));
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::TrainLm(a) => cmd_train_lm(a),
        Command::BuildPairs(a) => cmd_build_pairs(a),
        Command::Eval(a) => cmd_eval(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
