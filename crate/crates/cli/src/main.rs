//! `depnn` command-line tool.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use depnn::classifier::{cross_validate, fit, ClassifierError, Model, Preset, TrainConfig};
use depnn::corpus::{
    align_instances, dataset_stats, load_embeddings, parse_conll, parse_instances, parse_semeval_raw, write_instances,
    CorpusError, EmbeddingTable, Instance, INSTANCE_HEADER,
};
use depnn::eval::{nearest_paths, per_relation_delta, render_deltas, score, EvalError, EvaluationReport};
use depnn::labels::Label;
use depnn::numerics::GradCheckOptions;
use depnn::synthetic;

const BUNDLED: &str = include_str!("../../../data/synthetic.inst");
const GRADCHECK_TOLERANCE: f64 = 1e-5;

#[derive(Parser)]
#[command(
    name = "depnn",
    version,
    about = "Relation classification over augmented dependency paths"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Align raw SemEval sentences with CoNLL parses and write an instance file.
    Convert(ConvertArgs),
    /// Train a model and write it to disk.
    Train(TrainArgs),
    /// Score a model on an instance file, or a prediction file against a key.
    Eval(EvalArgs),
    /// Print the predicted label and distribution for each instance.
    Predict(PredictArgs),
    /// Compare hand-written gradients with finite differences.
    Gradcheck(GradcheckArgs),
    /// Label statistics of a raw SemEval file or an instance file.
    Stats(StatsArgs),
    /// Instances whose path representation is closest to a query instance.
    Neighbors(NeighborsArgs),
    /// Per-relation F1 difference between two models on the same instances.
    Compare(CompareArgs),
    /// k-fold cross-validation on an instance file.
    Cv(CvArgs),
    /// Write a generated separable corpus.
    Synth(SynthArgs),
}

#[derive(Args)]
struct ConfigArgs {
    /// Start from a named preset (senna50 or gigaword200).
    #[arg(long)]
    preset: Option<String>,
    /// key=value settings file; command-line flags take precedence.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Extra key=value setting, applied after the config file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    no_subtrees: bool,
    #[arg(long)]
    ner: bool,
    #[arg(long)]
    wordnet: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    /// Pretrained vectors in word2vec text format.
    #[arg(long, value_name = "FILE")]
    embeddings: Option<PathBuf>,
}

#[derive(Args)]
struct ConvertArgs {
    /// Official SemEval file.
    #[arg(long)]
    raw: PathBuf,
    /// CoNLL parses keyed by instance id.
    #[arg(long)]
    parses: PathBuf,
    /// Keep prep/pobj chains instead of collapsing them.
    #[arg(long)]
    no_collapse: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Print the effective configuration and exit.
    #[arg(long)]
    print_config: bool,
    #[arg(long, required_unless_present = "print_config")]
    instances: Option<PathBuf>,
    #[arg(long, required_unless_present = "print_config")]
    model: Option<PathBuf>,
    /// Instance file scored after every epoch.
    #[arg(long)]
    validation: Option<PathBuf>,
    #[arg(short, long)]
    quiet: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Text,
    Tsv,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long, requires = "instances", conflicts_with_all = ["gold", "pred"])]
    model: Option<PathBuf>,
    #[arg(long)]
    instances: Option<PathBuf>,
    /// Answer key: one `id<TAB>label` line per instance.
    #[arg(long, requires = "pred")]
    gold: Option<PathBuf>,
    #[arg(long, requires = "gold")]
    pred: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: ReportFormat,
    /// Also print the confusion matrix.
    #[arg(long)]
    confusion: bool,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    instances: PathBuf,
    /// Print only `id<TAB>label`, the answer-key layout.
    #[arg(long)]
    labels_only: bool,
}

#[derive(Args)]
struct GradcheckArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Defaults to the bundled synthetic corpus.
    #[arg(long)]
    instances: Option<PathBuf>,
    /// Number of instances to check.
    #[arg(long, default_value_t = 2)]
    limit: usize,
    /// Sampled entries per tensor; 0 checks every entry.
    #[arg(long, default_value_t = 20)]
    max_entries: usize,
}

#[derive(Args)]
struct StatsArgs {
    /// Raw SemEval file or DEPNN-INST file.
    input: PathBuf,
}

#[derive(Args)]
struct NeighborsArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    instances: PathBuf,
    /// Id of the query instance.
    #[arg(long)]
    query: u64,
    #[arg(long, default_value_t = 5)]
    top_n: usize,
}

#[derive(Args)]
struct CompareArgs {
    /// Baseline model.
    #[arg(long)]
    base: PathBuf,
    /// Model compared against the baseline.
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    instances: PathBuf,
}

#[derive(Args)]
struct CvArgs {
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long)]
    instances: PathBuf,
    #[arg(long, default_value_t = 10)]
    folds: usize,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 50)]
    count: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(String),
    Numeric(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Numeric(m) => f.write_str(m),
        }
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<ClassifierError> for CliError {
    fn from(e: ClassifierError) -> Self {
        match &e {
            ClassifierError::Config(_) => CliError::Usage(e.to_string()),
            _ if e.is_numeric() => CliError::Numeric(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Classifier(c) => c.into(),
            e => CliError::Data(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Data(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_instances(path: &Path) -> Result<Vec<Instance>, CliError> {
    parse_instances(&read(path)?).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn load_model(path: &Path) -> Result<Model, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    Model::from_bytes(&bytes).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// Defaults, then the preset, then the config file, then flags.
fn resolve_config(args: &ConfigArgs) -> Result<TrainConfig, CliError> {
    let mut c = TrainConfig::default();
    if let Some(p) = &args.preset {
        let preset = Preset::parse(p).ok_or_else(|| CliError::Usage(format!("unknown preset {p:?}")))?;
        c = TrainConfig::preset(preset);
    }
    if let Some(path) = &args.config {
        c.apply_text(&read(path)?)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        if let Some(p) = &args.preset {
            c.set("preset", p)?;
        }
    }
    for kv in &args.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, got {kv:?}")))?;
        c.set(k.trim(), v.trim())?;
    }
    if args.no_subtrees {
        c.model.use_subtrees = false;
    }
    if args.ner {
        c.model.use_ner = true;
    }
    if args.wordnet {
        c.model.use_wordnet = true;
    }
    if let Some(s) = args.seed {
        c.seed = s;
    }
    if let Some(e) = args.epochs {
        c.epochs = e;
    }
    if let Some(l) = args.learning_rate {
        c.learning_rate = l;
    }
    c.validate()?;
    Ok(c)
}

fn load_vectors(args: &ConfigArgs, dim: usize) -> Result<Option<EmbeddingTable>, CliError> {
    args.embeddings
        .as_ref()
        .map(|p| load_embeddings(p, dim).map_err(|e| CliError::Data(format!("{}: {e}", p.display()))))
        .transpose()
}

fn cmd_convert(a: &ConvertArgs) -> Result<(), CliError> {
    let raw = parse_semeval_raw(&read(&a.raw)?).map_err(|e| CliError::Data(format!("{}: {e}", a.raw.display())))?;
    let parses = parse_conll(&read(&a.parses)?).map_err(|e| CliError::Data(format!("{}: {e}", a.parses.display())))?;
    let (instances, failures) = align_instances(&raw, &parses, !a.no_collapse);
    write_output(a.output.as_deref(), &write_instances(&instances))?;
    for f in &failures {
        eprintln!("alignment failure: {f}");
    }
    eprintln!(
        "{} records written, {} alignment failures",
        instances.len(),
        failures.len()
    );
    Ok(())
}

fn cmd_train(a: &TrainArgs) -> Result<(), CliError> {
    let config = resolve_config(&a.config)?;
    if a.print_config {
        print!("{config}");
        return Ok(());
    }
    let (Some(inst_path), Some(model_path)) = (&a.instances, &a.model) else {
        return Err(CliError::Usage("--instances and --model are required".into()));
    };
    let instances = load_instances(inst_path)?;
    let validation = a.validation.as_deref().map(load_instances).transpose()?;
    let vectors = load_vectors(&a.config, config.model.dim)?;
    let quiet = a.quiet;
    let (model, _) = fit(&instances, &config, vectors.as_ref(), validation.as_deref(), &mut |e| {
        if !quiet {
            println!("{e}");
        }
    })?;
    fs::write(model_path, model.to_bytes(Some(&config)))
        .map_err(|e| CliError::Data(format!("{}: {e}", model_path.display())))?;
    if !quiet {
        println!(
            "{} model written to {}",
            config.model.system_name(),
            model_path.display()
        );
    }
    Ok(())
}

/// `id<TAB>label` lines; blank lines are skipped.
fn read_answer_key(path: &Path) -> Result<Vec<(u64, Label)>, CliError> {
    let bad = |n: usize, m: String| CliError::Data(format!("{}:{}: {m}", path.display(), n + 1));
    read(path)?
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, line)| {
            let mut parts = line.split_whitespace();
            let (Some(id), Some(label), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(bad(n, "expected `id<TAB>label`".into()));
            };
            let id = id.parse().map_err(|_| bad(n, format!("bad id {id:?}")))?;
            let label = label.parse().map_err(|_| bad(n, format!("unknown label {label:?}")))?;
            Ok((id, label))
        })
        .collect()
}

fn print_report(r: &EvaluationReport, format: ReportFormat, confusion: bool) {
    match format {
        ReportFormat::Text => print!("{}", r.render_text()),
        ReportFormat::Tsv => print!("{}", r.render_tsv()),
    }
    if confusion {
        print!("{}", r.render_confusion());
    }
}

fn predict_all(model: &Model, instances: &[Instance]) -> Result<Vec<Label>, CliError> {
    instances.iter().map(|i| Ok(model.predict(i)?.label)).collect()
}

fn gold_labels(instances: &[Instance]) -> Result<Vec<Label>, CliError> {
    instances
        .iter()
        .map(|i| {
            i.gold
                .ok_or_else(|| CliError::Data(format!("instance {} has no gold label", i.id)))
        })
        .collect()
}

fn cmd_eval(a: &EvalArgs) -> Result<(), CliError> {
    let (gold, pred) = match (&a.model, &a.instances, &a.gold, &a.pred) {
        (Some(m), Some(i), None, None) => {
            let model = load_model(m)?;
            let instances = load_instances(i)?;
            (gold_labels(&instances)?, predict_all(&model, &instances)?)
        }
        (None, None, Some(g), Some(p)) => {
            let key = read_answer_key(g)?;
            let answers: HashMap<u64, Label> = read_answer_key(p)?.into_iter().collect();
            if answers.len() != key.len() {
                return Err(CliError::Data(format!(
                    "{} answers for {} key entries",
                    answers.len(),
                    key.len()
                )));
            }
            let mut gold = Vec::with_capacity(key.len());
            let mut pred = Vec::with_capacity(key.len());
            for (id, g) in key {
                let p = answers
                    .get(&id)
                    .ok_or_else(|| CliError::Data(format!("no prediction for id {id}")))?;
                gold.push(g);
                pred.push(*p);
            }
            (gold, pred)
        }
        _ => {
            return Err(CliError::Usage(
                "give --model with --instances, or --gold with --pred".into(),
            ))
        }
    };
    print_report(&score(&gold, &pred)?, a.format, a.confusion);
    Ok(())
}

fn cmd_predict(a: &PredictArgs) -> Result<(), CliError> {
    let model = load_model(&a.model)?;
    let mut out = String::new();
    for inst in load_instances(&a.instances)? {
        let p = model.predict(&inst)?;
        if a.labels_only {
            out.push_str(&format!("{}\t{}\n", inst.id, p.label));
        } else {
            let dist: Vec<String> = p.distribution.iter().map(|v| format!("{v:.6}")).collect();
            out.push_str(&format!("{}\t{}\t{}\n", inst.id, p.label, dist.join(" ")));
        }
    }
    print!("{out}");
    Ok(())
}

fn cmd_gradcheck(a: &GradcheckArgs) -> Result<(), CliError> {
    let config = resolve_config(&a.config)?;
    let instances = match &a.instances {
        Some(p) => load_instances(p)?,
        None => parse_instances(BUNDLED)?,
    };
    let instances = &instances[..a.limit.min(instances.len())];
    if instances.is_empty() {
        return Err(CliError::Data("no instances to check".into()));
    }
    let vectors = load_vectors(&a.config, config.model.dim)?;
    let mut model = Model::new(
        &config.model,
        depnn::classifier::Vocabularies::build(instances),
        config.seed,
        vectors.as_ref(),
    )?;
    let examples = model.examples(instances)?;
    let options = GradCheckOptions {
        max_entries_per_tensor: (a.max_entries > 0).then_some(a.max_entries),
        seed: config.seed,
        ..GradCheckOptions::default()
    };
    let report = model.gradient_check(&examples, &options)?;
    print!("{}", report.render());
    let worst = report.max_relative_error();
    println!("max relative error {worst:.3e} over {} instances", examples.len());
    if report.passes(GRADCHECK_TOLERANCE) {
        Ok(())
    } else {
        Err(CliError::Numeric(format!(
            "gradient check failed: {worst:.3e} >= {GRADCHECK_TOLERANCE:e}"
        )))
    }
}

fn cmd_stats(a: &StatsArgs) -> Result<(), CliError> {
    let text = read(&a.input)?;
    let is_instances = text.lines().map(str::trim).find(|l| !l.is_empty()) == Some(INSTANCE_HEADER);
    let labels: Vec<Label> = if is_instances {
        parse_instances(&text)?.into_iter().filter_map(|i| i.gold).collect()
    } else {
        parse_semeval_raw(&text)?.into_iter().filter_map(|r| r.label).collect()
    };
    print!("{}", dataset_stats(labels));
    Ok(())
}

fn cmd_neighbors(a: &NeighborsArgs) -> Result<(), CliError> {
    let model = load_model(&a.model)?;
    let instances = load_instances(&a.instances)?;
    let query = instances
        .iter()
        .find(|i| i.id == a.query)
        .ok_or_else(|| CliError::Data(format!("no instance with id {}", a.query)))?;
    let candidates: Vec<Instance> = instances.iter().filter(|i| i.id != a.query).cloned().collect();
    let found = nearest_paths(query, &candidates, &model, a.top_n)?;
    let by_id: HashMap<u64, &Instance> = instances.iter().map(|i| (i.id, i)).collect();
    let path_of = |i: &Instance| -> Result<String, CliError> {
        let adp = i.adp().map_err(|e| CliError::Data(format!("instance {}: {e}", i.id)))?;
        Ok(adp.path.render(&i.graph))
    };
    println!("query\t{}\t{}", query.id, path_of(query)?);
    for (rank, n) in found.ranked.iter().enumerate() {
        println!(
            "{}\t{}\t{:.4}\t{}",
            rank + 1,
            n.id,
            n.similarity,
            path_of(by_id[&n.id])?
        );
    }
    if !found.skipped.is_empty() {
        eprintln!(
            "{} candidates skipped with a zero path representation",
            found.skipped.len()
        );
    }
    Ok(())
}

fn cmd_compare(a: &CompareArgs) -> Result<(), CliError> {
    let base = load_model(&a.base)?;
    let model = load_model(&a.model)?;
    let instances = load_instances(&a.instances)?;
    let gold = gold_labels(&instances)?;
    let rb = score(&gold, &predict_all(&base, &instances)?)?;
    let rm = score(&gold, &predict_all(&model, &instances)?)?;
    println!("{}\t{:.3}", base.config().system_name(), rb.macro_f1);
    println!("{}\t{:.3}", model.config().system_name(), rm.macro_f1);
    print!("{}", render_deltas(&per_relation_delta(&rb, &rm)));
    Ok(())
}

fn cmd_cv(a: &CvArgs) -> Result<(), CliError> {
    if a.folds < 2 {
        return Err(CliError::Usage("--folds must be at least 2".into()));
    }
    let config = resolve_config(&a.config)?;
    let instances = load_instances(&a.instances)?;
    let vectors = load_vectors(&a.config, config.model.dim)?;
    let cv = cross_validate(&instances, &config, a.folds, vectors.as_ref())?;
    for (i, f) in cv.fold_macro_f1.iter().enumerate() {
        println!("fold {}\t{f:.4}", i + 1);
    }
    println!("mean\t{:.4}", cv.mean());
    Ok(())
}

fn cmd_synth(a: &SynthArgs) -> Result<(), CliError> {
    let corpus = synthetic::separable_corpus(a.count, a.seed);
    write_output(a.output.as_deref(), &write_instances(&corpus))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Convert(a) => cmd_convert(a),
        Command::Train(a) => cmd_train(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Gradcheck(a) => cmd_gradcheck(a),
        Command::Stats(a) => cmd_stats(a),
        Command::Neighbors(a) => cmd_neighbors(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Cv(a) => cmd_cv(a),
        Command::Synth(a) => cmd_synth(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
