//! Command-line surface for the lbowkit library.
//!
//! Every subcommand is a thin adapter over the library: file and argument
//! handling live here, numeric logic does not. Exit codes: 0 on success
//! (for `verify`, success means strict equivalence; for `adversarial`, a
//! demonstrated forced error), 1 for domain errors — with the owning
//! module's error name on stderr — and 2 for usage errors.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lbowkit::adversarial::SignCase;
use lbowkit::bench::run_bench;
use lbowkit::corpus::{load_training_data, parse_labeled_line};
use lbowkit::model::{LBoWModel, SoftmaxVariant};
use lbowkit::persist::{load_model, save_model, TextClassifier};
use lbowkit::train::{accuracy, train_with_history, TrainConfig};
use lbowkit::transforms::{
    compress, fold_hidden_layer, shift_reduce, verify_equivalence, DEFAULT_TOLERANCE,
};
use lbowkit::Document;

/// Linear bag-of-words text classification: training, exact compression,
/// and a constructive demonstration of the dimensionality lower bound.
#[derive(Parser)]
#[command(name = "lbowkit", version, max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a classifier on a labeled corpus (one `__label__X text` line
    /// per document) and write it as a model file.
    Train(TrainArgs),
    /// Classify input lines with a model file, one label per line. Input is
    /// tokenized on whitespace as-is: text trained with --lowercase should
    /// be lowercased before it is piped in.
    Predict(PredictArgs),
    /// Fold a model's hidden layer into its word vectors (exact).
    Fold(TransformArgs),
    /// Drop one softmax dimension from a hidden-free model (exact).
    Reduce(TransformArgs),
    /// Fold and reduce: the fully compressed equivalent model.
    Compress(TransformArgs),
    /// Compare two models document-by-document; exit 0 iff strictly
    /// equivalent within the tolerance.
    Verify(VerifyArgs),
    /// Demonstrate the dimensionality lower bound on a random model: find an
    /// exact integer dependence among its word vectors and build two
    /// documents it cannot tell apart; exit 0 iff the forced error is
    /// demonstrated.
    Adversarial(AdversarialArgs),
    /// Measure per-document multiply counts and throughput for a model and
    /// its compressed form.
    Bench(BenchArgs),
}

#[derive(Args)]
struct TrainArgs {
    /// Labeled training corpus.
    #[arg(long)]
    input: PathBuf,
    /// Where to write the model file.
    #[arg(long)]
    output: PathBuf,
    /// Word-vector dimensionality (only meaningful with --hidden; without
    /// it the dimension is the class count).
    #[arg(long, default_value_t = 100)]
    dim: usize,
    /// Passes over the training data.
    #[arg(long, default_value_t = 5)]
    epochs: usize,
    /// Initial learning rate (decays linearly to zero).
    #[arg(long, default_value_t = 0.1)]
    lr: f64,
    /// Minimum corpus frequency for a word to enter the vocabulary.
    #[arg(long, default_value_t = 1)]
    min_count: u64,
    /// Seed for initialization and shuffling; equal seeds give bitwise-equal
    /// models.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Train a hidden projection layer on top of the word vectors.
    #[arg(long)]
    hidden: bool,
    /// Lowercase text during tokenization (labels are never lowercased).
    #[arg(long)]
    lowercase: bool,
}

#[derive(Args)]
struct PredictArgs {
    /// Model file.
    #[arg(long)]
    model: PathBuf,
    /// Lines to classify; `__label__` tokens are ignored, so a labeled
    /// corpus works as input.
    #[arg(long)]
    input: PathBuf,
    /// Append the full class distribution after the predicted label.
    #[arg(long)]
    probs: bool,
}

#[derive(Args)]
struct TransformArgs {
    /// Model file to transform.
    #[arg(long)]
    model: PathBuf,
    /// Where to write the transformed model.
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// First model file.
    #[arg(long)]
    model_a: PathBuf,
    /// Second model file (must share the first one's vocabulary).
    #[arg(long)]
    model_b: PathBuf,
    /// Documents to compare on; labels are ignored.
    #[arg(long)]
    input: PathBuf,
    /// Maximum per-class probability difference for strict equivalence.
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tol: f64,
}

#[derive(Args)]
struct AdversarialArgs {
    /// Number of classes (and words), 2..=16.
    #[arg(long)]
    m: usize,
    /// Word-vector dimension of the random model; must be below --m.
    #[arg(long)]
    dim: usize,
    /// Seed for the random model.
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct BenchArgs {
    /// Model file.
    #[arg(long)]
    model: PathBuf,
    /// Documents to measure on; labels are ignored.
    #[arg(long)]
    input: PathBuf,
    /// Timed passes over the document set.
    #[arg(long, default_value_t = 5)]
    repeat: usize,
}

/// A domain failure: the owning module's error name plus a message.
struct CliError {
    name: String,
    message: String,
}

impl CliError {
    fn new(name: impl Into<String>, message: impl Into<String>) -> Self {
        CliError {
            name: name.into(),
            message: message.into(),
        }
    }
}

macro_rules! from_module_error {
    ($($ty:ty),+) => {$(
        impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::new(e.name(), e.to_string())
            }
        }
    )+};
}

from_module_error!(
    lbowkit::corpus::CorpusError,
    lbowkit::model::ModelError,
    lbowkit::train::TrainError,
    lbowkit::transforms::TransformError,
    lbowkit::adversarial::AdversarialError,
    lbowkit::persist::PersistError
);

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::new("Io", e.to_string())
    }
}

fn open_input(path: &PathBuf) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::new("Io", format!("{}: {e}", path.display())))
}

fn load_classifier(path: &PathBuf) -> Result<TextClassifier, CliError> {
    load_model(path).map_err(|e| CliError::new(e.name(), format!("{}: {e}", path.display())))
}

fn save_classifier(classifier: &TextClassifier, path: &PathBuf) -> Result<(), CliError> {
    save_model(classifier, path).map_err(|e| CliError::new(e.name(), format!("{}: {e}", path.display())))
}

fn describe(model: &LBoWModel) -> String {
    format!(
        "m={} n={} hidden={} softmax={}",
        model.num_classes(),
        model.dim(),
        if model.hidden().is_some() { "yes" } else { "no" },
        match model.variant() {
            SoftmaxVariant::Full => "full",
            SoftmaxVariant::Reduced => "reduced",
        }
    )
}

/// Reads non-blank input lines as documents over the classifier's
/// vocabulary, ignoring label tokens.
fn read_documents(
    reader: impl BufRead,
    classifier: &TextClassifier,
) -> Result<Vec<Document>, CliError> {
    let mut docs = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed = parse_labeled_line(&line, false)
            .map_err(|e| CliError::new(e.name(), format!("line {}: {e}", i + 1)))?;
        let doc = classifier
            .encode(&parsed.tokens)
            .map_err(|e| CliError::new(e.name(), format!("line {}: {e}", i + 1)))?;
        docs.push(doc);
    }
    Ok(docs)
}

fn cmd_train(args: &TrainArgs) -> Result<ExitCode, CliError> {
    let cfg = TrainConfig {
        dim: args.dim,
        use_hidden: args.hidden,
        learning_rate: args.lr,
        epochs: args.epochs,
        min_count: args.min_count,
        seed: args.seed,
        lowercase: args.lowercase,
    };
    let (dataset, summary) = load_training_data(open_input(&args.input)?, cfg.min_count, cfg.lowercase)?;
    let run = train_with_history(&dataset, &cfg)?;
    let acc = accuracy(&run.model, dataset.documents())?;

    let classifier = TextClassifier::new(dataset.vocabulary().words().to_vec(), run.model)?;
    save_classifier(&classifier, &args.output)?;

    println!(
        "documents: {} (skipped {} blank lines, dropped {} rare tokens)",
        summary.documents, summary.blank_lines, summary.oov_dropped
    );
    for (i, loss) in run.epoch_losses.iter().enumerate() {
        println!("epoch {:>3}: loss {loss:.6}", i + 1);
    }
    println!("train-accuracy: {acc:.4}");
    println!("wrote {} ({})", args.output.display(), describe(classifier.model()));
    Ok(ExitCode::SUCCESS)
}

fn cmd_predict(args: &PredictArgs) -> Result<ExitCode, CliError> {
    let classifier = load_classifier(&args.model)?;
    let model = classifier.model();
    let mut failed = 0usize;
    let mut total = 0usize;
    for line in open_input(&args.input)?.lines() {
        let line = line?;
        total += 1;
        let outcome = parse_labeled_line(&line, false)
            .map_err(|e| e.name().to_string())
            .and_then(|parsed| {
                classifier
                    .encode(&parsed.tokens)
                    .map_err(|e| e.name().to_string())
            });
        match outcome {
            Ok(doc) => {
                let probs = model.probabilities(&doc).map_err(|e| CliError::from(e))?;
                let label = lbowkit::model::argmax(probs.probs());
                if args.probs {
                    let mut s = model.labels()[label].clone();
                    for p in probs.probs() {
                        s.push_str(&format!(" {p:.9}"));
                    }
                    println!("{s}");
                } else {
                    println!("{}", model.labels()[label]);
                }
            }
            Err(name) => {
                println!("__error__ {name}");
                failed += 1;
            }
        }
    }
    if failed > 0 {
        eprintln!("error: {failed} of {total} lines could not be classified");
        return Ok(ExitCode::FAILURE);
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_transform(
    args: &TransformArgs,
    op: fn(&LBoWModel) -> Result<LBoWModel, lbowkit::transforms::TransformError>,
) -> Result<ExitCode, CliError> {
    let classifier = load_classifier(&args.model)?;
    let transformed = op(classifier.model())?;
    let out = TextClassifier::new(classifier.words().to_vec(), transformed)?;
    save_classifier(&out, &args.output)?;
    println!("wrote {} ({})", args.output.display(), describe(out.model()));
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: &VerifyArgs) -> Result<ExitCode, CliError> {
    if !(args.tol.is_finite() && args.tol >= 0.0) {
        return Err(CliError::new(
            "InvalidTolerance",
            format!("--tol must be a finite non-negative number, got {}", args.tol),
        ));
    }
    let a = load_classifier(&args.model_a)?;
    let b = load_classifier(&args.model_b)?;
    if a.words() != b.words() {
        return Err(CliError::new(
            "VocabularyMismatch",
            "the two models were trained over different vocabularies",
        ));
    }
    let docs = read_documents(open_input(&args.input)?, &a)?;
    let report = verify_equivalence(a.model(), b.model(), &docs, args.tol)?;

    println!("model-a:             {}", describe(a.model()));
    println!("model-b:             {}", describe(b.model()));
    println!("documents:           {}", report.n_documents);
    println!("max-abs-prob-diff:   {:.3e}", report.max_abs_prob_diff);
    println!("label-disagreements: {}", report.n_label_disagreements);
    println!("plain-equivalent:    {}", report.plain);
    println!("strict-equivalent:   {} (tol {:e})", report.strict, args.tol);
    if report.strict {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::FAILURE)
    }
}

/// Formats a counterexample document as its word counts, e.g. `w0 x2 w3 x1`.
fn word_list(doc: &Document, words: &[String]) -> String {
    doc.index_counts()
        .into_iter()
        .map(|(w, c)| format!("{} x{c}", words[w]))
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_adversarial(args: &AdversarialArgs) -> Result<ExitCode, CliError> {
    let demo = lbowkit::adversarial::run_demo(args.m, args.dim, args.seed)?;
    let words = demo.model.labels();

    let coefficients = demo
        .certificate
        .coefficients()
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(" ");
    println!("classes:       {}", args.m);
    println!("dimension:     {}", args.dim);
    println!("seed:          {}", args.seed);
    println!("coefficients:  {coefficients}");
    println!(
        "sign-case:     {}",
        match demo.certificate.sign_case() {
            SignCase::AllSameSign => "all-same-sign",
            SignCase::MixedSigns => "mixed-signs",
        }
    );
    println!("doc-left:      {}", word_list(&demo.counterexample.doc_left, words));
    println!("doc-right:     {}", word_list(&demo.counterexample.doc_right, words));
    println!(
        "true-labels:   {} vs {}",
        words[demo.report.true_label_left], words[demo.report.true_label_right]
    );
    println!(
        "prediction:    {} (both documents)",
        words[demo.report.predicted]
    );
    println!(
        "misclassified: {} of 2",
        demo.report.misclassified_count()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_bench(args: &BenchArgs) -> Result<ExitCode, CliError> {
    if args.repeat < 1 {
        return Err(CliError::new(
            "InvalidRepeat",
            "--repeat must be at least 1",
        ));
    }
    let classifier = load_classifier(&args.model)?;
    let docs = read_documents(open_input(&args.input)?, &classifier)?;
    if docs.is_empty() {
        return Err(CliError::new(
            "EmptyDocument",
            "the input contains no documents to measure",
        ));
    }
    let report = run_bench(classifier.model(), &docs, args.repeat)?;

    println!("documents:           {}", report.n_documents);
    println!("repeat:              {}", report.repeat);
    for (name, model, stats) in [
        ("original", classifier.model().clone(), &report.original),
        ("compressed", compress(classifier.model())?, &report.compressed),
    ] {
        println!("{name}: {}", describe(&model));
        println!("  multiplies-total:   {}", stats.total_multiplies);
        println!("  multiplies-per-doc: {:.2}", stats.multiplies_per_document);
        println!("  docs-per-second:    {:.0}", stats.docs_per_second);
    }
    println!("multiply-ratio:      {:.4}", report.multiply_ratio);
    Ok(ExitCode::SUCCESS)
}

fn run(cli: &Cli) -> Result<ExitCode, CliError> {
    match &cli.command {
        Command::Train(args) => cmd_train(args),
        Command::Predict(args) => cmd_predict(args),
        Command::Fold(args) => cmd_transform(args, fold_hidden_layer),
        Command::Reduce(args) => cmd_transform(args, shift_reduce),
        Command::Compress(args) => cmd_transform(args, compress),
        Command::Verify(args) => cmd_verify(args),
        Command::Adversarial(args) => cmd_adversarial(args),
        Command::Bench(args) => cmd_bench(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    // Argument-range problems are usage errors (exit 2), same as parse
    // failures, not domain errors.
    if let Command::Adversarial(args) = &cli.command {
        if args.m < 2 || args.m > 16 {
            eprintln!("usage error: --m must be in 2..=16, got {}", args.m);
            return ExitCode::from(2);
        }
        if args.dim < 1 || args.dim >= args.m {
            eprintln!(
                "usage error: --dim must satisfy 1 <= dim < m, got dim={} m={}",
                args.dim, args.m
            );
            return ExitCode::from(2);
        }
    }

    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}: {}", e.name, e.message);
            ExitCode::FAILURE
        }
    }
}
