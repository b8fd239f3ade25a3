//! The `nbtext` command line: `train`, `predict`, `evaluate` and `inspect`.
//!
//! Exit codes: 0 on success, 1 on runtime or I/O failure, 2 on usage errors.

pub mod archive;

use std::ffi::OsString;
use std::fs;
use std::io::{BufRead, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::classifier::{check_weighting, default_weighting, Classifier, StopWords, TextOptions};
use crate::error::Error;
use crate::evaluation::{evaluate, load_corpus, load_csv_corpus, split, LabeledCorpus};
use crate::models::{NaiveBayesModel, Variant};
use crate::text_pipeline::{StopList, StopWordMode};
use crate::vectorizer::WeightingMode;

pub use archive::ModelArchive;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "nbtext", version, about = "Naive Bayes text classification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit a model on a corpus and write it to an archive.
    Train(TrainArgs),
    /// Classify text with a trained archive.
    Predict(PredictArgs),
    /// Split a corpus, train on one part and score the other.
    Evaluate(EvaluateArgs),
    /// Show what an archive contains.
    Inspect(InspectArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Categorical,
    Bernoulli,
    Multinomial,
    Gaussian,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Categorical => Variant::Categorical,
            VariantArg::Bernoulli => Variant::Bernoulli,
            VariantArg::Multinomial => Variant::Multinomial,
            VariantArg::Gaussian => Variant::Gaussian,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

impl From<Switch> for bool {
    fn from(s: Switch) -> bool {
        s == Switch::On
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum StopWordsArg {
    None,
    Dictionary(PathBuf),
    Top(usize),
}

fn parse_stop_words(s: &str) -> Result<StopWordsArg, String> {
    if s == "none" {
        return Ok(StopWordsArg::None);
    }
    if let Some(path) = s.strip_prefix("dict:") {
        if path.is_empty() {
            return Err("dict: needs a file path".into());
        }
        return Ok(StopWordsArg::Dictionary(path.into()));
    }
    if let Some(n) = s.strip_prefix("top:") {
        return match n.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(StopWordsArg::Top(n)),
            _ => Err(format!("top:N needs a positive integer, got {n:?}")),
        };
    }
    Err("expected none, dict:PATH or top:N".into())
}

fn parse_weighting(s: &str) -> Result<WeightingMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_alpha(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(a) if a.is_finite() && a >= 0.0 => Ok(a),
        _ => Err(format!("alpha must be a finite number >= 0, got {s:?}")),
    }
}

fn parse_fraction(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(f) if f > 0.0 && f < 1.0 => Ok(f),
        _ => Err(format!("test fraction must lie strictly between 0 and 1, got {s:?}")),
    }
}

#[derive(Debug, Args)]
struct ModelOptions {
    /// Corpus: `label<TAB>text` for text models, `label,v1,v2,...` for
    /// categorical and Gaussian models.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "multinomial")]
    variant: VariantArg,
    /// binary, raw_count, normalized_tf or tfidf. Defaults to binary for
    /// bernoulli and raw_count for multinomial.
    #[arg(long, value_parser = parse_weighting)]
    weighting: Option<WeightingMode>,
    /// Additive smoothing for categorical and multinomial models.
    #[arg(long, value_parser = parse_alpha, default_value = "1.0")]
    alpha: f64,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    ngram: Option<u32>,
    /// none, dict:PATH or top:N.
    #[arg(long, value_parser = parse_stop_words)]
    stop_words: Option<StopWordsArg>,
    #[arg(long, value_enum)]
    stem: Option<Switch>,
    #[arg(long, value_enum)]
    lowercase: Option<Switch>,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[command(flatten)]
    options: ModelOptions,
    /// Where to write the archive.
    #[arg(long)]
    model: PathBuf,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[command(flatten)]
    options: ModelOptions,
    /// Also write the model trained on the training split.
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long, value_parser = parse_fraction, default_value = "0.2")]
    test_fraction: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Write the report as JSON.
    #[arg(long)]
    report_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    /// Print the normalized posterior of every class.
    #[arg(long)]
    probs: bool,
    /// Document to classify; one document per line is read from standard
    /// input when omitted.
    text: Vec<String>,
}

#[derive(Debug, Args)]
struct InspectArgs {
    #[arg(long)]
    model: PathBuf,
    /// List the k most probable tokens per class (text models).
    #[arg(long)]
    top_k: Option<usize>,
    /// Dump the vocabulary as `id<TAB>token<TAB>document_frequency`.
    #[arg(long)]
    vocab: bool,
}

enum Failure {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(Error::io("<stdio>", e))
    }
}

type CmdResult = Result<(), Failure>;

/// Runs the CLI with explicit streams and returns the exit code.
pub fn run<I, T>(
    args: I,
    stdin: &mut dyn BufRead,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                write!(stdout, "{rendered}")
            } else {
                write!(stderr, "{rendered}")
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Train(a) => cmd_train(a, stdout),
        Command::Predict(a) => cmd_predict(a, stdin, stdout, stderr),
        Command::Evaluate(a) => cmd_evaluate(a, stdout),
        Command::Inspect(a) => cmd_inspect(a, stdout),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Runtime(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_FAILURE
        }
    }
}

/// A validated training recipe.
enum Recipe {
    Text(TextOptions, Option<PathBuf>),
    Categorical(f64),
    Gaussian,
}

impl ModelOptions {
    fn recipe(&self) -> Result<Recipe, Failure> {
        let variant = Variant::from(self.variant);
        match variant {
            Variant::Bernoulli | Variant::Multinomial => {
                let weighting = self
                    .weighting
                    .or_else(|| default_weighting(variant))
                    .expect("text variants have a default weighting");
                check_weighting(variant, weighting).map_err(|e| Failure::Usage(e.to_string()))?;
                let mut o = TextOptions::new(variant);
                o.weighting = weighting;
                o.alpha = self.alpha;
                if let Some(n) = self.ngram {
                    o.ngram_size = n as usize;
                }
                if let Some(s) = self.stem {
                    o.stemming = s.into();
                }
                if let Some(l) = self.lowercase {
                    o.lowercase = l.into();
                }
                let mut dict = None;
                match &self.stop_words {
                    None | Some(StopWordsArg::None) => {}
                    Some(StopWordsArg::Top(n)) => o.stop_words = StopWords::TopN(*n),
                    Some(StopWordsArg::Dictionary(p)) => dict = Some(p.clone()),
                }
                Ok(Recipe::Text(o, dict))
            }
            Variant::Categorical | Variant::Gaussian => {
                let text_flags = [
                    (self.weighting.is_some(), "--weighting"),
                    (self.ngram.is_some(), "--ngram"),
                    (self.stop_words.is_some(), "--stop-words"),
                    (self.stem.is_some(), "--stem"),
                    (self.lowercase.is_some(), "--lowercase"),
                ];
                if let Some((_, flag)) = text_flags.iter().find(|(set, _)| *set) {
                    return Err(Failure::Usage(format!(
                        "{flag} only applies to text models, not {variant}"
                    )));
                }
                Ok(if variant == Variant::Categorical {
                    Recipe::Categorical(self.alpha)
                } else {
                    Recipe::Gaussian
                })
            }
        }
    }

    fn load(&self, recipe: &Recipe) -> Result<LabeledCorpus, Failure> {
        Ok(match recipe {
            Recipe::Text(..) => load_corpus(&self.input)?,
            Recipe::Categorical(_) | Recipe::Gaussian => load_csv_corpus(&self.input)?,
        })
    }
}

impl Recipe {
    fn train(&self, corpus: &LabeledCorpus) -> Result<Classifier, Failure> {
        let pairs = corpus.pairs();
        Ok(match self {
            Recipe::Text(options, dict) => {
                let mut options = options.clone();
                if let Some(path) = dict {
                    options.stop_words = StopWords::Dictionary(StopList::load_dictionary(path)?);
                }
                Classifier::train_text(&pairs, &options)?
            }
            Recipe::Categorical(alpha) => Classifier::train_categorical(&pairs, *alpha)?,
            Recipe::Gaussian => Classifier::train_gaussian(&pairs)?,
        })
    }
}

fn describe_training(c: &Classifier, out: &mut dyn Write) -> std::io::Result<()> {
    let model = c.model();
    let priors = model.priors();
    writeln!(out, "variant: {}", model.variant())?;
    writeln!(out, "documents: {}", priors.total())?;
    for (label, count) in priors.labels().iter().zip(priors.counts()) {
        writeln!(out, "  {label}: {count}")?;
    }
    if let Some(f) = c.frontend() {
        writeln!(out, "vocabulary: {} tokens", f.vocab.len())?;
    }
    Ok(())
}

fn cmd_train(args: TrainArgs, out: &mut dyn Write) -> CmdResult {
    let recipe = args.options.recipe()?;
    let corpus = args.options.load(&recipe)?;
    let classifier = recipe.train(&corpus)?;
    archive::save(&classifier, &args.model)?;
    describe_training(&classifier, out)?;
    writeln!(out, "model written to {}", args.model.display())?;
    Ok(())
}

fn cmd_evaluate(args: EvaluateArgs, out: &mut dyn Write) -> CmdResult {
    let recipe = args.options.recipe()?;
    let corpus = args.options.load(&recipe)?;
    let (train, test) = split(&corpus, args.test_fraction, args.seed).map_err(|e| match e {
        Error::InvalidArgument(m) => Failure::Usage(m),
        other => Failure::Runtime(other),
    })?;
    let classifier = recipe.train(&train)?;
    if let Some(path) = &args.model {
        archive::save(&classifier, path)?;
    }
    let report = evaluate(&classifier, &test)?;
    writeln!(out, "train: {} documents, test: {} documents", train.len(), test.len())?;
    write!(out, "{report}")?;
    if let Some(path) = &args.report_out {
        let mut body = serde_json::to_string_pretty(&report.to_json()).expect("plain data");
        body.push('\n');
        fs::write(path, body).map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}

fn cmd_predict(
    args: PredictArgs,
    stdin: &mut dyn BufRead,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let classifier = archive::load(&args.model)?;
    let docs: Vec<String> = if args.text.is_empty() {
        stdin
            .lines()
            .filter(|l| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
            .collect::<Result<_, _>>()?
    } else {
        vec![args.text.join(" ")]
    };
    for (i, doc) in docs.iter().enumerate() {
        let p = classifier.predict(doc)?;
        if p.degenerate {
            writeln!(
                err,
                "warning: document {}: no usable evidence, label chosen from class priors",
                i + 1
            )?;
        }
        write!(out, "{}", p.label())?;
        if args.probs {
            for (label, prob) in p.report.labels.iter().zip(&p.report.posteriors) {
                write!(out, "\t{label}={prob}")?;
            }
        }
        writeln!(out)?;
    }
    Ok(())
}

fn switch(b: bool) -> &'static str {
    if b {
        "on"
    } else {
        "off"
    }
}

fn cmd_inspect(args: InspectArgs, out: &mut dyn Write) -> CmdResult {
    let classifier = archive::load(&args.model)?;
    let model = classifier.model();
    let priors = model.priors();
    writeln!(out, "variant: {}", model.variant())?;
    writeln!(out, "classes: {}", priors.len())?;
    let note = if priors.is_overridden() { ", set explicitly" } else { "" };
    for (j, label) in priors.labels().iter().enumerate() {
        writeln!(
            out,
            "  {label}\tprior {:.3} ({}/{}{note})",
            priors.probability(j),
            priors.counts()[j],
            priors.total()
        )?;
    }
    match &model {
        NaiveBayesModel::Categorical(m) => {
            writeln!(out, "alpha: {}", m.alpha())?;
            writeln!(out, "positions: {}", m.arity())?;
        }
        NaiveBayesModel::Multinomial(m) => writeln!(out, "alpha: {}", m.alpha())?,
        NaiveBayesModel::Bernoulli(_) => writeln!(out, "alpha: 1 (fixed +1/+2 correction)")?,
        NaiveBayesModel::Gaussian(m) => writeln!(out, "features: {}", m.dim())?,
    }
    if let Some(f) = classifier.frontend() {
        let p = &f.pipeline;
        let stops = match p.stop_word_mode {
            StopWordMode::None => "none".to_string(),
            StopWordMode::Dictionary => "dictionary".to_string(),
            StopWordMode::FrequencyTopN(n) => format!("top:{n}"),
        };
        writeln!(out, "vocabulary: {} tokens", f.vocab.len())?;
        writeln!(out, "weighting: {}", f.weighting)?;
        writeln!(
            out,
            "pipeline: lowercase={} stem={} ngram={} stop_words={stops}",
            switch(p.lowercase),
            switch(p.stemming),
            p.ngram_size
        )?;
    }
    if let Some(k) = args.top_k {
        top_tokens(&classifier, &model, k, out)?;
    }
    if args.vocab {
        if let Some(f) = classifier.frontend() {
            write!(out, "{}", f.vocab.dump())?;
        }
    }
    Ok(())
}

fn top_tokens(
    classifier: &Classifier,
    model: &NaiveBayesModel,
    k: usize,
    out: &mut dyn Write,
) -> std::io::Result<()> {
    let Some(frontend) = classifier.frontend() else {
        writeln!(out, "top tokens: not available for {} models", model.variant())?;
        return Ok(());
    };
    writeln!(out, "top {k} tokens per class:")?;
    if k == 0 {
        return Ok(());
    }
    let v = frontend.vocab.len();
    for (j, label) in model.labels().iter().enumerate() {
        let score = |id: usize| match model {
            NaiveBayesModel::Multinomial(m) => m.conditional(id, j),
            NaiveBayesModel::Bernoulli(m) => m.probability(id, j),
            _ => unreachable!("text models are Bernoulli or multinomial"),
        };
        let mut ranked: Vec<(usize, f64)> = (0..v).map(|id| (id, score(id))).collect();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        writeln!(out, "  {label}")?;
        for (id, p) in ranked.into_iter().take(k) {
            writeln!(out, "    {}\t{p:.6}", frontend.vocab.token(id).unwrap_or("?"))?;
        }
    }
    Ok(())
}
