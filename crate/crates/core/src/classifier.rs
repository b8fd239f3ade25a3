//! End-to-end classifiers: preprocessing, vectorization and a trained model
//! bundled together so raw inputs can be classified directly.

use crate::error::{Error, Result};
use crate::models::{
    BernoulliModel, CategoricalModel, Features, GaussianModel, MultinomialModel, NaiveBayesModel,
    PosteriorReport, Variant,
};
use crate::text_pipeline::{
    build_stop_list, run_pipeline, tokenize, PipelineConfig, StopList, StopWordMode, TokenStream,
};
use crate::vectorizer::{vectorize, SparseVector, Vocabulary, WeightingMode};

/// Where the stop list comes from when training a text model.
#[derive(Debug, Clone, PartialEq)]
pub enum StopWords {
    None,
    Dictionary(StopList),
    /// Built from the `n` most frequent training tokens.
    TopN(usize),
}

impl StopWords {
    fn mode(&self) -> StopWordMode {
        match self {
            StopWords::None => StopWordMode::None,
            StopWords::Dictionary(_) => StopWordMode::Dictionary,
            StopWords::TopN(n) => StopWordMode::FrequencyTopN(*n),
        }
    }
}

/// Options for training a Bernoulli or multinomial text model.
#[derive(Debug, Clone, PartialEq)]
pub struct TextOptions {
    pub variant: Variant,
    pub weighting: WeightingMode,
    pub alpha: f64,
    pub lowercase: bool,
    pub stemming: bool,
    pub ngram_size: usize,
    pub stop_words: StopWords,
}

impl TextOptions {
    /// Defaults for a variant: binary weights for Bernoulli, raw counts for
    /// multinomial, Laplace smoothing, lowercase unigrams.
    pub fn new(variant: Variant) -> Self {
        TextOptions {
            variant,
            weighting: default_weighting(variant).unwrap_or(WeightingMode::RawCount),
            alpha: 1.0,
            lowercase: true,
            stemming: false,
            ngram_size: 1,
            stop_words: StopWords::None,
        }
    }
}

pub fn default_weighting(variant: Variant) -> Option<WeightingMode> {
    match variant {
        Variant::Bernoulli => Some(WeightingMode::Binary),
        Variant::Multinomial => Some(WeightingMode::RawCount),
        Variant::Categorical | Variant::Gaussian => None,
    }
}

/// Bernoulli takes binary vectors; multinomial takes counts, tf or tf-idf.
pub fn check_weighting(variant: Variant, weighting: WeightingMode) -> Result<()> {
    let ok = match variant {
        Variant::Bernoulli => weighting == WeightingMode::Binary,
        Variant::Multinomial => weighting != WeightingMode::Binary,
        Variant::Categorical | Variant::Gaussian => false,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "weighting {weighting} cannot be used with the {variant} model"
        )))
    }
}

/// Text preprocessing and the vocabulary a text model was trained with.
#[derive(Debug, Clone, PartialEq)]
pub struct TextFrontend {
    pub pipeline: PipelineConfig,
    pub stops: Option<StopList>,
    pub vocab: Vocabulary,
    pub weighting: WeightingMode,
}

impl TextFrontend {
    pub fn tokens(&self, text: &str) -> Result<TokenStream> {
        run_pipeline(text, &self.pipeline, self.stops.as_ref())
    }

    pub fn vectorize(&self, text: &str) -> Result<SparseVector> {
        Ok(vectorize(&self.tokens(text)?, &self.vocab, self.weighting))
    }
}

#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum Classifier {
    Text {
        frontend: TextFrontend,
        model: NaiveBayesModel,
    },
    Categorical(CategoricalModel),
    Gaussian(GaussianModel),
}

/// Outcome of classifying one raw input.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub report: PosteriorReport,
    /// The input had no feature the model knows (no in-vocabulary token),
    /// or every class had zero likelihood; the label comes from the priors.
    pub degenerate: bool,
}

impl Prediction {
    pub fn label(&self) -> &str {
        self.report.label()
    }
}

impl Classifier {
    /// Trains a Bernoulli or multinomial model on `(label, text)` pairs.
    pub fn train_text<L: AsRef<str>, T: AsRef<str>>(
        docs: &[(L, T)],
        options: &TextOptions,
    ) -> Result<Self> {
        check_weighting(options.variant, options.weighting)?;
        if docs.is_empty() {
            return Err(Error::invalid("cannot train on an empty corpus"));
        }
        let pipeline = PipelineConfig {
            lowercase: options.lowercase,
            strip_punctuation: true,
            stop_word_mode: options.stop_words.mode(),
            stemming: options.stemming,
            ngram_size: options.ngram_size,
        };
        pipeline.validate()?;
        let stops = match &options.stop_words {
            StopWords::None => None,
            StopWords::Dictionary(list) => Some(list.clone()),
            StopWords::TopN(n) => {
                let raw: Vec<TokenStream> =
                    docs.iter().map(|(_, t)| tokenize(t.as_ref(), &pipeline)).collect();
                Some(build_stop_list(&raw, *n)?)
            }
        };
        let streams = docs
            .iter()
            .map(|(_, t)| run_pipeline(t.as_ref(), &pipeline, stops.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        let vocab = Vocabulary::build(&streams)?;
        let vectors: Vec<SparseVector> = streams
            .iter()
            .map(|s| vectorize(s, &vocab, options.weighting))
            .collect();
        let labels: Vec<&str> = docs.iter().map(|(l, _)| l.as_ref()).collect();
        let model: NaiveBayesModel = match options.variant {
            Variant::Bernoulli => BernoulliModel::fit(&vectors, &labels, &vocab)?.into(),
            Variant::Multinomial => {
                MultinomialModel::fit(&vectors, &labels, &vocab, options.alpha)?.into()
            }
            other => return Err(Error::invalid(format!("{other} is not a text model"))),
        };
        Ok(Classifier::Text {
            frontend: TextFrontend {
                pipeline,
                stops,
                vocab,
                weighting: options.weighting,
            },
            model,
        })
    }

    /// Trains on `(label, "v1,v2,...")` records.
    pub fn train_categorical<L: AsRef<str>, T: AsRef<str>>(
        records: &[(L, T)],
        alpha: f64,
    ) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::invalid("cannot train on an empty corpus"));
        }
        let samples: Vec<Vec<String>> =
            records.iter().map(|(_, t)| parse_categorical(t.as_ref())).collect();
        let labels: Vec<&str> = records.iter().map(|(l, _)| l.as_ref()).collect();
        Ok(Classifier::Categorical(CategoricalModel::fit(&samples, &labels, alpha)?))
    }

    /// Trains on `(label, "x1,x2,...")` records of real numbers.
    pub fn train_gaussian<L: AsRef<str>, T: AsRef<str>>(records: &[(L, T)]) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::invalid("cannot train on an empty corpus"));
        }
        let rows = records
            .iter()
            .map(|(_, t)| parse_numeric(t.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        let labels: Vec<&str> = records.iter().map(|(l, _)| l.as_ref()).collect();
        Ok(Classifier::Gaussian(GaussianModel::fit(&rows, &labels)?))
    }

    pub fn variant(&self) -> Variant {
        match self {
            Classifier::Text { model, .. } => model.variant(),
            Classifier::Categorical(_) => Variant::Categorical,
            Classifier::Gaussian(_) => Variant::Gaussian,
        }
    }

    /// The model as the shared enum. Clones for the non-text variants.
    pub fn model(&self) -> NaiveBayesModel {
        match self {
            Classifier::Text { model, .. } => model.clone(),
            Classifier::Categorical(m) => m.clone().into(),
            Classifier::Gaussian(m) => m.clone().into(),
        }
    }

    pub fn labels(&self) -> &[String] {
        match self {
            Classifier::Text { model, .. } => model.labels(),
            Classifier::Categorical(m) => m.priors().labels(),
            Classifier::Gaussian(m) => m.priors().labels(),
        }
    }

    pub fn frontend(&self) -> Option<&TextFrontend> {
        match self {
            Classifier::Text { frontend, .. } => Some(frontend),
            _ => None,
        }
    }

    /// Classifies one raw input: free text for text models, a comma- or
    /// whitespace-separated tuple for the others.
    pub fn predict(&self, input: &str) -> Result<Prediction> {
        let report = match self {
            Classifier::Text { frontend, model } => {
                let x = frontend.vectorize(input)?;
                if x.is_empty() {
                    model.prior_report()
                } else {
                    model.posterior_scores(Features::Sparse(&x))?
                }
            }
            Classifier::Categorical(m) => {
                let values = parse_categorical(input);
                NaiveBayesModel::from(m.clone()).posterior_scores(Features::Categorical(&values))?
            }
            Classifier::Gaussian(m) => {
                let x = parse_numeric(input)?;
                NaiveBayesModel::from(m.clone()).posterior_scores(Features::Continuous(&x))?
            }
        };
        Ok(Prediction {
            degenerate: report.degenerate,
            report,
        })
    }
}

fn split_fields(input: &str) -> Vec<&str> {
    let input = input.trim();
    if input.is_empty() {
        return Vec::new();
    }
    if input.contains(',') {
        input.split(',').map(str::trim).collect()
    } else {
        input.split_whitespace().collect()
    }
}

/// Splits a feature tuple on commas, or on whitespace when there are none.
pub fn parse_categorical(input: &str) -> Vec<String> {
    split_fields(input).into_iter().map(str::to_string).collect()
}

pub fn parse_numeric(input: &str) -> Result<Vec<f64>> {
    split_fields(input)
        .into_iter()
        .map(|f| {
            f.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::invalid(format!("{f:?} is not a finite number")))
        })
        .collect()
}
