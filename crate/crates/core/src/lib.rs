//! Naive Bayes text classification.
//!
//! The crate is organised the way data flows through a classifier:
//!
//! - [`text_pipeline`] turns raw text into tokens (tokenization, stop words,
//!   Porter stemming, n-grams).
//! - [`vectorizer`] builds a [`Vocabulary`] and turns token streams into
//!   sparse binary, count, tf or tf-idf vectors.
//! - [`models`] fits and applies the categorical, multi-variate Bernoulli,
//!   multinomial and Gaussian naive Bayes variants. All scoring happens in
//!   log space.
//! - [`evaluation`] loads labelled corpora, splits them reproducibly and
//!   scores a classifier.
//! - [`cli`] persists models as JSON archives and implements the `nbtext`
//!   command line.

pub mod classifier;
pub mod cli;
pub mod error;
pub mod evaluation;
pub mod models;
pub mod text_pipeline;
pub mod vectorizer;

pub use error::{Error, Result};
pub use models::{
    BernoulliModel, CategoricalModel, ClassPriors, Features, GaussianModel, MultinomialModel,
    NaiveBayesModel, PosteriorReport,
};
pub use text_pipeline::{PipelineConfig, StopList, StopWordMode, TokenStream};
pub use vectorizer::{SparseVector, Vocabulary, WeightingMode};
