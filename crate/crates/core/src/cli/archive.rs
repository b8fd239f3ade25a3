//! JSON model archives.
//!
//! An archive stores counts, sums and sample statistics plus the
//! hyperparameters; conditionals are recomputed when it is loaded.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::classifier::{Classifier, TextFrontend};
use crate::error::{Error, Result};
use crate::models::{
    BernoulliModel, CategoricalModel, ClassPriors, GaussianModel, MultinomialModel,
    NaiveBayesModel,
};
use crate::text_pipeline::{PipelineConfig, StopList, StopListOrigin};
use crate::vectorizer::{Vocabulary, WeightingMode};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelArchive {
    pub format_version: u32,
    #[serde(flatten)]
    pub parameters: Parameters,
    pub priors: PriorRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<TextRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorRecord {
    pub labels: Vec<String>,
    pub counts: Vec<u64>,
    /// Present only when the priors were set explicitly.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probabilities: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextRecord {
    pub pipeline: PipelineConfig,
    pub weighting: WeightingMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop_list: Option<StopListRecord>,
    pub vocabulary: VocabularyRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StopListRecord {
    pub origin: StopListOrigin,
    pub words: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VocabularyRecord {
    pub tokens: Vec<String>,
    pub document_frequency: Vec<u64>,
    pub total_documents: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", content = "parameters", rename_all = "snake_case")]
pub enum Parameters {
    /// `positions[i][label][value]` = count.
    Categorical {
        positions: Vec<BTreeMap<String, BTreeMap<String, u64>>>,
    },
    /// `document_counts[class][token id]`.
    Bernoulli { document_counts: Vec<Vec<u64>> },
    /// `term_sums[class][token id]`.
    Multinomial { term_sums: Vec<Vec<f64>> },
    /// Per class and feature.
    Gaussian {
        means: Vec<Vec<f64>>,
        stds: Vec<Vec<f64>>,
    },
}

fn prior_record(p: &ClassPriors) -> PriorRecord {
    PriorRecord {
        labels: p.labels().to_vec(),
        counts: p.counts().to_vec(),
        probabilities: p.is_overridden().then(|| p.probabilities().to_vec()),
    }
}

impl ModelArchive {
    pub fn from_classifier(classifier: &Classifier) -> Self {
        let model = classifier.model();
        let priors = prior_record(model.priors());
        let (parameters, alpha) = match &model {
            NaiveBayesModel::Categorical(m) => {
                let positions = (0..m.arity())
                    .map(|i| {
                        m.priors()
                            .labels()
                            .iter()
                            .cloned()
                            .zip(m.counts(i).iter().cloned())
                            .collect()
                    })
                    .collect();
                (Parameters::Categorical { positions }, Some(m.alpha()))
            }
            NaiveBayesModel::Bernoulli(m) => (
                Parameters::Bernoulli {
                    document_counts: m.document_counts().to_vec(),
                },
                None,
            ),
            NaiveBayesModel::Multinomial(m) => (
                Parameters::Multinomial {
                    term_sums: m.term_sums().to_vec(),
                },
                Some(m.alpha()),
            ),
            NaiveBayesModel::Gaussian(m) => (
                Parameters::Gaussian {
                    means: m.means().to_vec(),
                    stds: m.stds().to_vec(),
                },
                None,
            ),
        };
        let text = classifier.frontend().map(|f| TextRecord {
            pipeline: f.pipeline.clone(),
            weighting: f.weighting,
            stop_list: f.stops.as_ref().map(|s| StopListRecord {
                origin: s.origin(),
                words: s.words().iter().cloned().collect(),
            }),
            vocabulary: VocabularyRecord {
                tokens: f.vocab.tokens().to_vec(),
                document_frequency: f.vocab.document_frequencies().to_vec(),
                total_documents: f.vocab.total_documents(),
            },
        });
        ModelArchive {
            format_version: FORMAT_VERSION,
            parameters,
            priors,
            alpha,
            text,
        }
    }

    pub fn into_classifier(self) -> Result<Classifier> {
        let bad = |e: Error| Error::Archive(e.to_string());
        let mut priors =
            ClassPriors::from_counts(self.priors.labels, self.priors.counts).map_err(bad)?;
        if let Some(p) = &self.priors.probabilities {
            priors = priors.with_probabilities(p).map_err(bad)?;
        }
        let alpha = || {
            self.alpha
                .ok_or_else(|| Error::Archive("missing alpha".into()))
        };
        let text = |v: usize| -> Result<TextFrontend> {
            let t = self
                .text
                .clone()
                .ok_or_else(|| Error::Archive("text model without pipeline section".into()))?;
            let vocab = Vocabulary::from_parts(
                t.vocabulary.tokens,
                t.vocabulary.document_frequency,
                t.vocabulary.total_documents,
            )
            .map_err(bad)?;
            if vocab.len() != v {
                return Err(Error::Archive(format!(
                    "parameters cover {v} tokens but the vocabulary has {}",
                    vocab.len()
                )));
            }
            t.pipeline.validate().map_err(bad)?;
            Ok(TextFrontend {
                pipeline: t.pipeline,
                stops: t.stop_list.map(|s| StopList::new(s.words, s.origin)),
                vocab,
                weighting: t.weighting,
            })
        };
        let width = |rows: usize, first: Option<usize>| if rows == 0 { 0 } else { first.unwrap_or(0) };
        Ok(match self.parameters {
            Parameters::Categorical { ref positions } => {
                let tables = positions
                    .iter()
                    .map(|by_label| {
                        priors
                            .labels()
                            .iter()
                            .map(|l| by_label.get(l).cloned().unwrap_or_default())
                            .collect()
                    })
                    .collect();
                Classifier::Categorical(
                    CategoricalModel::from_counts(priors, alpha()?, tables).map_err(bad)?,
                )
            }
            Parameters::Bernoulli {
                ref document_counts,
            } => {
                let v = width(document_counts.len(), document_counts.first().map(Vec::len));
                let frontend = text(v)?;
                let model =
                    BernoulliModel::from_counts(priors, document_counts.clone(), v).map_err(bad)?;
                Classifier::Text {
                    frontend,
                    model: model.into(),
                }
            }
            Parameters::Multinomial { ref term_sums } => {
                let v = width(term_sums.len(), term_sums.first().map(Vec::len));
                let frontend = text(v)?;
                let model = MultinomialModel::from_sums(priors, term_sums.clone(), v, alpha()?)
                    .map_err(bad)?;
                Classifier::Text {
                    frontend,
                    model: model.into(),
                }
            }
            Parameters::Gaussian { means, stds } => {
                Classifier::Gaussian(GaussianModel::from_parameters(priors, means, stds).map_err(bad)?)
            }
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("archive is plain data")
    }

    pub fn from_json(body: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(body)
            .map_err(|e| Error::Archive(format!("not a JSON document: {e}")))?;
        match value.get("format_version").and_then(serde_json::Value::as_u64) {
            Some(v) if v == u64::from(FORMAT_VERSION) => {}
            Some(v) => {
                return Err(Error::Archive(format!(
                    "unsupported format_version {v} (expected {FORMAT_VERSION})"
                )))
            }
            None => return Err(Error::Archive("missing format_version".into())),
        }
        serde_json::from_value(value).map_err(|e| Error::Archive(format!("malformed archive: {e}")))
    }
}

pub fn save(classifier: &Classifier, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut body = ModelArchive::from_classifier(classifier).to_json();
    body.push('\n');
    fs::write(path, body).map_err(|e| Error::io(path, e))
}

pub fn load(path: impl AsRef<Path>) -> Result<Classifier> {
    let path = path.as_ref();
    let body = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    ModelArchive::from_json(&body)?.into_classifier()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::{StopWords, TextOptions};
    use crate::models::Variant;

    fn docs() -> Vec<(&'static str, &'static str)> {
        vec![
            ("spam", "win a free prize"),
            ("spam", "free cash now"),
            ("ham", "lunch at noon"),
            ("ham", "see you soon at lunch"),
        ]
    }

    fn round_trip(c: &Classifier) -> Classifier {
        let json = ModelArchive::from_classifier(c).to_json();
        ModelArchive::from_json(&json).unwrap().into_classifier().unwrap()
    }

    #[test]
    fn text_models_round_trip() {
        for variant in [Variant::Multinomial, Variant::Bernoulli] {
            let mut o = TextOptions::new(variant);
            o.stop_words = StopWords::TopN(1);
            o.stemming = true;
            let c = Classifier::train_text(&docs(), &o).unwrap();
            assert_eq!(round_trip(&c), c);
        }
    }

    #[test]
    fn tuple_models_round_trip() {
        let c = Classifier::train_categorical(&[("+", "a,b"), ("-", "a,c")], 0.5).unwrap();
        assert_eq!(round_trip(&c), c);
        let c = Classifier::train_gaussian(&[("x", "0.1,3"), ("x", "0.7,1e-3"), ("y", "2,2"), ("y", "1,1")])
            .unwrap();
        assert_eq!(round_trip(&c), c);
    }

    #[test]
    fn overridden_priors_survive() {
        let c = Classifier::train_categorical(&[("+", "a"), ("+", "b"), ("-", "a")], 1.0).unwrap();
        let Classifier::Categorical(m) = &c else { unreachable!() };
        let m = m.with_priors(m.priors().uniform()).unwrap();
        let c = Classifier::Categorical(m);
        assert_eq!(round_trip(&c), c);
    }

    #[test]
    fn layout() {
        let c = Classifier::train_text(&docs(), &TextOptions::new(Variant::Multinomial)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&ModelArchive::from_classifier(&c).to_json()).unwrap();
        assert_eq!(v["format_version"], 1);
        assert_eq!(v["variant"], "multinomial");
        assert_eq!(v["priors"]["counts"], serde_json::json!([2, 2]));
        assert_eq!(v["text"]["weighting"], "raw_count");
        assert!(v["parameters"]["term_sums"].is_array());
    }

    #[test]
    fn corrupt_archives() {
        assert!(matches!(ModelArchive::from_json("{"), Err(Error::Archive(_))));
        assert!(matches!(
            ModelArchive::from_json(r#"{"format_version": 99}"#),
            Err(Error::Archive(m)) if m.contains("format_version 99")
        ));
        assert!(matches!(ModelArchive::from_json("{}"), Err(Error::Archive(_))));
        let c = Classifier::train_text(&docs(), &TextOptions::new(Variant::Multinomial)).unwrap();
        let mut a = ModelArchive::from_classifier(&c);
        a.text.as_mut().unwrap().vocabulary.tokens.pop();
        a.text.as_mut().unwrap().vocabulary.document_frequency.pop();
        assert!(a.into_classifier().is_err());
    }
}
