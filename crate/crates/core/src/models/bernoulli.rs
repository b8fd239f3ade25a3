use crate::error::{Error, Result};
use crate::models::priors::ClassPriors;
use crate::vectorizer::{SparseVector, Vocabulary};

/// Multi-variate Bernoulli naive Bayes over token presence.
///
/// `P(x_i | j) = (df(i, j) + 1) / (df(j) + 2)` where `df(i, j)` is the number
/// of class-`j` documents containing token `i` and `df(j)` the number of
/// class-`j` documents. Every vocabulary token contributes to the likelihood,
/// present or not.
#[derive(Debug, Clone, PartialEq)]
pub struct BernoulliModel {
    priors: ClassPriors,
    document_counts: Vec<Vec<u64>>,
    vocab_size: usize,
    log_present: Vec<Vec<f64>>,
    log_absent: Vec<Vec<f64>>,
    log_all_absent: Vec<f64>,
}

impl BernoulliModel {
    /// `vectors` must be binary (every stored value exactly 1).
    pub fn fit<L: AsRef<str>>(
        vectors: &[SparseVector],
        labels: &[L],
        vocab: &Vocabulary,
    ) -> Result<Self> {
        if vectors.len() != labels.len() {
            return Err(Error::invalid(format!(
                "{} vectors but {} labels",
                vectors.len(),
                labels.len()
            )));
        }
        let priors = ClassPriors::fit(labels)?;
        let v = vocab.len();
        let mut counts = vec![vec![0u64; v]; priors.len()];
        for (x, class) in vectors.iter().zip(priors.class_indices(labels)) {
            for (id, value) in x.iter() {
                if value != 1.0 {
                    return Err(Error::invalid(format!(
                        "Bernoulli model needs binary vectors, found value {value} at id {id}"
                    )));
                }
                if id >= v {
                    return Err(Error::invalid(format!("token id {id} outside vocabulary")));
                }
                counts[class][id] += 1;
            }
        }
        BernoulliModel::from_counts(priors, counts, v)
    }

    /// `document_counts[class][id]`: documents of the class containing the token.
    pub fn from_counts(
        priors: ClassPriors,
        document_counts: Vec<Vec<u64>>,
        vocab_size: usize,
    ) -> Result<Self> {
        if document_counts.len() != priors.len() {
            return Err(Error::invalid("one count row per class is required"));
        }
        let mut log_present = Vec::with_capacity(priors.len());
        let mut log_absent = Vec::with_capacity(priors.len());
        for (class, row) in document_counts.iter().enumerate() {
            if row.len() != vocab_size {
                return Err(Error::invalid(format!(
                    "class {:?} has {} counts, vocabulary has {vocab_size}",
                    priors.label(class),
                    row.len()
                )));
            }
            let docs = priors.counts()[class];
            if let Some(&c) = row.iter().find(|&&c| c > docs) {
                return Err(Error::invalid(format!(
                    "class {:?}: token in {c} documents but class has only {docs}",
                    priors.label(class)
                )));
            }
            let denom = docs as f64 + 2.0;
            log_present.push(row.iter().map(|&c| ((c as f64 + 1.0) / denom).ln()).collect());
            log_absent.push(
                row.iter()
                    .map(|&c| ((docs - c) as f64 + 1.0) / denom)
                    .map(f64::ln)
                    .collect::<Vec<_>>(),
            );
        }
        let log_all_absent = log_absent.iter().map(|r: &Vec<f64>| r.iter().sum()).collect();
        Ok(BernoulliModel {
            priors,
            document_counts,
            vocab_size,
            log_present,
            log_absent,
            log_all_absent,
        })
    }

    pub fn priors(&self) -> &ClassPriors {
        &self.priors
    }

    pub fn with_priors(&self, priors: ClassPriors) -> Result<Self> {
        if priors.labels() != self.priors.labels() {
            return Err(Error::invalid("replacement priors have different classes"));
        }
        Ok(BernoulliModel {
            priors,
            ..self.clone()
        })
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn document_counts(&self) -> &[Vec<u64>] {
        &self.document_counts
    }

    /// `P(token present | class)`.
    pub fn probability(&self, id: usize, class: usize) -> f64 {
        (self.document_counts[class][id] as f64 + 1.0)
            / (self.priors.counts()[class] as f64 + 2.0)
    }

    /// Sum over every vocabulary id of `b log p + (1 - b) log(1 - p)`, with
    /// `b = 1` for ids stored in `x`.
    pub fn log_likelihood(&self, x: &SparseVector, class: usize) -> Result<f64> {
        let present = &self.log_present[class];
        let absent = &self.log_absent[class];
        let mut total = self.log_all_absent[class];
        for (id, _) in x.iter() {
            if id >= self.vocab_size {
                return Err(Error::invalid(format!("token id {id} outside vocabulary")));
            }
            total += present[id] - absent[id];
        }
        Ok(total)
    }
}
