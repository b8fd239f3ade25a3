use crate::error::{Error, Result};
use crate::models::categorical::check_alpha;
use crate::models::priors::ClassPriors;
use crate::vectorizer::{SparseVector, Vocabulary};

/// Multinomial naive Bayes over term frequencies.
///
/// `P(x_i | j) = (tf(i, j) + alpha) / (N(j) + alpha * V)` with `tf(i, j)` the
/// summed frequency of token `i` over class `j`, `N(j)` the class total and
/// `V` the vocabulary size. Frequencies may be fractional (normalized tf or
/// tf-idf inputs).
#[derive(Debug, Clone, PartialEq)]
pub struct MultinomialModel {
    priors: ClassPriors,
    term_sums: Vec<Vec<f64>>,
    class_totals: Vec<f64>,
    alpha: f64,
    vocab_size: usize,
    log_conditionals: Vec<Vec<f64>>,
}

impl MultinomialModel {
    pub fn fit<L: AsRef<str>>(
        vectors: &[SparseVector],
        labels: &[L],
        vocab: &Vocabulary,
        alpha: f64,
    ) -> Result<Self> {
        check_alpha(alpha)?;
        if vectors.len() != labels.len() {
            return Err(Error::invalid(format!(
                "{} vectors but {} labels",
                vectors.len(),
                labels.len()
            )));
        }
        let priors = ClassPriors::fit(labels)?;
        let v = vocab.len();
        let mut sums = vec![vec![0.0; v]; priors.len()];
        for (x, class) in vectors.iter().zip(priors.class_indices(labels)) {
            for (id, value) in x.iter() {
                if id >= v {
                    return Err(Error::invalid(format!("token id {id} outside vocabulary")));
                }
                sums[class][id] += value;
            }
        }
        MultinomialModel::from_sums(priors, sums, v, alpha)
    }

    /// `term_sums[class][id]`: summed frequency of the token over the class.
    pub fn from_sums(
        priors: ClassPriors,
        term_sums: Vec<Vec<f64>>,
        vocab_size: usize,
        alpha: f64,
    ) -> Result<Self> {
        check_alpha(alpha)?;
        if term_sums.len() != priors.len() {
            return Err(Error::invalid("one sum row per class is required"));
        }
        let mut class_totals = Vec::with_capacity(priors.len());
        let mut log_conditionals = Vec::with_capacity(priors.len());
        for row in &term_sums {
            if row.len() != vocab_size {
                return Err(Error::invalid(format!(
                    "sum row has {} entries, vocabulary has {vocab_size}",
                    row.len()
                )));
            }
            if row.iter().any(|s| !s.is_finite() || *s < 0.0) {
                return Err(Error::invalid("term sums must be finite and non-negative"));
            }
            let total: f64 = row.iter().sum();
            let denom = total + alpha * vocab_size as f64;
            log_conditionals.push(
                row.iter()
                    .map(|&s| {
                        if denom > 0.0 {
                            ((s + alpha) / denom).ln()
                        } else {
                            f64::NEG_INFINITY
                        }
                    })
                    .collect(),
            );
            class_totals.push(total);
        }
        Ok(MultinomialModel {
            priors,
            term_sums,
            class_totals,
            alpha,
            vocab_size,
            log_conditionals,
        })
    }

    pub fn priors(&self) -> &ClassPriors {
        &self.priors
    }

    pub fn with_priors(&self, priors: ClassPriors) -> Result<Self> {
        if priors.labels() != self.priors.labels() {
            return Err(Error::invalid("replacement priors have different classes"));
        }
        Ok(MultinomialModel {
            priors,
            ..self.clone()
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn term_sums(&self) -> &[Vec<f64>] {
        &self.term_sums
    }

    pub fn class_total(&self, class: usize) -> f64 {
        self.class_totals[class]
    }

    /// Smoothed `P(token | class)`.
    pub fn conditional(&self, id: usize, class: usize) -> f64 {
        self.log_conditionals[class][id].exp()
    }

    pub fn log_conditional(&self, id: usize, class: usize) -> f64 {
        self.log_conditionals[class][id]
    }

    /// `sum_i tf_i * log P(x_i | class)` over the stored entries.
    pub fn log_likelihood(&self, x: &SparseVector, class: usize) -> Result<f64> {
        let logs = &self.log_conditionals[class];
        let mut total = 0.0;
        for (id, tf) in x.iter() {
            let lp = *logs
                .get(id)
                .ok_or_else(|| Error::invalid(format!("token id {id} outside vocabulary")))?;
            total += tf * lp;
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn priors() -> ClassPriors {
        ClassPriors::fit(&["j"]).unwrap()
    }

    #[test]
    fn laplace_conditionals() {
        let m = MultinomialModel::from_sums(priors(), vec![vec![5.0, 3.0, 0.0]], 3, 1.0).unwrap();
        let want = [6.0 / 11.0, 4.0 / 11.0, 1.0 / 11.0];
        for (id, w) in want.iter().enumerate() {
            assert!((m.conditional(id, 0) - w).abs() < 1e-15);
        }
        let s: f64 = (0..3).map(|i| m.conditional(i, 0)).sum();
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unsmoothed_zero() {
        let m = MultinomialModel::from_sums(priors(), vec![vec![5.0, 0.0]], 2, 0.0).unwrap();
        assert_eq!(m.conditional(1, 0), 0.0);
        let x = SparseVector::from_entries([(1, 1.0)], 1).unwrap();
        assert_eq!(m.log_likelihood(&x, 0).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn empty_input_has_zero_log_likelihood() {
        let m = MultinomialModel::from_sums(priors(), vec![vec![1.0]], 1, 1.0).unwrap();
        assert_eq!(m.log_likelihood(&SparseVector::default(), 0).unwrap(), 0.0);
    }

    #[test]
    fn rejects_negative_alpha() {
        assert!(matches!(
            MultinomialModel::from_sums(priors(), vec![vec![1.0]], 1, -1.0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(MultinomialModel::from_sums(priors(), vec![vec![1.0]], 1, f64::NAN).is_err());
    }
}
