use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Class labels with their training counts and prior probabilities.
///
/// Labels are kept in ascending lexicographic order; every per-class table
/// in the models is indexed the same way.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassPriors {
    labels: Vec<String>,
    counts: Vec<u64>,
    probabilities: Vec<f64>,
    overridden: bool,
}

impl ClassPriors {
    /// Maximum-likelihood priors: the relative frequency of each label.
    pub fn fit<S: AsRef<str>>(labels: &[S]) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::invalid("cannot fit priors on an empty label list"));
        }
        let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
        for l in labels {
            *counts.entry(l.as_ref()).or_default() += 1;
        }
        let (labels, counts) = counts.into_iter().map(|(l, c)| (l.to_string(), c)).unzip();
        ClassPriors::from_counts(labels, counts)
    }

    pub fn from_counts(labels: Vec<String>, counts: Vec<u64>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::invalid("at least one class is required"));
        }
        if labels.len() != counts.len() {
            return Err(Error::invalid("labels and counts differ in length"));
        }
        if labels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("class labels must be distinct and sorted"));
        }
        if counts.contains(&0) {
            return Err(Error::invalid("every class needs at least one sample"));
        }
        let total: u64 = counts.iter().sum();
        let probabilities = counts.iter().map(|&c| c as f64 / total as f64).collect();
        Ok(ClassPriors {
            labels,
            counts,
            probabilities,
            overridden: false,
        })
    }

    /// Replaces the estimated priors with user-chosen ones, keeping the
    /// training counts. Probabilities must lie in (0, 1] and sum to 1.
    pub fn with_probabilities(&self, probabilities: &[f64]) -> Result<Self> {
        if probabilities.len() != self.labels.len() {
            return Err(Error::invalid(format!(
                "expected {} prior probabilities, got {}",
                self.labels.len(),
                probabilities.len()
            )));
        }
        if probabilities.iter().any(|&p| !(p > 0.0 && p <= 1.0)) {
            return Err(Error::invalid("prior probabilities must lie in (0, 1]"));
        }
        let sum: f64 = probabilities.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("prior probabilities sum to {sum}, not 1")));
        }
        Ok(ClassPriors {
            labels: self.labels.clone(),
            counts: self.counts.clone(),
            probabilities: probabilities.to_vec(),
            overridden: true,
        })
    }

    /// Equal priors for every class.
    pub fn uniform(&self) -> Self {
        let p = 1.0 / self.labels.len() as f64;
        ClassPriors {
            labels: self.labels.clone(),
            counts: self.counts.clone(),
            probabilities: vec![p; self.labels.len()],
            overridden: true,
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, class: usize) -> &str {
        &self.labels[class]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels
            .binary_search_by(|l| l.as_str().cmp(label))
            .ok()
    }

    /// Training samples per class.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn probability(&self, class: usize) -> f64 {
        self.probabilities[class]
    }

    /// True when the probabilities were set explicitly rather than estimated.
    pub fn is_overridden(&self) -> bool {
        self.overridden
    }

    /// Maps each label of a training set to its class index.
    pub(crate) fn class_indices<S: AsRef<str>>(&self, labels: &[S]) -> Vec<usize> {
        labels
            .iter()
            .map(|l| self.index_of(l.as_ref()).expect("priors were fit on these labels"))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frequencies() {
        let labels: Vec<&str> = ["+"; 7].into_iter().chain(["-"; 5]).collect();
        let p = ClassPriors::fit(&labels).unwrap();
        assert_eq!(p.labels(), ["+", "-"]);
        assert_eq!(p.probability(0), 7.0 / 12.0);
        assert_eq!(p.probability(1), 5.0 / 12.0);

        let p = ClassPriors::fit(&["s", "s"]).unwrap();
        assert_eq!(p.probabilities(), [1.0]);

        let p = ClassPriors::fit(&["spam", "ham", "ham", "ham"]).unwrap();
        assert_eq!(p.probability(p.index_of("spam").unwrap()), 0.25);
        assert_eq!(p.probability(p.index_of("ham").unwrap()), 0.75);
    }

    #[test]
    fn empty_labels_rejected() {
        let none: [&str; 0] = [];
        assert!(matches!(ClassPriors::fit(&none), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn overrides() {
        let p = ClassPriors::fit(&["a", "b", "b"]).unwrap();
        let u = p.uniform();
        assert_eq!(u.probabilities(), [0.5, 0.5]);
        assert!(u.is_overridden());
        assert_eq!(u.counts(), [1, 2]);
        assert!(p.with_probabilities(&[0.9, 0.1]).is_ok());
        assert!(p.with_probabilities(&[1.0, 0.0]).is_err());
        assert!(p.with_probabilities(&[0.6, 0.6]).is_err());
        assert!(p.with_probabilities(&[1.0]).is_err());
    }

    #[test]
    fn from_counts_validation() {
        assert!(ClassPriors::from_counts(vec!["b".into(), "a".into()], vec![1, 1]).is_err());
        assert!(ClassPriors::from_counts(vec!["a".into()], vec![0]).is_err());
        assert!(ClassPriors::from_counts(vec![], vec![]).is_err());
    }
}
