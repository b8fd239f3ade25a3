use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::models::priors::ClassPriors;

/// Naive Bayes over categorical feature tuples with additive smoothing.
///
/// The conditional of value `v` at position `i` given class `j` is
/// `(N(v, j) + alpha) / (N(j) + alpha * K_i)`, where `K_i` counts the
/// distinct training values at position `i`, plus one when `v` itself was
/// never seen there.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoricalModel {
    priors: ClassPriors,
    alpha: f64,
    positions: Vec<Position>,
}

#[derive(Debug, Clone, PartialEq)]
struct Position {
    known: BTreeSet<String>,
    /// Per class: value -> count.
    counts: Vec<BTreeMap<String, u64>>,
}

impl CategoricalModel {
    pub fn fit<S: AsRef<str>, L: AsRef<str>>(
        samples: &[Vec<S>],
        labels: &[L],
        alpha: f64,
    ) -> Result<Self> {
        check_alpha(alpha)?;
        if samples.len() != labels.len() {
            return Err(Error::invalid(format!(
                "{} samples but {} labels",
                samples.len(),
                labels.len()
            )));
        }
        let priors = ClassPriors::fit(labels)?;
        let arity = samples[0].len();
        if arity == 0 {
            return Err(Error::invalid("samples need at least one feature"));
        }
        if let Some(i) = samples.iter().position(|s| s.len() != arity) {
            return Err(Error::invalid(format!(
                "sample {i} has {} values, expected {arity}",
                samples[i].len()
            )));
        }
        let mut tables = vec![vec![BTreeMap::<String, u64>::new(); priors.len()]; arity];
        for (sample, class) in samples.iter().zip(priors.class_indices(labels)) {
            for (table, value) in tables.iter_mut().zip(sample) {
                *table[class].entry(value.as_ref().to_string()).or_default() += 1;
            }
        }
        CategoricalModel::from_counts(priors, alpha, tables)
    }

    /// `tables[position][class]` maps values to counts. Each class's counts
    /// at every position must add up to that class's sample count.
    pub fn from_counts(
        priors: ClassPriors,
        alpha: f64,
        tables: Vec<Vec<BTreeMap<String, u64>>>,
    ) -> Result<Self> {
        check_alpha(alpha)?;
        let positions = tables
            .into_iter()
            .enumerate()
            .map(|(i, counts)| {
                if counts.len() != priors.len() {
                    return Err(Error::invalid(format!(
                        "position {i} has {} class tables, expected {}",
                        counts.len(),
                        priors.len()
                    )));
                }
                for (class, table) in counts.iter().enumerate() {
                    let n: u64 = table.values().sum();
                    if n != priors.counts()[class] {
                        return Err(Error::invalid(format!(
                            "position {i}, class {:?}: counts sum to {n}, expected {}",
                            priors.label(class),
                            priors.counts()[class]
                        )));
                    }
                }
                let known = counts
                    .iter()
                    .flat_map(|t| t.iter().filter(|(_, &c)| c > 0).map(|(v, _)| v.clone()))
                    .collect();
                Ok(Position { known, counts })
            })
            .collect::<Result<Vec<_>>>()?;
        if positions.is_empty() {
            return Err(Error::invalid("categorical model needs at least one position"));
        }
        Ok(CategoricalModel {
            priors,
            alpha,
            positions,
        })
    }

    pub fn priors(&self) -> &ClassPriors {
        &self.priors
    }

    pub fn with_priors(&self, priors: ClassPriors) -> Result<Self> {
        if priors.labels() != self.priors.labels() {
            return Err(Error::invalid("replacement priors have different classes"));
        }
        Ok(CategoricalModel {
            priors,
            ..self.clone()
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Number of feature positions.
    pub fn arity(&self) -> usize {
        self.positions.len()
    }

    /// Distinct values seen at `position` during training.
    pub fn known_values(&self, position: usize) -> &BTreeSet<String> {
        &self.positions[position].known
    }

    pub fn count(&self, position: usize, class: usize, value: &str) -> u64 {
        self.positions[position].counts[class]
            .get(value)
            .copied()
            .unwrap_or(0)
    }

    /// Per-class value counts at `position`.
    pub fn counts(&self, position: usize) -> &[BTreeMap<String, u64>] {
        &self.positions[position].counts
    }

    /// Smoothed `P(value | class)` at `position`.
    pub fn conditional(&self, position: usize, value: &str, class: usize) -> f64 {
        let pos = &self.positions[position];
        let k = pos.known.len() + usize::from(!pos.known.contains(value));
        let n = self.priors.counts()[class] as f64;
        let c = self.count(position, class, value) as f64;
        (c + self.alpha) / (n + self.alpha * k as f64)
    }

    pub fn log_likelihood<S: AsRef<str>>(&self, values: &[S], class: usize) -> Result<f64> {
        if values.len() != self.arity() {
            return Err(Error::invalid(format!(
                "query has {} values, model expects {}",
                values.len(),
                self.arity()
            )));
        }
        Ok(values
            .iter()
            .enumerate()
            .map(|(i, v)| self.conditional(i, v.as_ref(), class).ln())
            .sum())
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("alpha must be a finite value >= 0, got {alpha}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smoothed_single_position() {
        let samples = vec![vec!["a"], vec!["a"], vec!["b"]];
        let m = CategoricalModel::fit(&samples, &["c", "c", "c"], 1.0).unwrap();
        assert!((m.conditional(0, "a", 0) - 0.6).abs() < 1e-15);
        assert!((m.conditional(0, "b", 0) - 0.4).abs() < 1e-15);
        // unseen value widens K to 3
        assert!((m.conditional(0, "z", 0) - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn unsmoothed_unseen_value_is_impossible() {
        let samples = vec![vec!["a"], vec!["b"]];
        let m = CategoricalModel::fit(&samples, &["x", "y"], 0.0).unwrap();
        assert_eq!(m.conditional(0, "q", 0), 0.0);
        assert_eq!(m.log_likelihood(&["q"], 1).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn arity_errors() {
        let samples = vec![vec!["a", "b"], vec!["a"]];
        assert!(matches!(
            CategoricalModel::fit(&samples, &["x", "y"], 1.0),
            Err(Error::InvalidArgument(_))
        ));
        let samples = vec![vec!["a"]];
        let m = CategoricalModel::fit(&samples, &["x"], 1.0).unwrap();
        assert!(m.log_likelihood(&["a", "b"], 0).is_err());
        assert!(CategoricalModel::fit(&samples, &["x"], -0.5).is_err());
        assert!(CategoricalModel::fit(&samples, &["x", "y"], 1.0).is_err());
    }

    #[test]
    fn from_counts_rejects_inconsistent_totals() {
        let priors = ClassPriors::fit(&["x", "x"]).unwrap();
        let table = BTreeMap::from([("a".to_string(), 1u64)]);
        assert!(CategoricalModel::from_counts(priors, 1.0, vec![vec![table]]).is_err());
    }
}
