use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::models::priors::ClassPriors;

/// Smallest standard deviation the model will store.
pub const SIGMA_FLOOR: f64 = 1e-9;

/// Normal density with mean `mean` and standard deviation `std`.
pub fn gaussian_density(x: f64, mean: f64, std: f64) -> f64 {
    let z = (x - mean) / std;
    (-0.5 * z * z).exp() / (std * (2.0 * PI).sqrt())
}

pub fn gaussian_log_density(x: f64, mean: f64, std: f64) -> f64 {
    let z = (x - mean) / std;
    -0.5 * z * z - std.ln() - 0.5 * (2.0 * PI).ln()
}

/// Gaussian naive Bayes: one independent normal per class and feature.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianModel {
    priors: ClassPriors,
    means: Vec<Vec<f64>>,
    stds: Vec<Vec<f64>>,
}

impl GaussianModel {
    /// Means and population standard deviations per class and feature.
    /// Every class needs at least two rows.
    pub fn fit<L: AsRef<str>>(rows: &[Vec<f64>], labels: &[L]) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::invalid(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        let priors = ClassPriors::fit(labels)?;
        let dim = rows[0].len();
        if dim == 0 {
            return Err(Error::invalid("rows need at least one feature"));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::invalid(format!(
                    "row {i} has {} features, expected {dim}",
                    row.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid(format!("row {i} has a non-finite value")));
            }
        }
        if let Some(class) = priors.counts().iter().position(|&c| c < 2) {
            return Err(Error::invalid(format!(
                "class {:?} has fewer than 2 samples",
                priors.label(class)
            )));
        }
        let classes = priors.class_indices(labels);
        let mut sums = vec![vec![0.0; dim]; priors.len()];
        for (row, &c) in rows.iter().zip(&classes) {
            for (s, v) in sums[c].iter_mut().zip(row) {
                *s += v;
            }
        }
        let means: Vec<Vec<f64>> = sums
            .into_iter()
            .zip(priors.counts())
            .map(|(s, &n)| s.into_iter().map(|v| v / n as f64).collect())
            .collect();
        let mut sq = vec![vec![0.0; dim]; priors.len()];
        for (row, &c) in rows.iter().zip(&classes) {
            for ((acc, v), m) in sq[c].iter_mut().zip(row).zip(&means[c]) {
                *acc += (v - m) * (v - m);
            }
        }
        let stds = sq
            .into_iter()
            .zip(priors.counts())
            .map(|(s, &n)| {
                s.into_iter()
                    .map(|v| (v / n as f64).sqrt().max(SIGMA_FLOOR))
                    .collect()
            })
            .collect();
        GaussianModel::from_parameters(priors, means, stds)
    }

    pub fn from_parameters(
        priors: ClassPriors,
        means: Vec<Vec<f64>>,
        stds: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if means.len() != priors.len() || stds.len() != priors.len() {
            return Err(Error::invalid("one mean and std row per class is required"));
        }
        let dim = means[0].len();
        for (m, s) in means.iter().zip(&stds) {
            if m.len() != dim || s.len() != dim {
                return Err(Error::invalid("inconsistent feature dimensionality"));
            }
            if m.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid("means must be finite"));
            }
            if s.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                return Err(Error::invalid("standard deviations must be finite and positive"));
            }
        }
        Ok(GaussianModel { priors, means, stds })
    }

    pub fn priors(&self) -> &ClassPriors {
        &self.priors
    }

    pub fn with_priors(&self, priors: ClassPriors) -> Result<Self> {
        if priors.labels() != self.priors.labels() {
            return Err(Error::invalid("replacement priors have different classes"));
        }
        Ok(GaussianModel {
            priors,
            ..self.clone()
        })
    }

    pub fn dim(&self) -> usize {
        self.means[0].len()
    }

    pub fn means(&self) -> &[Vec<f64>] {
        &self.means
    }

    pub fn stds(&self) -> &[Vec<f64>] {
        &self.stds
    }

    pub fn log_likelihood(&self, x: &[f64], class: usize) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::invalid(format!(
                "input has {} features, model expects {}",
                x.len(),
                self.dim()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("input features must be finite"));
        }
        Ok(x.iter()
            .zip(&self.means[class])
            .zip(&self.stds[class])
            .map(|((&v, &m), &s)| gaussian_log_density(v, m, s))
            .sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_and_population_std() {
        let m = GaussianModel::fit(&[vec![4.0], vec![6.0]], &["c", "c"]).unwrap();
        assert_eq!(m.means()[0][0], 5.0);
        assert_eq!(m.stds()[0][0], 1.0);
    }

    #[test]
    fn constant_feature_is_floored() {
        let m = GaussianModel::fit(&[vec![3.0], vec![3.0]], &["c", "c"]).unwrap();
        assert_eq!(m.stds()[0][0], SIGMA_FLOOR);
        let ll = m.log_likelihood(&[3.0], 0).unwrap();
        assert!(ll.is_finite());
    }

    #[test]
    fn density_at_mean() {
        let d = gaussian_density(0.0, 0.0, 1.0);
        assert!((d - 0.398_942_280_401_432_7).abs() < 1e-15);
        assert!((gaussian_log_density(2.0, 1.0, 0.5) - gaussian_density(2.0, 1.0, 0.5).ln()).abs() < 1e-12);
    }

    #[test]
    fn needs_two_samples_per_class() {
        let rows = [vec![1.0], vec![2.0], vec![3.0]];
        assert!(matches!(
            GaussianModel::fit(&rows, &["a", "a", "b"]),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn dimension_checks() {
        assert!(GaussianModel::fit(&[vec![1.0], vec![2.0, 3.0]], &["a", "a"]).is_err());
        let m = GaussianModel::fit(&[vec![1.0], vec![2.0]], &["a", "a"]).unwrap();
        assert!(m.log_likelihood(&[1.0, 2.0], 0).is_err());
        assert!(m.log_likelihood(&[f64::NAN], 0).is_err());
    }
}
