//! The naive Bayes family.
//!
//! Every variant stores raw counts or sample statistics and derives its
//! conditionals from them. Scores are log prior plus log likelihood; the
//! evidence term is only applied when normalized posteriors are requested.

mod bernoulli;
mod categorical;
mod gaussian;
mod multinomial;
mod priors;

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::vectorizer::{SparseVector, Vocabulary};

pub use bernoulli::BernoulliModel;
pub use categorical::CategoricalModel;
pub use gaussian::{gaussian_density, gaussian_log_density, GaussianModel, SIGMA_FLOOR};
pub use multinomial::MultinomialModel;
pub use priors::ClassPriors;

/// Input to a trained model. The variant must match the model's.
#[derive(Debug, Clone, Copy)]
pub enum Features<'a> {
    /// Bag-of-words vector, for Bernoulli and multinomial models.
    Sparse(&'a SparseVector),
    /// One value per position, for categorical models.
    Categorical(&'a [String]),
    /// Real-valued features, for Gaussian models.
    Continuous(&'a [f64]),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Categorical,
    Bernoulli,
    Multinomial,
    Gaussian,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Categorical => "categorical",
            Variant::Bernoulli => "bernoulli",
            Variant::Multinomial => "multinomial",
            Variant::Gaussian => "gaussian",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "categorical" => Ok(Variant::Categorical),
            "bernoulli" => Ok(Variant::Bernoulli),
            "multinomial" => Ok(Variant::Multinomial),
            "gaussian" => Ok(Variant::Gaussian),
            other => Err(Error::invalid(format!("unknown model variant {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NaiveBayesModel {
    Categorical(CategoricalModel),
    Bernoulli(BernoulliModel),
    Multinomial(MultinomialModel),
    Gaussian(GaussianModel),
}

impl From<CategoricalModel> for NaiveBayesModel {
    fn from(m: CategoricalModel) -> Self {
        NaiveBayesModel::Categorical(m)
    }
}

impl From<BernoulliModel> for NaiveBayesModel {
    fn from(m: BernoulliModel) -> Self {
        NaiveBayesModel::Bernoulli(m)
    }
}

impl From<MultinomialModel> for NaiveBayesModel {
    fn from(m: MultinomialModel) -> Self {
        NaiveBayesModel::Multinomial(m)
    }
}

impl From<GaussianModel> for NaiveBayesModel {
    fn from(m: GaussianModel) -> Self {
        NaiveBayesModel::Gaussian(m)
    }
}

/// Scores for every class of one input.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorReport {
    pub labels: Vec<String>,
    /// `ln P(class) + ln P(x | class)`.
    pub log_scores: Vec<f64>,
    /// Posteriors normalized by the evidence; uniform when degenerate.
    pub posteriors: Vec<f64>,
    /// Index of the predicted class.
    pub predicted: usize,
    /// Set when the input carried no usable evidence and the decision was
    /// made from the priors alone.
    pub degenerate: bool,
}

impl PosteriorReport {
    pub fn label(&self) -> &str {
        &self.labels[self.predicted]
    }

    /// Unnormalized posteriors `P(class) P(x | class)`.
    pub fn joint_probabilities(&self) -> Vec<f64> {
        self.log_scores.iter().map(|s| s.exp()).collect()
    }
}

impl NaiveBayesModel {
    pub fn variant(&self) -> Variant {
        match self {
            NaiveBayesModel::Categorical(_) => Variant::Categorical,
            NaiveBayesModel::Bernoulli(_) => Variant::Bernoulli,
            NaiveBayesModel::Multinomial(_) => Variant::Multinomial,
            NaiveBayesModel::Gaussian(_) => Variant::Gaussian,
        }
    }

    pub fn priors(&self) -> &ClassPriors {
        match self {
            NaiveBayesModel::Categorical(m) => m.priors(),
            NaiveBayesModel::Bernoulli(m) => m.priors(),
            NaiveBayesModel::Multinomial(m) => m.priors(),
            NaiveBayesModel::Gaussian(m) => m.priors(),
        }
    }

    pub fn labels(&self) -> &[String] {
        self.priors().labels()
    }

    /// Same likelihood model with different class priors.
    pub fn with_priors(&self, priors: ClassPriors) -> Result<Self> {
        Ok(match self {
            NaiveBayesModel::Categorical(m) => m.with_priors(priors)?.into(),
            NaiveBayesModel::Bernoulli(m) => m.with_priors(priors)?.into(),
            NaiveBayesModel::Multinomial(m) => m.with_priors(priors)?.into(),
            NaiveBayesModel::Gaussian(m) => m.with_priors(priors)?.into(),
        })
    }

    /// `ln P(x | class)`; negative infinity when some unsmoothed
    /// conditional is zero.
    pub fn log_likelihood(&self, input: Features<'_>, class: usize) -> Result<f64> {
        if class >= self.priors().len() {
            return Err(Error::invalid(format!("unknown class index {class}")));
        }
        match (self, input) {
            (NaiveBayesModel::Categorical(m), Features::Categorical(v)) => {
                m.log_likelihood(v, class)
            }
            (NaiveBayesModel::Bernoulli(m), Features::Sparse(x)) => m.log_likelihood(x, class),
            (NaiveBayesModel::Multinomial(m), Features::Sparse(x)) => m.log_likelihood(x, class),
            (NaiveBayesModel::Gaussian(m), Features::Continuous(x)) => m.log_likelihood(x, class),
            (model, _) => Err(Error::invalid(format!(
                "input type does not match the {} model",
                model.variant()
            ))),
        }
    }

    pub fn posterior_scores(&self, input: Features<'_>) -> Result<PosteriorReport> {
        let priors = self.priors();
        let log_scores = (0..priors.len())
            .map(|j| Ok(priors.probability(j).ln() + self.log_likelihood(input, j)?))
            .collect::<Result<Vec<f64>>>()?;
        Ok(self.report(log_scores))
    }

    /// A report built from the priors alone, for inputs that carry no
    /// features the model knows about.
    pub fn prior_report(&self) -> PosteriorReport {
        let priors = self.priors();
        let log_scores = priors.probabilities().iter().map(|p| p.ln()).collect();
        let mut report = self.report(log_scores);
        report.degenerate = true;
        report
    }

    fn report(&self, log_scores: Vec<f64>) -> PosteriorReport {
        let priors = self.priors();
        let labels = priors.labels().to_vec();
        let max = log_scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            let n = log_scores.len();
            return PosteriorReport {
                labels,
                predicted: argmax_with_ties(priors.probabilities(), priors),
                posteriors: vec![1.0 / n as f64; n],
                log_scores,
                degenerate: true,
            };
        }
        let weights: Vec<f64> = log_scores.iter().map(|s| (s - max).exp()).collect();
        let z: f64 = weights.iter().sum();
        PosteriorReport {
            labels,
            predicted: argmax_with_ties(&log_scores, priors),
            posteriors: weights.into_iter().map(|w| w / z).collect(),
            log_scores,
            degenerate: false,
        }
    }

    /// The class with the highest posterior.
    pub fn classify(&self, input: Features<'_>) -> Result<String> {
        Ok(self.posterior_scores(input)?.label().to_string())
    }
}

/// Index of the largest score. Exact ties go to the class with the larger
/// prior, then to the lexicographically smaller label.
pub(crate) fn argmax_with_ties(scores: &[f64], priors: &ClassPriors) -> usize {
    let mut best = 0;
    for j in 1..scores.len() {
        let ord = scores[j].partial_cmp(&scores[best]).unwrap_or(Ordering::Less).then_with(|| {
            priors
                .probability(j)
                .partial_cmp(&priors.probability(best))
                .unwrap_or(Ordering::Equal)
        });
        // labels are sorted, so on a full tie the earlier index wins
        if ord == Ordering::Greater {
            best = j;
        }
    }
    best
}

/// `ln(sum(exp(x)))` without overflow.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max.is_infinite() {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

pub fn fit_priors<S: AsRef<str>>(labels: &[S]) -> Result<ClassPriors> {
    ClassPriors::fit(labels)
}

pub fn fit_categorical<S: AsRef<str>, L: AsRef<str>>(
    samples: &[Vec<S>],
    labels: &[L],
    alpha: f64,
) -> Result<CategoricalModel> {
    CategoricalModel::fit(samples, labels, alpha)
}

pub fn fit_bernoulli<L: AsRef<str>>(
    vectors: &[SparseVector],
    labels: &[L],
    vocab: &Vocabulary,
) -> Result<BernoulliModel> {
    BernoulliModel::fit(vectors, labels, vocab)
}

pub fn fit_multinomial<L: AsRef<str>>(
    vectors: &[SparseVector],
    labels: &[L],
    vocab: &Vocabulary,
    alpha: f64,
) -> Result<MultinomialModel> {
    MultinomialModel::fit(vectors, labels, vocab, alpha)
}

pub fn fit_gaussian<L: AsRef<str>>(rows: &[Vec<f64>], labels: &[L]) -> Result<GaussianModel> {
    GaussianModel::fit(rows, labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strings(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    /// 7 "+" and 5 "-" samples over (color, shape).
    fn toy() -> (Vec<Vec<&'static str>>, Vec<&'static str>) {
        let plus = [
            ["blue", "square"],
            ["blue", "square"],
            ["blue", "circle"],
            ["green", "square"],
            ["green", "square"],
            ["red", "square"],
            ["red", "circle"],
        ];
        let minus = [
            ["blue", "square"],
            ["blue", "circle"],
            ["blue", "circle"],
            ["green", "square"],
            ["red", "square"],
        ];
        let samples = plus.iter().chain(&minus).map(|s| s.to_vec()).collect();
        let labels = ["+"; 7].into_iter().chain(["-"; 5]).collect();
        (samples, labels)
    }

    #[test]
    fn toy_posteriors() {
        let (samples, labels) = toy();
        let m: NaiveBayesModel = fit_categorical(&samples, &labels, 0.0).unwrap().into();
        let x = strings(&["blue", "square"]);
        let r = m.posterior_scores(Features::Categorical(&x)).unwrap();
        let joint = r.joint_probabilities();
        assert!((joint[0] - 5.0 / 28.0).abs() < 1e-12);
        assert!((joint[1] - 3.0 / 20.0).abs() < 1e-12);
        assert_eq!(r.label(), "+");
        assert!((r.posteriors[0] - (5.0 / 28.0) / (5.0 / 28.0 + 0.15)).abs() < 1e-12);

        let uniform = m.with_priors(m.priors().uniform()).unwrap();
        assert_eq!(uniform.classify(Features::Categorical(&x)).unwrap(), "-");
    }

    #[test]
    fn unseen_value_without_smoothing_is_degenerate() {
        let (samples, labels) = toy();
        let m: NaiveBayesModel = fit_categorical(&samples, &labels, 0.0).unwrap().into();
        let x = strings(&["yellow", "square"]);
        let r = m.posterior_scores(Features::Categorical(&x)).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.joint_probabilities(), [0.0, 0.0]);
        assert_eq!(r.posteriors, [0.5, 0.5]);
        // decided by the larger prior
        assert_eq!(r.label(), "+");
    }

    #[test]
    fn identical_likelihoods_follow_priors() {
        let priors = ClassPriors::fit(&["a", "b"]).unwrap().with_probabilities(&[0.9, 0.1]).unwrap();
        let m = MultinomialModel::from_sums(priors, vec![vec![1.0, 1.0], vec![1.0, 1.0]], 2, 1.0).unwrap();
        let m = NaiveBayesModel::from(m);
        let x = SparseVector::from_entries([(0, 1.0)], 1).unwrap();
        let r = m.posterior_scores(Features::Sparse(&x)).unwrap();
        assert!((r.posteriors[0] - 0.9).abs() < 1e-12);
        assert!((r.posteriors[1] - 0.1).abs() < 1e-12);
    }

    #[test]
    fn exact_tie_goes_to_smaller_label() {
        let priors = ClassPriors::fit(&["b", "a"]).unwrap();
        let m = MultinomialModel::from_sums(priors, vec![vec![1.0], vec![1.0]], 1, 1.0).unwrap();
        let m = NaiveBayesModel::from(m);
        let x = SparseVector::from_entries([(0, 3.0)], 3).unwrap();
        assert_eq!(m.classify(Features::Sparse(&x)).unwrap(), "a");
    }

    #[test]
    fn tie_prefers_larger_prior() {
        let scores = [0.0, 0.0];
        let priors = ClassPriors::fit(&["a", "b", "b"]).unwrap();
        assert_eq!(argmax_with_ties(&scores, &priors), 1);
    }

    #[test]
    fn variant_mismatch() {
        let (samples, labels) = toy();
        let m: NaiveBayesModel = fit_categorical(&samples, &labels, 1.0).unwrap().into();
        let x = SparseVector::default();
        assert!(matches!(
            m.posterior_scores(Features::Sparse(&x)),
            Err(Error::InvalidArgument(_))
        ));
        assert!(m.log_likelihood(Features::Continuous(&[1.0]), 0).is_err());
        let v = strings(&["blue", "square"]);
        assert!(m.log_likelihood(Features::Categorical(&v), 9).is_err());
    }

    #[test]
    fn spam_likelihood_product() {
        let priors = ClassPriors::fit(&["spam"]).unwrap();
        let m = MultinomialModel::from_sums(priors, vec![vec![20.0, 2.0, 78.0]], 3, 0.0).unwrap();
        let x = SparseVector::from_entries([(0, 1.0), (1, 1.0)], 2).unwrap();
        let l = m.log_likelihood(&x, 0).unwrap().exp();
        assert!((l - 0.004).abs() < 1e-12);
    }

    #[test]
    fn log_sum_exp_is_stable() {
        assert!((log_sum_exp(&[1000.0, 1000.0]) - (1000.0 + 2f64.ln())).abs() < 1e-12);
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY; 2]), f64::NEG_INFINITY);
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
    }

    #[test]
    fn prior_report_is_degenerate() {
        let (samples, labels) = toy();
        let m: NaiveBayesModel = fit_categorical(&samples, &labels, 1.0).unwrap().into();
        let r = m.prior_report();
        assert!(r.degenerate);
        assert_eq!(r.label(), "+");
        assert!((r.posteriors[0] - 7.0 / 12.0).abs() < 1e-12);
    }
}
