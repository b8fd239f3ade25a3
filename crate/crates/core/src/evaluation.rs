//! Labelled corpora, reproducible splits and classifier scoring.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::classifier::Classifier;
use crate::error::{Error, Result};

/// Row label used in the confusion matrix for true labels the model has
/// never seen.
pub const UNKNOWN_LABEL: &str = "<unknown>";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub label: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledCorpus {
    documents: Vec<Document>,
    label_set: BTreeSet<String>,
}

impl LabeledCorpus {
    pub fn new(documents: Vec<Document>) -> Result<Self> {
        if documents.is_empty() {
            return Err(Error::invalid("a corpus needs at least one document"));
        }
        let label_set = documents.iter().map(|d| d.label.clone()).collect();
        Ok(LabeledCorpus {
            documents,
            label_set,
        })
    }

    /// Parses `label<TAB>text` lines.
    pub fn parse_tsv(body: &str, path: &Path) -> Result<Self> {
        parse_records(body, path, '\t')
    }

    /// Parses `label,v1,v2,...` lines; the text is everything after the
    /// first comma.
    pub fn parse_csv(body: &str, path: &Path) -> Result<Self> {
        parse_records(body, path, ',')
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn label_set(&self) -> &BTreeSet<String> {
        &self.label_set
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    /// `(label, text)` pairs, the shape the trainers take.
    pub fn pairs(&self) -> Vec<(&str, &str)> {
        self.documents
            .iter()
            .map(|d| (d.label.as_str(), d.text.as_str()))
            .collect()
    }
}

fn parse_records(body: &str, path: &Path, sep: char) -> Result<LabeledCorpus> {
    let mut documents = Vec::new();
    for (i, line) in body.lines().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() {
            continue;
        }
        let (label, text) = line.split_once(sep).ok_or_else(|| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message: format!("expected label{}text", if sep == '\t' { "<TAB>" } else { "," }),
        })?;
        let label = label.trim();
        if label.is_empty() {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                message: "empty label".into(),
            });
        }
        documents.push(Document {
            label: label.to_string(),
            text: text.to_string(),
        });
    }
    if documents.is_empty() {
        return Err(Error::EmptyCorpus(path.to_path_buf()));
    }
    LabeledCorpus::new(documents)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Loads a `label<TAB>text` corpus.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<LabeledCorpus> {
    let path = path.as_ref();
    LabeledCorpus::parse_tsv(&read(path)?, path)
}

/// Loads a `label,v1,v2,...` corpus.
pub fn load_csv_corpus(path: impl AsRef<Path>) -> Result<LabeledCorpus> {
    let path = path.as_ref();
    LabeledCorpus::parse_csv(&read(path)?, path)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Keyed hash of a document index: `splitmix64(splitmix64(seed) ^ index)`.
pub fn split_key(seed: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ index)
}

/// Deterministic train/test split.
///
/// Documents are ordered by [`split_key`] (index breaks ties) and the first
/// `round(n * test_fraction)` go to the test set.
pub fn split(
    corpus: &LabeledCorpus,
    test_fraction: f64,
    seed: u64,
) -> Result<(LabeledCorpus, LabeledCorpus)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::invalid(format!(
            "test fraction must lie in (0, 1), got {test_fraction}"
        )));
    }
    let n = corpus.len();
    let n_test = (n as f64 * test_fraction).round() as usize;
    if n_test == 0 || n_test >= n {
        return Err(Error::invalid(format!(
            "splitting {n} documents with fraction {test_fraction} leaves an empty partition"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (split_key(seed, i as u64), i));
    let pick = |idx: &[usize]| {
        LabeledCorpus::new(idx.iter().map(|&i| corpus.documents[i].clone()).collect())
    };
    Ok((pick(&order[n_test..])?, pick(&order[..n_test])?))
}

/// Precision, recall and F1 for one label. Ratios with a zero denominator
/// are reported as 0 and flagged.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub precision_undefined: bool,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub recall_undefined: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    /// Model classes; also the confusion matrix columns.
    pub labels: Vec<String>,
    /// Row labels: the model classes, plus [`UNKNOWN_LABEL`] when the test
    /// set had labels outside them.
    pub row_labels: Vec<String>,
    /// `confusion[true][predicted]`.
    pub confusion: Vec<Vec<u64>>,
    pub metrics: Vec<LabelMetrics>,
    pub accuracy: f64,
    pub n_test: u64,
    /// Documents decided by the priors alone.
    pub degenerate: u64,
}

impl EvaluationReport {
    /// Tallies `(true label, predicted label)` pairs. Predictions must be
    /// model classes.
    pub fn from_predictions<'a>(
        classes: &[String],
        outcomes: impl IntoIterator<Item = (&'a str, &'a str)>,
        degenerate: u64,
    ) -> Result<Self> {
        let k = classes.len();
        let col = |l: &str| classes.iter().position(|c| c == l);
        let mut confusion = vec![vec![0u64; k]; k + 1];
        let mut n_test = 0u64;
        for (truth, predicted) in outcomes {
            let c = col(predicted)
                .ok_or_else(|| Error::invalid(format!("prediction {predicted:?} is not a class")))?;
            let r = col(truth).unwrap_or(k);
            confusion[r][c] += 1;
            n_test += 1;
        }
        if n_test == 0 {
            return Err(Error::invalid("cannot evaluate on an empty test set"));
        }
        let mut row_labels = classes.to_vec();
        if confusion[k].iter().all(|&c| c == 0) {
            confusion.pop();
        } else {
            row_labels.push(UNKNOWN_LABEL.to_string());
        }
        let trace: u64 = (0..k).map(|i| confusion[i][i]).sum();
        let metrics = (0..k)
            .map(|i| {
                let tp = confusion[i][i] as f64;
                let col_sum: u64 = confusion.iter().map(|r| r[i]).sum();
                let row_sum: u64 = confusion[i].iter().sum();
                let precision = if col_sum > 0 { tp / col_sum as f64 } else { 0.0 };
                let recall = if row_sum > 0 { tp / row_sum as f64 } else { 0.0 };
                let f1 = if precision + recall > 0.0 {
                    2.0 * precision * recall / (precision + recall)
                } else {
                    0.0
                };
                LabelMetrics {
                    precision,
                    recall,
                    f1,
                    precision_undefined: col_sum == 0,
                    recall_undefined: row_sum == 0,
                }
            })
            .collect();
        Ok(EvaluationReport {
            labels: classes.to_vec(),
            row_labels,
            confusion,
            metrics,
            accuracy: trace as f64 / n_test as f64,
            n_test,
            degenerate,
        })
    }

    /// The machine-readable form: accuracy, per-label metrics and the
    /// confusion matrix as nested label-keyed counts.
    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Json<'a> {
            accuracy: f64,
            n_test: u64,
            degenerate: u64,
            labels: BTreeMap<&'a str, &'a LabelMetrics>,
            confusion: BTreeMap<&'a str, BTreeMap<&'a str, u64>>,
        }
        let json = Json {
            accuracy: self.accuracy,
            n_test: self.n_test,
            degenerate: self.degenerate,
            labels: self
                .labels
                .iter()
                .map(String::as_str)
                .zip(&self.metrics)
                .collect(),
            confusion: self
                .row_labels
                .iter()
                .zip(&self.confusion)
                .map(|(r, row)| {
                    (
                        r.as_str(),
                        self.labels.iter().map(String::as_str).zip(row.iter().copied()).collect(),
                    )
                })
                .collect(),
        };
        serde_json::to_value(json).expect("report is plain data")
    }
}

impl fmt::Display for EvaluationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self
            .row_labels
            .iter()
            .map(|l| l.chars().count())
            .max()
            .unwrap_or(0)
            .max(5);
        writeln!(f, "documents: {}", self.n_test)?;
        writeln!(f, "accuracy:  {:.4}", self.accuracy)?;
        if self.degenerate > 0 {
            writeln!(f, "decided by priors alone: {}", self.degenerate)?;
        }
        writeln!(f)?;
        writeln!(f, "{:<width$}  precision  recall     f1", "label")?;
        for (l, m) in self.labels.iter().zip(&self.metrics) {
            let flag = if m.precision_undefined || m.recall_undefined { "  *" } else { "" };
            writeln!(
                f,
                "{l:<width$}  {:>9.4}  {:>6.4}  {:>6.4}{flag}",
                m.precision, m.recall, m.f1
            )?;
        }
        if self.metrics.iter().any(|m| m.precision_undefined || m.recall_undefined) {
            writeln!(f, "* zero denominator, reported as 0")?;
        }
        writeln!(f)?;
        write!(f, "{:<width$}", "true\\pred")?;
        for l in &self.labels {
            write!(f, "  {l:>8}")?;
        }
        writeln!(f)?;
        for (r, row) in self.row_labels.iter().zip(&self.confusion) {
            write!(f, "{r:<width$}")?;
            for c in row {
                write!(f, "  {c:>8}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Classifies every test document and tallies the results.
pub fn evaluate(classifier: &Classifier, test: &LabeledCorpus) -> Result<EvaluationReport> {
    let mut outcomes = Vec::with_capacity(test.len());
    let mut degenerate = 0;
    for doc in test.documents() {
        let p = classifier.predict(&doc.text)?;
        degenerate += u64::from(p.degenerate);
        outcomes.push((doc.label.as_str(), p.label().to_string()));
    }
    EvaluationReport::from_predictions(
        classifier.labels(),
        outcomes.iter().map(|(t, p)| (*t, p.as_str())),
        degenerate,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::PathBuf;

    fn p() -> PathBuf {
        PathBuf::from("corpus.tsv")
    }

    fn corpus(n: usize) -> LabeledCorpus {
        LabeledCorpus::new(
            (0..n)
                .map(|i| Document {
                    label: if i % 2 == 0 { "ham" } else { "spam" }.into(),
                    text: format!("doc {i}"),
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn parse_lines() {
        let c = LabeledCorpus::parse_tsv("ham\tOk lar...\n", &p()).unwrap();
        assert_eq!(
            c.documents(),
            [Document {
                label: "ham".into(),
                text: "Ok lar...".into()
            }]
        );
        let c = LabeledCorpus::parse_tsv("ham\ta\r\n\nspam\tb\tc\n", &p()).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.label_set().iter().collect::<Vec<_>>(), ["ham", "spam"]);
        assert_eq!(c.documents()[1].text, "b\tc");
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let err = LabeledCorpus::parse_tsv("ham\tok\nspamFree entry\n", &p()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn empty_and_missing() {
        assert!(matches!(
            LabeledCorpus::parse_tsv("\n\n", &p()),
            Err(Error::EmptyCorpus(_))
        ));
        assert!(matches!(
            load_corpus("/nonexistent/corpus.tsv"),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn csv_records() {
        let c = LabeledCorpus::parse_csv("+,blue,square\n-,red,circle\n", &p()).unwrap();
        assert_eq!(c.documents()[0].text, "blue,square");
    }

    #[test]
    fn split_sizes() {
        let (train, test) = split(&corpus(10), 0.2, 42).unwrap();
        assert_eq!((train.len(), test.len()), (8, 2));
        let (train, test) = split(&corpus(5), 0.2, 42).unwrap();
        assert_eq!((train.len(), test.len()), (4, 1));
    }

    #[test]
    fn split_is_deterministic_and_a_partition() {
        let c = corpus(50);
        let a = split(&c, 0.3, 7).unwrap();
        let b = split(&c, 0.3, 7).unwrap();
        assert_eq!(a, b);
        let mut all: Vec<String> = a.0.documents().iter().chain(a.1.documents()).map(|d| d.text.clone()).collect();
        all.sort();
        let mut want: Vec<String> = c.documents().iter().map(|d| d.text.clone()).collect();
        want.sort();
        assert_eq!(all, want);
        assert_ne!(split(&c, 0.3, 8).unwrap().1, a.1);
    }

    #[test]
    fn split_errors() {
        assert!(split(&corpus(10), 0.0, 1).is_err());
        assert!(split(&corpus(10), 1.5, 1).is_err());
        assert!(split(&corpus(1), 0.5, 1).is_err());
        assert!(split(&corpus(3), 0.1, 1).is_err());
    }

    fn classes() -> Vec<String> {
        vec!["neg".into(), "pos".into()]
    }

    #[test]
    fn two_class_metrics() {
        let mut outcomes = vec![];
        outcomes.extend([("pos", "pos"); 3]);
        outcomes.push(("neg", "pos"));
        outcomes.push(("pos", "neg"));
        outcomes.extend([("neg", "neg"); 5]);
        let r = EvaluationReport::from_predictions(&classes(), outcomes, 0).unwrap();
        let pos = &r.metrics[1];
        assert_eq!(pos.precision, 0.75);
        assert_eq!(pos.recall, 0.75);
        assert!((r.accuracy - 0.8).abs() < 1e-12);
        assert_eq!(r.confusion, [[5, 1], [1, 3]]);
    }

    #[test]
    fn perfect_and_unknown_rows() {
        let r = EvaluationReport::from_predictions(&classes(), [("pos", "pos"), ("neg", "neg")], 0).unwrap();
        assert_eq!(r.accuracy, 1.0);
        assert_eq!(r.confusion, [[1, 0], [0, 1]]);

        let r = EvaluationReport::from_predictions(&classes(), [("pos", "pos"), ("other", "neg")], 0).unwrap();
        assert_eq!(r.row_labels.last().unwrap(), UNKNOWN_LABEL);
        assert_eq!(r.confusion[2], [1, 0]);
        assert_eq!(r.accuracy, 0.5);
        assert!(!r.metrics[0].precision_undefined && r.metrics[0].recall_undefined);
    }

    #[test]
    fn zero_denominators_are_flagged() {
        let r = EvaluationReport::from_predictions(&classes(), [("pos", "pos")], 0).unwrap();
        assert!(r.metrics[0].precision_undefined && r.metrics[0].recall_undefined);
        assert_eq!(r.metrics[0].f1, 0.0);
        assert!(EvaluationReport::from_predictions(&classes(), [("pos", "maybe")], 0).is_err());
    }

    #[test]
    fn json_shape() {
        let r = EvaluationReport::from_predictions(&classes(), [("pos", "pos"), ("neg", "pos")], 0).unwrap();
        let j = r.to_json();
        assert_eq!(j["accuracy"], 0.5);
        assert_eq!(j["confusion"]["neg"]["pos"], 1);
        assert_eq!(j["labels"]["pos"]["precision"], 0.5);
    }
}
