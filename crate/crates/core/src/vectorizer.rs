//! Vocabulary construction and bag-of-words vectorization.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text_pipeline::TokenStream;

/// Dense ids for every distinct training token, plus document frequencies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    index: HashMap<String, usize>,
    document_frequency: Vec<u64>,
    total_documents: u64,
}

impl Vocabulary {
    /// Ids follow first appearance, scanning documents then positions.
    pub fn build(corpus: &[TokenStream]) -> Result<Self> {
        if corpus.is_empty() {
            return Err(Error::invalid("cannot build a vocabulary from an empty corpus"));
        }
        let mut tokens = Vec::new();
        let mut index = HashMap::new();
        let mut document_frequency: Vec<u64> = Vec::new();
        let mut seen = HashSet::new();
        for doc in corpus {
            seen.clear();
            for tok in doc {
                let id = *index.entry(tok.clone()).or_insert_with(|| {
                    tokens.push(tok.clone());
                    document_frequency.push(0);
                    tokens.len() - 1
                });
                if seen.insert(id) {
                    document_frequency[id] += 1;
                }
            }
        }
        Ok(Vocabulary {
            tokens,
            index,
            document_frequency,
            total_documents: corpus.len() as u64,
        })
    }

    /// Rebuilds a vocabulary from stored parts, checking its invariants.
    pub fn from_parts(
        tokens: Vec<String>,
        document_frequency: Vec<u64>,
        total_documents: u64,
    ) -> Result<Self> {
        if tokens.len() != document_frequency.len() {
            return Err(Error::invalid(format!(
                "{} tokens but {} document frequencies",
                tokens.len(),
                document_frequency.len()
            )));
        }
        let mut index = HashMap::with_capacity(tokens.len());
        for (id, tok) in tokens.iter().enumerate() {
            if tok.is_empty() {
                return Err(Error::invalid(format!("empty token at id {id}")));
            }
            if index.insert(tok.clone(), id).is_some() {
                return Err(Error::invalid(format!("duplicate token {tok:?}")));
            }
        }
        if let Some((id, df)) = document_frequency
            .iter()
            .enumerate()
            .find(|(_, &df)| df == 0 || df > total_documents)
        {
            return Err(Error::invalid(format!(
                "document frequency {df} of id {id} outside 1..={total_documents}"
            )));
        }
        Ok(Vocabulary {
            tokens,
            index,
            document_frequency,
            total_documents,
        })
    }

    /// Number of distinct tokens.
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn id(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn token(&self, id: usize) -> Option<&str> {
        self.tokens.get(id).map(String::as_str)
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn document_frequency(&self, id: usize) -> Option<u64> {
        self.document_frequency.get(id).copied()
    }

    pub fn document_frequencies(&self) -> &[u64] {
        &self.document_frequency
    }

    pub fn total_documents(&self) -> u64 {
        self.total_documents
    }

    /// `ln(total_documents / document_frequency)`.
    pub fn idf(&self, id: usize) -> Result<f64> {
        let df = self
            .document_frequency(id)
            .ok_or_else(|| Error::invalid(format!("unknown token id {id}")))?;
        Ok((self.total_documents as f64 / df as f64).ln())
    }

    /// `id<TAB>token<TAB>document_frequency` lines, ids ascending.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (id, (tok, df)) in self.tokens.iter().zip(&self.document_frequency).enumerate() {
            out.push_str(&format!("{id}\t{tok}\t{df}\n"));
        }
        out
    }
}

/// Same as [`Vocabulary::build`].
pub fn build_vocabulary(corpus: &[TokenStream]) -> Result<Vocabulary> {
    Vocabulary::build(corpus)
}

/// How token counts become vector values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightingMode {
    Binary,
    RawCount,
    NormalizedTf,
    Tfidf,
}

impl WeightingMode {
    pub fn as_str(self) -> &'static str {
        match self {
            WeightingMode::Binary => "binary",
            WeightingMode::RawCount => "raw_count",
            WeightingMode::NormalizedTf => "normalized_tf",
            WeightingMode::Tfidf => "tfidf",
        }
    }
}

impl fmt::Display for WeightingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WeightingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "binary" => Ok(WeightingMode::Binary),
            "raw_count" | "raw-count" | "count" => Ok(WeightingMode::RawCount),
            "normalized_tf" | "normalized-tf" | "tf" => Ok(WeightingMode::NormalizedTf),
            "tfidf" | "tf-idf" | "tf_idf" => Ok(WeightingMode::Tfidf),
            other => Err(Error::invalid(format!("unknown weighting mode {other:?}"))),
        }
    }
}

/// Token id to value. Zero values are never stored.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseVector {
    entries: BTreeMap<usize, f64>,
    doc_length: usize,
}

impl SparseVector {
    /// Zero entries are dropped; negative or non-finite values are rejected.
    pub fn from_entries(
        entries: impl IntoIterator<Item = (usize, f64)>,
        doc_length: usize,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (id, v) in entries {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::invalid(format!("value {v} at id {id} is not a finite non-negative number")));
            }
            if v > 0.0 {
                map.insert(id, v);
            }
        }
        Ok(SparseVector {
            entries: map,
            doc_length,
        })
    }

    pub fn get(&self, id: usize) -> f64 {
        self.entries.get(&id).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.entries.iter().map(|(&id, &v)| (id, v))
    }

    pub fn entries(&self) -> &BTreeMap<usize, f64> {
        &self.entries
    }

    /// Token count of the source document, out-of-vocabulary tokens included.
    pub fn doc_length(&self) -> usize {
        self.doc_length
    }

    /// Number of stored (non-zero) entries.
    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.entries.values().sum()
    }
}

/// Maps a token stream onto `vocab`. Unknown tokens are skipped but still
/// count towards the document length.
pub fn vectorize(stream: &TokenStream, vocab: &Vocabulary, mode: WeightingMode) -> SparseVector {
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    for id in stream.iter().filter_map(|t| vocab.id(t)) {
        *counts.entry(id).or_default() += 1;
    }
    let doc_length = stream.len();
    let n = doc_length as f64;
    let entries = counts
        .into_iter()
        .map(|(id, tf)| {
            let v = match mode {
                WeightingMode::Binary => 1.0,
                WeightingMode::RawCount => tf as f64,
                WeightingMode::NormalizedTf => tf as f64 / n,
                WeightingMode::Tfidf => {
                    tf as f64 / n * vocab.idf(id).expect("id comes from the vocabulary")
                }
            };
            (id, v)
        })
        // tf-idf of a term present in every document is exactly zero
        .filter(|&(_, v)| v > 0.0)
        .collect();
    SparseVector {
        entries,
        doc_length,
    }
}
