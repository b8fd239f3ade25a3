//! Raw text to token stream.
//!
//! Stages run in a fixed order: tokenize, remove stop words, stem, expand
//! n-grams. Every stage is a pure function, so the pipeline can be shared
//! freely between threads.

mod porter;

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use unicode_properties::{GeneralCategoryGroup, UnicodeGeneralCategory};

use crate::error::{Error, Result};

pub use porter::porter_stem;

/// How stop words are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopWordMode {
    None,
    /// A fixed word list, usually loaded from a file.
    Dictionary,
    /// The `n` most frequent tokens of the training corpus.
    FrequencyTopN(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub lowercase: bool,
    pub strip_punctuation: bool,
    pub stop_word_mode: StopWordMode,
    pub stemming: bool,
    /// 1 for unigrams.
    pub ngram_size: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            lowercase: true,
            strip_punctuation: true,
            stop_word_mode: StopWordMode::None,
            stemming: false,
            ngram_size: 1,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ngram_size == 0 {
            return Err(Error::invalid("ngram_size must be at least 1"));
        }
        if self.stop_word_mode == StopWordMode::FrequencyTopN(0) {
            return Err(Error::invalid("frequency stop list needs n >= 1"));
        }
        Ok(())
    }
}

/// An ordered sequence of non-empty tokens.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct TokenStream {
    tokens: Vec<String>,
}

impl TokenStream {
    /// Fails if any token is the empty string.
    pub fn new(tokens: Vec<String>) -> Result<Self> {
        if tokens.iter().any(String::is_empty) {
            return Err(Error::invalid("token stream contains an empty token"));
        }
        Ok(TokenStream { tokens })
    }

    /// Builds a stream from string slices, dropping empty ones.
    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        TokenStream {
            tokens: words
                .into_iter()
                .map(Into::into)
                .filter(|t: &String| !t.is_empty())
                .collect(),
        }
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, String> {
        self.tokens.iter()
    }

    pub fn into_tokens(self) -> Vec<String> {
        self.tokens
    }
}

impl<'a> IntoIterator for &'a TokenStream {
    type Item = &'a String;
    type IntoIter = std::slice::Iter<'a, String>;

    fn into_iter(self) -> Self::IntoIter {
        self.tokens.iter()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopListOrigin {
    Dictionary,
    Frequency(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StopList {
    words: BTreeSet<String>,
    origin: StopListOrigin,
}

impl StopList {
    /// Empty strings are discarded.
    pub fn new<I, S>(words: I, origin: StopListOrigin) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        StopList {
            words: words
                .into_iter()
                .map(Into::into)
                .filter(|w: &String| !w.is_empty())
                .collect(),
            origin,
        }
    }

    pub fn empty() -> Self {
        StopList::new(Vec::<String>::new(), StopListOrigin::Dictionary)
    }

    /// Parses a dictionary file body: one word per line, `#` starts a
    /// comment line, surrounding whitespace is trimmed.
    pub fn parse_dictionary(body: &str) -> Self {
        let words = body
            .lines()
            .filter(|l| !l.trim_start().starts_with('#'))
            .map(str::trim)
            .filter(|l| !l.is_empty());
        StopList::new(words, StopListOrigin::Dictionary)
    }

    pub fn load_dictionary(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let body = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(StopList::parse_dictionary(&body))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn words(&self) -> &BTreeSet<String> {
        &self.words
    }

    pub fn origin(&self) -> StopListOrigin {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

fn is_punctuation(c: char) -> bool {
    c.general_category_group() == GeneralCategoryGroup::Punctuation
}

/// Splits on whitespace, trims punctuation from token boundaries and
/// lowercases, depending on `config`.
pub fn tokenize(text: &str, config: &PipelineConfig) -> TokenStream {
    let tokens = text
        .split_whitespace()
        .filter_map(|raw| {
            let tok = if config.strip_punctuation {
                raw.trim_matches(is_punctuation)
            } else {
                raw
            };
            if tok.is_empty() {
                None
            } else if config.lowercase {
                Some(tok.to_lowercase())
            } else {
                Some(tok.to_string())
            }
        })
        .collect();
    TokenStream { tokens }
}

/// The `n` most frequent tokens over the whole corpus. Ties at the cutoff
/// go to the lexicographically smaller token.
pub fn build_stop_list(corpus: &[TokenStream], n: usize) -> Result<StopList> {
    if n == 0 {
        return Err(Error::invalid("stop list size must be at least 1"));
    }
    if corpus.is_empty() {
        return Err(Error::invalid("cannot build a stop list from an empty corpus"));
    }
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for tok in corpus.iter().flat_map(TokenStream::iter) {
        *counts.entry(tok.as_str()).or_default() += 1;
    }
    let mut ranked: Vec<(&str, u64)> = counts.into_iter().collect();
    ranked.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    Ok(StopList::new(
        ranked.into_iter().take(n).map(|(w, _)| w),
        StopListOrigin::Frequency(n),
    ))
}

pub fn remove_stop_words(stream: &TokenStream, stops: &StopList) -> TokenStream {
    TokenStream {
        tokens: stream
            .iter()
            .filter(|t| !stops.contains(t))
            .cloned()
            .collect(),
    }
}

/// Stems every token. Tokens that are not lowercase ASCII words pass
/// through unchanged.
pub fn stem_stream(stream: &TokenStream) -> TokenStream {
    TokenStream {
        tokens: stream.iter().map(|t| porter_stem(t)).collect(),
    }
}

/// Space-joined windows of `n` consecutive tokens.
pub fn ngrams(stream: &TokenStream, n: usize) -> Result<TokenStream> {
    if n == 0 {
        return Err(Error::invalid("n-gram size must be at least 1"));
    }
    if n == 1 {
        return Ok(stream.clone());
    }
    Ok(TokenStream {
        tokens: stream.tokens.windows(n).map(|w| w.join(" ")).collect(),
    })
}

/// Runs all configured stages. A stop list must be supplied whenever the
/// config asks for stop-word removal.
pub fn run_pipeline(
    text: &str,
    config: &PipelineConfig,
    stops: Option<&StopList>,
) -> Result<TokenStream> {
    config.validate()?;
    let mut stream = tokenize(text, config);
    if config.stop_word_mode != StopWordMode::None {
        let stops = stops.ok_or_else(|| {
            Error::invalid("stop-word removal is enabled but no stop list was supplied")
        })?;
        stream = remove_stop_words(&stream, stops);
    }
    if config.stemming {
        stream = stem_stream(&stream);
    }
    ngrams(&stream, config.ngram_size)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(words: &[&str]) -> TokenStream {
        TokenStream::from_words(words.iter().copied())
    }

    fn cfg() -> PipelineConfig {
        PipelineConfig::default()
    }

    #[test]
    fn tokenize_sentence() {
        let out = tokenize("A swimmer likes swimming, thus he swims.", &cfg());
        assert_eq!(
            out,
            ts(&["a", "swimmer", "likes", "swimming", "thus", "he", "swims"])
        );
    }

    #[test]
    fn tokenize_empty_and_case_folding() {
        assert!(tokenize("", &cfg()).is_empty());
        assert!(tokenize(" \t\n ", &cfg()).is_empty());
        assert_eq!(
            tokenize("Hello, HELLO hello!", &cfg()),
            ts(&["hello", "hello", "hello"])
        );
    }

    #[test]
    fn tokenize_keeps_inner_punctuation_and_drops_bare_marks() {
        let out = tokenize("don't -- stop... (now)", &cfg());
        assert_eq!(out, ts(&["don't", "stop", "now"]));
    }

    #[test]
    fn tokenize_without_stripping_or_lowercase() {
        let c = PipelineConfig {
            lowercase: false,
            strip_punctuation: false,
            ..cfg()
        };
        assert_eq!(tokenize("Hi, there.", &c), ts(&["Hi,", "there."]));
    }

    #[test]
    fn tokenize_unicode_punctuation() {
        assert_eq!(tokenize("«Größe»", &cfg()), ts(&["größe"]));
    }

    #[test]
    fn stop_list_by_frequency() {
        let corpus = [ts(&["a", "b", "a"]), ts(&["a", "c"])];
        let stops = build_stop_list(&corpus, 1).unwrap();
        assert_eq!(stops.words().iter().collect::<Vec<_>>(), ["a"]);
        assert_eq!(stops.origin(), StopListOrigin::Frequency(1));

        let stops = build_stop_list(&[ts(&["x"])], 5).unwrap();
        assert_eq!(stops.words().iter().collect::<Vec<_>>(), ["x"]);

        let stops = build_stop_list(&[ts(&["a", "b"]), ts(&["b", "a"])], 2).unwrap();
        assert_eq!(stops.words().iter().collect::<Vec<_>>(), ["a", "b"]);
    }

    #[test]
    fn stop_list_tie_breaks_lexicographically() {
        let corpus = [ts(&["c", "b", "a", "d", "d"])];
        let stops = build_stop_list(&corpus, 2).unwrap();
        assert_eq!(stops.words().iter().collect::<Vec<_>>(), ["a", "d"]);
    }

    #[test]
    fn stop_list_errors() {
        assert!(matches!(
            build_stop_list(&[ts(&["a"])], 0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(build_stop_list(&[], 3).is_err());
    }

    #[test]
    fn stop_word_removal() {
        let stops = StopList::new(["a", "thus", "he"], StopListOrigin::Dictionary);
        let s = ts(&["a", "swimmer", "likes", "swimming", "thus", "he", "swims"]);
        assert_eq!(
            remove_stop_words(&s, &stops),
            ts(&["swimmer", "likes", "swimming", "swims"])
        );
        assert_eq!(
            remove_stop_words(&ts(&["x", "y"]), &StopList::empty()),
            ts(&["x", "y"])
        );
        let the = StopList::new(["the"], StopListOrigin::Dictionary);
        assert!(remove_stop_words(&ts(&["the", "the", "the"]), &the).is_empty());
    }

    #[test]
    fn dictionary_parsing() {
        let stops = StopList::parse_dictionary("# common words\nthe  \n\n a\n#x\nand\t\n");
        assert_eq!(
            stops.words().iter().collect::<Vec<_>>(),
            ["a", "and", "the"]
        );
    }

    #[test]
    fn ngram_expansion() {
        let s = ts(&["a", "swimmer", "likes", "swimming"]);
        assert_eq!(
            ngrams(&s, 2).unwrap(),
            ts(&["a swimmer", "swimmer likes", "likes swimming"])
        );
        assert_eq!(ngrams(&ts(&["x"]), 1).unwrap(), ts(&["x"]));
        assert!(ngrams(&ts(&["x", "y"]), 3).unwrap().is_empty());
        assert!(matches!(ngrams(&s, 0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn pipeline_with_stemming() {
        let c = PipelineConfig {
            stemming: true,
            ..cfg()
        };
        let out = run_pipeline("A swimmer likes swimming, thus he swims.", &c, None).unwrap();
        assert_eq!(
            out,
            ts(&["a", "swimmer", "like", "swim", "thu", "he", "swim"])
        );

        let c = PipelineConfig {
            stemming: true,
            ngram_size: 2,
            ..cfg()
        };
        assert_eq!(
            run_pipeline("swimmers swim", &c, None).unwrap(),
            ts(&["swimmer swim"])
        );
    }

    #[test]
    fn pipeline_stages_disabled_is_tokenize() {
        let text = "The quick, brown fox. Jumps!";
        assert_eq!(
            run_pipeline(text, &cfg(), None).unwrap(),
            tokenize(text, &cfg())
        );
    }

    #[test]
    fn pipeline_requires_stop_list() {
        let c = PipelineConfig {
            stop_word_mode: StopWordMode::Dictionary,
            ..cfg()
        };
        assert!(matches!(
            run_pipeline("a b", &c, None),
            Err(Error::InvalidArgument(_))
        ));
        let stops = StopList::new(["a"], StopListOrigin::Dictionary);
        assert_eq!(run_pipeline("a b", &c, Some(&stops)).unwrap(), ts(&["b"]));
    }

    #[test]
    fn pipeline_stop_words_before_ngrams() {
        let c = PipelineConfig {
            stop_word_mode: StopWordMode::FrequencyTopN(1),
            ngram_size: 2,
            ..cfg()
        };
        let stops = StopList::new(["the"], StopListOrigin::Frequency(1));
        assert_eq!(
            run_pipeline("the cat the hat", &c, Some(&stops)).unwrap(),
            ts(&["cat hat"])
        );
    }

    #[test]
    fn config_validation() {
        let c = PipelineConfig {
            ngram_size: 0,
            ..cfg()
        };
        assert!(c.validate().is_err());
        let c = PipelineConfig {
            stop_word_mode: StopWordMode::FrequencyTopN(0),
            ..cfg()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn token_stream_rejects_empty_tokens() {
        assert!(TokenStream::new(vec!["a".into(), String::new()]).is_err());
        assert_eq!(TokenStream::from_words(["a", "", "b"]).len(), 2);
    }
}
