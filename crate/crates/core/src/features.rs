//! Unigram/bigram vocabularies and sparse bag-of-words vectors.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::Hash;
use std::io::{BufRead, Write};
use std::str::FromStr;

use thiserror::Error;

use crate::normalizer::NormalizedTweet;

pub const DEFAULT_UNIGRAMS: usize = 15_000;
pub const DEFAULT_BIGRAMS: usize = 10_000;

const VOCAB_MAGIC: &str = "tweetiment-vocab";
const VOCAB_VERSION: &str = "v1";

pub type Bigram = (String, String);

pub fn extract_unigrams(tweet: &NormalizedTweet) -> Vec<String> {
    tweet.terms().map(str::to_string).collect()
}

/// Adjacent token pairs, in order. Never crosses tweet boundaries.
pub fn extract_bigrams(tweet: &NormalizedTweet) -> Vec<Bigram> {
    tweet
        .tokens()
        .windows(2)
        .map(|pair| (pair[0].as_str().to_string(), pair[1].as_str().to_string()))
        .collect()
}

/// Exact occurrence counts of terms over a corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyDistribution<T: Eq + Hash> {
    counts: HashMap<T, u64>,
}

impl<T: Eq + Hash> Default for FrequencyDistribution<T> {
    fn default() -> Self {
        FrequencyDistribution {
            counts: HashMap::new(),
        }
    }
}

impl<T: Eq + Hash + Ord + Clone> FrequencyDistribution<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, term: T) {
        *self.counts.entry(term).or_insert(0) += 1;
    }

    /// Adds every count of `other`. Commutative and associative.
    pub fn merge(&mut self, other: FrequencyDistribution<T>) {
        for (term, count) in other.counts {
            *self.counts.entry(term).or_insert(0) += count;
        }
    }

    pub fn count(&self, term: &T) -> u64 {
        self.counts.get(term).copied().unwrap_or(0)
    }

    pub fn unique(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&T, u64)> {
        self.counts.iter().map(|(t, &c)| (t, c))
    }

    /// Terms by descending count, ties in ascending term order.
    pub fn ranked(&self) -> Vec<(&T, u64)> {
        let mut ranked: Vec<(&T, u64)> = self.iter().collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        ranked
    }

    pub fn top(&self, n: usize) -> Vec<T> {
        self.ranked()
            .into_iter()
            .take(n)
            .map(|(t, _)| t.clone())
            .collect()
    }
}

impl<T: Eq + Hash + Ord + Clone> FromIterator<T> for FrequencyDistribution<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut dist = FrequencyDistribution::new();
        for term in iter {
            dist.add(term);
        }
        dist
    }
}

pub fn unigram_distribution<'a, I>(corpus: I) -> FrequencyDistribution<String>
where
    I: IntoIterator<Item = &'a NormalizedTweet>,
{
    corpus.into_iter().flat_map(extract_unigrams).collect()
}

pub fn bigram_distribution<'a, I>(corpus: I) -> FrequencyDistribution<Bigram>
where
    I: IntoIterator<Item = &'a NormalizedTweet>,
{
    corpus.into_iter().flat_map(extract_bigrams).collect()
}

/// Rendering of a term for exports and vocabulary files.
pub trait TermText {
    fn term_text(&self) -> String;
}

impl TermText for String {
    fn term_text(&self) -> String {
        self.clone()
    }
}

impl TermText for Bigram {
    fn term_text(&self) -> String {
        format!("{} {}", self.0, self.1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedTerm {
    pub rank: usize,
    pub term: String,
    pub count: u64,
}

/// Rank-frequency table with ranks starting at 1.
pub fn rank_frequency<T>(dist: &FrequencyDistribution<T>) -> Vec<RankedTerm>
where
    T: Eq + Hash + Ord + Clone + TermText,
{
    dist.ranked()
        .into_iter()
        .enumerate()
        .map(|(i, (term, count))| RankedTerm {
            rank: i + 1,
            term: term.term_text(),
            count,
        })
        .collect()
}

/// Writes a rank-frequency table as `rank,term,count` CSV.
pub fn write_rank_frequency<W: Write>(rows: &[RankedTerm], sink: W) -> csv::Result<()> {
    let mut writer = csv::Writer::from_writer(sink);
    writer.write_record(["rank", "term", "count"])?;
    for row in rows {
        writer.write_record([row.rank.to_string(), row.term.clone(), row.count.to_string()])?;
    }
    writer.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Unigram(String),
    Bigram(String, String),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Unigram(w) => f.write_str(w),
            Term::Bigram(a, b) => write!(f, "{a} {b}"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VocabularyError {
    #[error("unigram budget must be at least 1")]
    ZeroUnigramBudget,
    #[error("vocabulary file is empty")]
    MissingHeader,
    #[error("bad vocabulary header `{0}`")]
    BadHeader(String),
    #[error("unsupported vocabulary version `{0}`")]
    UnsupportedVersion(String),
    #[error("vocabulary line {line}: {reason}")]
    BadEntry { line: usize, reason: String },
    #[error("vocabulary read failed: {0}")]
    Io(String),
}

/// Frequency-ranked term index. Unigrams occupy `[0, U)`, bigrams `[U, U + B)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    unigram_budget: usize,
    bigram_budget: usize,
    unigram_index: HashMap<String, usize>,
    bigram_index: HashMap<Bigram, usize>,
    terms: Vec<Term>,
}

impl Vocabulary {
    /// Keeps the `unigram_budget` most frequent unigrams and `bigram_budget`
    /// most frequent bigrams of the corpus. Ties go to the lexicographically
    /// smaller term, so the result does not depend on corpus order.
    pub fn build<'a, I>(
        corpus: I,
        unigram_budget: usize,
        bigram_budget: usize,
    ) -> Result<Vocabulary, VocabularyError>
    where
        I: IntoIterator<Item = &'a NormalizedTweet>,
        I::IntoIter: Clone,
    {
        if unigram_budget == 0 {
            return Err(VocabularyError::ZeroUnigramBudget);
        }
        let corpus = corpus.into_iter();
        let unigrams = unigram_distribution(corpus.clone()).top(unigram_budget);
        let bigrams = if bigram_budget > 0 {
            bigram_distribution(corpus).top(bigram_budget)
        } else {
            Vec::new()
        };
        Ok(Vocabulary::from_ranked(
            unigram_budget,
            bigram_budget,
            unigrams,
            bigrams,
        ))
    }

    fn from_ranked(
        unigram_budget: usize,
        bigram_budget: usize,
        unigrams: Vec<String>,
        bigrams: Vec<Bigram>,
    ) -> Vocabulary {
        let mut terms = Vec::with_capacity(unigrams.len() + bigrams.len());
        let mut unigram_index = HashMap::with_capacity(unigrams.len());
        for word in unigrams {
            unigram_index.insert(word.clone(), terms.len());
            terms.push(Term::Unigram(word));
        }
        let mut bigram_index = HashMap::with_capacity(bigrams.len());
        for (a, b) in bigrams {
            bigram_index.insert((a.clone(), b.clone()), terms.len());
            terms.push(Term::Bigram(a, b));
        }
        Vocabulary {
            unigram_budget,
            bigram_budget,
            unigram_index,
            bigram_index,
            terms,
        }
    }

    pub fn unigram_budget(&self) -> usize {
        self.unigram_budget
    }

    pub fn bigram_budget(&self) -> usize {
        self.bigram_budget
    }

    /// Total number of indices, `U + B`.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_unigrams(&self) -> usize {
        self.unigram_index.len()
    }

    pub fn num_bigrams(&self) -> usize {
        self.bigram_index.len()
    }

    pub fn unigram(&self, word: &str) -> Option<usize> {
        self.unigram_index.get(word).copied()
    }

    pub fn bigram(&self, first: &str, second: &str) -> Option<usize> {
        // HashMap<(String, String)> cannot be queried with borrowed pairs.
        self.bigram_index
            .get(&(first.to_string(), second.to_string()))
            .copied()
    }

    pub fn term(&self, index: usize) -> Option<&Term> {
        self.terms.get(index)
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn write<W: Write>(&self, mut sink: W) -> std::io::Result<()> {
        writeln!(
            sink,
            "{VOCAB_MAGIC} {VOCAB_VERSION} {} {}",
            self.unigram_budget, self.bigram_budget
        )?;
        for (index, term) in self.terms.iter().enumerate() {
            let kind = match term {
                Term::Unigram(_) => 'U',
                Term::Bigram(..) => 'B',
            };
            writeln!(sink, "{index}\t{kind}\t{term}")?;
        }
        Ok(())
    }

    /// Reads a vocabulary file until end of input.
    pub fn read<R: BufRead>(source: R) -> Result<Vocabulary, VocabularyError> {
        let mut lines = source.lines();
        let header = lines
            .next()
            .ok_or(VocabularyError::MissingHeader)?
            .map_err(|e| VocabularyError::Io(e.to_string()))?;
        let (unigram_budget, bigram_budget) = parse_vocab_header(&header)?;
        let body = lines
            .map(|l| l.map_err(|e| VocabularyError::Io(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Vocabulary::from_lines(unigram_budget, bigram_budget, body.iter().map(String::as_str), 2)
    }

    /// Parses term lines; `first_line` is the 1-based line number of the
    /// first entry, used in error messages.
    pub(crate) fn from_lines<'a>(
        unigram_budget: usize,
        bigram_budget: usize,
        lines: impl Iterator<Item = &'a str>,
        first_line: usize,
    ) -> Result<Vocabulary, VocabularyError> {
        let mut unigrams = Vec::new();
        let mut bigrams = Vec::new();
        for (offset, line) in lines.enumerate() {
            let line_no = first_line + offset;
            let bad = |reason: &str| VocabularyError::BadEntry {
                line: line_no,
                reason: reason.to_string(),
            };
            let mut fields = line.splitn(3, '\t');
            let (Some(index), Some(kind), Some(term)) = (fields.next(), fields.next(), fields.next())
            else {
                return Err(bad("expected `<index>\\t<kind>\\t<term>`"));
            };
            let index: usize = index.parse().map_err(|_| bad("index is not an integer"))?;
            if index != unigrams.len() + bigrams.len() {
                return Err(bad("indices must be contiguous from 0"));
            }
            match kind {
                "U" => {
                    if !bigrams.is_empty() {
                        return Err(bad("unigram after bigram"));
                    }
                    if term.is_empty() || term.contains(char::is_whitespace) {
                        return Err(bad("malformed unigram"));
                    }
                    unigrams.push(term.to_string());
                }
                "B" => {
                    let mut parts = term.split(' ');
                    match (parts.next(), parts.next(), parts.next()) {
                        (Some(a), Some(b), None) if !a.is_empty() && !b.is_empty() => {
                            bigrams.push((a.to_string(), b.to_string()))
                        }
                        _ => return Err(bad("bigram must be two space-separated words")),
                    }
                }
                _ => return Err(bad("kind must be U or B")),
            }
        }
        if unigrams.len() > unigram_budget || bigrams.len() > bigram_budget {
            return Err(VocabularyError::BadEntry {
                line: first_line,
                reason: "more terms than the declared budget".to_string(),
            });
        }
        let vocab = Vocabulary::from_ranked(unigram_budget, bigram_budget, unigrams, bigrams);
        if vocab.unigram_index.len() + vocab.bigram_index.len() != vocab.terms.len() {
            return Err(VocabularyError::BadEntry {
                line: first_line,
                reason: "duplicate term".to_string(),
            });
        }
        Ok(vocab)
    }
}

pub(crate) fn parse_vocab_header(header: &str) -> Result<(usize, usize), VocabularyError> {
    let fields: Vec<&str> = header.split_whitespace().collect();
    match fields.as_slice() {
        [VOCAB_MAGIC, VOCAB_VERSION, uni, bi] => {
            let uni = uni
                .parse()
                .map_err(|_| VocabularyError::BadHeader(header.to_string()))?;
            let bi = bi
                .parse()
                .map_err(|_| VocabularyError::BadHeader(header.to_string()))?;
            Ok((uni, bi))
        }
        [VOCAB_MAGIC, version, ..] => Err(VocabularyError::UnsupportedVersion(version.to_string())),
        _ => Err(VocabularyError::BadHeader(header.to_string())),
    }
}

/// How a term's occurrences in one tweet become a feature value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum FeatureMode {
    /// 1 for every distinct term present.
    #[default]
    Presence,
    /// In-tweet occurrence count.
    Frequency,
}

impl FeatureMode {
    pub fn as_str(self) -> &'static str {
        match self {
            FeatureMode::Presence => "presence",
            FeatureMode::Frequency => "frequency",
        }
    }
}

impl fmt::Display for FeatureMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown feature mode `{0}` (expected presence or frequency)")]
pub struct UnknownFeatureMode(pub String);

impl FromStr for FeatureMode {
    type Err = UnknownFeatureMode;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "presence" => Ok(FeatureMode::Presence),
            "frequency" => Ok(FeatureMode::Frequency),
            other => Err(UnknownFeatureMode(other.to_string())),
        }
    }
}

/// Sparse document vector with entries sorted by index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FeatureVector {
    entries: Vec<(usize, u32)>,
    mode: FeatureMode,
}

impl FeatureVector {
    /// Builds a vector from arbitrary `(index, value)` pairs. Zero values are
    /// dropped, duplicate indices are summed, and presence mode clamps every
    /// value to 1.
    pub fn from_entries<I>(entries: I, mode: FeatureMode) -> FeatureVector
    where
        I: IntoIterator<Item = (usize, u32)>,
    {
        let mut merged: BTreeMap<usize, u32> = BTreeMap::new();
        for (index, value) in entries {
            if value > 0 {
                *merged.entry(index).or_insert(0) += value;
            }
        }
        let entries = merged
            .into_iter()
            .map(|(i, v)| match mode {
                FeatureMode::Presence => (i, 1),
                FeatureMode::Frequency => (i, v),
            })
            .collect();
        FeatureVector { entries, mode }
    }

    pub fn empty(mode: FeatureMode) -> FeatureVector {
        FeatureVector {
            entries: Vec::new(),
            mode,
        }
    }

    pub fn entries(&self) -> &[(usize, u32)] {
        &self.entries
    }

    pub fn mode(&self) -> FeatureMode {
        self.mode
    }

    pub fn get(&self, index: usize) -> u32 {
        self.entries
            .binary_search_by_key(&index, |&(i, _)| i)
            .map(|pos| self.entries[pos].1)
            .unwrap_or(0)
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sum of all feature values.
    pub fn total(&self) -> u64 {
        self.entries.iter().map(|&(_, v)| u64::from(v)).sum()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|&(i, _)| i)
    }
}

/// Maps a tweet onto the vocabulary. Out-of-vocabulary unigrams and bigrams
/// are ignored.
pub fn vectorize(tweet: &NormalizedTweet, vocab: &Vocabulary, mode: FeatureMode) -> FeatureVector {
    let terms: Vec<&str> = tweet.terms().collect();
    let unigrams = terms.iter().filter_map(|w| vocab.unigram(w));
    let bigrams = terms
        .windows(2)
        .filter(|_| vocab.num_bigrams() > 0)
        .filter_map(|pair| vocab.bigram(pair[0], pair[1]));
    FeatureVector::from_entries(unigrams.chain(bigrams).map(|i| (i, 1)), mode)
}
