//! Word-counting baseline over an opinion lexicon.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use thiserror::Error;

use super::Sentiment;
use crate::normalizer::NormalizedTweet;

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("word `{0}` appears in both the positive and negative lexicon")]
    Conflict(String),
    #[error("cannot read lexicon {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Disjoint sets of positive and negative opinion words.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OpinionLexicon {
    positive: BTreeSet<String>,
    negative: BTreeSet<String>,
}

impl OpinionLexicon {
    pub fn new<P, N>(positive: P, negative: N) -> Result<Self, LexiconError>
    where
        P: IntoIterator,
        P::Item: Into<String>,
        N: IntoIterator,
        N::Item: Into<String>,
    {
        let positive: BTreeSet<String> = positive.into_iter().map(Into::into).collect();
        let negative: BTreeSet<String> = negative.into_iter().map(Into::into).collect();
        if let Some(word) = positive.intersection(&negative).next() {
            return Err(LexiconError::Conflict(word.clone()));
        }
        Ok(OpinionLexicon { positive, negative })
    }

    /// Parses one word per line; lines starting with `;` are comments.
    pub fn parse(positive: &str, negative: &str) -> Result<Self, LexiconError> {
        OpinionLexicon::new(lexicon_words(positive), lexicon_words(negative))
    }

    pub fn load(positive: &Path, negative: &Path) -> Result<Self, LexiconError> {
        let read = |path: &Path| {
            // published lexicons are not always valid UTF-8
            fs::read(path)
                .map(|bytes| String::from_utf8_lossy(&bytes).into_owned())
                .map_err(|source| LexiconError::Io {
                    path: path.display().to_string(),
                    source,
                })
        };
        OpinionLexicon::parse(&read(positive)?, &read(negative)?)
    }

    pub fn positive_words(&self) -> impl Iterator<Item = &str> {
        self.positive.iter().map(String::as_str)
    }

    pub fn negative_words(&self) -> impl Iterator<Item = &str> {
        self.negative.iter().map(String::as_str)
    }

    pub fn is_positive(&self, word: &str) -> bool {
        self.positive.contains(word)
    }

    pub fn is_negative(&self, word: &str) -> bool {
        self.negative.contains(word)
    }

    /// (positive hits, negative hits) over the tweet's tokens.
    pub fn count_hits(&self, tweet: &NormalizedTweet) -> (usize, usize) {
        tweet.terms().fold((0, 0), |(pos, neg), term| {
            (
                pos + usize::from(self.is_positive(term)),
                neg + usize::from(self.is_negative(term)),
            )
        })
    }
}

fn lexicon_words(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|line| !line.is_empty() && !line.starts_with(';'))
        .map(str::to_string)
        .collect()
}

/// Positive unless negative words strictly outnumber positive ones.
pub fn baseline_classify(tweet: &NormalizedTweet, lexicon: &OpinionLexicon) -> Sentiment {
    let (pos, neg) = lexicon.count_hits(tweet);
    if pos >= neg {
        Sentiment::Positive
    } else {
        Sentiment::Negative
    }
}
