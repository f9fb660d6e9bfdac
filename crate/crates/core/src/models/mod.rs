//! Sentiment classifiers: a lexicon-counting baseline, multinomial naive
//! Bayes and a conditional maximum entropy model.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::features::FeatureMode;

pub mod baseline;
pub mod maxent;
pub mod naive_bayes;

pub use baseline::{baseline_classify, OpinionLexicon};
pub use maxent::{
    maxent_predict, maxent_prob, maxent_train, MaxEntModel, TrainerAlgorithm, TrainerConfig,
    TrainingOutcome,
};
pub use naive_bayes::{nb_predict, nb_train, NaiveBayesModel};

/// Binary tweet polarity, encoded as 0 (negative) and 1 (positive).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sentiment {
    Negative = 0,
    Positive = 1,
}

impl Sentiment {
    pub const ALL: [Sentiment; 2] = [Sentiment::Negative, Sentiment::Positive];

    /// Position of this class in per-class arrays.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Sentiment> {
        match index {
            0 => Some(Sentiment::Negative),
            1 => Some(Sentiment::Positive),
            _ => None,
        }
    }

    /// Argmax over per-class scores; an exact tie goes to positive.
    pub fn argmax(scores: [f64; 2]) -> Sentiment {
        if scores[Sentiment::Positive.index()] >= scores[Sentiment::Negative.index()] {
            Sentiment::Positive
        } else {
            Sentiment::Negative
        }
    }
}

impl fmt::Display for Sentiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("sentiment must be 0 or 1, got `{0}`")]
pub struct InvalidSentiment(pub String);

impl FromStr for Sentiment {
    type Err = InvalidSentiment;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "0" => Ok(Sentiment::Negative),
            "1" => Ok(Sentiment::Positive),
            other => Err(InvalidSentiment(other.to_string())),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("no training data")]
    NoTrainingData,
    #[error("degenerate labels: training data must contain both classes")]
    DegenerateLabels,
    #[error("no active features in the training data")]
    NoActiveFeatures,
    #[error("vocabulary is empty")]
    EmptyVocabulary,
    #[error("feature index {index} is outside the vocabulary of size {vocab_size}")]
    IndexOutOfRange { index: usize, vocab_size: usize },
    #[error("training vectors mix {0} and {1} features")]
    MixedFeatureModes(FeatureMode, FeatureMode),
    #[error("smoothing parameter must be positive and finite, got {0}")]
    InvalidAlpha(f64),
    #[error("invalid trainer configuration: {0}")]
    InvalidConfig(String),
    #[error("parameter shape does not match vocabulary size {0}")]
    ShapeMismatch(usize),
    #[error("non-finite model parameter")]
    NonFinite,
}
