//! Tweet sentiment classification.
//!
//! The pipeline runs raw tweets through [`normalizer`], turns the resulting
//! token sequences into sparse unigram/bigram vectors with [`features`], and
//! classifies them with one of the [`models`]: a lexicon-counting baseline,
//! multinomial naive Bayes, or a maximum entropy model trained by GIS or IIS.
//! [`eval`] scores predictions and summarizes corpora; [`io`] handles CSV
//! datasets, model files and dataset splits.

pub mod eval;
pub mod features;
pub mod io;
pub mod models;
pub mod normalizer;
pub mod pipeline;

pub use features::{FeatureMode, FeatureVector, Vocabulary};
pub use models::{MaxEntModel, NaiveBayesModel, OpinionLexicon, Sentiment, TrainerConfig};
pub use pipeline::{train_artifact, Classifier, TrainOptions};
pub use normalizer::{EmoticonTable, NormalizedTweet, Normalizer, SpecialToken, Token};
