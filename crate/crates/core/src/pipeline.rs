//! End-to-end training and prediction over normalized tweets.

use crate::features::{vectorize, FeatureMode, FeatureVector, Vocabulary, VocabularyError};
use crate::io::model_file::{ModelArtifact, ModelParameters, TrainingMetadata};
use crate::models::{
    baseline_classify, maxent, naive_bayes, ModelError, OpinionLexicon, Sentiment, TrainerConfig,
};
use crate::normalizer::NormalizedTweet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Vocabulary(#[from] VocabularyError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Classifier {
    NaiveBayes { alpha: f64 },
    MaxEnt(TrainerConfig),
    Baseline(OpinionLexicon),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOptions {
    pub classifier: Classifier,
    pub features: FeatureMode,
    pub unigrams: usize,
    pub bigrams: usize,
    pub timestamp: u64,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            classifier: Classifier::NaiveBayes {
                alpha: naive_bayes::DEFAULT_ALPHA,
            },
            features: FeatureMode::Presence,
            unigrams: crate::features::DEFAULT_UNIGRAMS,
            bigrams: crate::features::DEFAULT_BIGRAMS,
            timestamp: 0,
        }
    }
}

/// Builds the vocabulary from `corpus`, vectorizes it and fits the chosen
/// classifier.
pub fn train_artifact(
    corpus: &[(NormalizedTweet, Sentiment)],
    options: &TrainOptions,
) -> Result<ModelArtifact, PipelineError> {
    let vocabulary = Vocabulary::build(corpus.iter().map(|(t, _)| t), options.unigrams, options.bigrams)?;
    let docs: Vec<(FeatureVector, Sentiment)> = corpus
        .iter()
        .map(|(tweet, label)| (vectorize(tweet, &vocabulary, options.features), *label))
        .collect();
    let (parameters, trainer) = match &options.classifier {
        Classifier::NaiveBayes { alpha } => (
            ModelParameters::NaiveBayes(naive_bayes::nb_train(&docs, vocabulary.len(), *alpha)?),
            None,
        ),
        Classifier::MaxEnt(config) => (
            ModelParameters::MaxEnt(maxent::maxent_train(&docs, vocabulary.len(), config)?),
            Some(*config),
        ),
        Classifier::Baseline(lexicon) => {
            if corpus.is_empty() {
                return Err(ModelError::NoTrainingData.into());
            }
            (ModelParameters::Baseline(lexicon.clone()), None)
        }
    };
    Ok(ModelArtifact {
        vocabulary,
        parameters,
        metadata: TrainingMetadata {
            n_docs: corpus.len(),
            feature_mode: options.features,
            trainer,
            timestamp: options.timestamp,
        },
    })
}

impl ModelArtifact {
    pub fn vectorize(&self, tweet: &NormalizedTweet) -> FeatureVector {
        vectorize(tweet, &self.vocabulary, self.metadata.feature_mode)
    }

    pub fn predict(&self, tweet: &NormalizedTweet) -> Sentiment {
        match &self.parameters {
            ModelParameters::NaiveBayes(nb) => nb.predict(&self.vectorize(tweet)),
            ModelParameters::MaxEnt(me) => me.predict(&self.vectorize(tweet)),
            ModelParameters::Baseline(lexicon) => baseline_classify(tweet, lexicon),
        }
    }
}
