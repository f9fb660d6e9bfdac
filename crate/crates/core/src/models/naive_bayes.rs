//! Multinomial naive Bayes with additive (Laplace) smoothing, in log space.

use super::{ModelError, Sentiment};
use crate::features::{FeatureMode, FeatureVector};

pub const DEFAULT_ALPHA: f64 = 1.0;

#[derive(Debug, Clone, PartialEq)]
pub struct NaiveBayesModel {
    class_log_prior: [f64; 2],
    /// `[class][feature]` log P(feature | class).
    feature_log_likelihood: [Vec<f64>; 2],
    alpha: f64,
    mode: FeatureMode,
}

impl NaiveBayesModel {
    /// Assembles a model from stored parameters, checking shapes and finiteness.
    pub fn from_parts(
        class_log_prior: [f64; 2],
        feature_log_likelihood: [Vec<f64>; 2],
        alpha: f64,
        mode: FeatureMode,
    ) -> Result<Self, ModelError> {
        let vocab_size = feature_log_likelihood[0].len();
        if feature_log_likelihood[1].len() != vocab_size {
            return Err(ModelError::ShapeMismatch(vocab_size));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(ModelError::InvalidAlpha(alpha));
        }
        let finite = class_log_prior
            .iter()
            .chain(feature_log_likelihood.iter().flatten())
            .all(|v| v.is_finite());
        if !finite {
            return Err(ModelError::NonFinite);
        }
        Ok(NaiveBayesModel {
            class_log_prior,
            feature_log_likelihood,
            alpha,
            mode,
        })
    }

    pub fn class_log_prior(&self) -> [f64; 2] {
        self.class_log_prior
    }

    pub fn feature_log_likelihood(&self, class: Sentiment) -> &[f64] {
        &self.feature_log_likelihood[class.index()]
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn mode(&self) -> FeatureMode {
        self.mode
    }

    pub fn vocab_size(&self) -> usize {
        self.feature_log_likelihood[0].len()
    }

    /// Per-class unnormalized log posterior. Indices outside the vocabulary
    /// are ignored.
    pub fn log_scores(&self, doc: &FeatureVector) -> [f64; 2] {
        let mut scores = self.class_log_prior;
        for &(index, value) in doc.entries() {
            if index >= self.vocab_size() {
                continue;
            }
            let weight = match self.mode {
                FeatureMode::Presence => 1.0,
                FeatureMode::Frequency => f64::from(value),
            };
            for class in Sentiment::ALL {
                scores[class.index()] += weight * self.feature_log_likelihood[class.index()][index];
            }
        }
        scores
    }

    pub fn predict(&self, doc: &FeatureVector) -> Sentiment {
        Sentiment::argmax(self.log_scores(doc))
    }
}

/// Fits priors from document counts and smoothed per-class feature
/// likelihoods `(count + alpha) / (class_total + alpha * vocab_size)`.
pub fn nb_train(
    corpus: &[(FeatureVector, Sentiment)],
    vocab_size: usize,
    alpha: f64,
) -> Result<NaiveBayesModel, ModelError> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(ModelError::InvalidAlpha(alpha));
    }
    let Some((first, _)) = corpus.first() else {
        return Err(ModelError::NoTrainingData);
    };
    if vocab_size == 0 {
        return Err(ModelError::EmptyVocabulary);
    }
    let mode = first.mode();

    let mut doc_counts = [0u64; 2];
    let mut feature_counts = [vec![0u64; vocab_size], vec![0u64; vocab_size]];
    for (doc, label) in corpus {
        if doc.mode() != mode {
            return Err(ModelError::MixedFeatureModes(mode, doc.mode()));
        }
        let class = label.index();
        doc_counts[class] += 1;
        for &(index, value) in doc.entries() {
            let slot = feature_counts[class]
                .get_mut(index)
                .ok_or(ModelError::IndexOutOfRange { index, vocab_size })?;
            *slot += match mode {
                FeatureMode::Presence => 1,
                FeatureMode::Frequency => u64::from(value),
            };
        }
    }
    if doc_counts.contains(&0) {
        return Err(ModelError::DegenerateLabels);
    }

    let total_docs = (doc_counts[0] + doc_counts[1]) as f64;
    let class_log_prior = doc_counts.map(|n| (n as f64 / total_docs).ln());
    let feature_log_likelihood = feature_counts.map(|counts| {
        let total: u64 = counts.iter().sum();
        let denominator = total as f64 + alpha * vocab_size as f64;
        counts
            .iter()
            .map(|&count| ((count as f64 + alpha) / denominator).ln())
            .collect()
    });
    Ok(NaiveBayesModel {
        class_log_prior,
        feature_log_likelihood,
        alpha,
        mode,
    })
}

/// Predicted class with the per-class log scores behind it.
pub fn nb_predict(model: &NaiveBayesModel, doc: &FeatureVector) -> (Sentiment, [f64; 2]) {
    let scores = model.log_scores(doc);
    (Sentiment::argmax(scores), scores)
}
