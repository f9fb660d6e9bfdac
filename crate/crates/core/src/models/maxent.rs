//! Conditional maximum entropy classifier trained by iterative scaling.
//!
//! Every vocabulary index `i` yields one joint feature per class,
//! `f_{i,c}(d, c') = value_i(d) * [c' = c]`, with weight `lambda_{i,c}`.
//! The conditional distribution is the softmax of the per-class weight sums.
//!
//! Two trainers are provided. Generalized iterative scaling (GIS) moves every
//! weight by `ln(E_emp / E_model) / C`, where `C` is the largest total feature
//! mass of any training document. Improved iterative scaling (IIS) instead
//! solves, per weight, for the step `delta` with
//!
//! ```text
//! sum_d P(c | d) value_i(d) exp(delta * mass(d)) = E_emp[f_{i,c}]
//! ```
//!
//! by Newton's method. Both increase the training log-likelihood
//! monotonically.

use std::fmt;
use std::str::FromStr;

use super::{ModelError, Sentiment};
use crate::features::FeatureVector;

/// Weights are kept inside `[-WEIGHT_LIMIT, WEIGHT_LIMIT]`.
pub const WEIGHT_LIMIT: f64 = 30.0;

const NEWTON_MAX_STEPS: usize = 50;
const NEWTON_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum TrainerAlgorithm {
    Gis,
    #[default]
    Iis,
}

impl TrainerAlgorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            TrainerAlgorithm::Gis => "gis",
            TrainerAlgorithm::Iis => "iis",
        }
    }
}

impl fmt::Display for TrainerAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TrainerAlgorithm {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "gis" => Ok(TrainerAlgorithm::Gis),
            "iis" => Ok(TrainerAlgorithm::Iis),
            other => Err(ModelError::InvalidConfig(format!(
                "unknown trainer `{other}` (expected gis or iis)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainerConfig {
    algorithm: TrainerAlgorithm,
    max_iterations: usize,
    ll_tolerance: f64,
}

impl TrainerConfig {
    pub const DEFAULT_MAX_ITERATIONS: usize = 100;
    pub const DEFAULT_LL_TOLERANCE: f64 = 1e-6;

    pub fn new(
        algorithm: TrainerAlgorithm,
        max_iterations: usize,
        ll_tolerance: f64,
    ) -> Result<Self, ModelError> {
        if max_iterations == 0 {
            return Err(ModelError::InvalidConfig(
                "max_iterations must be at least 1".to_string(),
            ));
        }
        if !(ll_tolerance > 0.0 && ll_tolerance.is_finite()) {
            return Err(ModelError::InvalidConfig(format!(
                "ll_tolerance must be positive, got {ll_tolerance}"
            )));
        }
        Ok(TrainerConfig {
            algorithm,
            max_iterations,
            ll_tolerance,
        })
    }

    pub fn algorithm(&self) -> TrainerAlgorithm {
        self.algorithm
    }

    pub fn max_iterations(&self) -> usize {
        self.max_iterations
    }

    pub fn ll_tolerance(&self) -> f64 {
        self.ll_tolerance
    }
}

impl Default for TrainerConfig {
    fn default() -> Self {
        TrainerConfig {
            algorithm: TrainerAlgorithm::default(),
            max_iterations: Self::DEFAULT_MAX_ITERATIONS,
            ll_tolerance: Self::DEFAULT_LL_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxEntModel {
    /// `lambda_{i,c}` stored at `2 * i + c`.
    weights: Vec<f64>,
}

impl MaxEntModel {
    pub fn zeros(vocab_size: usize) -> MaxEntModel {
        MaxEntModel {
            weights: vec![0.0; 2 * vocab_size],
        }
    }

    /// Builds a model from per-feature `[negative, positive]` weights.
    pub fn from_weights(weights: Vec<[f64; 2]>) -> Result<MaxEntModel, ModelError> {
        if weights.iter().flatten().any(|w| !w.is_finite()) {
            return Err(ModelError::NonFinite);
        }
        Ok(MaxEntModel {
            weights: weights.into_iter().flatten().collect(),
        })
    }

    pub fn vocab_size(&self) -> usize {
        self.weights.len() / 2
    }

    pub fn weight(&self, index: usize, class: Sentiment) -> f64 {
        self.weights[2 * index + class.index()]
    }

    pub fn set_weight(&mut self, index: usize, class: Sentiment, value: f64) {
        self.weights[2 * index + class.index()] = value;
    }

    /// `[negative, positive]` weight pairs, one per vocabulary index.
    pub fn weight_pairs(&self) -> impl Iterator<Item = [f64; 2]> + '_ {
        self.weights.chunks_exact(2).map(|w| [w[0], w[1]])
    }

    /// Per-class weight sums. Indices outside the vocabulary are ignored.
    pub fn scores(&self, doc: &FeatureVector) -> [f64; 2] {
        let mut scores = [0.0; 2];
        for &(index, value) in doc.entries() {
            if index >= self.vocab_size() {
                continue;
            }
            let value = f64::from(value);
            scores[0] += value * self.weights[2 * index];
            scores[1] += value * self.weights[2 * index + 1];
        }
        scores
    }

    /// `[P(negative | doc), P(positive | doc)]`.
    pub fn prob(&self, doc: &FeatureVector) -> [f64; 2] {
        softmax(self.scores(doc))
    }

    pub fn predict(&self, doc: &FeatureVector) -> Sentiment {
        Sentiment::argmax(self.prob(doc))
    }
}

fn softmax(scores: [f64; 2]) -> [f64; 2] {
    let max = scores[0].max(scores[1]);
    let e = scores.map(|s| (s - max).exp());
    let z = e[0] + e[1];
    e.map(|v| v / z)
}

fn log_softmax(scores: [f64; 2]) -> [f64; 2] {
    let max = scores[0].max(scores[1]);
    let log_z = max + ((scores[0] - max).exp() + (scores[1] - max).exp()).ln();
    scores.map(|s| s - log_z)
}

pub fn maxent_prob(model: &MaxEntModel, doc: &FeatureVector) -> [f64; 2] {
    model.prob(doc)
}

pub fn maxent_predict(model: &MaxEntModel, doc: &FeatureVector) -> Sentiment {
    model.predict(doc)
}

/// Sum over documents of `ln P(label | doc)`.
pub fn log_likelihood(model: &MaxEntModel, corpus: &[(FeatureVector, Sentiment)]) -> f64 {
    corpus
        .iter()
        .map(|(doc, label)| log_softmax(model.scores(doc))[label.index()])
        .sum()
}

/// Observed feature totals, laid out like the model weights (`2 * i + c`).
pub fn empirical_expectations(
    corpus: &[(FeatureVector, Sentiment)],
    vocab_size: usize,
) -> Vec<f64> {
    let mut expected = vec![0.0; 2 * vocab_size];
    for (doc, label) in corpus {
        for &(index, value) in doc.entries() {
            if index < vocab_size {
                expected[2 * index + label.index()] += f64::from(value);
            }
        }
    }
    expected
}

/// Feature totals expected under the model, `sum_d P(c | d) value_i(d)`.
pub fn model_expectations(model: &MaxEntModel, corpus: &[(FeatureVector, Sentiment)]) -> Vec<f64> {
    let vocab_size = model.vocab_size();
    let mut expected = vec![0.0; 2 * vocab_size];
    for (doc, _) in corpus {
        let p = model.prob(doc);
        for &(index, value) in doc.entries() {
            if index < vocab_size {
                let value = f64::from(value);
                expected[2 * index] += p[0] * value;
                expected[2 * index + 1] += p[1] * value;
            }
        }
    }
    expected
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingOutcome {
    pub model: MaxEntModel,
    /// Training log-likelihood before the first update and after each one.
    pub log_likelihoods: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Largest total feature mass of any training document.
    pub slack_constant: u64,
}

pub fn maxent_train(
    corpus: &[(FeatureVector, Sentiment)],
    vocab_size: usize,
    config: &TrainerConfig,
) -> Result<MaxEntModel, ModelError> {
    train(corpus, vocab_size, config).map(|outcome| outcome.model)
}

/// Trains and reports the log-likelihood trace.
pub fn train(
    corpus: &[(FeatureVector, Sentiment)],
    vocab_size: usize,
    config: &TrainerConfig,
) -> Result<TrainingOutcome, ModelError> {
    if corpus.is_empty() {
        return Err(ModelError::NoTrainingData);
    }
    let mut seen = [false; 2];
    for (doc, label) in corpus {
        seen[label.index()] = true;
        if let Some(index) = doc.max_index().filter(|&i| i >= vocab_size) {
            return Err(ModelError::IndexOutOfRange { index, vocab_size });
        }
    }
    if seen.contains(&false) {
        return Err(ModelError::DegenerateLabels);
    }
    let slack_constant = corpus.iter().map(|(doc, _)| doc.total()).max().unwrap_or(0);
    if slack_constant == 0 {
        return Err(ModelError::NoActiveFeatures);
    }

    let empirical = empirical_expectations(corpus, vocab_size);
    let mut model = MaxEntModel::zeros(vocab_size);
    let mut ll = log_likelihood(&model, corpus);
    let mut log_likelihoods = vec![ll];
    let mut iterations = 0;
    let mut converged = false;

    while iterations < config.max_iterations {
        match config.algorithm {
            TrainerAlgorithm::Gis => gis_step(&mut model, corpus, &empirical, slack_constant as f64),
            TrainerAlgorithm::Iis => iis_step(&mut model, corpus, &empirical),
        }
        iterations += 1;
        let next = log_likelihood(&model, corpus);
        log_likelihoods.push(next);
        let improvement = (next - ll) / ll.abs().max(f64::MIN_POSITIVE);
        ll = next;
        if improvement < config.ll_tolerance {
            converged = true;
            break;
        }
    }

    Ok(TrainingOutcome {
        model,
        log_likelihoods,
        iterations,
        converged,
        slack_constant,
    })
}

fn gis_step(
    model: &mut MaxEntModel,
    corpus: &[(FeatureVector, Sentiment)],
    empirical: &[f64],
    slack_constant: f64,
) {
    let expected = model_expectations(model, corpus);
    for (k, weight) in model.weights.iter_mut().enumerate() {
        // features never observed with a class keep their weight
        if empirical[k] > 0.0 && expected[k] > 0.0 {
            let step = (empirical[k] / expected[k]).ln() / slack_constant;
            *weight = (*weight + step).clamp(-WEIGHT_LIMIT, WEIGHT_LIMIT);
        }
    }
}

/// Per-weight terms of the IIS update equation: `(mass, sum of P(c|d) value)`
/// grouped by document mass.
type MassBuckets = Vec<(u64, f64)>;

fn iis_step(model: &mut MaxEntModel, corpus: &[(FeatureVector, Sentiment)], empirical: &[f64]) {
    let vocab_size = model.vocab_size();
    let mut buckets: Vec<MassBuckets> = vec![Vec::new(); 2 * vocab_size];
    for (doc, _) in corpus {
        let mass = doc.total();
        let p = model.prob(doc);
        for &(index, value) in doc.entries() {
            for class in 0..2 {
                let term = p[class] * f64::from(value);
                let bucket = &mut buckets[2 * index + class];
                match bucket.iter_mut().find(|(m, _)| *m == mass) {
                    Some((_, sum)) => *sum += term,
                    None => bucket.push((mass, term)),
                }
            }
        }
    }
    for (k, weight) in model.weights.iter_mut().enumerate() {
        if empirical[k] > 0.0 && !buckets[k].is_empty() {
            let lo = -WEIGHT_LIMIT - *weight;
            let hi = WEIGHT_LIMIT - *weight;
            let delta = solve_iis_update(&buckets[k], empirical[k], lo, hi);
            *weight = (*weight + delta).clamp(-WEIGHT_LIMIT, WEIGHT_LIMIT);
        }
    }
}

/// Newton's method on `ln sum_k a_k exp(delta m_k) - ln target`, which is
/// convex and increasing in `delta`. The result is kept in `[lo, hi]`.
fn solve_iis_update(terms: &[(u64, f64)], target: f64, lo: f64, hi: f64) -> f64 {
    let log_target = target.ln();
    let mut delta = 0.0f64;
    for _ in 0..NEWTON_MAX_STEPS {
        let exponents: Vec<f64> = terms
            .iter()
            .map(|&(m, a)| a.ln() + delta * m as f64)
            .collect();
        let shift = exponents.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut z = 0.0;
        let mut weighted_mass = 0.0;
        for (&(m, _), e) in terms.iter().zip(&exponents) {
            let w = (e - shift).exp();
            z += w;
            weighted_mass += w * m as f64;
        }
        let value = shift + z.ln() - log_target;
        let slope = weighted_mass / z;
        let next = (delta - value / slope).clamp(lo, hi);
        let step = next - delta;
        delta = next;
        if step.abs() < NEWTON_TOLERANCE {
            break;
        }
    }
    delta
}
