//! Versioned text format for trained models.
//!
//! ```text
//! tweetiment-model v1 <naive_bayes|maxent|baseline>
//! n_docs <int>
//! features <presence|frequency>
//! trainer <gis|iis> <max_iterations> <ll_tolerance>   (or `trainer none`)
//! timestamp <unix seconds>
//! vocab <line count>
//! tweetiment-vocab v1 <N_uni> <N_bi>
//! <index>\t<U|B>\t<term>
//! ...
//! params <line count>
//! ...
//! end
//! ```
//!
//! Naive Bayes parameters are `alpha <a>`, `prior <neg> <pos>` and one
//! `<index> <neg> <pos>` log-likelihood line per vocabulary index. Maxent
//! parameters are one `<index> <neg> <pos>` weight line per index. Baseline
//! parameters are `+ <word>` and `- <word>` lexicon lines. Floats are written
//! in shortest round-trip form, so reading a file back reproduces every
//! parameter bit for bit.

use std::fmt;
use std::io::{BufRead, Write};

use thiserror::Error;

use crate::features::{parse_vocab_header, FeatureMode, Vocabulary, VocabularyError};
use crate::models::{
    MaxEntModel, ModelError, NaiveBayesModel, OpinionLexicon, TrainerAlgorithm, TrainerConfig,
};

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "tweetiment-model";

#[derive(Debug, Error)]
pub enum ModelFormatError {
    #[error("model file is truncated: {0}")]
    Truncated(&'static str),
    #[error("not a model file: bad header `{0}`")]
    BadHeader(String),
    #[error("unsupported model format version `{0}`")]
    UnsupportedVersion(String),
    #[error("unknown model kind `{0}`")]
    UnknownKind(String),
    #[error("model file line {line}: {reason}")]
    BadLine { line: usize, reason: String },
    #[error("embedded vocabulary: {0}")]
    Vocabulary(#[from] VocabularyError),
    #[error("model parameters: {0}")]
    Model(#[from] ModelError),
    #[error("model file I/O: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    NaiveBayes,
    MaxEnt,
    Baseline,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::NaiveBayes => "naive_bayes",
            ModelKind::MaxEnt => "maxent",
            ModelKind::Baseline => "baseline",
        }
    }

    fn parse(s: &str) -> Option<ModelKind> {
        [ModelKind::NaiveBayes, ModelKind::MaxEnt, ModelKind::Baseline]
            .into_iter()
            .find(|k| k.as_str() == s)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelParameters {
    NaiveBayes(NaiveBayesModel),
    MaxEnt(MaxEntModel),
    Baseline(OpinionLexicon),
}

impl ModelParameters {
    pub fn kind(&self) -> ModelKind {
        match self {
            ModelParameters::NaiveBayes(_) => ModelKind::NaiveBayes,
            ModelParameters::MaxEnt(_) => ModelKind::MaxEnt,
            ModelParameters::Baseline(_) => ModelKind::Baseline,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingMetadata {
    pub n_docs: usize,
    pub feature_mode: FeatureMode,
    pub trainer: Option<TrainerConfig>,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

/// A trained classifier together with the vocabulary it was trained on.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelArtifact {
    pub vocabulary: Vocabulary,
    pub parameters: ModelParameters,
    pub metadata: TrainingMetadata,
}

impl ModelArtifact {
    pub fn kind(&self) -> ModelKind {
        self.parameters.kind()
    }

    pub fn format_version(&self) -> u32 {
        FORMAT_VERSION
    }
}

pub fn serialize_model<W: Write>(model: &ModelArtifact, mut sink: W) -> std::io::Result<()> {
    let meta = &model.metadata;
    writeln!(sink, "{MAGIC} v{FORMAT_VERSION} {}", model.kind())?;
    writeln!(sink, "n_docs {}", meta.n_docs)?;
    writeln!(sink, "features {}", meta.feature_mode)?;
    match &meta.trainer {
        Some(t) => writeln!(
            sink,
            "trainer {} {} {:?}",
            t.algorithm(),
            t.max_iterations(),
            t.ll_tolerance()
        )?,
        None => writeln!(sink, "trainer none")?,
    }
    writeln!(sink, "timestamp {}", meta.timestamp)?;

    let mut vocab = Vec::new();
    model.vocabulary.write(&mut vocab)?;
    let vocab = String::from_utf8(vocab).expect("vocabulary terms are UTF-8");
    writeln!(sink, "vocab {}", vocab.lines().count())?;
    sink.write_all(vocab.as_bytes())?;

    let params = parameter_lines(&model.parameters);
    writeln!(sink, "params {}", params.len())?;
    for line in &params {
        writeln!(sink, "{line}")?;
    }
    writeln!(sink, "end")?;
    Ok(())
}

fn parameter_lines(parameters: &ModelParameters) -> Vec<String> {
    match parameters {
        ModelParameters::NaiveBayes(nb) => {
            use crate::models::Sentiment::{Negative, Positive};
            let prior = nb.class_log_prior();
            let mut lines = vec![
                format!("alpha {:?}", nb.alpha()),
                format!("prior {:?} {:?}", prior[0], prior[1]),
            ];
            let neg = nb.feature_log_likelihood(Negative);
            let pos = nb.feature_log_likelihood(Positive);
            lines.extend(
                neg.iter()
                    .zip(pos)
                    .enumerate()
                    .map(|(i, (n, p))| format!("{i} {n:?} {p:?}")),
            );
            lines
        }
        ModelParameters::MaxEnt(me) => me
            .weight_pairs()
            .enumerate()
            .map(|(i, [n, p])| format!("{i} {n:?} {p:?}"))
            .collect(),
        ModelParameters::Baseline(lexicon) => lexicon
            .positive_words()
            .map(|w| format!("+ {w}"))
            .chain(lexicon.negative_words().map(|w| format!("- {w}")))
            .collect(),
    }
}

/// Line source that tracks 1-based line numbers.
struct Lines<R> {
    inner: std::io::Lines<R>,
    line: usize,
}

impl<R: BufRead> Lines<R> {
    fn next(&mut self, what: &'static str) -> Result<String, ModelFormatError> {
        self.line += 1;
        match self.inner.next() {
            Some(line) => Ok(line?),
            None => Err(ModelFormatError::Truncated(what)),
        }
    }

    fn bad(&self, reason: impl Into<String>) -> ModelFormatError {
        ModelFormatError::BadLine {
            line: self.line,
            reason: reason.into(),
        }
    }

    /// Reads `<key> <rest>` and returns `rest`.
    fn keyed(&mut self, key: &'static str) -> Result<String, ModelFormatError> {
        let line = self.next(key)?;
        match line.split_once(' ') {
            Some((k, rest)) if k == key => Ok(rest.to_string()),
            _ => Err(self.bad(format!("expected `{key} ...`"))),
        }
    }

    fn parse<T: std::str::FromStr>(&self, value: &str, what: &str) -> Result<T, ModelFormatError> {
        value
            .parse()
            .map_err(|_| self.bad(format!("bad {what} `{value}`")))
    }
}

pub fn deserialize_model<R: BufRead>(source: R) -> Result<ModelArtifact, ModelFormatError> {
    let mut lines = Lines {
        inner: source.lines(),
        line: 0,
    };
    let header = lines.next("missing header")?;
    let kind = parse_header(&header)?;

    let n_docs = lines.keyed("n_docs")?;
    let n_docs = lines.parse(&n_docs, "document count")?;
    let feature_mode = lines.keyed("features")?;
    let feature_mode: FeatureMode = lines.parse(&feature_mode, "feature mode")?;
    let trainer = lines.keyed("trainer")?;
    let trainer = parse_trainer(&lines, &trainer)?;
    let timestamp = lines.keyed("timestamp")?;
    let timestamp = lines.parse(&timestamp, "timestamp")?;

    let vocab_lines = lines.keyed("vocab")?;
    let vocab_lines: usize = lines.parse(&vocab_lines, "line count")?;
    if vocab_lines == 0 {
        return Err(lines.bad("vocabulary block needs a header line"));
    }
    let vocab_header = lines.next("vocabulary header")?;
    let (uni, bi) = parse_vocab_header(&vocab_header)?;
    let first_term_line = lines.line + 1;
    let mut terms = Vec::with_capacity(vocab_lines - 1);
    for _ in 1..vocab_lines {
        terms.push(lines.next("vocabulary")?);
    }
    let vocabulary =
        Vocabulary::from_lines(uni, bi, terms.iter().map(String::as_str), first_term_line)?;

    let param_lines = lines.keyed("params")?;
    let param_lines: usize = lines.parse(&param_lines, "line count")?;
    let parameters = match kind {
        ModelKind::NaiveBayes => read_naive_bayes(&mut lines, param_lines, feature_mode)?,
        ModelKind::MaxEnt => read_maxent(&mut lines, param_lines)?,
        ModelKind::Baseline => read_baseline(&mut lines, param_lines)?,
    };
    if lines.next("end marker")? != "end" {
        return Err(lines.bad("expected `end`"));
    }
    let vocab_size = vocabulary.len();
    let shape_ok = match &parameters {
        ModelParameters::NaiveBayes(nb) => nb.vocab_size() == vocab_size,
        ModelParameters::MaxEnt(me) => me.vocab_size() == vocab_size,
        ModelParameters::Baseline(_) => true,
    };
    if !shape_ok {
        return Err(ModelError::ShapeMismatch(vocab_size).into());
    }

    Ok(ModelArtifact {
        vocabulary,
        parameters,
        metadata: TrainingMetadata {
            n_docs,
            feature_mode,
            trainer,
            timestamp,
        },
    })
}

fn parse_header(header: &str) -> Result<ModelKind, ModelFormatError> {
    let fields: Vec<&str> = header.split_whitespace().collect();
    match fields.as_slice() {
        [MAGIC, version, kind] => {
            if *version != format!("v{FORMAT_VERSION}") {
                return Err(ModelFormatError::UnsupportedVersion(version.to_string()));
            }
            ModelKind::parse(kind).ok_or_else(|| ModelFormatError::UnknownKind(kind.to_string()))
        }
        [MAGIC, version, ..] if *version != format!("v{FORMAT_VERSION}") => {
            Err(ModelFormatError::UnsupportedVersion(version.to_string()))
        }
        _ => Err(ModelFormatError::BadHeader(header.to_string())),
    }
}

fn parse_trainer<R: BufRead>(
    lines: &Lines<R>,
    value: &str,
) -> Result<Option<TrainerConfig>, ModelFormatError> {
    if value == "none" {
        return Ok(None);
    }
    let fields: Vec<&str> = value.split(' ').collect();
    let [algorithm, max_iterations, tolerance] = fields.as_slice() else {
        return Err(lines.bad("expected `trainer <algorithm> <max_iter> <tol>`"));
    };
    let algorithm: TrainerAlgorithm = lines.parse(algorithm, "trainer")?;
    let max_iterations = lines.parse(max_iterations, "iteration count")?;
    let tolerance = lines.parse(tolerance, "tolerance")?;
    Ok(Some(TrainerConfig::new(algorithm, max_iterations, tolerance)?))
}

fn weight_line<R: BufRead>(
    lines: &mut Lines<R>,
    expected_index: usize,
) -> Result<[f64; 2], ModelFormatError> {
    let line = lines.next("parameters")?;
    let fields: Vec<&str> = line.split(' ').collect();
    let [index, neg, pos] = fields.as_slice() else {
        return Err(lines.bad("expected `<index> <negative> <positive>`"));
    };
    let index: usize = lines.parse(index, "index")?;
    if index != expected_index {
        return Err(lines.bad(format!("expected index {expected_index}")));
    }
    Ok([lines.parse(neg, "weight")?, lines.parse(pos, "weight")?])
}

fn read_naive_bayes<R: BufRead>(
    lines: &mut Lines<R>,
    count: usize,
    mode: FeatureMode,
) -> Result<ModelParameters, ModelFormatError> {
    if count < 2 {
        return Err(lines.bad("naive Bayes parameters need alpha and prior lines"));
    }
    let alpha = lines.keyed("alpha")?;
    let alpha = lines.parse(&alpha, "alpha")?;
    let prior = lines.keyed("prior")?;
    let Some((neg, pos)) = prior.split_once(' ') else {
        return Err(lines.bad("expected `prior <negative> <positive>`"));
    };
    let prior = [lines.parse(neg, "prior")?, lines.parse(pos, "prior")?];
    let mut neg = Vec::with_capacity(count - 2);
    let mut pos = Vec::with_capacity(count - 2);
    for index in 0..count - 2 {
        let [n, p] = weight_line(lines, index)?;
        neg.push(n);
        pos.push(p);
    }
    Ok(ModelParameters::NaiveBayes(NaiveBayesModel::from_parts(
        prior,
        [neg, pos],
        alpha,
        mode,
    )?))
}

fn read_maxent<R: BufRead>(
    lines: &mut Lines<R>,
    count: usize,
) -> Result<ModelParameters, ModelFormatError> {
    let weights = (0..count)
        .map(|index| weight_line(lines, index))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ModelParameters::MaxEnt(MaxEntModel::from_weights(weights)?))
}

fn read_baseline<R: BufRead>(
    lines: &mut Lines<R>,
    count: usize,
) -> Result<ModelParameters, ModelFormatError> {
    let mut positive = Vec::new();
    let mut negative = Vec::new();
    for _ in 0..count {
        let line = lines.next("lexicon")?;
        match line.split_once(' ') {
            Some(("+", word)) if !word.is_empty() => positive.push(word.to_string()),
            Some(("-", word)) if !word.is_empty() => negative.push(word.to_string()),
            _ => return Err(lines.bad("expected `+ <word>` or `- <word>`")),
        }
    }
    let lexicon =
        OpinionLexicon::new(positive, negative).map_err(|e| lines.bad(e.to_string()))?;
    Ok(ModelParameters::Baseline(lexicon))
}
