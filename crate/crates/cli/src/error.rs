use std::fmt;
use std::process::ExitCode;

use tweetiment::io::{ConfigError, DatasetError, ModelFormatError, SplitError};
use tweetiment::models::baseline::LexiconError;
use tweetiment::models::ModelError;
use tweetiment::normalizer::EmoticonTableError;
use tweetiment::pipeline::PipelineError;

/// Failure classes, each with its own exit status.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config values or option combinations.
    Usage(String),
    /// Unreadable, malformed or unusable input data.
    Data(String),
    /// A model file that cannot be read back.
    ModelFormat(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::ModelFormat(_) => 4,
        })
    }

    pub fn data(context: impl fmt::Display, err: impl fmt::Display) -> CliError {
        CliError::Data(format!("{context}: {err}"))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
            CliError::ModelFormat(m) => write!(f, "model format error: {m}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(err: ConfigError) -> Self {
        CliError::Usage(err.to_string())
    }
}

impl From<DatasetError> for CliError {
    fn from(err: DatasetError) -> Self {
        CliError::Data(err.to_string())
    }
}

impl From<ModelFormatError> for CliError {
    fn from(err: ModelFormatError) -> Self {
        CliError::ModelFormat(err.to_string())
    }
}

impl From<SplitError> for CliError {
    fn from(err: SplitError) -> Self {
        match err {
            SplitError::BadRatio(_) => CliError::Usage(err.to_string()),
            SplitError::EmptyPartition { .. } => CliError::Data(err.to_string()),
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(err: PipelineError) -> Self {
        match err {
            PipelineError::Vocabulary(_) => CliError::Usage(err.to_string()),
            PipelineError::Model(e) => e.into(),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(err: ModelError) -> Self {
        match err {
            ModelError::InvalidAlpha(_) | ModelError::InvalidConfig(_) => {
                CliError::Usage(err.to_string())
            }
            _ => CliError::Data(format!("training failed: {err}")),
        }
    }
}

impl From<LexiconError> for CliError {
    fn from(err: LexiconError) -> Self {
        CliError::Data(err.to_string())
    }
}

impl From<EmoticonTableError> for CliError {
    fn from(err: EmoticonTableError) -> Self {
        CliError::Data(err.to_string())
    }
}
