//! Datasets, model files, splitting and configuration.

pub mod config;
pub mod dataset;
pub mod model_file;
pub mod split;

pub use config::{Config, ConfigError};
pub use dataset::{
    parse_labeled_csv, parse_normalized_csv, parse_unlabeled_csv, write_labeled_csv,
    write_normalized_csv, write_predictions, write_unlabeled_csv, CsvOptions, DatasetError,
    LabeledRecord, NormalizedRecord, UnlabeledRecord,
};
pub use model_file::{
    deserialize_model, serialize_model, ModelArtifact, ModelFormatError, ModelKind,
    ModelParameters, TrainingMetadata,
};
pub use split::{split_dataset, SplitError};
