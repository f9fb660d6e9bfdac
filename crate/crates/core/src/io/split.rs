//! Seeded train/test splitting.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub const DEFAULT_RATIO: f64 = 0.8;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Error, PartialEq)]
pub enum SplitError {
    #[error("split ratio must lie strictly between 0 and 1, got {0}")]
    BadRatio(f64),
    #[error("ratio {ratio} leaves an empty partition for {records} records")]
    EmptyPartition { ratio: f64, records: usize },
}

/// Number of training records: `floor(n * ratio)`, which must leave both
/// sides nonempty.
pub fn train_size(records: usize, ratio: f64) -> Result<usize, SplitError> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(SplitError::BadRatio(ratio));
    }
    // tolerate representation error such as 0.29 * 100 = 28.999999999999996
    let train = (records as f64 * ratio + 1e-9).floor() as usize;
    if train == 0 || train >= records {
        return Err(SplitError::EmptyPartition { ratio, records });
    }
    Ok(train)
}

/// Shuffles with a ChaCha8 stream seeded by `seed`, then cuts at
/// [`train_size`].
pub fn split_dataset<T>(
    mut records: Vec<T>,
    ratio: f64,
    seed: u64,
) -> Result<(Vec<T>, Vec<T>), SplitError> {
    let train = train_size(records.len(), ratio)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    records.shuffle(&mut rng);
    let test = records.split_off(train);
    Ok((records, test))
}
