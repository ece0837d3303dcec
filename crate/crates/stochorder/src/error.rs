use std::path::PathBuf;

use thiserror::Error;

/// Crate-wide error type. Variants carry enough context to identify the
/// offending input (sample, config key, dataset cell, file location).
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty sample")]
    EmptySample,

    #[error("non-finite input")]
    NonFiniteInput,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("alpha must lie strictly between 0 and 1, got {0}")]
    InvalidAlpha(f64),

    #[error("number of comparisons must be at least 1")]
    InvalidComparisons,

    #[error("insufficient permutations: {0} (need at least 100)")]
    InsufficientPermutations(usize),

    #[error("insufficient resamples: {0} (need at least 100)")]
    InsufficientResamples(usize),

    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("simplex order {k} must lie between 1 and the dimension {d}")]
    InvalidSimplexOrder { k: usize, d: usize },

    #[error("points must have at least one coordinate")]
    ZeroDimension,

    #[error("year {year} outside the {horizon}-year horizon")]
    YearOutOfRange { year: usize, horizon: usize },

    #[error("negative demand")]
    NegativeDemand,

    #[error("discount rate must be non-negative, got {0}")]
    NegativeDiscountRate(f64),

    #[error("expected 3 levels per factor")]
    WrongLevelCount,

    #[error("duplicate factor in factorial specification")]
    DuplicateFactor,

    #[error("no scenarios")]
    NoScenarios,

    #[error("no designs")]
    NoDesigns,

    #[error("simulation failed for ({scenario}, {design}, combo {combo_id}): {source}")]
    SimulationCell {
        scenario: String,
        design: String,
        combo_id: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("incomplete dataset: {0}")]
    IncompleteDataset(String),

    #[error("config key `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("stale dataset: dataset hash {dataset} does not match config hash {config}")]
    StaleDataset { dataset: String, config: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}:{line}: {reason}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        reason: String,
    },
}

impl Error {
    pub fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
