use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the tracking pipeline.
///
/// Variants fall in two families that the command-line front end maps to
/// distinct exit codes: configuration problems and data problems.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {field}: {reason}")]
    Config { field: String, reason: String },

    #[error("{path}: {reason}")]
    Data { path: PathBuf, reason: String },

    #[error("frame count ({frames}) does not match ground-truth row count ({rows})")]
    GroundTruthMismatch { frames: usize, rows: usize },

    #[error("sequence {0:?} has no ground truth on its first frame")]
    MissingInitialGroundTruth(String),

    #[error("malformed ground-truth line {line}: {text:?}")]
    GroundTruthParse { line: usize, text: String },

    #[error("target lost: search region is empty after clipping to the frame")]
    TargetLost,

    #[error("candidate box lies entirely outside the frame")]
    CandidateOutsideFrame,

    #[error("classifier has no stored samples")]
    EmptyStore,

    #[error("classifier has not been trained")]
    Untrained,

    #[error("degenerate training set: {positives} positive / {negatives} negative samples")]
    DegenerateTrainingSet { positives: usize, negatives: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("episode source exhausted after {0} episodes")]
    EnvironmentExhausted(usize),

    #[error("snapshot: {0}")]
    Snapshot(String),

    #[error("image {path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config { field: field.into(), reason: reason.into() }
    }

    pub(crate) fn data(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        Error::Data { path: path.into(), reason: reason.into() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// True for errors caused by invalid configuration rather than bad input data.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
