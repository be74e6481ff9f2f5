use thiserror::Error;

/// Errors produced across the corpus, selection and evaluation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("vocabulary empty")]
    EmptyVocabulary,

    #[error("empty corpus")]
    EmptyCorpus,

    #[error("{path}:{line}: {reason}")]
    Parse {
        path: String,
        line: usize,
        reason: String,
    },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("class {class} has {count} members, too small for {k} folds")]
    ClassTooSmall {
        class: usize,
        count: usize,
        k: usize,
    },

    #[error("requested k={k} but only {available} candidates available")]
    NotEnoughNeighbors { k: usize, available: usize },

    #[error("training requires at least two classes, got {0}")]
    SingleClass(usize),

    #[error("posterior not normalized: sums to {0}")]
    NotNormalized(f64),

    #[error("no removable instances")]
    NoRemovableInstances,

    #[error("sample size {requested} exceeds {available} positive-weight candidates")]
    SampleTooLarge {
        requested: usize,
        available: usize,
    },

    #[error("validation split is missing class {0}")]
    DegenerateValidation(usize),

    #[error("sample length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("non-positive time measurement: {0}")]
    NonPositiveTime(f64),

    #[error("noise rate {0} outside (0, 1)")]
    NoiseRateOutOfRange(f64),

    #[error("unknown method {0:?}")]
    UnknownMethod(String),

    #[error("invalid parameter {key}={value}: {reason}")]
    InvalidParam {
        key: String,
        value: String,
        reason: String,
    },

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
