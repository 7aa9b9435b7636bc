use thiserror::Error;

/// Errors produced by the feature pipeline, the learners, and the dataset I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("pair {id}: insufficient data (need at least 2 samples, got {n})")]
    InsufficientData { id: String, n: usize },

    #[error("pair {id}: variables have mismatched lengths ({a_len} vs {b_len})")]
    LengthMismatch {
        id: String,
        a_len: usize,
        b_len: usize,
    },

    #[error("pair {id}: empty variable")]
    EmptyVariable { id: String },

    #[error("{file}: row {row}: {message}")]
    Parse {
        file: String,
        row: usize,
        message: String,
    },

    #[error("{file}: {message}")]
    Format { file: String, message: String },

    #[error("io error on {file}: {source}")]
    Io {
        file: String,
        #[source]
        source: std::io::Error,
    },

    #[error("duplicate pair id {id}")]
    DuplicateId { id: String },

    #[error("id {id} present in {present} but missing from {missing}")]
    UnmatchedId {
        id: String,
        present: String,
        missing: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("training data contains a single class ({class})")]
    SingleClass { class: usize },

    #[error("training data is missing class {class}")]
    MissingClass { class: String },

    #[error("non-finite feature value at row {row}, column {column}")]
    NonFiniteFeature { row: usize, column: usize },

    #[error(
        "feature contract mismatch: model built for version {model}, input has version {input}"
    )]
    ContractMismatch { model: u32, input: u32 },

    #[error("feature dimension mismatch: model expects {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("model deserialization failed: {0}")]
    ModelFormat(String),

    #[error("degenerate class composition for {subproblem}: needs at least one positive and one negative")]
    DegenerateAuc { subproblem: String },
}

pub type Result<T> = std::result::Result<T, Error>;
