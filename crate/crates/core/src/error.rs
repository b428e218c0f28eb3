use thiserror::Error;

/// Errors raised anywhere in the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("row {row}, column {column}: cannot parse {value:?} as a number")]
    NonNumeric {
        row: usize,
        column: usize,
        value: String,
    },

    #[error("row {row}: label {value} is not 0 or 1")]
    BadLabel { row: usize, value: String },

    #[error("row {row}: expected {expected} fields, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("row {row}, column {column}: non-finite value")]
    NonFinite { row: usize, column: usize },

    #[error("empty data section")]
    EmptyData,

    #[error("invalid ARFF input: {0}")]
    Arff(String),

    #[error("duplicate feature name {0:?}")]
    DuplicateName(String),

    #[error("duplicate feature index {0}")]
    DuplicateIndex(usize),

    #[error("feature index {index} out of range for {n_features} features")]
    IndexOutOfRange { index: usize, n_features: usize },

    #[error("dimension mismatch: expected {expected} features, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid fold count {0}: need at least 2")]
    FoldCount(usize),

    #[error("class {class} has {count} rows, fewer than the {k} folds requested")]
    ClassTooSmall { class: u8, count: usize, k: usize },

    #[error("top_k {top_k} out of range 1..={n_features}")]
    TopKOutOfRange { top_k: usize, n_features: usize },

    #[error("entropy of all-zero counts is undefined")]
    ZeroCounts,

    #[error("AUC needs both classes present")]
    SingleClass,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("training diverged at epoch {epoch}: non-finite loss")]
    NonFiniteLoss { epoch: usize },

    #[error("unknown learner {0:?}")]
    UnknownLearner(String),

    #[error("unknown feature selector {0:?}")]
    UnknownSelector(String),

    #[error("base learner {index} ({name}) failed")]
    BaseLearner {
        index: usize,
        name: String,
        #[source]
        source: Box<Error>,
    },

    #[error("repeat {repeat}, fold {fold} failed")]
    Fold {
        repeat: usize,
        fold: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("unsupported model format_version {found} (this build reads {supported})")]
    FormatVersion { found: u64, supported: u64 },

    #[error("malformed model document: {0}")]
    Document(String),

    #[error("missing result cell: dataset {dataset:?}, model {model:?}")]
    MissingCell { dataset: String, model: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Document(err.to_string())
    }
}
