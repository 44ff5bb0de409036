//! Crate-wide error type.

use std::path::PathBuf;

/// Errors produced by corpus loading, model fitting, and artifact I/O.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A column named in the schema mapping is absent from the header row.
    #[error("schema error: column {column:?} not found in header")]
    Schema { column: String },

    /// A data row could not be parsed or violates a record invariant.
    #[error("row error at line {line}: {reason}")]
    Row { line: u64, reason: String },

    /// The input file contains a header but no data rows (or nothing at all).
    #[error("empty corpus: {0}")]
    EmptyCorpus(String),

    /// An operation was called with an out-of-range parameter.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// An operation was called with inconsistent or malformed input data.
    #[error("input error: {0}")]
    Input(String),

    /// Configuration file or bundled resource problem.
    #[error("configuration error: {0}")]
    Config(String),

    /// A persisted text artifact failed to parse.
    #[error("format error in {path} at line {line}: {reason}")]
    Format {
        path: String,
        line: u64,
        reason: String,
    },

    /// A pipeline stage was requested without its upstream artifact.
    #[error("dependency error: stage {stage:?} requires artifact {artifact:?} from stage {upstream:?}")]
    Dependency {
        stage: String,
        upstream: String,
        artifact: PathBuf,
    },

    /// A pipeline stage failed; carries the stage name for diagnostics.
    #[error("stage {stage} failed: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },

    /// Training produced a non-finite loss.
    #[error("divergence in {what} at {unit} {step}: loss is not finite")]
    Divergence {
        what: String,
        unit: String,
        step: usize,
    },

    /// The Gaussian bandwidth search missed the target perplexity.
    #[error("bandwidth search failed after {steps} steps: achieved perplexity {achieved}, target {target}")]
    BandwidthConvergence {
        steps: usize,
        achieved: f64,
        target: f64,
    },

    /// No (center, context) pair exists in the training corpus.
    #[error("no training pairs: every document has fewer than 2 tokens")]
    NoTrainingPairs,

    /// Every document in the cluster is empty.
    #[error("no tokens: all documents are empty")]
    NoTokens,

    /// Vocabulary construction filtered out every token.
    #[error("pipeline error: vocabulary is empty after filtering")]
    EmptyVocabulary,

    /// A requested quantity has no mathematical definition on this input.
    #[error("undefined {quantity}: {reason}")]
    Undefined { quantity: String, reason: String },

    /// Invariant violation that indicates a bug or corrupted artifact.
    #[error("internal consistency error: {0}")]
    Internal(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn format(path: impl Into<String>, line: u64, reason: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            line,
            reason: reason.into(),
        }
    }

    pub(crate) fn undefined(quantity: &str, reason: impl Into<String>) -> Self {
        Error::Undefined {
            quantity: quantity.to_string(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
