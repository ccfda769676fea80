//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("label mismatch: {0}")]
    LabelMismatch(String),

    #[error("duplicate {kind} label `{label}`")]
    DuplicateLabel { kind: &'static str, label: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unknown action `{0}`")]
    UnknownAction(String),

    #[error("incompatible channels: {0}")]
    IncompatibleChannels(String),

    #[error("operation requires the Bayes measure")]
    NonBayesMeasure,

    #[error("declared-convex measure failed the convexity spot check: {0}")]
    NotConvex(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("linear program: {0}")]
    LinearProgram(String),

    #[error("singular linear system")]
    SingularSystem,

    #[error("initiator `{0}` is isolated (no neighbors in communication range)")]
    IsolatedInitiator(String),

    #[error("invalid game file: {0}")]
    InvalidGameFile(String),

    #[error("invalid topology: {0}")]
    InvalidTopology(String),

    #[error("grid enumeration limited to {limit} dimensions, got {got}")]
    GridDimension { got: usize, limit: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
