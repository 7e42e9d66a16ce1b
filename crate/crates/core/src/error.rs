use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("empty input: {0}")]
    EmptyInput(String),
    #[error("polyhedron is unbounded")]
    Unbounded,
    #[error("frame mismatch")]
    FrameMismatch,
    #[error("invalid frame: {0}")]
    InvalidFrame(String),
    #[error("invalid cocycle: {0}")]
    InvalidCocycle(String),
    #[error("unpolarized cocycle has no canonical convex function")]
    Unpolarized,
    #[error("envelope diverges")]
    EnvelopeDiverges,
    #[error("strictification failed")]
    StrictificationFailed,
    #[error("retries exhausted after {retries} draws; last failing condition: {condition}")]
    RetriesExhausted { retries: usize, condition: String },
    #[error("epsilon must be positive")]
    NonPositiveEpsilon,
    #[error("uncovered support: {0}")]
    Uncovered(String),
    #[error("non-transversal vertex")]
    NonTransversalVertex,
    #[error("not a vertex of the pullback complex")]
    NotAVertex,
    #[error("invalid skeleton spec: {0}")]
    InvalidSpec(String),
    #[error("inconsistent gluing: {0}")]
    InconsistentGluing(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::EmptyInput(_) => "empty_input",
            Error::Unbounded => "unbounded",
            Error::FrameMismatch => "frame_mismatch",
            Error::InvalidFrame(_) => "invalid_frame",
            Error::InvalidCocycle(_) => "invalid_cocycle",
            Error::Unpolarized => "unpolarized",
            Error::EnvelopeDiverges => "envelope_diverges",
            Error::StrictificationFailed => "strictification_failed",
            Error::RetriesExhausted { .. } => "retries_exhausted",
            Error::NonPositiveEpsilon => "non_positive_epsilon",
            Error::Uncovered(_) => "uncovered",
            Error::NonTransversalVertex => "non_transversal_vertex",
            Error::NotAVertex => "not_a_vertex",
            Error::InvalidSpec(_) => "invalid_spec",
            Error::InconsistentGluing(_) => "inconsistent_gluing",
            Error::Invalid(_) => "invalid_input",
        }
    }

    /// Failures of an algorithm on valid input, as opposed to bad input.
    pub fn is_algorithmic(&self) -> bool {
        matches!(
            self,
            Error::RetriesExhausted { .. } | Error::StrictificationFailed | Error::EnvelopeDiverges
        )
    }
}
