//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Query outside the representable range of a sampled object.
    #[error("range error: {0}")]
    Range(String),

    /// Invalid construction parameter.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// The adaptive grid would exceed the configured node cap.
    #[error("grid too fine: {nodes} nodes would exceed cap {cap}")]
    GridTooFine { nodes: usize, cap: usize },

    /// An invariant the implementation guarantees was observed to fail.
    #[error("internal consistency: {0}")]
    Inconsistency(String),

    /// Concave majorant exceeded twice the input, i.e. the input was not
    /// subadditive at grid resolution.
    #[error("subadditivity violation: {0}")]
    SubadditivityViolation(String),

    /// No base point with positive envelope slope; the envelope is flat on
    /// the inspected window.
    #[error("flat envelope: no grid point a >= {a_min} with positive right slope at 4a")]
    FlatEnvelope { a_min: f64 },

    /// A modulus evaluated to zero where a positive value is required.
    #[error("degenerate modulus: {0}")]
    DegenerateModulus(String),

    /// Polyhedral computations are capped at a small ambient dimension.
    #[error("unsupported dimension {dim} (max {max})")]
    UnsupportedDimension { dim: usize, max: usize },

    /// The recession-cone reduction hypothesis does not hold.
    #[error("reduction not applicable: {0}")]
    ReductionNotApplicable(String),

    /// A constructed projection failed its own verification.
    #[error("projection invalid: {0}")]
    ProjectionInvalid(String),

    /// Funnel extraction from the planar image failed.
    #[error("funnel extraction failed: {0}")]
    ExtractionFailed(String),

    /// A sampler produced a point outside its contracted domain.
    #[error("sampler contract: {0}")]
    SamplerContract(String),

    /// An image point fell outside the truncated funnel domain.
    #[error("domain truncation: {0}")]
    DomainTruncation(String),

    /// Configuration file problem.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
