use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is rank deficient (smallest/largest singular value {ratio:.3e})")]
    RankDeficient { ratio: f64 },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("matrix entries must be finite")]
    NonFinite,

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("frame completion failed: every reference ordering is degenerate")]
    DegenerateCompletion,

    #[error("inadmissible parameters: {0}")]
    InadmissibleParameters(String),

    #[error("lambda = {lambda} is outside the convergence region (need lambda > {bound})")]
    OutOfConvergenceRegion { lambda: f64, bound: f64 },

    #[error("lambda = {lambda} is a pole of order {order} of the normalizing constant")]
    PoleAtLambda { lambda: f64, order: u32 },

    #[error("function must be right-invariant for this transform")]
    NotRightInvariant,

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("operator too large: m*ell = {0} exceeds 3")]
    TooLarge(usize),

    #[error("backends disagree: {a} vs {b}")]
    BackendDisagreement { a: f64, b: f64 },

    #[error("differentiated kernel is not integrable: need lambda + 2*ell >= {need}, have {have}")]
    SingularKernelDerivative { need: f64, have: f64 },

    #[error("non-finite value produced while differentiating")]
    NumericalBreakdown,

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
