use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("site-count mismatch: {left} vs {right}")]
    SiteMismatch { left: usize, right: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("{n_sites} sites exceeds the dense limit of {limit}")]
    DenseLimit { n_sites: usize, limit: usize },

    #[error("operator does not conserve total charge")]
    ChargeViolation,

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("index {index} out of range for {len} entries")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("cannot rotate by the identity string; fold it into a global phase")]
    IdentityRotation,

    #[error("product-formula order must be 1 or even, got {0}")]
    InvalidOrder(usize),

    #[error("invalid Trotter plan: {0}")]
    InvalidPlan(String),

    #[error("t = {t} is not an integral multiple of dt = {dt}")]
    NonIntegralSteps { t: f64, dt: f64 },

    #[error("step search exceeded the cap of {cap} steps")]
    StepCap { cap: usize },

    #[error("model has no terms")]
    EmptyModel,

    #[error("invalid fit input: {0}")]
    InvalidFit(String),

    #[error("no probability survives post-selection")]
    NothingSurvives,

    #[error("bad bitstring {0:?}")]
    BadBitstring(String),

    #[error("state is not normalized (norm² = {0})")]
    Unnormalized(f64),

    #[error("ordering {0} is not supported here")]
    UnsupportedOrdering(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Errors caused by hitting a size or iteration limit rather than bad input.
    pub fn is_resource_limit(&self) -> bool {
        matches!(self, Error::DenseLimit { .. } | Error::StepCap { .. })
    }
}
