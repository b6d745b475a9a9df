use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("gcd undefined: both inputs are zero")]
    GcdUndefined,
    #[error("moduli are not pairwise coprime: {0}")]
    NotCoprime(String),
    #[error("constant polynomial where degree >= 1 is required")]
    ConstantPolynomial,
    #[error("zero input: {0}")]
    ZeroInput(String),
    #[error("singular matrix")]
    Singular,
    #[error("division is not exact in the coefficient ring: {0}")]
    NonIntegral(String),
    #[error("scalar modes differ: {0}")]
    ModeMismatch(String),
    #[error("insufficient Fourier depth: need {needed}, have {available}")]
    InsufficientDepth { needed: i64, available: i64 },
    #[error("invalid level: {0}")]
    InvalidLevel(String),
    #[error("invalid operator: {0}")]
    InvalidOperator(String),
    #[error("outside theorem hypotheses: {0}")]
    Hypothesis(String),
    #[error("search cap exceeded: {0}")]
    SearchCap(String),
    #[error("{0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code: 3 for depth and search limits, 2 for everything
    /// else (bad input or hypotheses).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InsufficientDepth { .. } | Error::SearchCap(_) => 3,
            _ => 2,
        }
    }
}
