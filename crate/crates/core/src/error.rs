use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(String, String),
    #[error("curve mismatch: {0} vs {1}")]
    CurveMismatch(String, String),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("invalid place: {0}")]
    InvalidPlace(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("characteristic 2 is not supported for quadratic forms")]
    CharacteristicTwo,
    #[error("non-rational support: {0}")]
    NonRationalSupport(String),
    #[error("precision exhausted after {0} terms")]
    PrecisionExhausted(usize),
    #[error("kind mismatch: {0}")]
    KindMismatch(String),
    #[error("brute-force budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}
