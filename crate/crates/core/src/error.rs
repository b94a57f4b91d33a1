use thiserror::Error;

/// Errors raised by the series engine and the evaluators built on it.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("insufficient precision: exponent {requested} requested but the series is only known below {precision}")]
    InsufficientPrecision { requested: i64, precision: i64 },

    #[error("series is not invertible: {0}")]
    NotInvertible(String),

    #[error("exponential needs a strictly positive valuation, got {0}")]
    PositiveValuationRequired(i64),

    #[error("expansion of an exact (untruncated) series does not terminate; truncate it first")]
    UnboundedExpansion,

    #[error("q^0 coefficient of the phi_{{m,n}} differential equation does not vanish: {0}")]
    InconsistentOde(String),

    #[error("non-integral exponent: {0}")]
    NonIntegralExponent(String),

    #[error("(r/k)^2 (2h-2) is odd for k = {k}")]
    NonIntegralSquare { k: u64 },

    #[error("non-integral prefactor: {0}")]
    NonIntegralPrefactor(String),

    #[error("missing primitive value for k = {k}{}", .at.map(|c| format!(" at ch3 = {c}")).unwrap_or_default())]
    MissingPrimitiveValue { k: u64, at: Option<i64> },

    #[error("window mismatch: {0}")]
    WindowMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
