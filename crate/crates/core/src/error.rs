use thiserror::Error;

/// Errors raised by series arithmetic, curve construction and the period-map routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("series has a nonzero z^-1 coefficient and cannot be integrated")]
    NonzeroResidue,
    #[error("cannot invert the zero series")]
    ZeroSeries,
    #[error("series has odd order {0}; no Laurent square root exists")]
    OddOrder(i64),
    #[error("leading coefficient {0} is not 1")]
    NonUnitLeadingCoefficient(String),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("exponent {0} is neither a gap nor a realized pole order within the basis cutoff")]
    UnreducibleExponent(i64),
    #[error("order {requested} exceeds the configured maximum {max}")]
    UnsupportedOrder { requested: usize, max: usize },
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn precision(msg: impl Into<String>) -> Self {
        Error::PrecisionExhausted(msg.into())
    }
}
