use thiserror::Error;

/// Errors raised by the library.
///
/// Variants fall in two groups: input validation (the value handed in does not
/// satisfy a type invariant) and computation failures. [`Error::is_validation`]
/// tells them apart.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("alphabet needs at least 2 symbols, got {0}")]
    AlphabetTooSmall(usize),

    #[error("symbol {symbol} out of range for alphabet of size {size}")]
    SymbolOutOfRange { symbol: usize, size: usize },

    #[error("empty word")]
    EmptyWord,

    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid entry {value} at index {index} in {what}")]
    InvalidEntry {
        what: &'static str,
        index: usize,
        value: f64,
    },

    #[error("{what} does not sum to 1 (sum = {sum})")]
    NotProbability { what: &'static str, sum: f64 },

    #[error("row {row} of stochastic matrix sums to {sum}")]
    NotStochastic { row: usize, sum: f64 },

    #[error("probability vector is not stationary for the chain (residual {residual:e})")]
    NotStationary { residual: f64 },

    #[error("chain is reducible: stationary vector is not unique or not strictly positive")]
    ReducibleChain,

    #[error(
        "power iteration did not converge after {iterations} iterations (residual {residual:e})"
    )]
    ConvergenceFailure { iterations: usize, residual: f64 },

    #[error("function is not normalized (max deviation {deviation:e})")]
    NotNormalized { deviation: f64 },

    #[error("enumeration of {count} cylinders exceeds the limit {limit}")]
    EnumerationTooLarge { count: u128, limit: u128 },

    #[error("potential depth {depth} not supported here (max {max})")]
    UnsupportedDepth { depth: usize, max: usize },

    #[error("invalid quadrature: {0}")]
    InvalidQuadrature(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Variant name, used by front ends that report errors by kind.
    pub fn name(&self) -> &'static str {
        match self {
            Error::AlphabetTooSmall(_) => "AlphabetTooSmall",
            Error::SymbolOutOfRange { .. } => "SymbolOutOfRange",
            Error::EmptyWord => "EmptyWord",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::InvalidEntry { .. } => "InvalidEntry",
            Error::NotProbability { .. } => "NotProbability",
            Error::NotStochastic { .. } => "NotStochastic",
            Error::NotStationary { .. } => "NotStationary",
            Error::ReducibleChain => "ReducibleChain",
            Error::ConvergenceFailure { .. } => "ConvergenceFailure",
            Error::NotNormalized { .. } => "NotNormalized",
            Error::EnumerationTooLarge { .. } => "EnumerationTooLarge",
            Error::UnsupportedDepth { .. } => "UnsupportedDepth",
            Error::InvalidQuadrature(_) => "InvalidQuadrature",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }

    /// True when the error reports malformed input rather than a failed computation.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::AlphabetTooSmall(_)
                | Error::SymbolOutOfRange { .. }
                | Error::EmptyWord
                | Error::DimensionMismatch { .. }
                | Error::InvalidEntry { .. }
                | Error::NotProbability { .. }
                | Error::NotStochastic { .. }
                | Error::NotStationary { .. }
                | Error::InvalidQuadrature(_)
                | Error::InvalidArgument(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
