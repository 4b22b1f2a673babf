use alloc::string::String;
use core::fmt;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    Domain(String),
    /// A result does not fit in an `f64`.
    Overflow(String),
    /// A tower product or iteration needed more factors than `max_tower_depth`.
    Depth {
        /// Depth cap that was hit.
        max_depth: usize,
        /// Residual error bound when the cap was hit.
        residual: f64,
    },
    /// Adaptive quadrature could not reach the requested tolerance.
    Quadrature {
        /// Best estimate obtained.
        value: f64,
        /// Error estimate at give-up time.
        error: f64,
    },
    /// Operation requires a different weight class (P or Q).
    Class(String),
    /// Operation is not available for this weight family.
    Unsupported(String),
    /// Numerical evidence neither confirms nor rules out integrability.
    Indeterminate(String),
    /// Argument outside the admissible interval of a map.
    OutOfRange(String),
    /// A Rayleigh quotient has a vanishing denominator.
    ZeroDenominator,
    /// A profile is not supported where the functional requires.
    Support(String),
    /// A hypothesis of a lemma or theorem is not met.
    Hypothesis(String),
    /// A density vanishes where the functional needs it positive.
    Degenerate(String),
    /// An integral diverges.
    Divergence(String),
    /// Quotient variant does not match the requested operation.
    VariantMismatch(String),
    /// Invalid construction parameters.
    InvalidInput(String),
}

/// Result alias for the crate.
pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::Overflow(m) => write!(f, "overflow: {m}"),
            Error::Depth { max_depth, residual } => write!(
                f,
                "tower depth {max_depth} exhausted with residual bound {residual:e}"
            ),
            Error::Quadrature { value, error } => write!(
                f,
                "quadrature failed to converge (estimate {value:e}, error {error:e})"
            ),
            Error::Class(m) => write!(f, "weight class error: {m}"),
            Error::Unsupported(m) => write!(f, "unsupported: {m}"),
            Error::Indeterminate(m) => write!(f, "indeterminate classification: {m}"),
            Error::OutOfRange(m) => write!(f, "out of range: {m}"),
            Error::ZeroDenominator => write!(f, "zero denominator"),
            Error::Support(m) => write!(f, "support violation: {m}"),
            Error::Hypothesis(m) => write!(f, "hypothesis not met: {m}"),
            Error::Degenerate(m) => write!(f, "degenerate density: {m}"),
            Error::Divergence(m) => write!(f, "divergent integral: {m}"),
            Error::VariantMismatch(m) => write!(f, "variant mismatch: {m}"),
            Error::InvalidInput(m) => write!(f, "invalid input: {m}"),
        }
    }
}

impl core::error::Error for Error {}

macro_rules! bail {
    ($variant:ident, $($arg:tt)*) => {
        return Err($crate::Error::$variant(alloc::format!($($arg)*)))
    };
}
pub(crate) use bail;
