use core::fmt;

/// Errors raised by the geometric kernels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Error {
    /// An input vector or matrix was malformed (non-finite, not unit length, wrong size).
    InvalidInput(&'static str),
    /// A scalar argument fell outside the interval the operation is defined on.
    Domain {
        /// What was out of range.
        what: &'static str,
        /// The offending value.
        value: f64,
        /// Open lower bound.
        lo: f64,
        /// Open (or closed, for profile domains) upper bound.
        hi: f64,
    },
    /// Dimension outside the supported range for this operation.
    UnsupportedDimension {
        /// Requested dimension.
        n: usize,
        /// Why it is unsupported.
        reason: &'static str,
    },
    /// An extremal direction was requested where the eigen-gap is numerically zero.
    Degenerate {
        /// Relative eigen-gap that triggered the error.
        gap: f64,
    },
    /// A map does not carry the hyperplane it is supposed to act on onto itself.
    InvalidMap {
        /// Largest component of a map generator along the hyperplane normal.
        leak: f64,
    },
    /// No perturbation size down to the floor produced certified convex bodies.
    CalibrationFailed {
        /// Smallest epsilon attempted.
        last_epsilon: f64,
        /// Convexity residual at that epsilon.
        residual: f64,
    },
}

impl Error {
    /// Stable kebab-case tag, used in reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Self::InvalidInput(_) => "invalid-input",
            Self::Domain { .. } => "domain",
            Self::UnsupportedDimension { .. } => "unsupported-dimension",
            Self::Degenerate { .. } => "degenerate",
            Self::InvalidMap { .. } => "invalid-map",
            Self::CalibrationFailed { .. } => "calibration-failed",
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Self::Domain { what, value, lo, hi } => {
                write!(f, "{what} = {value} outside ({lo}, {hi})")
            }
            Self::UnsupportedDimension { n, reason } => {
                write!(f, "unsupported dimension n = {n}: {reason}")
            }
            Self::Degenerate { gap } => {
                write!(f, "degenerate extremal direction (relative eigen-gap {gap:e})")
            }
            Self::InvalidMap { leak } => {
                write!(f, "map does not preserve the hyperplane (leak {leak:e})")
            }
            Self::CalibrationFailed { last_epsilon, residual } => write!(
                f,
                "epsilon calibration failed: last epsilon {last_epsilon:e} still has convexity residual {residual:e}"
            ),
        }
    }
}

impl core::error::Error for Error {}

/// Result alias for this crate.
pub type Result<T> = core::result::Result<T, Error>;
