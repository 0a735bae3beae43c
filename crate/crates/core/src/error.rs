use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
#[non_exhaustive]
pub enum Error {
    /// A vector or matrix did not have the expected length.
    DimensionMismatch { expected: usize, found: usize },
    /// A parameter violated its documented range.
    InvalidArgument(String),
    /// A discrete run produced a non-finite value or gradient.
    Divergence { iteration: usize },
    /// The ODE integrator produced a non-finite state.
    OdeDivergence { t: f64 },
    /// A problem name that the generator does not know.
    UnknownProblem(String),
    /// A log-linear fit window contained a gap that is not strictly positive.
    NonPositiveGap { index: usize },
    /// A continuous trace does not cover the window requested from it.
    HorizonMismatch { needed: f64, available: f64 },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::Divergence { iteration } => {
                write!(f, "iteration diverged: non-finite value at k = {iteration}")
            }
            Error::OdeDivergence { t } => write!(f, "integration diverged: non-finite state at t = {t}"),
            Error::UnknownProblem(name) => write!(f, "unknown problem `{name}`"),
            Error::NonPositiveGap { index } => {
                write!(f, "gap at record {index} is not positive; cannot take its logarithm")
            }
            Error::HorizonMismatch { needed, available } => write!(
                f,
                "continuous trace ends at t = {available} but t = {needed} is required"
            ),
        }
    }
}

impl core::error::Error for Error {}
