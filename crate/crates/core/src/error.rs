use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A configuration value violates its documented range.
    InvalidConfig(String),
    /// Argument outside the mathematical domain of the operation.
    Domain(String),
    /// Free-space amplitude requested at zero distance.
    Singularity,
    /// Exhaustive subset search refused because the array is too large.
    OracleCapacity { size: usize, max: usize },
    /// No finite transmit power can meet the target.
    Infeasible,
    /// Counts or ordering between two artifacts disagree.
    Integrity(String),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::InvalidConfig(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Singularity => f.write_str("free-space amplitude is singular at zero distance"),
            Error::OracleCapacity { size, max } => {
                write!(f, "exhaustive search limited to {max} radiators, array has {size}")
            }
            Error::Infeasible => f.write_str("worst-case gain is zero, no transmit power suffices"),
            Error::Integrity(msg) => write!(f, "integrity error: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
