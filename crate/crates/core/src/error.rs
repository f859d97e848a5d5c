use std::fmt;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// The requested modulus is not a prime number.
    CompositeModulus(u32),
    /// Multiplicative inverse of zero.
    ZeroInverse,
    /// The prefix does not hold enough coefficients for the request.
    InsufficientPrecision { needed: usize, have: usize },
    /// A grid or substitution request exceeds the size budget.
    SizeLimit { cells: u128, max: u128 },
    /// Two coded tiles disagree on their shared border.
    OverlapMismatch { row: usize, col: usize },
    /// Index outside the valid range of the operation.
    OutOfRange { what: &'static str, value: u64, max: u64 },
    /// The sequence is identically zero, so heights are undefined.
    AllZero,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::CompositeModulus(p) => write!(f, "{p} is not prime"),
            Error::ZeroInverse => write!(f, "zero has no multiplicative inverse"),
            Error::InsufficientPrecision { needed, have } => {
                write!(f, "needs {needed} coefficients, prefix has {have}")
            }
            Error::SizeLimit { cells, max } => {
                write!(f, "requested {cells} cells, budget is {max}")
            }
            Error::OverlapMismatch { row, col } => {
                write!(f, "adjacent tiles disagree at cell ({row}, {col})")
            }
            Error::OutOfRange { what, value, max } => {
                write!(f, "{what} = {value} out of range (max {max})")
            }
            Error::AllZero => write!(f, "sequence is identically zero"),
        }
    }
}

impl std::error::Error for Error {}
