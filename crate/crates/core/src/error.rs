use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// Errors raised by code construction, planning and repair execution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Field word size outside the supported 2..=16 range.
    InvalidWordSize(u32),
    /// Modulus bitmask does not have degree exactly `w`.
    InvalidPolynomialDegree { w: u32, poly: u32 },
    /// Modulus is reducible over GF(2).
    ReduciblePolynomial { poly: u32, factor: u32 },
    /// Division or inversion of the zero element.
    DivisionByZero,
    /// Linear system has no unique solution. Doubles as the non-MDS detector.
    SingularMatrix,
    /// Code or locality parameters violate a precondition.
    InvalidParameters(String),
    /// Input data does not match the code shape.
    ShapeMismatch(String),
    /// Coefficient (or mix) drawing failed verification for every tried seed.
    SeedsExhausted { tried: Vec<u64> },
    /// A repair plan asked its provider for a substripe it could not serve.
    MissingRead { node: usize, substripe: usize },
    /// Plan execution found a redundant equation that the reads do not satisfy.
    InconsistentData { node: usize, substripe: usize },
    /// Node index out of range for the operation.
    NodeOutOfRange { node: usize, limit: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidWordSize(w) => write!(f, "field word size {w} not in 2..=16"),
            Error::InvalidPolynomialDegree { w, poly } => {
                write!(f, "polynomial {poly:#x} does not have degree {w}")
            }
            Error::ReduciblePolynomial { poly, factor } => {
                write!(f, "polynomial {poly:#x} is divisible by {factor:#x}")
            }
            Error::DivisionByZero => write!(f, "division by zero field element"),
            Error::SingularMatrix => write!(f, "linear system is singular"),
            Error::InvalidParameters(msg) => write!(f, "invalid parameters: {msg}"),
            Error::ShapeMismatch(msg) => write!(f, "shape mismatch: {msg}"),
            Error::SeedsExhausted { tried } => {
                write!(f, "verification failed for all {} tried seeds", tried.len())
            }
            Error::MissingRead { node, substripe } => {
                write!(f, "provider cannot serve substripe {substripe} of node {node}")
            }
            Error::InconsistentData { node, substripe } => {
                write!(f, "reads inconsistent at substripe {substripe} of node {node}")
            }
            Error::NodeOutOfRange { node, limit } => {
                write!(f, "node index {node} out of range 1..={limit}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
