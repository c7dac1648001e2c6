use std::fmt;

/// Library-wide error type.
///
/// The CLI maps these onto its exit-code contract: parse errors to 2,
/// degeneracies to 3, internal invariant breaches to 4.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// The input violates a documented precondition (cardinality, zero
    /// direction vector, nonpositive weight, oracle size cap, ...).
    InvalidInput(String),
    /// The input is geometrically degenerate and the caller did not allow
    /// perturbation.
    Degenerate(String),
    /// A text input failed to parse. `line` is 1-based, 0 when unknown.
    Parse { line: usize, msg: String },
    /// An internal invariant failed; indicates a bug, not bad input.
    Internal(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::Degenerate(msg) => write!(f, "degenerate input: {msg}"),
            Error::Parse { line: 0, msg } => write!(f, "parse error: {msg}"),
            Error::Parse { line, msg } => write!(f, "parse error on line {line}: {msg}"),
            Error::Internal(msg) => write!(f, "internal invariant breach: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
