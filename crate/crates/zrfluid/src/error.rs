//! Crate-wide error type.

use thiserror::Error;

/// Everything that can go wrong while validating models or running the
/// computations. Variants carry site *labels* (not internal indices) so that
/// messages stay meaningful for relabelled inputs.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A rate matrix was not square or did not match its label count.
    #[error("rate matrix must be square over {expected} sites, got row of length {got}")]
    NotSquare { expected: usize, got: usize },

    /// Two sites carry the same label.
    #[error("duplicate site label {0:?}")]
    DuplicateSite(String),

    /// A rate entry was negative or non-finite.
    #[error("invalid rate {value} at ({from:?}, {to:?}): rates must be finite and nonnegative")]
    InvalidRate { from: String, to: String, value: f64 },

    /// A diagonal entry was nonzero; self-jumps are not part of the model.
    #[error("nonzero diagonal rate at site {0:?}")]
    NonZeroDiagonal(String),

    /// The support digraph is not strongly connected. No transition leads
    /// from any site in `from` to any site in `to`.
    #[error("rates are not irreducible: no path from {from:?} into {to:?}")]
    NotIrreducible { from: Vec<String>, to: Vec<String> },

    /// An operation that needs at least one site was handed an empty set.
    #[error("site set must not be empty")]
    EmptySiteSet,

    /// A site index or label fell outside the matrix.
    #[error("unknown site {0:?}")]
    UnknownSite(String),

    /// A dense factorization failed or produced non-finite values.
    #[error("linear solve is numerically singular ({0})")]
    SingularSolve(&'static str),

    /// Exhaustive subset enumeration over more sites than is tractable.
    #[error("refusing to enumerate 2^{n} subsets; limit is {max} sites")]
    TooManySites { n: usize, max: usize },

    /// A probability matrix failed validation.
    #[error("matrix is not stochastic: {0}")]
    NotStochastic(String),

    /// Rate recovery needs a drift vector whose entries sum to zero.
    #[error("drift entries must sum to zero; |sum| = {0:e}")]
    DriftNotBalanced(f64),

    /// A vector could not be interpreted as a point of the simplex.
    #[error("invalid simplex point: {0}")]
    InvalidSimplexPoint(String),

    /// A jump-rate family violated its constraints.
    #[error("invalid jump-rate function: {0}")]
    InvalidJumpRate(String),

    /// The breakpoint recursion failed to stop; the tolerance is likely
    /// misconfigured for the rate scale.
    #[error("fluid construction did not terminate within {0} breakpoints")]
    NonTermination(usize),

    /// A rescaled sample time lies beyond the simulated horizon.
    #[error("sample time {t} exceeds the simulated horizon {horizon}")]
    HorizonExceeded { t: f64, horizon: f64 },

    /// Two implementations that must agree did not.
    #[error("consistency check failed: {0}")]
    ConsistencyFailure(String),

    /// An input document could not be read or parsed.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Reading or writing a file failed.
    #[error("i/o failed: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        // serde_json reports the line and column of the offending token.
        Error::InvalidInput(format!("json: {e}"))
    }
}
