use thiserror::Error;

/// Domain errors raised by the library.
///
/// Malformed input files are reported separately by [`crate::format::LoadError`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unbound variable `{0}` in substitution")]
    UnboundVariable(String),

    #[error("operation `{op}` expects {expected} arguments, found {found}")]
    ArityMismatch {
        op: String,
        expected: usize,
        found: usize,
    },

    #[error("unknown operation `{0}`")]
    UnknownOperation(String),

    #[error("probability {0} is outside the open interval (0, 1)")]
    ProbabilityOutOfRange(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("alphabet mismatch: {left} is {left_tokens:?} but {right} is {right_tokens:?}")]
    AlphabetMismatch {
        left: String,
        left_tokens: Vec<String>,
        right: String,
        right_tokens: Vec<String>,
    },

    #[error("theory mismatch: cannot relate a {0} with a {1}")]
    TheoryMismatch(&'static str, &'static str),

    #[error("state cap exceeded: {what} materialized more than {cap} states")]
    CapExceeded { what: &'static str, cap: usize },

    #[error("unsound modulus: output {output} after prefix {prefix:?} depends on the tail beyond the claimed depth {depth}")]
    UnsoundModulus {
        output: usize,
        prefix: Vec<usize>,
        depth: usize,
    },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("unknown state `{0}`")]
    UnknownState(String),

    #[error("unknown token `{0}`")]
    UnknownToken(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
