use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument violates an operation's precondition.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A restriction was requested on a set that the mapping does not keep closed.
    #[error("domain not closed: state {state} maps to {target}, outside the domain")]
    Domain { state: usize, target: usize },

    /// The input exceeds a hard size limit of an exact algorithm.
    #[error("capacity exceeded: n = {n}, limit is {limit}")]
    Capacity { n: usize, limit: usize },

    /// A word length does not fit in 64 bits.
    #[error("word length overflows a 64-bit count")]
    LengthOverflow,

    /// Malformed word text.
    #[error("syntax error at offset {position}: {message}")]
    Syntax { position: usize, message: String },

    /// Malformed automaton or certificate file.
    #[error("format error on line {line}: {message}")]
    Format { line: usize, message: String },

    /// A produced result failed its own verification. Always a bug.
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn argument(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}
