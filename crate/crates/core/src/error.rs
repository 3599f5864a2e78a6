use thiserror::Error;

/// Errors raised by game construction, exact enumeration and sampling.
#[derive(Debug, Error)]
pub enum Error {
    /// A mask string was malformed. `position` is the offending character
    /// index, or the string length for length mismatches.
    #[error("mask format error at position {position}: {reason}")]
    Format { position: usize, reason: String },

    /// An argument fell outside the operation's domain (overlapping players,
    /// order out of range, too few samples, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid game specification, unreadable or malformed table file.
    #[error("configuration error: {0}")]
    Config(String),

    /// The external value oracle failed or broke the line protocol.
    #[error("oracle error: {0}")]
    Oracle(String),

    #[error(
        "exact mode refused: {players} players exceeds the cap of {cap} \
         (use the sampling estimators or raise the cap explicitly)"
    )]
    ExactCap { players: usize, cap: usize },

    /// Two algebraically equivalent routes to the same quantity disagreed.
    #[error("{quantity}: equivalent forms disagree ({first} vs {second})")]
    FormMismatch {
        quantity: String,
        first: f64,
        second: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}
