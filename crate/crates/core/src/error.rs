use thiserror::Error;

/// Errors shared across the workbench.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent input (unknown vertices, bad addresses, ...).
    #[error("input error: {0}")]
    Input(String),

    /// A configured search bound was exceeded.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// No solution exists within the search space. For symbolic solves on
    /// valid presentations this signals a bug, not a property of the input.
    #[error("unsat: {0}")]
    Unsat(String),

    /// An internal invariant failed; always a bug.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// Exit code used by the CLI: 1 negative/unsat verdict, 2 input, 3 capacity.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Unsat(_) => 1,
            Error::Input(_) => 2,
            Error::Capacity(_) => 3,
            Error::Invariant(_) => 70,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
