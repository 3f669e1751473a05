use thiserror::Error;

/// Errors surfaced by every fallible operation in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed input. `path` locates the offending field (a JSON pointer for descriptors).
    #[error("input error at {path}: {msg}")]
    Input { path: String, msg: String },

    /// The operation needs a capability the space does not have.
    #[error("unsupported: space lacks capability `{capability}` ({msg})")]
    Unsupported { capability: String, msg: String },

    /// Mathematically undefined request, e.g. the gradient at the origin.
    #[error("domain error: {0}")]
    Domain(String),

    /// A sampler or optimizer gave up (proposal cap, hit-rate guard).
    #[error("diagnostic: {0}")]
    Diagnostic(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn input(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Input {
            path: path.into(),
            msg: msg.into(),
        }
    }

    pub fn unsupported(capability: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Unsupported {
            capability: capability.into(),
            msg: msg.into(),
        }
    }

    /// Process exit code used by the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input { .. } | Error::Domain(_) => 2,
            Error::Unsupported { .. } => 3,
            Error::Diagnostic(_) => 4,
        }
    }
}
