use thiserror::Error;

/// Every failure the library can report.
///
/// The CLI maps these onto exit codes through [`Error::kind`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate discriminant {0}: a perfect square gives the trivial character")]
    Degenerate(String),
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("parse error{}: {msg}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Parse { line: Option<usize>, msg: String },
    #[error("consistency error: {0}")]
    Consistency(String),
    #[error("fit error: {0}")]
    Fit(String),
    #[error("pole proximity: {0}")]
    Pole(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Domain,
    Resource,
    Parse,
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Resource(_) => ErrorKind::Resource,
            Error::Parse { .. } => ErrorKind::Parse,
            _ => ErrorKind::Domain,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
