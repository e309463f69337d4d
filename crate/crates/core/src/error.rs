use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("undefined variable `{name}` in `{procedure}`")]
    UndefinedVariable { procedure: String, name: String },
    #[error("undefined procedure `{0}`")]
    UndefinedProcedure(String),
    #[error("procedure `{name}` expects {expected} argument(s), got {found}")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("duplicate procedure `{0}`")]
    DuplicateProcedure(String),
    #[error("program has no `main` procedure")]
    MissingMain,
    #[error("malformed path: {0}")]
    MalformedPath(String),
    #[error("unsupported automaton input: {0}")]
    Unsupported(String),
    #[error("resource exhausted: {0}")]
    ResourceExhausted(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
