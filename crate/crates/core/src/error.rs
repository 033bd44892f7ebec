use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("symbol `{name}` expects arity {expected}, got {found}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("signature mismatch at symbol `{0}`")]
    SignatureMismatch(String),
    #[error("not a sublanguage: `{0}`")]
    NotSublanguage(String),
    #[error("invalid structure: {0}")]
    InvalidStructure(String),
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("invalid query: {0}")]
    Query(String),
    #[error("resource bound exceeded: {0}")]
    Resource(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
