use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("arity mismatch for `{name}`: expected {expected}, found {found}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },

    #[error("variable x{index} outside assignment of arity {arity}")]
    VariableRange { index: usize, arity: usize },

    #[error("invalid signature: {0}")]
    Signature(String),

    #[error("budget exceeded: {what} (limit {limit})")]
    Budget { what: String, limit: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid automorphism `{name}`: {reason}")]
    InvalidAutomorphism { name: String, reason: String },

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("structure is not finite (no stable ball within {0} elements)")]
    NotFinite(usize),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("malformed document: {0}")]
    Document(String),
}

impl Error {
    pub(crate) fn syntax(pos: usize, msg: impl Into<String>) -> Self {
        Error::Syntax {
            pos,
            msg: msg.into(),
        }
    }

    pub(crate) fn budget(what: impl Into<String>, limit: usize) -> Self {
        Error::Budget {
            what: what.into(),
            limit,
        }
    }

    /// True for resource exhaustion, which the CLI reports separately.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
