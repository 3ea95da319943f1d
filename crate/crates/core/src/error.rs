use thiserror::Error;

use crate::lang::Span;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),

    #[error("state space of {size} states exceeds the limit of {limit}")]
    SizeLimitExceeded { size: u128, limit: u64 },

    #[error("{}assignment stores {value} into `{var}` outside its declared range (from state {state})", span.map(|s| format!("{s}: ")).unwrap_or_default())]
    DomainNotClosed {
        var: String,
        value: i128,
        state: String,
        span: Option<Span>,
    },

    #[error("integer overflow while evaluating a term")]
    Overflow,

    #[error("call to undefined subroutine `{0}`")]
    UndefinedSubroutine(String),

    #[error("{span}: {message}")]
    Syntax { span: Span, message: String },

    #[error("{span}: modal operator where a plain proposition is required")]
    NonModalRequired { span: Span },

    #[error("statement is not deterministic in the model")]
    NotDeterministic,

    /// Carries the failing transitions in display form.
    #[error("triple does not hold; first counterexample {}", counterexamples.first().map(String::as_str).unwrap_or("?"))]
    TripleDoesNotHold { counterexamples: Vec<String> },

    #[error("no derivation can be built: {0}")]
    Unprovable(String),

    #[error("malformed proof document: {0}")]
    ProofFormat(String),
}

pub type Result<T> = std::result::Result<T, Error>;
