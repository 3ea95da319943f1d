use serde_json::{json, Value};

use nrb_core::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Fail,
    Error,
}

impl Status {
    fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Fail => "fail",
            Status::Error => "error",
        }
    }
}

/// Why a command did not succeed. Each class has a fixed exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Class {
    Verdict,
    Input,
    OracleMismatch,
    NotDeterministic,
    SizeLimit,
    Runtime,
}

impl Class {
    pub fn exit_code(self) -> i32 {
        match self {
            Class::Verdict => 1,
            Class::Input => 2,
            Class::OracleMismatch => 3,
            Class::NotDeterministic => 4,
            Class::SizeLimit => 5,
            Class::Runtime => 6,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Class::Verdict => "verdict",
            Class::Input => "input",
            Class::OracleMismatch => "wp-oracle-mismatch",
            Class::NotDeterministic => "not-deterministic",
            Class::SizeLimit => "size-limit",
            Class::Runtime => "runtime",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub status: Status,
    pub class: Option<Class>,
    pub details: Value,
    pub elapsed_ms: u128,
}

impl Report {
    pub fn ok(command: &'static str, details: Value) -> Report {
        Report {
            command,
            status: Status::Ok,
            class: None,
            details,
            elapsed_ms: 0,
        }
    }

    /// A negative verdict. `details` must carry counterexamples or
    /// diagnostics.
    pub fn fail(command: &'static str, details: Value) -> Report {
        Report {
            command,
            status: Status::Fail,
            class: Some(Class::Verdict),
            details,
            elapsed_ms: 0,
        }
    }

    pub fn error(command: &'static str, class: Class, message: impl Into<String>) -> Report {
        Report {
            command,
            status: Status::Error,
            class: Some(class),
            details: json!({ "error": class.name(), "message": message.into() }),
            elapsed_ms: 0,
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.class.map_or(0, Class::exit_code)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "status": self.status.as_str(),
            "details": self.details,
            "elapsed_ms": self.elapsed_ms,
        })
    }
}

/// Errors surfacing from the library map onto report classes.
pub fn classify(e: &Error) -> Class {
    match e {
        Error::Syntax { .. }
        | Error::NonModalRequired { .. }
        | Error::UnboundVariable(_)
        | Error::UndefinedSubroutine(_)
        | Error::ProofFormat(_) => Class::Input,
        Error::SizeLimitExceeded { .. } => Class::SizeLimit,
        Error::NotDeterministic => Class::NotDeterministic,
        Error::TripleDoesNotHold { .. } | Error::Unprovable(_) => Class::Verdict,
        Error::DomainNotClosed { .. } | Error::Overflow => Class::Runtime,
    }
}

impl From<(&'static str, Error)> for Report {
    fn from((command, e): (&'static str, Error)) -> Report {
        match &e {
            Error::TripleDoesNotHold { counterexamples } => Report::fail(
                command,
                json!({ "verdict": "fails", "counterexamples": counterexamples }),
            ),
            Error::Unprovable(why) => Report::fail(
                command,
                json!({ "verdict": "unprovable", "diagnostics": [why] }),
            ),
            _ => Report::error(command, classify(&e), e.to_string()),
        }
    }
}
