//! Coloured-transition semantics for a small imperative language with
//! `goto`, `break`, `return` and exceptions, together with a modal assertion
//! language, weakest preconditions and a checker and generator for NRB
//! derivations.

pub mod error;
pub mod eval;
pub mod kernel;
pub mod lang;
pub mod modal;
pub mod model;
pub mod scope;
pub mod syntax;
pub mod wp;

pub use error::{Error, Result};
