//! Concrete syntax: lexer, recursive-descent parser with the surface sugar
//! (`if`, `while`, inline labels, multi-label declarations) and a printer.

mod lexer;
mod parser;
mod printer;

pub use parser::{
    is_keyword, parse_bool, parse_formula, parse_judgement, parse_judgement_source,
    parse_program, parse_stmt, parse_term, JudgementSource,
};
