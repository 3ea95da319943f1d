//! Concrete syntax for every AST type. Printing inserts only the brackets the
//! parser needs, so `parse(print(ast)) == ast` for ASTs the parser can build.

use std::fmt::{self, Display, Formatter, Write};

use crate::lang::{BoolTerm, Colour, Judgement, ModalFormula, Program, Stmt, Term};

fn term_prec(t: &Term) -> u8 {
    match t {
        Term::Add(..) => 0,
        _ => 1,
    }
}

fn write_term(f: &mut impl Write, t: &Term, level: u8) -> fmt::Result {
    if term_prec(t) < level {
        f.write_char('(')?;
        write_term(f, t, 0)?;
        return f.write_char(')');
    }
    match t {
        Term::Int(n) => write!(f, "{n}"),
        Term::Var(x) => f.write_str(x),
        Term::Scale(-1, inner) if matches!(**inner, Term::Int(n) if n >= 0) => {
            write!(f, "-")?;
            write_term(f, inner, 1)
        }
        Term::Scale(c, inner) => {
            write!(f, "{c}*")?;
            write_term(f, inner, 1)
        }
        Term::Add(a, b) => {
            write_term(f, a, 0)?;
            f.write_str(" + ")?;
            write_term(f, b, 1)
        }
        Term::Cond(b, t, e) => {
            f.write_char('(')?;
            write_bool(f, b, 0)?;
            f.write_str(" ? ")?;
            write_term(f, t, 0)?;
            f.write_str(" : ")?;
            write_term(f, e, 0)?;
            f.write_char(')')
        }
    }
}

/// Binding strength: exists 0, or 1, and 2, everything else 3.
fn bool_prec(b: &BoolTerm) -> u8 {
    match b {
        BoolTerm::Exists(..) => 0,
        BoolTerm::Or(..) => 1,
        BoolTerm::And(..) => 2,
        _ => 3,
    }
}

fn write_bool(f: &mut impl Write, b: &BoolTerm, level: u8) -> fmt::Result {
    if bool_prec(b) < level {
        f.write_char('(')?;
        write_bool(f, b, 0)?;
        return f.write_char(')');
    }
    match b {
        BoolTerm::True => f.write_str("true"),
        BoolTerm::False => f.write_str("false"),
        BoolTerm::Rel(l, op, r) => {
            write_term(f, l, 0)?;
            write!(f, " {} ", op.symbol())?;
            write_term(f, r, 0)
        }
        BoolTerm::Or(a, c) => {
            write_bool(f, a, 1)?;
            f.write_str(" \\/ ")?;
            write_bool(f, c, 2)
        }
        BoolTerm::And(a, c) => {
            write_bool(f, a, 2)?;
            f.write_str(" /\\ ")?;
            write_bool(f, c, 3)
        }
        BoolTerm::Not(a) => {
            f.write_char('~')?;
            write_bool(f, a, 3)
        }
        BoolTerm::Exists(x, body) => {
            write!(f, "exists {x}. ")?;
            write_bool(f, body, 0)
        }
    }
}

fn modal_prec(q: &ModalFormula) -> u8 {
    match q {
        ModalFormula::Base(b) => bool_prec(b),
        ModalFormula::Or(..) => 1,
        ModalFormula::And(..) => 2,
        ModalFormula::Modal(..) | ModalFormula::Not(..) => 3,
    }
}

fn write_modal(f: &mut impl Write, q: &ModalFormula, level: u8) -> fmt::Result {
    if modal_prec(q) < level {
        f.write_char('(')?;
        write_modal(f, q, 0)?;
        return f.write_char(')');
    }
    match q {
        ModalFormula::Base(b) => write_bool(f, b, level),
        ModalFormula::Modal(c, body) => {
            match c {
                Colour::N => f.write_str("N[")?,
                Colour::R => f.write_str("R[")?,
                Colour::B => f.write_str("B[")?,
                Colour::G(l) => write!(f, "G({l})[")?,
                Colour::E(k) => write!(f, "E({k})[")?,
            }
            write_modal(f, body, 0)?;
            f.write_char(']')
        }
        ModalFormula::Or(a, b) => {
            write_modal(f, a, 1)?;
            f.write_str(" \\/ ")?;
            write_modal(f, b, 2)
        }
        ModalFormula::And(a, b) => {
            write_modal(f, a, 2)?;
            f.write_str(" /\\ ")?;
            write_modal(f, b, 3)
        }
        ModalFormula::Not(a) => {
            f.write_char('~')?;
            write_modal(f, a, 3)
        }
    }
}

/// Binding strength: sequence 0, labelled item 1, choice 2, guard 3, atoms 4.
fn stmt_prec(s: &Stmt) -> u8 {
    match s {
        Stmt::Seq(..) => 0,
        Stmt::Labelled(..) => 1,
        Stmt::Choice(..) => 2,
        Stmt::Guard(..) => 3,
        _ => 4,
    }
}

fn write_stmt(f: &mut impl Write, s: &Stmt, level: u8) -> fmt::Result {
    if stmt_prec(s) < level {
        f.write_char('{')?;
        write_stmt(f, s, 0)?;
        return f.write_char('}');
    }
    match s {
        Stmt::Skip => f.write_str("skip"),
        Stmt::Return => f.write_str("return"),
        Stmt::Break => f.write_str("break"),
        Stmt::Goto(l) => write!(f, "goto {l}"),
        Stmt::Throw(k) => write!(f, "throw {k}"),
        Stmt::Call(h) => write!(f, "call {h}"),
        Stmt::Assign(x, e) => {
            write!(f, "{x} = ")?;
            write_term(f, e, 0)
        }
        Stmt::Seq(a, b) => {
            write_stmt(f, a, 1)?;
            f.write_str("; ")?;
            write_stmt(f, b, 0)
        }
        Stmt::Labelled(p, l) => {
            write_stmt(f, p, 1)?;
            write!(f, " : {l}")
        }
        Stmt::Choice(a, b) => {
            write_stmt(f, a, 2)?;
            f.write_str(" | ")?;
            write_stmt(f, b, 3)
        }
        Stmt::Guard(b, body) => {
            write_bool(f, b, 0)?;
            f.write_str(" -> ")?;
            write_stmt(f, body, 3)
        }
        Stmt::Do(body) => {
            f.write_str("do {")?;
            write_stmt(f, body, 0)?;
            f.write_char('}')
        }
        Stmt::TryCatch(body, k, handler) => {
            f.write_str("try {")?;
            write_stmt(f, body, 0)?;
            write!(f, "}} catch ({k}) {{")?;
            write_stmt(f, handler, 0)?;
            f.write_char('}')
        }
        Stmt::LabelDecl(l, body) => {
            write!(f, "{{label {l}")?;
            let mut body = &**body;
            while let Stmt::LabelDecl(m, inner) = body {
                write!(f, ", {m}")?;
                body = inner;
            }
            f.write_str(". ")?;
            write_stmt(f, body, 0)?;
            f.write_char('}')
        }
    }
}

impl Display for Term {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_term(f, self, 0)
    }
}

impl Display for BoolTerm {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_bool(f, self, 0)
    }
}

impl Display for ModalFormula {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_modal(f, self, 0)
    }
}

impl Display for Stmt {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_stmt(f, self, 0)
    }
}

impl Display for Judgement {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        for (l, p) in &self.assumptions {
            write!(f, "assume G({l}): {p}; ")?;
        }
        write!(f, "pre: {}; prog: {}; post: {}", self.pre, self.stmt, self.post)
    }
}

impl Display for Program {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        for d in &self.vars {
            writeln!(f, "var {} in {}..{};", d.name, d.low, d.high)?;
        }
        let mut printed = std::collections::BTreeSet::new();
        for name in &self.sub_names {
            if !printed.insert(name.name.clone()) {
                continue;
            }
            if let Some(body) = self.subs.get(&name.name) {
                writeln!(f, "sub {name} {{ {body} }}")?;
            }
        }
        write!(f, "main {{ {} }}", self.main)
    }
}
