use crate::error::{Error, Result};
use crate::lang::{
    BoolTerm, Colour, Ident, Judgement, ModalFormula, Program, RelOp, Span, Stmt, Term, VarDecl,
};

use super::lexer::{tokenize, Tok, Token};

const KEYWORDS: &[&str] = &[
    "skip", "return", "break", "goto", "throw", "call", "do", "label", "try", "catch", "if",
    "else", "while", "true", "false", "exists", "var", "in", "sub", "main", "assume", "pre",
    "prog", "post",
];

const STMT_KEYWORDS: &[&str] = &[
    "skip", "return", "break", "goto", "throw", "call", "do", "label", "try", "if", "while",
];

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

/// A judgement as written in a file; the statement may be left out, in which
/// case the caller supplies one (usually a program's `main`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JudgementSource {
    pub assumptions: Vec<(Ident, BoolTerm)>,
    pub pre: BoolTerm,
    pub stmt: Option<Stmt>,
    pub post: ModalFormula,
}

impl JudgementSource {
    pub fn with_stmt(self, stmt: Stmt) -> Judgement {
        Judgement {
            assumptions: self.assumptions,
            pre: self.pre,
            stmt: self.stmt.unwrap_or(stmt),
            post: self.post,
        }
    }
}

pub fn parse_program(text: &str) -> Result<Program> {
    Parser::new(text)?.run(|p| p.program())
}

pub fn parse_stmt(text: &str) -> Result<Stmt> {
    Parser::new(text)?.run(|p| {
        let s = p.seq()?;
        p.expect(Tok::Eof)?;
        Ok(s)
    })
}

pub fn parse_term(text: &str) -> Result<Term> {
    Parser::new(text)?.run(|p| {
        let t = p.expr()?;
        p.expect(Tok::Eof)?;
        Ok(t)
    })
}

pub fn parse_bool(text: &str) -> Result<BoolTerm> {
    Parser::new(text)?.run(|p| {
        let b = p.bexpr()?;
        p.expect(Tok::Eof)?;
        Ok(b)
    })
}

pub fn parse_formula(text: &str) -> Result<ModalFormula> {
    Parser::new(text)?.run(|p| {
        let q = p.mform()?;
        p.expect(Tok::Eof)?;
        Ok(q.canonical())
    })
}

pub fn parse_judgement(text: &str) -> Result<Judgement> {
    let src = parse_judgement_source(text)?;
    match src.stmt.clone() {
        Some(stmt) => Ok(src.with_stmt(stmt)),
        None => Err(Error::Syntax {
            span: Span { line: 1, column: 1 },
            message: "judgement has no `prog:` section".to_string(),
        }),
    }
}

pub fn parse_judgement_source(text: &str) -> Result<JudgementSource> {
    Parser::new(text)?.run(|p| p.judgement())
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    furthest: Option<(usize, Error)>,
}

impl Parser {
    fn new(text: &str) -> Result<Parser> {
        Ok(Parser {
            toks: tokenize(text)?,
            pos: 0,
            furthest: None,
        })
    }

    /// Run a top-level production, reporting the error that got furthest
    /// into the input when backtracking was involved.
    fn run<T>(mut self, f: impl FnOnce(&mut Parser) -> Result<T>) -> Result<T> {
        match f(&mut self) {
            Ok(v) => Ok(v),
            Err(e @ Error::NonModalRequired { .. }) => Err(e),
            Err(e) => Err(self.furthest.take().map(|(_, f)| f).unwrap_or(e)),
        }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error(&mut self, message: String) -> Error {
        let err = Error::Syntax {
            span: self.span(),
            message,
        };
        if self.furthest.as_ref().is_none_or(|(p, _)| self.pos >= *p) {
            self.furthest = Some((self.pos, err.clone()));
        }
        err
    }

    fn expected(&mut self, what: &str) -> Error {
        let found = self.peek().describe();
        self.error(format!("expected {what}, found {found}"))
    }

    fn expect(&mut self, t: Tok) -> Result<Span> {
        if self.peek() == &t {
            Ok(self.bump().span)
        } else {
            let what = match &t {
                Tok::Eof => "end of input".to_string(),
                other => other.describe(),
            };
            Err(self.expected(&what))
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(w) if w == kw)
    }

    fn expect_kw(&mut self, kw: &str) -> Result<Span> {
        if self.is_kw(kw) {
            Ok(self.bump().span)
        } else {
            Err(self.expected(&format!("`{kw}`")))
        }
    }

    fn ident(&mut self) -> Result<Ident> {
        match self.peek().clone() {
            Tok::Ident(w) if !is_keyword(&w) => {
                let span = self.bump().span;
                Ok(Ident::at(w, span))
            }
            _ => Err(self.expected("an identifier")),
        }
    }

    fn signed_int(&mut self) -> Result<i64> {
        let neg = self.eat(&Tok::Minus);
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(if neg { -n } else { n })
            }
            _ => Err(self.expected("an integer")),
        }
    }

    // ---- programs and judgements ----

    fn program(&mut self) -> Result<Program> {
        let mut vars = Vec::new();
        while self.is_kw("var") {
            self.bump();
            let name = self.ident()?;
            self.expect_kw("in")?;
            let low = self.signed_int()?;
            self.expect(Tok::DotDot)?;
            let high = self.signed_int()?;
            self.expect(Tok::Semi)?;
            vars.push(VarDecl { name, low, high });
        }
        let mut program = Program::new(vars, Stmt::Skip);
        while self.is_kw("sub") {
            self.bump();
            let name = self.ident()?;
            let body = if self.eat(&Tok::Eq) {
                let body = self.item()?;
                self.eat(&Tok::Semi);
                body
            } else {
                self.block()?
            };
            program.sub_names.push(name.clone());
            program.subs.entry(name.name).or_insert(body);
        }
        if self.is_kw("main") {
            self.bump();
            program.main = self.block()?;
        } else if self.peek() != &Tok::Eof {
            program.main = self.seq()?;
        }
        self.expect(Tok::Eof)?;
        Ok(program)
    }

    fn plain(&mut self) -> Result<BoolTerm> {
        let span = self.span();
        match self.mform()?.canonical() {
            ModalFormula::Base(b) => Ok(b),
            _ => Err(Error::NonModalRequired { span }),
        }
    }

    fn judgement(&mut self) -> Result<JudgementSource> {
        let mut assumptions = Vec::new();
        while self.is_kw("assume") {
            self.bump();
            match self.peek() {
                Tok::Ident(w) if w == "G" => {
                    self.bump();
                }
                _ => return Err(self.expected("`G`")),
            }
            self.expect(Tok::LParen)?;
            let l = self.ident()?;
            self.expect(Tok::RParen)?;
            self.expect(Tok::Colon)?;
            let p = self.plain()?;
            self.expect(Tok::Semi)?;
            assumptions.push((l, p));
        }
        self.expect_kw("pre")?;
        self.expect(Tok::Colon)?;
        let pre = self.plain()?;
        self.expect(Tok::Semi)?;
        let stmt = if self.is_kw("prog") {
            self.bump();
            self.expect(Tok::Colon)?;
            let s = self.seq()?;
            self.eat(&Tok::Semi);
            Some(s)
        } else {
            None
        };
        self.expect_kw("post")?;
        self.expect(Tok::Colon)?;
        let post = self.mform()?.canonical();
        self.eat(&Tok::Semi);
        self.expect(Tok::Eof)?;
        Ok(JudgementSource {
            assumptions,
            pre,
            stmt,
            post,
        })
    }

    // ---- statements ----

    fn block(&mut self) -> Result<Stmt> {
        self.expect(Tok::LBrace)?;
        if self.eat(&Tok::RBrace) {
            return Ok(Stmt::Skip);
        }
        let s = self.seq()?;
        self.expect(Tok::RBrace)?;
        Ok(s)
    }

    fn leading_label(&self) -> bool {
        matches!((self.peek(), self.peek_at(1)), (Tok::Ident(w), Tok::Colon) if !is_keyword(w))
    }

    fn seq(&mut self) -> Result<Stmt> {
        let mut items: Vec<Stmt> = Vec::new();
        loop {
            while self.leading_label() {
                let l = self.ident()?;
                self.bump();
                // `P; l: Q` is `(P):l; Q` with P everything before the label
                // in this block; a leading `l: Q` labels an implicit skip.
                let prev = if items.is_empty() { Stmt::Skip } else { Stmt::sequence(items.drain(..)) };
                items.push(Stmt::Labelled(Box::new(prev), l));
            }
            if matches!(self.peek(), Tok::RBrace | Tok::Eof) && !items.is_empty() {
                break;
            }
            items.push(self.item()?);
            if !self.eat(&Tok::Semi) {
                break;
            }
            if matches!(self.peek(), Tok::RBrace | Tok::Eof) || self.is_kw("post") {
                break;
            }
        }
        Ok(Stmt::sequence(items))
    }

    fn item(&mut self) -> Result<Stmt> {
        let mut s = self.choice()?;
        while self.eat(&Tok::Colon) {
            let l = self.ident()?;
            s = Stmt::Labelled(Box::new(s), l);
        }
        Ok(s)
    }

    fn choice(&mut self) -> Result<Stmt> {
        let mut s = self.guard()?;
        while self.eat(&Tok::Bar) {
            let r = self.guard()?;
            s = Stmt::choice(s, r);
        }
        Ok(s)
    }

    fn guard(&mut self) -> Result<Stmt> {
        let could_be_test = match self.peek() {
            Tok::Ident(w) => !STMT_KEYWORDS.contains(&w.as_str()),
            Tok::LBrace => false,
            _ => true,
        };
        if could_be_test {
            let save = self.pos;
            if let Ok(b) = self.bexpr() {
                if self.eat(&Tok::Arrow) {
                    let body = self.guard()?;
                    return Ok(Stmt::guard(b, body));
                }
            }
            self.pos = save;
        }
        self.simple()
    }

    fn simple(&mut self) -> Result<Stmt> {
        let word = match self.peek().clone() {
            Tok::LBrace => return self.block(),
            Tok::Ident(w) => w,
            _ => return Err(self.expected("a statement")),
        };
        match word.as_str() {
            "skip" => {
                self.bump();
                Ok(Stmt::Skip)
            }
            "return" => {
                self.bump();
                Ok(Stmt::Return)
            }
            "break" => {
                self.bump();
                Ok(Stmt::Break)
            }
            "goto" => {
                self.bump();
                Ok(Stmt::Goto(self.ident()?))
            }
            "throw" => {
                self.bump();
                Ok(Stmt::Throw(self.ident()?))
            }
            "call" => {
                self.bump();
                Ok(Stmt::Call(self.ident()?))
            }
            "do" => {
                self.bump();
                Ok(Stmt::do_loop(self.block()?))
            }
            "try" => {
                self.bump();
                let body = self.block()?;
                self.expect_kw("catch")?;
                self.expect(Tok::LParen)?;
                let k = self.ident()?;
                self.expect(Tok::RParen)?;
                let handler = self.block()?;
                Ok(Stmt::TryCatch(Box::new(body), k, Box::new(handler)))
            }
            "if" => {
                self.bump();
                self.expect(Tok::LParen)?;
                let b = self.bexpr()?;
                self.expect(Tok::RParen)?;
                let then = self.block()?;
                let other = if self.is_kw("else") {
                    self.bump();
                    self.block()?
                } else {
                    Stmt::Skip
                };
                Ok(Stmt::choice(
                    Stmt::guard(b.clone(), then),
                    Stmt::guard(BoolTerm::not(b), other),
                ))
            }
            "while" => {
                self.bump();
                self.expect(Tok::LParen)?;
                let b = self.bexpr()?;
                self.expect(Tok::RParen)?;
                let body = self.block()?;
                Ok(Stmt::do_loop(Stmt::choice(
                    Stmt::guard(BoolTerm::not(b.clone()), Stmt::Break),
                    Stmt::guard(b, body),
                )))
            }
            "label" => {
                self.bump();
                let mut labels = vec![self.ident()?];
                while self.eat(&Tok::Comma) {
                    labels.push(self.ident()?);
                }
                self.expect(Tok::Dot)?;
                let mut body = self.seq()?;
                for l in labels.into_iter().rev() {
                    body = Stmt::LabelDecl(l, Box::new(body));
                }
                Ok(body)
            }
            w if is_keyword(w) => Err(self.error(format!("`{w}` cannot start a statement"))),
            _ => {
                if self.peek_at(1) != &Tok::Eq {
                    return Err(self.error(format!("unknown statement `{word}`")));
                }
                let x = self.ident()?;
                self.bump();
                let e = self.expr()?;
                Ok(Stmt::Assign(x, e))
            }
        }
    }

    // ---- terms ----

    fn expr(&mut self) -> Result<Term> {
        let mut t = self.term()?;
        loop {
            if self.eat(&Tok::Plus) {
                let r = self.term()?;
                t = Term::add(t, r);
            } else if self.eat(&Tok::Minus) {
                let r = self.term()?;
                t = Term::add(t, Term::scale(-1, r));
            } else {
                return Ok(t);
            }
        }
    }

    fn term(&mut self) -> Result<Term> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                if self.eat(&Tok::Star) {
                    Ok(Term::scale(n, self.term()?))
                } else {
                    Ok(Term::Int(n))
                }
            }
            Tok::Minus => {
                self.bump();
                if let Tok::Int(n) = *self.peek() {
                    self.bump();
                    if self.eat(&Tok::Star) {
                        Ok(Term::scale(-n, self.term()?))
                    } else {
                        Ok(Term::scale(-1, Term::Int(n)))
                    }
                } else {
                    Ok(Term::scale(-1, self.term()?))
                }
            }
            Tok::Ident(w) if !is_keyword(&w) => {
                self.bump();
                Ok(Term::Var(w))
            }
            Tok::LParen => {
                let save = self.pos;
                self.bump();
                if let Ok(t) = self.expr() {
                    if self.eat(&Tok::RParen) {
                        return Ok(t);
                    }
                }
                self.pos = save + 1;
                let b = self.bexpr()?;
                self.expect(Tok::Question)?;
                let t = self.expr()?;
                self.expect(Tok::Colon)?;
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(Term::cond(b, t, e))
            }
            _ => Err(self.expected("a term")),
        }
    }

    fn relop(&mut self) -> Option<RelOp> {
        let op = match self.peek() {
            Tok::Lt => RelOp::Lt,
            Tok::Gt => RelOp::Gt,
            Tok::Le => RelOp::Le,
            Tok::Ge => RelOp::Ge,
            Tok::Eq => RelOp::Eq,
            Tok::Ne => RelOp::Ne,
            _ => return None,
        };
        self.bump();
        Some(op)
    }

    // ---- propositions ----

    fn bexpr(&mut self) -> Result<BoolTerm> {
        let mut b = self.bconj()?;
        while self.eat(&Tok::Or) {
            let r = self.bconj()?;
            b = BoolTerm::or(b, r);
        }
        Ok(b)
    }

    fn bconj(&mut self) -> Result<BoolTerm> {
        let mut b = self.bunary()?;
        while self.eat(&Tok::And) {
            let r = self.bunary()?;
            b = BoolTerm::and(b, r);
        }
        Ok(b)
    }

    fn bunary(&mut self) -> Result<BoolTerm> {
        if self.eat(&Tok::Tilde) {
            return Ok(BoolTerm::not(self.bunary()?));
        }
        if self.is_kw("exists") {
            return self.exists();
        }
        if let Some(b) = self.constant() {
            return Ok(b);
        }
        if let Some(b) = self.try_rel() {
            return Ok(b);
        }
        if self.eat(&Tok::LParen) {
            let b = self.bexpr()?;
            self.expect(Tok::RParen)?;
            return Ok(b);
        }
        Err(self.expected("a proposition"))
    }

    fn exists(&mut self) -> Result<BoolTerm> {
        self.expect_kw("exists")?;
        let x = self.ident()?;
        self.expect(Tok::Dot)?;
        let body = self.bexpr()?;
        Ok(BoolTerm::exists(&x.name, body))
    }

    fn constant(&mut self) -> Option<BoolTerm> {
        if self.is_kw("true") {
            self.bump();
            Some(BoolTerm::True)
        } else if self.is_kw("false") {
            self.bump();
            Some(BoolTerm::False)
        } else {
            None
        }
    }

    fn try_rel(&mut self) -> Option<BoolTerm> {
        let save = self.pos;
        let rel = (|| {
            let l = self.expr().ok()?;
            let Some(op) = self.relop() else {
                self.expected("a comparison operator");
                return None;
            };
            let r = self.expr().ok()?;
            Some(BoolTerm::rel(l, op, r))
        })();
        if rel.is_none() {
            self.pos = save;
        }
        rel
    }

    // ---- modal formulas ----

    fn mform(&mut self) -> Result<ModalFormula> {
        let mut q = self.mconj()?;
        while self.eat(&Tok::Or) {
            let r = self.mconj()?;
            q = ModalFormula::or(q, r);
        }
        Ok(q)
    }

    fn mconj(&mut self) -> Result<ModalFormula> {
        let mut q = self.munary()?;
        while self.eat(&Tok::And) {
            let r = self.munary()?;
            q = ModalFormula::and(q, r);
        }
        Ok(q)
    }

    fn munary(&mut self) -> Result<ModalFormula> {
        if self.eat(&Tok::Tilde) {
            return Ok(ModalFormula::not(self.munary()?));
        }
        if self.is_kw("exists") {
            return Ok(ModalFormula::Base(self.exists()?));
        }
        if let Some(colour) = self.modal_prefix()? {
            let body = self.mform()?;
            self.expect(Tok::RBracket)?;
            return Ok(ModalFormula::modal(colour, body));
        }
        if let Some(b) = self.constant() {
            return Ok(ModalFormula::Base(b));
        }
        if let Some(b) = self.try_rel() {
            return Ok(ModalFormula::Base(b));
        }
        if self.eat(&Tok::LParen) {
            let q = self.mform()?;
            self.expect(Tok::RParen)?;
            return Ok(q);
        }
        Err(self.expected("a formula"))
    }

    /// `N[`, `R[`, `B[`, `G(l)[` or `E(k)[`, consumed up to the bracket.
    fn modal_prefix(&mut self) -> Result<Option<Colour>> {
        let Tok::Ident(w) = self.peek().clone() else {
            return Ok(None);
        };
        let simple = match w.as_str() {
            "N" => Some(Colour::N),
            "R" => Some(Colour::R),
            "B" => Some(Colour::B),
            _ => None,
        };
        if let Some(c) = simple {
            if self.peek_at(1) == &Tok::LBracket {
                self.bump();
                self.bump();
                return Ok(Some(c));
            }
            return Ok(None);
        }
        if (w == "G" || w == "E")
            && self.peek_at(1) == &Tok::LParen
            && matches!(self.peek_at(2), Tok::Ident(_))
            && self.peek_at(3) == &Tok::RParen
        {
            self.bump();
            self.bump();
            let name = self.ident()?;
            self.expect(Tok::RParen)?;
            self.expect(Tok::LBracket)?;
            return Ok(Some(if w == "G" {
                Colour::G(name)
            } else {
                Colour::E(name)
            }));
        }
        Ok(None)
    }
}
