//! Abstract syntax shared by every other module: terms, propositions,
//! statements, colours, modal formulas and judgements.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};

/// A position in source text. Lines and columns start at 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Span {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// A label, exception kind, subroutine name or assignment target.
///
/// The optional span is carried for diagnostics only; equality, ordering and
/// hashing look at the name alone.
#[derive(Debug, Clone)]
pub struct Ident {
    pub name: String,
    pub span: Option<Span>,
}

impl Ident {
    pub fn new(name: impl Into<String>) -> Self {
        Ident {
            name: name.into(),
            span: None,
        }
    }

    pub fn at(name: impl Into<String>, span: Span) -> Self {
        Ident {
            name: name.into(),
            span: Some(span),
        }
    }

    pub fn as_str(&self) -> &str {
        &self.name
    }
}

impl PartialEq for Ident {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
    }
}

impl Eq for Ident {}

impl PartialOrd for Ident {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ident {
    fn cmp(&self, other: &Self) -> Ordering {
        self.name.cmp(&other.name)
    }
}

impl Hash for Ident {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.name.hash(state);
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl From<&str> for Ident {
    fn from(s: &str) -> Self {
        Ident::new(s)
    }
}

/// Integer term expressions: piecewise linear forms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Int(i64),
    Var(String),
    /// `n*e`; the coefficient is always a literal.
    Scale(i64, Box<Term>),
    Add(Box<Term>, Box<Term>),
    Cond(Box<BoolTerm>, Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn add(l: Term, r: Term) -> Term {
        Term::Add(Box::new(l), Box::new(r))
    }

    pub fn scale(c: i64, t: Term) -> Term {
        Term::Scale(c, Box::new(t))
    }

    pub fn cond(b: BoolTerm, t: Term, e: Term) -> Term {
        Term::Cond(Box::new(b), Box::new(t), Box::new(e))
    }

    /// A literal for any integer, using `-1*n` for negative values so that the
    /// printed form parses back to the same tree.
    pub fn literal(v: i64) -> Term {
        if v < 0 {
            Term::scale(-1, Term::Int(v.unsigned_abs() as i64))
        } else {
            Term::Int(v)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelOp {
    Lt,
    Gt,
    Le,
    Ge,
    Eq,
    Ne,
}

impl RelOp {
    pub fn holds(self, l: i128, r: i128) -> bool {
        match self {
            RelOp::Lt => l < r,
            RelOp::Gt => l > r,
            RelOp::Le => l <= r,
            RelOp::Ge => l >= r,
            RelOp::Eq => l == r,
            RelOp::Ne => l != r,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            RelOp::Lt => "<",
            RelOp::Gt => ">",
            RelOp::Le => "<=",
            RelOp::Ge => ">=",
            RelOp::Eq => "=",
            RelOp::Ne => "!=",
        }
    }
}

/// Non-modal propositions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoolTerm {
    True,
    False,
    Rel(Term, RelOp, Term),
    Or(Box<BoolTerm>, Box<BoolTerm>),
    And(Box<BoolTerm>, Box<BoolTerm>),
    Not(Box<BoolTerm>),
    Exists(String, Box<BoolTerm>),
}

impl BoolTerm {
    pub fn rel(l: Term, op: RelOp, r: Term) -> BoolTerm {
        BoolTerm::Rel(l, op, r)
    }

    pub fn or(l: BoolTerm, r: BoolTerm) -> BoolTerm {
        BoolTerm::Or(Box::new(l), Box::new(r))
    }

    pub fn and(l: BoolTerm, r: BoolTerm) -> BoolTerm {
        BoolTerm::And(Box::new(l), Box::new(r))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(b: BoolTerm) -> BoolTerm {
        BoolTerm::Not(Box::new(b))
    }

    pub fn exists(var: &str, body: BoolTerm) -> BoolTerm {
        BoolTerm::Exists(var.to_string(), Box::new(body))
    }

    /// `x = v` with a literal right-hand side.
    pub fn var_eq(var: &str, v: i64) -> BoolTerm {
        BoolTerm::Rel(Term::var(var), RelOp::Eq, Term::literal(v))
    }

    /// Left-nested disjunction; the empty disjunction is `false`.
    pub fn disjunction(items: impl IntoIterator<Item = BoolTerm>) -> BoolTerm {
        items
            .into_iter()
            .reduce(BoolTerm::or)
            .unwrap_or(BoolTerm::False)
    }

    /// Left-nested conjunction; the empty conjunction is `true`.
    pub fn conjunction(items: impl IntoIterator<Item = BoolTerm>) -> BoolTerm {
        items
            .into_iter()
            .reduce(BoolTerm::and)
            .unwrap_or(BoolTerm::True)
    }

    pub fn has_exists(&self) -> bool {
        match self {
            BoolTerm::True | BoolTerm::False => false,
            BoolTerm::Rel(l, _, r) => l.has_exists() || r.has_exists(),
            BoolTerm::Or(a, b) | BoolTerm::And(a, b) => a.has_exists() || b.has_exists(),
            BoolTerm::Not(a) => a.has_exists(),
            BoolTerm::Exists(..) => true,
        }
    }
}

impl Term {
    fn has_exists(&self) -> bool {
        match self {
            Term::Int(_) | Term::Var(_) => false,
            Term::Scale(_, t) => t.has_exists(),
            Term::Add(a, b) => a.has_exists() || b.has_exists(),
            Term::Cond(b, t, e) => b.has_exists() || t.has_exists() || e.has_exists(),
        }
    }
}

/// How control left a fragment.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Colour {
    N,
    R,
    B,
    G(Ident),
    E(Ident),
}

impl Colour {
    pub fn goto(label: &str) -> Colour {
        Colour::G(Ident::new(label))
    }

    pub fn exc(kind: &str) -> Colour {
        Colour::E(Ident::new(kind))
    }
}

impl fmt::Display for Colour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Colour::N => f.write_str("N"),
            Colour::R => f.write_str("R"),
            Colour::B => f.write_str("B"),
            Colour::G(l) => write!(f, "G:{l}"),
            Colour::E(k) => write!(f, "E:{k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Stmt {
    Skip,
    Return,
    Break,
    Goto(Ident),
    Throw(Ident),
    Seq(Box<Stmt>, Box<Stmt>),
    Assign(Ident, Term),
    Guard(BoolTerm, Box<Stmt>),
    Choice(Box<Stmt>, Box<Stmt>),
    Do(Box<Stmt>),
    /// `P : l`
    Labelled(Box<Stmt>, Ident),
    /// `label l. P`
    LabelDecl(Ident, Box<Stmt>),
    Call(Ident),
    /// `try P catch(k) Q`
    TryCatch(Box<Stmt>, Ident, Box<Stmt>),
}

impl Stmt {
    pub fn seq(a: Stmt, b: Stmt) -> Stmt {
        Stmt::Seq(Box::new(a), Box::new(b))
    }

    pub fn guard(b: BoolTerm, s: Stmt) -> Stmt {
        Stmt::Guard(b, Box::new(s))
    }

    pub fn choice(a: Stmt, b: Stmt) -> Stmt {
        Stmt::Choice(Box::new(a), Box::new(b))
    }

    pub fn do_loop(body: Stmt) -> Stmt {
        Stmt::Do(Box::new(body))
    }

    pub fn labelled(s: Stmt, l: &str) -> Stmt {
        Stmt::Labelled(Box::new(s), Ident::new(l))
    }

    pub fn label(l: &str, body: Stmt) -> Stmt {
        Stmt::LabelDecl(Ident::new(l), Box::new(body))
    }

    pub fn goto(l: &str) -> Stmt {
        Stmt::Goto(Ident::new(l))
    }

    pub fn throw(k: &str) -> Stmt {
        Stmt::Throw(Ident::new(k))
    }

    pub fn call(h: &str) -> Stmt {
        Stmt::Call(Ident::new(h))
    }

    pub fn assign(x: &str, e: Term) -> Stmt {
        Stmt::Assign(Ident::new(x), e)
    }

    pub fn try_catch(body: Stmt, k: &str, handler: Stmt) -> Stmt {
        Stmt::TryCatch(Box::new(body), Ident::new(k), Box::new(handler))
    }

    /// Right-nested sequence of the given statements; empty input is `skip`.
    pub fn sequence(items: impl IntoIterator<Item = Stmt>) -> Stmt {
        let mut items: Vec<Stmt> = items.into_iter().collect();
        let Some(mut acc) = items.pop() else {
            return Stmt::Skip;
        };
        while let Some(s) = items.pop() {
            acc = Stmt::seq(s, acc);
        }
        acc
    }

    /// Number of statement nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Stmt::Skip
            | Stmt::Return
            | Stmt::Break
            | Stmt::Goto(_)
            | Stmt::Throw(_)
            | Stmt::Assign(..)
            | Stmt::Call(_) => 1,
            Stmt::Guard(_, s) | Stmt::Do(s) | Stmt::Labelled(s, _) | Stmt::LabelDecl(_, s) => {
                1 + s.size()
            }
            Stmt::Seq(a, b) | Stmt::Choice(a, b) | Stmt::TryCatch(a, _, b) => {
                1 + a.size() + b.size()
            }
        }
    }
}

/// Propositions over transitions, extended with the colour modalities.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ModalFormula {
    Base(BoolTerm),
    Modal(Colour, Box<ModalFormula>),
    Or(Box<ModalFormula>, Box<ModalFormula>),
    And(Box<ModalFormula>, Box<ModalFormula>),
    Not(Box<ModalFormula>),
}

impl ModalFormula {
    pub fn base(b: BoolTerm) -> Self {
        ModalFormula::Base(b)
    }

    pub fn modal(c: Colour, q: ModalFormula) -> Self {
        ModalFormula::Modal(c, Box::new(q))
    }

    pub fn or(a: ModalFormula, b: ModalFormula) -> Self {
        ModalFormula::Or(Box::new(a), Box::new(b))
    }

    pub fn and(a: ModalFormula, b: ModalFormula) -> Self {
        ModalFormula::And(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: ModalFormula) -> Self {
        ModalFormula::Not(Box::new(a))
    }

    pub fn is_modal(&self) -> bool {
        match self {
            ModalFormula::Base(_) => false,
            ModalFormula::Modal(..) => true,
            ModalFormula::Or(a, b) | ModalFormula::And(a, b) => a.is_modal() || b.is_modal(),
            ModalFormula::Not(a) => a.is_modal(),
        }
    }

    /// Collapse every modal-free connective subtree into a single `Base`.
    /// This is the shape the parser produces.
    pub fn canonical(self) -> Self {
        match self {
            ModalFormula::Base(b) => ModalFormula::Base(b),
            ModalFormula::Modal(c, q) => ModalFormula::modal(c, q.canonical()),
            ModalFormula::Or(a, b) => match (a.canonical(), b.canonical()) {
                (ModalFormula::Base(x), ModalFormula::Base(y)) => {
                    ModalFormula::Base(BoolTerm::or(x, y))
                }
                (x, y) => ModalFormula::or(x, y),
            },
            ModalFormula::And(a, b) => match (a.canonical(), b.canonical()) {
                (ModalFormula::Base(x), ModalFormula::Base(y)) => {
                    ModalFormula::Base(BoolTerm::and(x, y))
                }
                (x, y) => ModalFormula::and(x, y),
            },
            ModalFormula::Not(a) => match a.canonical() {
                ModalFormula::Base(x) => ModalFormula::Base(BoolTerm::not(x)),
                x => ModalFormula::not(x),
            },
        }
    }

    pub fn has_exists(&self) -> bool {
        match self {
            ModalFormula::Base(b) => b.has_exists(),
            ModalFormula::Modal(_, q) | ModalFormula::Not(q) => q.has_exists(),
            ModalFormula::Or(a, b) | ModalFormula::And(a, b) => a.has_exists() || b.has_exists(),
        }
    }
}

/// A triple with goto assumptions: `G_l p_l |> {pre} stmt {post}`.
///
/// Assumptions are an ordered list; a label listed more than once stands for
/// the disjunction of its entries.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Judgement {
    pub assumptions: Vec<(Ident, BoolTerm)>,
    pub pre: BoolTerm,
    pub stmt: Stmt,
    pub post: ModalFormula,
}

impl Judgement {
    pub fn new(pre: BoolTerm, stmt: Stmt, post: ModalFormula) -> Self {
        Judgement {
            assumptions: Vec::new(),
            pre,
            stmt,
            post,
        }
    }

    pub fn with_assumption(mut self, label: &str, p: BoolTerm) -> Self {
        self.assumptions.push((Ident::new(label), p));
        self
    }

    /// The disjunction of all assumptions about `label`, or `false`.
    pub fn assumption(&self, label: &Ident) -> BoolTerm {
        BoolTerm::disjunction(
            self.assumptions
                .iter()
                .filter(|(l, _)| l == label)
                .map(|(_, p)| p.clone()),
        )
    }

    pub fn assumption_labels(&self) -> Vec<Ident> {
        let mut labels: Vec<Ident> = self.assumptions.iter().map(|(l, _)| l.clone()).collect();
        labels.sort();
        labels.dedup();
        labels
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarDecl {
    pub name: Ident,
    pub low: i64,
    pub high: i64,
}

pub type Subroutines = BTreeMap<String, Stmt>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub vars: Vec<VarDecl>,
    pub subs: Subroutines,
    /// Subroutine names with their declaration sites, in source order.
    pub sub_names: Vec<Ident>,
    pub main: Stmt,
}

impl Program {
    pub fn new(vars: Vec<VarDecl>, main: Stmt) -> Self {
        Program {
            vars,
            subs: BTreeMap::new(),
            sub_names: Vec::new(),
            main,
        }
    }

    pub fn with_sub(mut self, name: &str, body: Stmt) -> Self {
        self.sub_names.push(Ident::new(name));
        self.subs.insert(name.to_string(), body);
        self
    }
}
