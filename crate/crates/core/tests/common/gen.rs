//! Seeded random programs, propositions and modal formulas over two
//! variables `x, y` in `0..2`, with labels `l, m`, exception kinds `k, k2`
//! and two fixed subroutines.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use nrb_core::eval::{Domain, StateSet};
use nrb_core::lang::{BoolTerm, Colour, Ident, ModalFormula, RelOp, Stmt, Subroutines, Term};
use nrb_core::model::GotoEnv;
use nrb_core::syntax::parse_stmt;

pub const LABELS: [&str; 2] = ["l", "m"];
pub const KINDS: [&str; 2] = ["k", "k2"];

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn domain() -> Domain {
    Domain::new([("x", 0, 2), ("y", 0, 2)]).unwrap()
}

/// `f` always returns; `g` returns or throws depending on `x`.
pub fn subroutines() -> Subroutines {
    let mut subs = Subroutines::new();
    subs.insert("f".into(), parse_stmt("x = 1; return").unwrap());
    subs.insert("g".into(), parse_stmt("x = 0 -> throw k | ~(x = 0) -> {y = x; return}").unwrap());
    subs
}

pub fn colours() -> Vec<Colour> {
    let mut out = vec![Colour::N, Colour::R, Colour::B];
    out.extend(LABELS.iter().map(|l| Colour::goto(l)));
    out.extend(KINDS.iter().map(|k| Colour::exc(k)));
    out
}

pub fn var(r: &mut StdRng) -> &'static str {
    if r.gen_bool(0.5) {
        "x"
    } else {
        "y"
    }
}

/// Right-hand sides that keep both variables inside `0..2`.
pub fn closed_term(r: &mut StdRng) -> Term {
    match r.gen_range(0..5) {
        0 => Term::Int(r.gen_range(0..3)),
        1 => Term::var(var(r)),
        2 => Term::add(Term::Int(2), Term::scale(-1, Term::var(var(r)))),
        3 => {
            let v = var(r);
            Term::cond(
                BoolTerm::rel(Term::var(v), RelOp::Lt, Term::Int(2)),
                Term::add(Term::var(v), Term::Int(1)),
                Term::Int(0),
            )
        }
        _ => Term::cond(
            BoolTerm::rel(Term::var("x"), RelOp::Le, Term::var("y")),
            Term::var("y"),
            Term::var("x"),
        ),
    }
}

pub fn boolean(r: &mut StdRng, depth: u32) -> BoolTerm {
    let atom = depth == 0 || r.gen_bool(0.4);
    if atom {
        return match r.gen_range(0..6) {
            0 => BoolTerm::True,
            1 => BoolTerm::False,
            2 => BoolTerm::rel(Term::var("x"), RelOp::Eq, Term::var("y")),
            3 => BoolTerm::rel(Term::var(var(r)), RelOp::Le, Term::Int(r.gen_range(0..3))),
            _ => BoolTerm::var_eq(var(r), r.gen_range(0..3)),
        };
    }
    match r.gen_range(0..7) {
        0 | 1 => BoolTerm::or(boolean(r, depth - 1), boolean(r, depth - 1)),
        2 | 3 => BoolTerm::and(boolean(r, depth - 1), boolean(r, depth - 1)),
        4 | 5 => BoolTerm::not(boolean(r, depth - 1)),
        _ => BoolTerm::exists(
            "x",
            BoolTerm::and(
                BoolTerm::rel(Term::var("x"), RelOp::Le, Term::var("y")),
                boolean(r, depth - 1),
            ),
        ),
    }
}

pub fn colour(r: &mut StdRng) -> Colour {
    let all = colours();
    all[r.gen_range(0..all.len())].clone()
}

pub fn formula(r: &mut StdRng, depth: u32) -> ModalFormula {
    if depth == 0 || r.gen_bool(0.25) {
        return ModalFormula::Base(boolean(r, 1));
    }
    match r.gen_range(0..8) {
        0..=2 => ModalFormula::modal(colour(r), formula(r, depth - 1)),
        3 | 4 => ModalFormula::or(formula(r, depth - 1), formula(r, depth - 1)),
        5 | 6 => ModalFormula::and(formula(r, depth - 1), formula(r, depth - 1)),
        _ => ModalFormula::not(formula(r, depth - 1)),
    }
}

/// A postcondition of the usual shape: one modality per chosen colour.
pub fn post(r: &mut StdRng) -> ModalFormula {
    let mut parts = Vec::new();
    for c in colours() {
        if r.gen_bool(0.45) {
            parts.push(ModalFormula::modal(c, ModalFormula::Base(boolean(r, 1))));
        }
    }
    if r.gen_bool(0.15) {
        parts.push(ModalFormula::Base(boolean(r, 1)));
    }
    parts
        .into_iter()
        .reduce(ModalFormula::or)
        .unwrap_or(ModalFormula::Base(BoolTerm::False))
}

pub struct StmtGen<'r> {
    pub rng: &'r mut StdRng,
    pub calls: bool,
}

impl StmtGen<'_> {
    /// A well-scoped statement of at most `size` nodes.
    pub fn stmt(&mut self, size: usize) -> Stmt {
        self.build(size.max(1), &mut Vec::new())
    }

    /// Like `stmt`, but `free` labels may be used without a declaration.
    pub fn open(&mut self, size: usize, free: &[&'static str]) -> Stmt {
        self.build(size.max(1), &mut free.to_vec())
    }

    fn leaf(&mut self, scope: &[&'static str]) -> Stmt {
        let r = &mut *self.rng;
        match r.gen_range(0..9) {
            0 => Stmt::Skip,
            1 => Stmt::Return,
            2 => Stmt::Break,
            3 => Stmt::throw(KINDS[r.gen_range(0..2)]),
            4 if !scope.is_empty() => Stmt::goto(scope[r.gen_range(0..scope.len())]),
            5 if self.calls => Stmt::call(if r.gen_bool(0.5) { "f" } else { "g" }),
            _ => Stmt::assign(var(r), closed_term(r)),
        }
    }

    fn build(&mut self, size: usize, scope: &mut Vec<&'static str>) -> Stmt {
        if size == 1 || self.rng.gen_bool(0.2) {
            return self.leaf(scope);
        }
        let rest = size - 1;
        match self.rng.gen_range(0..8) {
            0 | 1 if rest >= 2 => {
                let left = self.rng.gen_range(1..rest);
                Stmt::seq(self.build(left, scope), self.build(rest - left, scope))
            }
            2 if rest >= 2 => {
                let left = self.rng.gen_range(1..rest);
                Stmt::choice(self.build(left, scope), self.build(rest - left, scope))
            }
            3 if rest >= 2 => {
                let left = self.rng.gen_range(1..rest);
                let k = KINDS[self.rng.gen_range(0..2)];
                let body = self.build(left, scope);
                Stmt::try_catch(body, k, self.build(rest - left, scope))
            }
            4 => {
                let b = boolean(self.rng, 1);
                Stmt::guard(b, self.build(rest, scope))
            }
            5 => Stmt::do_loop(self.build(rest, scope)),
            6 if !scope.is_empty() => {
                let l = scope[self.rng.gen_range(0..scope.len())];
                Stmt::labelled(self.build(rest, scope), l)
            }
            _ => {
                let free: Vec<&'static str> = LABELS.iter().copied().filter(|l| !scope.contains(l)).collect();
                if free.is_empty() {
                    return Stmt::do_loop(self.build(rest, scope));
                }
                let l = free[self.rng.gen_range(0..free.len())];
                scope.push(l);
                let body = self.build(rest, scope);
                scope.pop();
                Stmt::label(l, body)
            }
        }
    }
}

pub fn stmt(r: &mut StdRng, size: usize) -> Stmt {
    StmtGen { rng: r, calls: true }.stmt(size)
}

/// A statement that may jump to or label `l` and `m` without declaring them.
pub fn open_stmt(r: &mut StdRng, size: usize) -> Stmt {
    StmtGen { rng: r, calls: true }.open(size, &LABELS)
}

/// A random subset of the domain's states.
pub fn states(r: &mut StdRng, dom: &Domain, p: f64) -> StateSet {
    dom.ids().filter(|_| r.gen_bool(p)).collect()
}

/// Random goto assumptions for both labels.
pub fn env(r: &mut StdRng, dom: &Domain) -> GotoEnv {
    let mut g = GotoEnv::new();
    for l in LABELS {
        let s = states(r, dom, 0.4);
        g = g.with(&Ident::new(l), s);
    }
    g
}
