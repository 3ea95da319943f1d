//! Evaluation of terms and propositions over a finite state space.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::lang::{BoolTerm, Term, VarDecl};

/// Default cap on the number of states in a domain.
pub const DEFAULT_MAX_STATES: u64 = 1_000_000;

/// Index of a state in enumeration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(pub usize);

pub type StateSet = BTreeSet<StateId>;

/// The finite state space: variables in name order, each with an inclusive
/// range. States are numbered in lexicographic (variable, value) order, so
/// the first variable varies slowest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domain {
    vars: Vec<(String, i64, i64)>,
    size: usize,
}

/// A concrete valuation of every declared variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State(pub Vec<i64>);

impl Domain {
    pub fn new<'a>(ranges: impl IntoIterator<Item = (&'a str, i64, i64)>) -> Result<Domain> {
        Domain::with_limit(ranges, DEFAULT_MAX_STATES)
    }

    pub fn with_limit<'a>(
        ranges: impl IntoIterator<Item = (&'a str, i64, i64)>,
        limit: u64,
    ) -> Result<Domain> {
        let mut vars: Vec<(String, i64, i64)> = ranges
            .into_iter()
            .map(|(n, lo, hi)| (n.to_string(), lo, hi))
            .collect();
        vars.sort_by(|a, b| a.0.cmp(&b.0));
        vars.dedup_by(|a, b| a.0 == b.0);
        let mut size: u128 = 1;
        for (_, lo, hi) in &vars {
            let width = (*hi as i128 - *lo as i128 + 1).max(0) as u128;
            size = size.saturating_mul(width);
        }
        if size > limit as u128 {
            return Err(Error::SizeLimitExceeded { size, limit });
        }
        Ok(Domain {
            vars,
            size: size as usize,
        })
    }

    pub fn from_decls(decls: &[VarDecl], limit: u64) -> Result<Domain> {
        Domain::with_limit(
            decls.iter().map(|d| (d.name.as_str(), d.low, d.high)),
            limit,
        )
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn vars(&self) -> impl Iterator<Item = (&str, i64, i64)> {
        self.vars.iter().map(|(n, lo, hi)| (n.as_str(), *lo, *hi))
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.binary_search_by(|v| v.0.as_str().cmp(name)).ok()
    }

    /// Range of a variable. Names renamed during substitution (`y#3`) share
    /// the range of their original.
    pub fn range(&self, name: &str) -> Option<(i64, i64)> {
        let base = name.split('#').next().unwrap_or(name);
        self.var_index(base).map(|i| (self.vars[i].1, self.vars[i].2))
    }

    pub fn ids(&self) -> impl Iterator<Item = StateId> {
        (0..self.size).map(StateId)
    }

    pub fn all(&self) -> StateSet {
        self.ids().collect()
    }

    pub fn state(&self, id: StateId) -> State {
        let mut rest = id.0;
        let mut values = vec![0; self.vars.len()];
        for (i, (_, lo, hi)) in self.vars.iter().enumerate().rev() {
            let width = (hi - lo + 1) as usize;
            values[i] = lo + (rest % width) as i64;
            rest /= width;
        }
        State(values)
    }

    pub fn id_of(&self, state: &State) -> Option<StateId> {
        let mut idx = 0usize;
        for (v, (_, lo, hi)) in state.0.iter().zip(&self.vars) {
            if v < lo || v > hi {
                return None;
            }
            idx = idx * (hi - lo + 1) as usize + (v - lo) as usize;
        }
        Some(StateId(idx))
    }

    /// The value of variable `var` (by index) in state `id`.
    pub fn value(&self, id: StateId, var: usize) -> i64 {
        let mut rest = id.0;
        for (_, lo, hi) in self.vars[var + 1..].iter() {
            rest /= (hi - lo + 1) as usize;
        }
        let (_, lo, hi) = &self.vars[var];
        lo + (rest % (hi - lo + 1) as usize) as i64
    }

    /// `s[x -> v]`, or `None` if `v` is outside the range of `x`.
    pub fn update(&self, id: StateId, var: usize, v: i128) -> Option<StateId> {
        let (_, lo, hi) = &self.vars[var];
        if v < *lo as i128 || v > *hi as i128 {
            return None;
        }
        let stride: usize = self.vars[var + 1..]
            .iter()
            .map(|(_, lo, hi)| (hi - lo + 1) as usize)
            .product();
        let old = self.value(id, var);
        let delta = (v as i64 - old) as isize * stride as isize;
        Some(StateId((id.0 as isize + delta) as usize))
    }

    pub fn display_state(&self, id: StateId) -> String {
        let state = self.state(id);
        let parts: Vec<String> = self
            .vars
            .iter()
            .zip(&state.0)
            .map(|((n, _, _), v)| format!("{n}:{v}"))
            .collect();
        format!("{{{}}}", parts.join(", "))
    }

    pub fn bindings(&self, id: StateId) -> BTreeMap<String, i64> {
        self.vars
            .iter()
            .zip(self.state(id).0)
            .map(|((n, _, _), v)| (n.clone(), v))
            .collect()
    }

    /// Evaluate a term in state `id`.
    pub fn eval_term(&self, e: &Term, id: StateId) -> Result<i128> {
        Env::new(self, id).term(e)
    }

    /// Evaluate a proposition in state `id`.
    pub fn eval_bool(&self, b: &BoolTerm, id: StateId) -> Result<bool> {
        Env::new(self, id).bool(b)
    }

    /// The states satisfying `b`.
    pub fn satisfying(&self, b: &BoolTerm) -> Result<StateSet> {
        let mut out = StateSet::new();
        for id in self.ids() {
            if self.eval_bool(b, id)? {
                out.insert(id);
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .vars
            .iter()
            .map(|(n, lo, hi)| format!("{n}:{lo}..{hi}"))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Every state of the domain in enumeration order.
pub fn enumerate_states(dom: &Domain) -> Vec<State> {
    dom.ids().map(|id| dom.state(id)).collect()
}

/// Evaluation environment: a state plus the values of quantified variables.
struct Env<'a> {
    dom: &'a Domain,
    state: StateId,
    bound: Vec<(&'a str, i128)>,
}

impl<'a> Env<'a> {
    fn new(dom: &'a Domain, state: StateId) -> Self {
        Env {
            dom,
            state,
            bound: Vec::new(),
        }
    }

    fn lookup(&self, name: &str) -> Result<i128> {
        if let Some((_, v)) = self.bound.iter().rev().find(|(n, _)| *n == name) {
            return Ok(*v);
        }
        match self.dom.var_index(name) {
            Some(i) => Ok(self.dom.value(self.state, i) as i128),
            None => Err(Error::UnboundVariable(name.to_string())),
        }
    }

    fn term(&mut self, e: &'a Term) -> Result<i128> {
        match e {
            Term::Int(n) => Ok(*n as i128),
            Term::Var(x) => self.lookup(x),
            Term::Scale(c, t) => (*c as i128).checked_mul(self.term(t)?).ok_or(Error::Overflow),
            Term::Add(a, b) => self.term(a)?.checked_add(self.term(b)?).ok_or(Error::Overflow),
            Term::Cond(b, t, f) => {
                if self.bool(b)? {
                    self.term(t)
                } else {
                    self.term(f)
                }
            }
        }
    }

    fn bool(&mut self, b: &'a BoolTerm) -> Result<bool> {
        match b {
            BoolTerm::True => Ok(true),
            BoolTerm::False => Ok(false),
            BoolTerm::Rel(l, op, r) => {
                let l = self.term(l)?;
                let r = self.term(r)?;
                Ok(op.holds(l, r))
            }
            BoolTerm::Or(a, b) => Ok(self.bool(a)? || self.bool(b)?),
            BoolTerm::And(a, b) => Ok(self.bool(a)? && self.bool(b)?),
            BoolTerm::Not(a) => Ok(!self.bool(a)?),
            BoolTerm::Exists(x, body) => {
                // Quantification is over the declared range of the variable.
                let (lo, hi) = self
                    .dom
                    .range(x)
                    .ok_or_else(|| Error::UnboundVariable(x.clone()))?;
                for n in lo..=hi {
                    self.bound.push((x.as_str(), n as i128));
                    let r = self.bool(body);
                    self.bound.pop();
                    if r? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
        }
    }
}

pub fn term_free_vars(e: &Term, out: &mut BTreeSet<String>) {
    match e {
        Term::Int(_) => {}
        Term::Var(x) => {
            out.insert(x.clone());
        }
        Term::Scale(_, t) => term_free_vars(t, out),
        Term::Add(a, b) => {
            term_free_vars(a, out);
            term_free_vars(b, out);
        }
        Term::Cond(b, t, f) => {
            out.extend(free_vars(b));
            term_free_vars(t, out);
            term_free_vars(f, out);
        }
    }
}

pub fn free_vars(b: &BoolTerm) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    match b {
        BoolTerm::True | BoolTerm::False => {}
        BoolTerm::Rel(l, _, r) => {
            term_free_vars(l, &mut out);
            term_free_vars(r, &mut out);
        }
        BoolTerm::Or(a, c) | BoolTerm::And(a, c) => {
            out.extend(free_vars(a));
            out.extend(free_vars(c));
        }
        BoolTerm::Not(a) => out.extend(free_vars(a)),
        BoolTerm::Exists(x, body) => {
            out.extend(free_vars(body));
            out.remove(x);
        }
    }
    out
}

/// Capture-avoiding substitution `b[e/x]`.
pub fn substitute(b: &BoolTerm, x: &str, e: &Term) -> BoolTerm {
    match b {
        BoolTerm::True => BoolTerm::True,
        BoolTerm::False => BoolTerm::False,
        BoolTerm::Rel(l, op, r) => BoolTerm::Rel(subst_term(l, x, e), *op, subst_term(r, x, e)),
        BoolTerm::Or(a, c) => BoolTerm::or(substitute(a, x, e), substitute(c, x, e)),
        BoolTerm::And(a, c) => BoolTerm::and(substitute(a, x, e), substitute(c, x, e)),
        BoolTerm::Not(a) => BoolTerm::not(substitute(a, x, e)),
        BoolTerm::Exists(y, body) => {
            if y == x {
                return b.clone();
            }
            let mut fv = BTreeSet::new();
            term_free_vars(e, &mut fv);
            if !fv.contains(y) {
                return BoolTerm::exists(y, substitute(body, x, e));
            }
            let mut avoid = fv;
            avoid.extend(free_vars(body));
            avoid.insert(x.to_string());
            let base = y.split('#').next().unwrap_or(y);
            let fresh = (1..)
                .map(|i| format!("{base}#{i}"))
                .find(|n| !avoid.contains(n) && n != y)
                .expect("fresh name");
            let renamed = substitute(body, y, &Term::Var(fresh.clone()));
            BoolTerm::exists(&fresh, substitute(&renamed, x, e))
        }
    }
}

pub fn subst_term(t: &Term, x: &str, e: &Term) -> Term {
    match t {
        Term::Int(_) => t.clone(),
        Term::Var(y) if y == x => e.clone(),
        Term::Var(_) => t.clone(),
        Term::Scale(c, a) => Term::scale(*c, subst_term(a, x, e)),
        Term::Add(a, b) => Term::add(subst_term(a, x, e), subst_term(b, x, e)),
        Term::Cond(b, a, c) => Term::cond(substitute(b, x, e), subst_term(a, x, e), subst_term(c, x, e)),
    }
}
