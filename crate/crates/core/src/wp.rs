//! Weakest preconditions over the finite state space, computed by structure
//! and checked against the defining brute-force construction.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::eval::{Domain, StateSet};
use crate::lang::{BoolTerm, Colour, Judgement, ModalFormula, Stmt, Subroutines};
use crate::modal::{colours_of, component_of_rest, component_states};
use crate::model::{check_triple_with, possible_colours, GotoEnv, Interpreter};

/// A set of states together with a proposition denoting exactly that set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Predicate {
    pub states: StateSet,
    pub rendering: BoolTerm,
}

impl Predicate {
    pub fn new(states: StateSet, dom: &Domain) -> Self {
        let rendering = render(&states, dom);
        Predicate { states, rendering }
    }
}

/// Canonical proposition for a state set: a disjunction, in enumeration
/// order, of one conjunction of equalities per state. The empty set is
/// `false` and the full set `true`.
pub fn render(states: &StateSet, dom: &Domain) -> BoolTerm {
    if states.is_empty() {
        return BoolTerm::False;
    }
    if states.len() == dom.len() {
        return BoolTerm::True;
    }
    BoolTerm::disjunction(states.iter().map(|&s| {
        let vars: Vec<(&str, i64, i64)> = dom.vars().collect();
        BoolTerm::conjunction(
            vars.iter()
                .enumerate()
                .map(|(i, (name, _, _))| BoolTerm::var_eq(name, dom.value(s, i))),
        )
    }))
}

/// Acceptable final states per exit colour.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Post {
    pub per: BTreeMap<Colour, StateSet>,
    pub rest: StateSet,
}

impl Post {
    pub fn from_formula(q: &ModalFormula, dom: &Domain) -> Result<Post> {
        let mut per = BTreeMap::new();
        for c in colours_of(q).into_iter().chain([Colour::N, Colour::R, Colour::B]) {
            let states = component_states(dom, q, &c)?;
            per.insert(c, states);
        }
        Ok(Post {
            per,
            rest: dom.satisfying(&component_of_rest(q))?,
        })
    }

    pub fn get(&self, c: &Colour) -> &StateSet {
        self.per.get(c).unwrap_or(&self.rest)
    }

    pub fn with(&self, c: Colour, states: StateSet) -> Post {
        let mut p = self.clone();
        p.per.insert(c, states);
        p
    }
}

pub struct WpEngine<'a> {
    interp: Interpreter<'a>,
}

impl<'a> WpEngine<'a> {
    pub fn new(dom: &'a Domain, subs: &'a Subroutines) -> Self {
        WpEngine {
            interp: Interpreter::new(dom, subs),
        }
    }

    pub fn interpreter(&self) -> &Interpreter<'a> {
        &self.interp
    }

    fn dom(&self) -> &'a Domain {
        self.interp.domain()
    }

    pub fn wp(&self, stmt: &Stmt, q: &ModalFormula, g: &GotoEnv) -> Result<Predicate> {
        let post = Post::from_formula(q, self.dom())?;
        let states = self.wp_sets(stmt, &post, g)?;
        Ok(Predicate::new(states, self.dom()))
    }

    /// Structural weakest precondition against per-colour final-state sets.
    pub fn wp_sets(&self, stmt: &Stmt, post: &Post, g: &GotoEnv) -> Result<StateSet> {
        let dom = self.dom();
        match stmt {
            Stmt::Skip => Ok(post.get(&Colour::N).clone()),
            Stmt::Return => Ok(post.get(&Colour::R).clone()),
            Stmt::Break => Ok(post.get(&Colour::B).clone()),
            Stmt::Goto(l) => Ok(post.get(&Colour::G(l.clone())).clone()),
            Stmt::Throw(k) => Ok(post.get(&Colour::E(k.clone())).clone()),
            Stmt::Assign(x, e) => {
                let var = dom
                    .var_index(x.as_str())
                    .ok_or_else(|| Error::UnboundVariable(x.name.clone()))?;
                let target = post.get(&Colour::N);
                let mut out = StateSet::new();
                for s in dom.ids() {
                    let v = dom.eval_term(e, s)?;
                    // A store outside the declared range has no model; such
                    // states are never in the precondition.
                    if let Some(s1) = dom.update(s, var, v) {
                        if target.contains(&s1) {
                            out.insert(s);
                        }
                    }
                }
                Ok(out)
            }
            Stmt::Seq(p, q) => {
                let mid = self.wp_sets(q, post, g)?;
                self.wp_sets(p, &post.with(Colour::N, mid), g)
            }
            Stmt::TryCatch(p, k, q) => {
                let mid = self.wp_sets(q, post, g)?;
                self.wp_sets(p, &post.with(Colour::E(k.clone()), mid), g)
            }
            Stmt::Guard(b, p) => {
                let mut out = self.wp_sets(p, post, g)?;
                for s in dom.ids() {
                    if !dom.eval_bool(b, s)? {
                        out.insert(s);
                    }
                }
                Ok(out)
            }
            Stmt::Choice(p, q) => {
                let a = self.wp_sets(p, post, g)?;
                let b = self.wp_sets(q, post, g)?;
                Ok(a.intersection(&b).copied().collect())
            }
            Stmt::Do(p) => {
                // Greatest fixpoint: the body's normal exits must land back in
                // the invariant, its breaks in the loop's normal postcondition.
                let exit = post.with(Colour::B, post.get(&Colour::N).clone());
                let mut w = dom.all();
                loop {
                    let next = self.wp_sets(p, &exit.with(Colour::N, w.clone()), g)?;
                    if next == w {
                        return Ok(w);
                    }
                    w = next;
                }
            }
            Stmt::Labelled(p, l) => {
                if g.get(l).is_subset(post.get(&Colour::N)) {
                    self.wp_sets(p, post, g)
                } else {
                    Ok(StateSet::new())
                }
            }
            Stmt::LabelDecl(l, p) => {
                let fix = self.interp.label_fixpoint(l, p, g)?;
                let inner = post.with(Colour::G(l.clone()), dom.all());
                self.wp_sets(p, &inner, &g.with(l, fix))
            }
            Stmt::Call(h) => {
                let body = self
                    .interp
                    .subs()
                    .get(&h.name)
                    .ok_or_else(|| Error::UndefinedSubroutine(h.name.clone()))?;
                let all = dom.all();
                let mut per = BTreeMap::new();
                per.insert(Colour::R, post.get(&Colour::N).clone());
                for c in possible_colours(body, self.interp.subs()) {
                    if let Colour::E(_) = c {
                        per.insert(c.clone(), post.get(&c).clone());
                    }
                }
                let inner = Post { per, rest: all };
                self.wp_sets(body, &inner, &GotoEnv::new())
            }
        }
    }

    /// The defining construction: states from which every transition
    /// satisfies `q`, decided one initial state at a time with the triple
    /// checker. States whose run stores an out-of-range value are excluded.
    pub fn semantic_wp(&self, stmt: &Stmt, q: &ModalFormula, g: &GotoEnv) -> Result<StateSet> {
        let dom = self.dom();
        let assumptions: Vec<_> = g
            .0
            .iter()
            .map(|(l, states)| (l.clone(), render(states, dom)))
            .collect();
        let mut out = StateSet::new();
        for s in dom.ids() {
            let j = Judgement {
                assumptions: assumptions.clone(),
                pre: render(&BTreeSet::from([s]), dom),
                stmt: stmt.clone(),
                post: q.clone(),
            };
            match check_triple_with(&self.interp, &j) {
                Ok(v) if v.holds => {
                    out.insert(s);
                }
                Ok(_) | Err(Error::DomainNotClosed { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        Ok(out)
    }

    pub fn verify_wp(&self, stmt: &Stmt, q: &ModalFormula, g: &GotoEnv) -> Result<bool> {
        Ok(self.wp(stmt, q, g)?.states == self.semantic_wp(stmt, q, g)?)
    }
}

pub fn wp(stmt: &Stmt, q: &ModalFormula, g: &GotoEnv, dom: &Domain, subs: &Subroutines) -> Result<Predicate> {
    WpEngine::new(dom, subs).wp(stmt, q, g)
}

pub fn semantic_wp(
    stmt: &Stmt,
    q: &ModalFormula,
    g: &GotoEnv,
    dom: &Domain,
    subs: &Subroutines,
) -> Result<StateSet> {
    WpEngine::new(dom, subs).semantic_wp(stmt, q, g)
}

pub fn verify_wp(stmt: &Stmt, q: &ModalFormula, g: &GotoEnv, dom: &Domain, subs: &Subroutines) -> Result<bool> {
    WpEngine::new(dom, subs).verify_wp(stmt, q, g)
}
