//! The coloured-transition model of statements and the semantic triple
//! checker.

use std::cell::{Cell, RefCell};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::eval::{Domain, StateId, StateSet};
use crate::lang::{BoolTerm, Colour, Ident, Judgement, Stmt, Subroutines};
use crate::modal::eval_modal;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub from: StateId,
    pub colour: Colour,
    pub to: StateId,
}

impl Transition {
    pub fn new(from: StateId, colour: Colour, to: StateId) -> Self {
        Transition { from, colour, to }
    }

    pub fn display(&self, dom: &Domain) -> String {
        format!(
            "{} -{}-> {}",
            dom.display_state(self.from),
            self.colour,
            dom.display_state(self.to)
        )
    }
}

pub type TransitionSet = BTreeSet<Transition>;

/// Hypothesised entry states per label. Absent labels have no entries.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GotoEnv(pub BTreeMap<Ident, StateSet>);

static EMPTY: StateSet = StateSet::new();

impl GotoEnv {
    pub fn new() -> Self {
        GotoEnv::default()
    }

    pub fn get(&self, l: &Ident) -> &StateSet {
        self.0.get(l).unwrap_or(&EMPTY)
    }

    pub fn with(&self, l: &Ident, states: StateSet) -> GotoEnv {
        let mut g = self.clone();
        g.0.insert(l.clone(), states);
        g
    }

    /// `g_l` = the states satisfying the disjunction of the assumptions on `l`.
    pub fn from_assumptions(assumptions: &[(Ident, BoolTerm)], dom: &Domain) -> Result<GotoEnv> {
        let mut g = GotoEnv::new();
        for (l, p) in assumptions {
            let states = dom.satisfying(p)?;
            g.0.entry(l.clone()).or_default().extend(states);
        }
        Ok(g)
    }
}

type Outcomes = Vec<(Colour, StateId)>;

/// Computes models of statements over one domain and subroutine table.
/// Subroutine outcomes are cached per (name, initial state).
pub struct Interpreter<'a> {
    dom: &'a Domain,
    subs: &'a Subroutines,
    calls: RefCell<BTreeMap<(String, StateId), Outcomes>>,
    watch: RefCell<Option<(Ident, bool)>>,
    call_depth: Cell<usize>,
}

fn index(ts: &TransitionSet) -> BTreeMap<StateId, Vec<&Transition>> {
    let mut by_from: BTreeMap<StateId, Vec<&Transition>> = BTreeMap::new();
    for t in ts {
        by_from.entry(t.from).or_default().push(t);
    }
    by_from
}

impl<'a> Interpreter<'a> {
    pub fn new(dom: &'a Domain, subs: &'a Subroutines) -> Self {
        Interpreter {
            dom,
            subs,
            calls: RefCell::new(BTreeMap::new()),
            watch: RefCell::new(None),
            call_depth: Cell::new(0),
        }
    }

    pub fn domain(&self) -> &'a Domain {
        self.dom
    }

    pub fn subs(&self) -> &'a Subroutines {
        self.subs
    }

    /// The model of `stmt` over every initial state.
    pub fn interpret(&self, stmt: &Stmt, g: &GotoEnv) -> Result<TransitionSet> {
        self.interpret_from(stmt, g, &self.dom.all())
    }

    /// The transitions of the model of `stmt` that start in `from`.
    pub fn interpret_from(&self, stmt: &Stmt, g: &GotoEnv, from: &StateSet) -> Result<TransitionSet> {
        if from.is_empty() {
            return Ok(TransitionSet::new());
        }
        let same = |c: Colour| from.iter().map(|&s| Transition::new(s, c.clone(), s)).collect();
        match stmt {
            Stmt::Skip => Ok(same(Colour::N)),
            Stmt::Return => Ok(same(Colour::R)),
            Stmt::Break => Ok(same(Colour::B)),
            Stmt::Goto(l) => Ok(same(Colour::G(l.clone()))),
            Stmt::Throw(k) => Ok(same(Colour::E(k.clone()))),
            Stmt::Assign(x, e) => {
                let var = self
                    .dom
                    .var_index(x.as_str())
                    .ok_or_else(|| Error::UnboundVariable(x.name.clone()))?;
                let mut out = TransitionSet::new();
                for &s in from {
                    let v = self.dom.eval_term(e, s)?;
                    let Some(s1) = self.dom.update(s, var, v) else {
                        return Err(Error::DomainNotClosed {
                            var: x.name.clone(),
                            value: v,
                            state: self.dom.display_state(s),
                            span: x.span,
                        });
                    };
                    out.insert(Transition::new(s, Colour::N, s1));
                }
                Ok(out)
            }
            Stmt::Seq(p, q) => {
                let tp = self.interpret_from(p, g, from)?;
                self.compose(tp, &Colour::N, q, g)
            }
            Stmt::TryCatch(p, k, q) => {
                let tp = self.interpret_from(p, g, from)?;
                self.compose(tp, &Colour::E(k.clone()), q, g)
            }
            Stmt::Guard(b, p) => {
                let mut pass = StateSet::new();
                for &s in from {
                    if self.dom.eval_bool(b, s)? {
                        pass.insert(s);
                    }
                }
                self.interpret_from(p, g, &pass)
            }
            Stmt::Choice(p, q) => {
                let mut out = self.interpret_from(p, g, from)?;
                out.extend(self.interpret_from(q, g, from)?);
                Ok(out)
            }
            Stmt::Do(p) => self.do_loop(p, g, from),
            Stmt::Labelled(p, l) => {
                if self.call_depth.get() == 0 {
                    if let Some((watched, hit)) = self.watch.borrow_mut().as_mut() {
                        if watched == l {
                            *hit = true;
                        }
                    }
                }
                let mut out = self.interpret_from(p, g, from)?;
                for &s0 in from {
                    for &s1 in g.get(l) {
                        out.insert(Transition::new(s0, Colour::N, s1));
                    }
                }
                Ok(out)
            }
            Stmt::LabelDecl(l, p) => {
                let fix = self.label_fixpoint(l, p, g)?;
                let inner = self.interpret_from(p, &g.with(l, fix), from)?;
                let hidden = Colour::G(l.clone());
                Ok(inner.into_iter().filter(|t| t.colour != hidden).collect())
            }
            Stmt::Call(h) => {
                let mut out = TransitionSet::new();
                for &s in from {
                    for (c, s1) in self.call_outcomes(h, s)? {
                        out.insert(Transition::new(s, c, s1));
                    }
                }
                Ok(out)
            }
        }
    }

    /// Feed the `link`-coloured exits of `tp` into `q`; other exits pass.
    fn compose(&self, tp: TransitionSet, link: &Colour, q: &Stmt, g: &GotoEnv) -> Result<TransitionSet> {
        let mids: StateSet = tp.iter().filter(|t| &t.colour == link).map(|t| t.to).collect();
        let tq = self.interpret_from(q, g, &mids)?;
        let by_from = index(&tq);
        let mut out = TransitionSet::new();
        for t in tp {
            if &t.colour == link {
                for u in by_from.get(&t.to).into_iter().flatten() {
                    out.insert(Transition::new(t.from, u.colour.clone(), u.to));
                }
            } else {
                out.insert(t);
            }
        }
        Ok(out)
    }

    fn do_loop(&self, body: &Stmt, g: &GotoEnv, from: &StateSet) -> Result<TransitionSet> {
        // Run the body from every state the loop head can reach.
        let mut seen = from.clone();
        let mut frontier = from.clone();
        let mut steps = TransitionSet::new();
        while !frontier.is_empty() {
            let ts = self.interpret_from(body, g, &frontier)?;
            frontier = StateSet::new();
            for t in &ts {
                if t.colour == Colour::N && seen.insert(t.to) {
                    frontier.insert(t.to);
                }
            }
            steps.extend(ts);
        }
        let by_from = index(&steps);
        let mut out = TransitionSet::new();
        for &s0 in from {
            let mut reach = StateSet::from([s0]);
            let mut stack = vec![s0];
            while let Some(s) = stack.pop() {
                for t in by_from.get(&s).into_iter().flatten() {
                    match &t.colour {
                        Colour::N => {
                            if reach.insert(t.to) {
                                stack.push(t.to);
                            }
                        }
                        Colour::B => {
                            out.insert(Transition::new(s0, Colour::N, t.to));
                        }
                        c => {
                            out.insert(Transition::new(s0, c.clone(), t.to));
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Least `g_l` such that the `goto l` exits of `body`, interpreted with
    /// `l` bound to `g_l`, end exactly in `g_l`. Kleene iteration from the
    /// empty set over all initial states.
    pub fn label_fixpoint(&self, l: &Ident, body: &Stmt, g: &GotoEnv) -> Result<StateSet> {
        let target = Colour::G(l.clone());
        let mut current = StateSet::new();
        loop {
            let ts = self.interpret(body, &g.with(l, current.clone()))?;
            let next: StateSet = ts.iter().filter(|t| t.colour == target).map(|t| t.to).collect();
            if next == current {
                return Ok(current);
            }
            current = next;
        }
    }

    /// Whether computing the model of `stmt` from `from` ever runs a
    /// statement labelled `l` from a non-empty set of states, including
    /// inside the fixpoint computations of nested declarations. When it does
    /// not, the model does not depend on the entry states assumed for `l`.
    pub fn labelled_entered(&self, l: &Ident, stmt: &Stmt, g: &GotoEnv, from: &StateSet) -> Result<bool> {
        let saved = self.watch.replace(Some((l.clone(), false)));
        let result = self.interpret_from(stmt, g, from);
        let hit = self.watch.replace(saved).is_some_and(|(_, hit)| hit);
        result.map(|_| hit)
    }

    fn call_outcomes(&self, h: &Ident, s: StateId) -> Result<Outcomes> {
        let key = (h.name.clone(), s);
        if let Some(hit) = self.calls.borrow().get(&key) {
            return Ok(hit.clone());
        }
        let body = self
            .subs
            .get(&h.name)
            .ok_or_else(|| Error::UndefinedSubroutine(h.name.clone()))?;
        self.call_depth.set(self.call_depth.get() + 1);
        let ts = self.interpret_from(body, &GotoEnv::new(), &StateSet::from([s]));
        self.call_depth.set(self.call_depth.get() - 1);
        let ts = ts?;
        let outcomes: Outcomes = ts
            .into_iter()
            .filter_map(|t| match t.colour {
                Colour::R => Some((Colour::N, t.to)),
                Colour::E(k) => Some((Colour::E(k), t.to)),
                _ => None,
            })
            .collect();
        self.calls.borrow_mut().insert(key, outcomes.clone());
        Ok(outcomes)
    }
}

pub fn interpret(stmt: &Stmt, g: &GotoEnv, dom: &Domain, subs: &Subroutines) -> Result<TransitionSet> {
    Interpreter::new(dom, subs).interpret(stmt, g)
}

pub fn label_fixpoint(
    l: &Ident,
    body: &Stmt,
    g: &GotoEnv,
    dom: &Domain,
    subs: &Subroutines,
) -> Result<StateSet> {
    Interpreter::new(dom, subs).label_fixpoint(l, body, g)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub counterexamples: Vec<Transition>,
}

pub fn check_triple(j: &Judgement, dom: &Domain, subs: &Subroutines) -> Result<Verdict> {
    check_triple_with(&Interpreter::new(dom, subs), j)
}

pub fn check_triple_with(interp: &Interpreter<'_>, j: &Judgement) -> Result<Verdict> {
    let dom = interp.domain();
    let g = GotoEnv::from_assumptions(&j.assumptions, dom)?;
    let pre = dom.satisfying(&j.pre)?;
    let ts = interp.interpret_from(&j.stmt, &g, &pre)?;
    let mut counterexamples = Vec::new();
    for t in ts {
        if !eval_modal(dom, &j.post, &t)? {
            counterexamples.push(t);
        }
    }
    Ok(Verdict {
        holds: counterexamples.is_empty(),
        counterexamples,
    })
}

/// True iff no initial state has two different outgoing transitions.
pub fn determinism_check(stmt: &Stmt, g: &GotoEnv, dom: &Domain, subs: &Subroutines) -> Result<bool> {
    Ok(is_deterministic(&interpret(stmt, g, dom, subs)?))
}

pub fn is_deterministic(ts: &TransitionSet) -> bool {
    let mut last = None;
    for t in ts {
        if last == Some(t.from) {
            return false;
        }
        last = Some(t.from);
    }
    true
}

/// Counts of transitions per colour.
pub fn histogram(ts: &TransitionSet) -> BTreeMap<Colour, usize> {
    let mut h = BTreeMap::new();
    for t in ts {
        *h.entry(t.colour.clone()).or_insert(0) += 1;
    }
    h
}

pub fn to_dot(ts: &TransitionSet, dom: &Domain) -> String {
    let mut out = String::from("digraph model {\n");
    for id in dom.ids() {
        let _ = writeln!(out, "  s{} [label=\"{}\"];", id.0, dom.display_state(id));
    }
    for t in ts {
        let _ = writeln!(out, "  s{} -> s{} [label=\"{}\"];", t.from.0, t.to.0, t.colour);
    }
    out.push_str("}\n");
    out
}

pub fn state_json(dom: &Domain, id: StateId) -> Value {
    json!(dom.bindings(id))
}

pub fn transition_json(dom: &Domain, t: &Transition) -> Value {
    json!({
        "from": state_json(dom, t.from),
        "colour": t.colour.to_string(),
        "to": state_json(dom, t.to),
    })
}

pub fn to_json(ts: &TransitionSet, dom: &Domain) -> Value {
    Value::Array(ts.iter().map(|t| transition_json(dom, t)).collect())
}

/// `N`, `R`, `B` and every goto or exception colour that `stmt` (or any
/// subroutine it reaches) mentions.
pub fn possible_colours(stmt: &Stmt, subs: &Subroutines) -> BTreeSet<Colour> {
    fn walk(s: &Stmt, subs: &Subroutines, seen: &mut BTreeSet<String>, out: &mut BTreeSet<Colour>) {
        match s {
            Stmt::Goto(l) | Stmt::Labelled(_, l) | Stmt::LabelDecl(l, _) => {
                out.insert(Colour::G(l.clone()));
            }
            Stmt::Throw(k) | Stmt::TryCatch(_, k, _) => {
                out.insert(Colour::E(k.clone()));
            }
            Stmt::Call(h) => {
                if seen.insert(h.name.clone()) {
                    if let Some(body) = subs.get(&h.name) {
                        walk(body, subs, seen, out);
                    }
                }
            }
            _ => {}
        }
        match s {
            Stmt::Seq(a, b) | Stmt::Choice(a, b) | Stmt::TryCatch(a, _, b) => {
                walk(a, subs, seen, out);
                walk(b, subs, seen, out);
            }
            Stmt::Guard(_, a) | Stmt::Do(a) | Stmt::Labelled(a, _) | Stmt::LabelDecl(_, a) => {
                walk(a, subs, seen, out)
            }
            _ => {}
        }
    }
    let mut out = BTreeSet::from([Colour::N, Colour::R, Colour::B]);
    walk(stmt, subs, &mut BTreeSet::new(), &mut out);
    out
}
