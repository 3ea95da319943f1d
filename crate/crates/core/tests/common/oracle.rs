//! Semantic judgements decided directly from the whole-relation model.

use nrb_core::eval::{Domain, StateSet};
use nrb_core::lang::{ModalFormula, Stmt, Subroutines};
use nrb_core::modal::eval_modal;
use nrb_core::model::{GotoEnv, TransitionSet};

use super::naive::{Env, Naive};

pub fn env_of(g: &GotoEnv) -> Env {
    g.0.iter().map(|(l, s)| (l.name.clone(), s.clone())).collect()
}

pub fn model(stmt: &Stmt, g: &GotoEnv, dom: &Domain, subs: &Subroutines) -> TransitionSet {
    Naive { dom, subs }.model(stmt, &env_of(g))
}

/// Every transition of `stmt` from a state in `pre` satisfies `q`.
pub fn holds(stmt: &Stmt, g: &GotoEnv, pre: &StateSet, q: &ModalFormula, dom: &Domain, subs: &Subroutines) -> bool {
    model(stmt, g, dom, subs)
        .iter()
        .filter(|t| pre.contains(&t.from))
        .all(|t| eval_modal(dom, q, t).unwrap())
}

/// The weakest precondition by its definition: the states none of whose
/// transitions violates `q`.
pub fn weakest(stmt: &Stmt, g: &GotoEnv, q: &ModalFormula, dom: &Domain, subs: &Subroutines) -> StateSet {
    let m = model(stmt, g, dom, subs);
    let mut out = dom.all();
    for t in &m {
        if !eval_modal(dom, q, t).unwrap() {
            out.remove(&t.from);
        }
    }
    out
}
