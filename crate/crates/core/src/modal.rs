//! Modal formulas over transitions: evaluation, per-colour decomposition and
//! finite-domain implication.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::Result;
use crate::eval::{Domain, StateSet};
use crate::lang::{BoolTerm, Colour, ModalFormula};
use crate::model::Transition;

/// Truth of `q` on a transition: plain propositions look at the final state,
/// each modality also demands its colour.
pub fn eval_modal(dom: &Domain, q: &ModalFormula, t: &Transition) -> Result<bool> {
    match q {
        ModalFormula::Base(b) => dom.eval_bool(b, t.to),
        ModalFormula::Modal(c, body) => Ok(*c == t.colour && eval_modal(dom, body, t)?),
        ModalFormula::Or(a, b) => Ok(eval_modal(dom, a, t)? || eval_modal(dom, b, t)?),
        ModalFormula::And(a, b) => Ok(eval_modal(dom, a, t)? && eval_modal(dom, b, t)?),
        ModalFormula::Not(a) => Ok(!eval_modal(dom, a, t)?),
    }
}

fn or(a: BoolTerm, b: BoolTerm) -> BoolTerm {
    match (a, b) {
        (BoolTerm::False, x) | (x, BoolTerm::False) => x,
        (BoolTerm::True, _) | (_, BoolTerm::True) => BoolTerm::True,
        (x, y) => BoolTerm::or(x, y),
    }
}

fn and(a: BoolTerm, b: BoolTerm) -> BoolTerm {
    match (a, b) {
        (BoolTerm::True, x) | (x, BoolTerm::True) => x,
        (BoolTerm::False, _) | (_, BoolTerm::False) => BoolTerm::False,
        (x, y) => BoolTerm::and(x, y),
    }
}

fn not(a: BoolTerm) -> BoolTerm {
    match a {
        BoolTerm::True => BoolTerm::False,
        BoolTerm::False => BoolTerm::True,
        x => BoolTerm::not(x),
    }
}

/// The non-modal condition on the final state under which a transition of
/// colour `c` satisfies `q`. `None` stands for a colour that `q` never
/// mentions.
fn component_of(q: &ModalFormula, c: Option<&Colour>) -> BoolTerm {
    match q {
        ModalFormula::Base(b) => b.clone(),
        ModalFormula::Modal(m, body) => {
            if Some(m) == c {
                component_of(body, c)
            } else {
                BoolTerm::False
            }
        }
        ModalFormula::Or(a, b) => or(component_of(a, c), component_of(b, c)),
        ModalFormula::And(a, b) => and(component_of(a, c), component_of(b, c)),
        ModalFormula::Not(a) => not(component_of(a, c)),
    }
}

pub fn component(q: &ModalFormula, c: &Colour) -> BoolTerm {
    component_of(q, Some(c))
}

/// The component shared by every colour that `q` does not mention.
pub fn component_of_rest(q: &ModalFormula) -> BoolTerm {
    component_of(q, None)
}

/// Colours named by modalities inside `q`.
pub fn colours_of(q: &ModalFormula) -> BTreeSet<Colour> {
    fn walk(q: &ModalFormula, out: &mut BTreeSet<Colour>) {
        match q {
            ModalFormula::Base(_) => {}
            ModalFormula::Modal(c, body) => {
                out.insert(c.clone());
                walk(body, out);
            }
            ModalFormula::Or(a, b) | ModalFormula::And(a, b) => {
                walk(a, out);
                walk(b, out);
            }
            ModalFormula::Not(a) => walk(a, out),
        }
    }
    let mut out = BTreeSet::new();
    walk(q, &mut out);
    out
}

/// One non-modal component per colour, plus the component shared by every
/// colour not listed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColourDecomposition {
    pub components: BTreeMap<Colour, BoolTerm>,
    pub rest: BoolTerm,
}

impl ColourDecomposition {
    pub fn get(&self, c: &Colour) -> &BoolTerm {
        self.components.get(c).unwrap_or(&self.rest)
    }
}

pub fn decompose(q: &ModalFormula, colours: &BTreeSet<Colour>) -> ColourDecomposition {
    let mut all = colours.clone();
    all.extend(colours_of(q));
    ColourDecomposition {
        components: all.into_iter().map(|c| {
            let b = component(q, &c);
            (c, b)
        }).collect(),
        rest: component_of(q, None),
    }
}

/// `\/ M[q_M]`, with the shared component guarded so that it only applies to
/// colours outside the listed ones.
pub fn recompose(d: &ColourDecomposition) -> ModalFormula {
    let mut parts: Vec<ModalFormula> = d
        .components
        .iter()
        .map(|(c, b)| ModalFormula::modal(c.clone(), ModalFormula::Base(b.clone())))
        .collect();
    if d.rest != BoolTerm::False {
        let mut other = ModalFormula::Base(d.rest.clone());
        for c in d.components.keys() {
            other = ModalFormula::and(
                other,
                ModalFormula::not(ModalFormula::modal(c.clone(), ModalFormula::Base(BoolTerm::True))),
            );
        }
        parts.push(other);
    }
    parts
        .into_iter()
        .reduce(ModalFormula::or)
        .unwrap_or(ModalFormula::Base(BoolTerm::False))
}

/// States `s1` such that a `c`-coloured transition ending in `s1` satisfies `q`.
pub fn component_states(dom: &Domain, q: &ModalFormula, c: &Colour) -> Result<StateSet> {
    dom.satisfying(&component(q, c))
}

pub fn implies(p: &BoolTerm, q: &BoolTerm, dom: &Domain) -> Result<bool> {
    for s in dom.ids() {
        if dom.eval_bool(p, s)? && !dom.eval_bool(q, s)? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn equivalent(p: &BoolTerm, q: &BoolTerm, dom: &Domain) -> Result<bool> {
    for s in dom.ids() {
        if dom.eval_bool(p, s)? != dom.eval_bool(q, s)? {
            return Ok(false);
        }
    }
    Ok(true)
}
