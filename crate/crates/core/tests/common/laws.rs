//! One randomised case per call for each family of semantic laws; every
//! function returns a description of each violation it finds.

use std::collections::BTreeSet;

use rand::rngs::StdRng;
use rand::Rng;

use nrb_core::eval::{Domain, StateSet};
use nrb_core::lang::{BoolTerm, Colour, ModalFormula};
use nrb_core::modal::{decompose, eval_modal, recompose};
use nrb_core::model::{GotoEnv, Transition};
use nrb_core::wp::WpEngine;

use super::gen;
use super::oracle;

/// Every transition over `dom` with a colour from the generator's palette.
pub fn transitions(dom: &Domain) -> Vec<Transition> {
    let mut out = Vec::new();
    for s0 in dom.ids() {
        for c in gen::colours() {
            for s1 in dom.ids() {
                out.push(Transition::new(s0, c.clone(), s1));
            }
        }
    }
    out
}

fn same(dom: &Domain, ts: &[Transition], a: &ModalFormula, b: &ModalFormula) -> bool {
    ts.iter().all(|t| eval_modal(dom, a, t).unwrap() == eval_modal(dom, b, t).unwrap())
}

fn never(dom: &Domain, ts: &[Transition], a: &ModalFormula) -> bool {
    ts.iter().all(|t| !eval_modal(dom, a, t).unwrap())
}

fn m(c: &Colour, q: &ModalFormula) -> ModalFormula {
    ModalFormula::modal(c.clone(), q.clone())
}

/// Flatness, disjunctivity, conjunctivity, idempotence and orthogonality of
/// the modalities, for two random formulas.
pub fn modal_laws(r: &mut StdRng, dom: &Domain, ts: &[Transition]) -> Vec<String> {
    let b1 = gen::formula(r, 3);
    let b2 = gen::formula(r, 3);
    let bot = ModalFormula::Base(BoolTerm::False);
    let mut bad = Vec::new();
    let colours = gen::colours();
    for c in &colours {
        if !never(dom, ts, &m(c, &bot)) {
            bad.push(format!("flatness fails for {c}"));
        }
        let or = ModalFormula::or(b1.clone(), b2.clone());
        if !same(dom, ts, &m(c, &or), &ModalFormula::or(m(c, &b1), m(c, &b2))) {
            bad.push(format!("disjunctivity fails for {c} on {b1} and {b2}"));
        }
        let and = ModalFormula::and(b1.clone(), b2.clone());
        if !same(dom, ts, &m(c, &and), &ModalFormula::and(m(c, &b1), m(c, &b2))) {
            bad.push(format!("conjunctivity fails for {c} on {b1} and {b2}"));
        }
        if !same(dom, ts, &m(c, &m(c, &b1)), &m(c, &b1)) {
            bad.push(format!("idempotence fails for {c} on {b1}"));
        }
        for c2 in colours.iter().filter(|c2| *c2 != c) {
            if !never(dom, ts, &m(c2, &m(c, &b1))) {
                bad.push(format!("{c2}({c} b) is satisfiable for b = {b1}"));
            }
            if !never(dom, ts, &ModalFormula::and(m(c, &b1), m(c2, &b1))) {
                bad.push(format!("{c} b /\\ {c2} b is satisfiable for b = {b1}"));
            }
        }
    }
    bad
}

/// Per-colour decomposition of a random formula: its components describe the
/// formula exactly, recomposing gives back an equivalent formula, and the
/// components are the only ones that can do so.
pub fn decomposition(r: &mut StdRng, dom: &Domain, ts: &[Transition]) -> Vec<String> {
    let q = gen::formula(r, 4);
    let palette: BTreeSet<Colour> = gen::colours().into_iter().collect();
    let d = decompose(&q, &palette);
    let mut bad = Vec::new();

    for t in ts {
        let direct = eval_modal(dom, &q, t).unwrap();
        let via = dom.eval_bool(d.get(&t.colour), t.to).unwrap();
        if direct != via {
            bad.push(format!("component of {q} at {} disagrees on {}", t.colour, t.display(dom)));
            break;
        }
    }
    if !same(dom, ts, &recompose(&d), &q) {
        bad.push(format!("recomposition of {q} is not equivalent"));
    }

    // Any decomposition must agree with the component read off the
    // transitions themselves.
    for c in &palette {
        let s0 = dom.ids().next().unwrap();
        let observed: StateSet = dom
            .ids()
            .filter(|&s1| eval_modal(dom, &q, &Transition::new(s0, c.clone(), s1)).unwrap())
            .collect();
        if dom.satisfying(d.get(c)).unwrap() != observed {
            bad.push(format!("component of {q} at {c} is not the observed one"));
        }
    }
    let others = [
        decompose(&q, &BTreeSet::new()),
        decompose(&ModalFormula::not(ModalFormula::not(q.clone())), &palette),
        decompose(&recompose(&d), &palette),
    ];
    for (i, e) in others.iter().enumerate() {
        for c in &palette {
            if dom.satisfying(e.get(c)).unwrap() != dom.satisfying(d.get(c)).unwrap() {
                bad.push(format!("decomposition {i} of {q} differs at {c}"));
            }
        }
    }

    // Each plain proposition is the disjunction of itself under every colour.
    let p = ModalFormula::Base(gen::boolean(r, 2));
    let spread = palette
        .iter()
        .map(|c| m(c, &p))
        .reduce(ModalFormula::or)
        .unwrap();
    if !same(dom, ts, &p, &spread) {
        bad.push(format!("{p} is not the disjunction of its coloured copies"));
    }
    bad
}

fn bigger(r: &mut StdRng, dom: &Domain, g: &GotoEnv) -> GotoEnv {
    let mut out = g.clone();
    for (l, s) in &g.0 {
        let mut more = s.clone();
        more.extend(gen::states(r, dom, 0.3));
        out = out.with(l, more);
    }
    out
}

/// The algebraic laws for triples, each checked in every direction it
/// claims on one random tuple (p, P, q, g).
pub fn triple_laws(r: &mut StdRng) -> Vec<String> {
    let dom = gen::domain();
    let subs = gen::subroutines();
    let size = r.gen_range(1..=8);
    let stmt = gen::open_stmt(r, size);
    let g = gen::env(r, &dom);
    let g2 = bigger(r, &dom, &g);
    let sat = |b: &BoolTerm| dom.satisfying(b).unwrap();
    let (p, p1, p2) = (gen::boolean(r, 2), gen::boolean(r, 2), gen::boolean(r, 2));
    let (q, q1, q2) = (gen::post(r), gen::formula(r, 3), gen::formula(r, 3));
    let holds = |g: &GotoEnv, pre: &StateSet, q: &ModalFormula| oracle::holds(&stmt, g, pre, q, &dom, &subs);
    let mut bad = Vec::new();
    let mut law = |name: &str, ok: bool| {
        if !ok {
            bad.push(format!("{name} fails for {stmt}"));
        }
    };

    law("false precondition", holds(&g, &StateSet::new(), &q));
    law("true postcondition", holds(&g, &sat(&p), &ModalFormula::Base(BoolTerm::True)));

    let either = sat(&BoolTerm::or(p1.clone(), p2.clone()));
    let split = holds(&g, &sat(&p1), &q) && holds(&g, &sat(&p2), &q);
    law("disjunctive precondition", holds(&g, &either, &q) == split);

    let both = ModalFormula::and(q1.clone(), q2.clone());
    let split = holds(&g, &sat(&p), &q1) && holds(&g, &sat(&p), &q2);
    law("conjunctive postcondition", holds(&g, &sat(&p), &both) == split);

    // Strengthening the precondition: p1 /\ p2 -> p2 holds by construction.
    let stronger = sat(&BoolTerm::and(p1.clone(), p2.clone()));
    law("precondition strengthening", !holds(&g, &sat(&p2), &q) || holds(&g, &stronger, &q));

    // Weakening the postcondition: q1 -> q1 \/ q2.
    let weaker = ModalFormula::or(q1.clone(), q2.clone());
    law("postcondition weakening", !holds(&g, &sat(&p), &q1) || holds(&g, &sat(&p), &weaker));

    law("assumption monotonicity", !holds(&g2, &sat(&p), &q) || holds(&g, &sat(&p), &q));
    bad
}

/// Structural wp against the brute-force weakest precondition for one random
/// statement of at most `max_size` nodes and one random postcondition.
pub fn wp_matches(r: &mut StdRng, max_size: usize) -> Vec<String> {
    let dom = gen::domain();
    let subs = gen::subroutines();
    let size = r.gen_range(1..=max_size);
    let stmt = gen::open_stmt(r, size);
    let q = if r.gen_bool(0.6) { gen::post(r) } else { gen::formula(r, 3) };
    let g = gen::env(r, &dom);
    let engine = WpEngine::new(&dom, &subs);
    let got = engine.wp(&stmt, &q, &g).unwrap().states;
    let want = oracle::weakest(&stmt, &g, &q, &dom, &subs);
    if got == want {
        Vec::new()
    } else {
        vec![format!("wp({stmt}, {q}) = {got:?}, expected {want:?}")]
    }
}
