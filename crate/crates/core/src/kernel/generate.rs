//! Proof search for true triples of deterministic programs.
//!
//! Derivations are built forwards: each statement is proved from the set of
//! states that can reach it, and its conclusion records exactly the final
//! states the derivation can vouch for, per colour. Consequence steps then
//! align premises with the shapes their parent rules demand.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::eval::{Domain, StateSet};
use crate::lang::{BoolTerm, Colour, Ident, Judgement, ModalFormula, Stmt, Subroutines};
use crate::model::{check_triple_with, is_deterministic, GotoEnv};
use crate::wp::render;

use super::{Kernel, KernelOptions, ProofNode, RuleName};

/// Final states per exit colour; colours without states are absent.
type Outputs = BTreeMap<Colour, StateSet>;

type Assumptions = Vec<(Ident, BoolTerm)>;

fn insert(out: &mut Outputs, c: Colour, states: StateSet) {
    if !states.is_empty() {
        out.entry(c).or_default().extend(states);
    }
}

fn get(out: &Outputs, c: &Colour) -> StateSet {
    out.get(c).cloned().unwrap_or_default()
}

fn union(a: &Outputs, b: &Outputs) -> Outputs {
    let mut out = a.clone();
    for (c, s) in b {
        insert(&mut out, c.clone(), s.clone());
    }
    out
}

fn with(out: &Outputs, c: Colour, states: StateSet) -> Outputs {
    let mut out = out.clone();
    out.remove(&c);
    insert(&mut out, c, states);
    out
}

fn without(out: &Outputs, c: &Colour) -> Outputs {
    let mut out = out.clone();
    out.remove(c);
    out
}

pub struct ProofGenerator<'a> {
    kernel: Kernel<'a>,
}

impl<'a> ProofGenerator<'a> {
    pub fn new(dom: &'a Domain, subs: &'a Subroutines) -> Self {
        ProofGenerator {
            kernel: Kernel::new(dom, subs),
        }
    }

    pub fn with_options(mut self, options: KernelOptions) -> Self {
        self.kernel = self.kernel.with_options(options);
        self
    }

    pub fn kernel(&self) -> &Kernel<'a> {
        &self.kernel
    }

    fn dom(&self) -> &'a Domain {
        self.kernel.dom()
    }

    fn post_of(&self, out: &Outputs) -> ModalFormula {
        out.iter()
            .map(|(c, s)| ModalFormula::modal(c.clone(), ModalFormula::Base(render(s, self.dom()))))
            .reduce(ModalFormula::or)
            .unwrap_or(ModalFormula::Base(BoolTerm::False))
    }

    fn judgement(&self, asm: &Assumptions, from: &StateSet, stmt: &Stmt, out: &Outputs) -> Judgement {
        Judgement {
            assumptions: asm.clone(),
            pre: render(from, self.dom()),
            stmt: stmt.clone(),
            post: self.post_of(out),
        }
    }

    fn node(&self, rule: RuleName, conclusion: Judgement, premises: Vec<ProofNode>) -> Result<ProofNode> {
        let mut node = ProofNode::new(rule, conclusion, premises);
        node.side_conditions = self.kernel.side_conditions(&node)?;
        Ok(node)
    }

    /// Weakens a postcondition, strengthens a precondition, or both.
    fn adjust(&self, node: ProofNode, from: Option<&StateSet>, out: &Outputs, to: &Outputs) -> Result<ProofNode> {
        if from.is_none() && out == to {
            return Ok(node);
        }
        let mut conclusion = node.conclusion.clone();
        if let Some(from) = from {
            conclusion.pre = render(from, self.dom());
        }
        conclusion.post = self.post_of(to);
        self.node(RuleName::Conseq, conclusion, vec![node])
    }

    /// Proves `stmt` from `from` and returns the derivation together with
    /// the outputs its conclusion states.
    fn gen(&self, stmt: &Stmt, from: &StateSet, env: &GotoEnv, asm: &Assumptions) -> Result<(ProofNode, Outputs)> {
        let dom = self.dom();
        let axiom = |rule: RuleName, colour: Colour| -> Result<(ProofNode, Outputs)> {
            let mut out = Outputs::new();
            insert(&mut out, colour, from.clone());
            let node = self.node(rule, self.judgement(asm, from, stmt, &out), vec![])?;
            Ok((node, out))
        };
        match stmt {
            Stmt::Skip => axiom(RuleName::Skp, Colour::N),
            Stmt::Return => axiom(RuleName::Ret, Colour::R),
            Stmt::Break => axiom(RuleName::Brk, Colour::B),
            Stmt::Throw(k) => axiom(RuleName::Throw, Colour::E(k.clone())),
            // Entries beyond the assumption are caught where the label is
            // resolved: at its declaration, or at the root for free labels.
            Stmt::Goto(l) => axiom(RuleName::Go, Colour::G(l.clone())),
            Stmt::Assign(x, e) => {
                let var = dom.var_index(x.as_str()).ok_or_else(|| Error::UnboundVariable(x.name.clone()))?;
                let mut image = StateSet::new();
                for &s in from {
                    let v = dom.eval_term(e, s)?;
                    let s1 = dom.update(s, var, v).ok_or_else(|| Error::DomainNotClosed {
                        var: x.name.clone(),
                        value: v,
                        state: dom.display_state(s),
                        span: x.span,
                    })?;
                    image.insert(s1);
                }
                let mut pre = StateSet::new();
                for s in dom.ids() {
                    let v = dom.eval_term(e, s)?;
                    if dom.update(s, var, v).is_some_and(|s1| image.contains(&s1)) {
                        pre.insert(s);
                    }
                }
                let mut out = Outputs::new();
                insert(&mut out, Colour::N, image);
                let node = self.node(RuleName::Let, self.judgement(asm, &pre, stmt, &out), vec![])?;
                let node = if pre == *from { node } else { self.adjust(node, Some(from), &out, &out)? };
                Ok((node, out))
            }
            Stmt::Seq(p, q) => {
                let (n1, o1) = self.gen(p, from, env, asm)?;
                let mid = get(&o1, &Colour::N);
                let (n2, o2) = self.gen(q, &mid, env, asm)?;
                let abnormal = union(&without(&o1, &Colour::N), &without(&o2, &Colour::N));
                let t1 = with(&abnormal, Colour::N, mid);
                let out = with(&abnormal, Colour::N, get(&o2, &Colour::N));
                let n1 = self.adjust(n1, None, &o1, &t1)?;
                let n2 = self.adjust(n2, None, &o2, &out)?;
                let node = self.node(RuleName::Seq, self.judgement(asm, from, stmt, &out), vec![n1, n2])?;
                Ok((node, out))
            }
            Stmt::Guard(b, p) => {
                let inside: StateSet = dom.satisfying(b)?.intersection(from).copied().collect();
                let (n, out) = self.gen(p, &inside, env, asm)?;
                let node = self.node(RuleName::Grd, self.judgement(asm, from, stmt, &out), vec![n])?;
                Ok((node, out))
            }
            Stmt::Choice(p, q) => {
                let (n1, o1) = self.gen(p, from, env, asm)?;
                let (n2, o2) = self.gen(q, from, env, asm)?;
                let out = union(&o1, &o2);
                let n1 = self.adjust(n1, None, &o1, &out)?;
                let n2 = self.adjust(n2, None, &o2, &out)?;
                let node = self.node(RuleName::Dsj, self.judgement(asm, from, stmt, &out), vec![n1, n2])?;
                Ok((node, out))
            }
            Stmt::TryCatch(p, k, q) => {
                let ek = Colour::E(k.clone());
                let (n1, o1) = self.gen(p, from, env, asm)?;
                let caught = get(&o1, &ek);
                let (n2, o2) = self.gen(q, &caught, env, asm)?;
                let out = with(&union(&without(&o1, &ek), &o2), ek.clone(), get(&o2, &ek));
                let t1 = with(&out, ek, caught);
                let n1 = self.adjust(n1, None, &o1, &t1)?;
                let n2 = self.adjust(n2, None, &o2, &out)?;
                let node = self.node(RuleName::Try, self.judgement(asm, from, stmt, &out), vec![n1, n2])?;
                Ok((node, out))
            }
            Stmt::Do(p) => {
                // Grow the invariant until the body's normal exits stay in it.
                let mut inv = from.clone();
                let (n, o) = loop {
                    let (n, o) = self.gen(p, &inv, env, asm)?;
                    let normal = get(&o, &Colour::N);
                    if normal.is_subset(&inv) {
                        break (n, o);
                    }
                    inv.extend(normal);
                };
                let body_out = with(&o, Colour::N, inv.clone());
                let n = self.adjust(n, None, &o, &body_out)?;
                let out = with(&without(&o, &Colour::B), Colour::N, get(&o, &Colour::B));
                let node = self.node(RuleName::Do, self.judgement(asm, &inv, stmt, &out), vec![n])?;
                let node = if inv == *from { node } else { self.adjust(node, Some(from), &out, &out)? };
                Ok((node, out))
            }
            Stmt::Labelled(p, l) => {
                let (n, o) = self.gen(p, from, env, asm)?;
                let mut out = o.clone();
                insert(&mut out, Colour::N, env.get(l).clone());
                let n = self.adjust(n, None, &o, &out)?;
                let node = self.node(RuleName::Frm, self.judgement(asm, from, stmt, &out), vec![n])?;
                Ok((node, out))
            }
            Stmt::LabelDecl(l, p) => {
                let interp = self.kernel.interpreter();
                let fix = interp.label_fixpoint(l, p, env)?;
                // The whole fixpoint is only owed to labelled statements the
                // model actually runs; otherwise start from nothing and add
                // whatever the derivation itself sends to `l`.
                let mut entry = if interp.labelled_entered(l, p, &env.with(l, fix.clone()), from)? {
                    fix
                } else {
                    StateSet::new()
                };
                let gl = Colour::G(l.clone());
                let (n, o) = loop {
                    let mut inner: Assumptions = asm.iter().filter(|(m, _)| m != l).cloned().collect();
                    inner.push((l.clone(), render(&entry, dom)));
                    let (n, o) = self.gen(p, from, &env.with(l, entry.clone()), &inner)?;
                    let sent = get(&o, &gl);
                    if sent.is_subset(&entry) {
                        break (n, o);
                    }
                    entry.extend(sent);
                };
                let body_out = with(&o, gl.clone(), entry);
                let n = self.adjust(n, None, &o, &body_out)?;
                let out = without(&o, &gl);
                let node = self.node(RuleName::Lbl, self.judgement(asm, from, stmt, &out), vec![n])?;
                Ok((node, out))
            }
            Stmt::Call(h) => {
                let body = self
                    .kernel
                    .interpreter()
                    .subs()
                    .get(&h.name)
                    .ok_or_else(|| Error::UndefinedSubroutine(h.name.clone()))?;
                let (n, o) = self.gen(body, from, &GotoEnv::new(), &Vec::new())?;
                if let Some(c) = o.keys().find(|c| !matches!(c, Colour::R | Colour::E(_))) {
                    return Err(Error::Unprovable(format!(
                        "the body of `{h}` can end with colour {c}, which no call rule covers"
                    )));
                }
                let out = with(&without(&o, &Colour::R), Colour::N, get(&o, &Colour::R));
                let node = self.node(RuleName::Sub, self.judgement(asm, from, stmt, &out), vec![n])?;
                Ok((node, out))
            }
        }
    }

    /// A kernel-checked derivation of `j`.
    pub fn generate(&self, j: &Judgement) -> Result<ProofNode> {
        let interp = self.kernel.interpreter();
        let dom = self.dom();
        let env = GotoEnv::from_assumptions(&j.assumptions, dom)?;
        let from = dom.satisfying(&j.pre)?;
        let ts = interp.interpret_from(&j.stmt, &env, &from)?;
        if !is_deterministic(&ts) {
            return Err(Error::NotDeterministic);
        }
        let verdict = check_triple_with(interp, j)?;
        if !verdict.holds {
            return Err(Error::TripleDoesNotHold {
                counterexamples: verdict.counterexamples.iter().map(|t| t.display(dom)).collect(),
            });
        }
        let (root, out) = self.gen(&j.stmt, &from, &env, &j.assumptions)?;
        for (c, states) in &out {
            if let Colour::G(l) = c {
                if !states.is_subset(env.get(l)) {
                    return Err(Error::Unprovable(format!(
                        "`goto {l}` is reached from states outside the assumption for {l}"
                    )));
                }
            }
        }

        // Restate the root as the requested judgement when that is still an
        // instance of its rule; otherwise close the gap with conseq.
        let mut restated = root.clone();
        restated.conclusion = j.clone();
        restated.side_conditions = self.kernel.side_conditions(&restated)?;
        if self.kernel.check_rule(&restated).is_empty() {
            return Ok(restated);
        }
        let closing = self.node(RuleName::Conseq, j.clone(), vec![root])?;
        let problems = self.kernel.check_rule(&closing);
        match problems.first() {
            None => Ok(closing),
            Some(d) => Err(Error::Unprovable(format!(
                "the derivable postcondition does not reach the stated one: {}",
                d.message
            ))),
        }
    }
}

pub fn generate_proof(j: &Judgement, dom: &Domain, subs: &Subroutines) -> Result<ProofNode> {
    ProofGenerator::new(dom, subs).generate(j)
}
