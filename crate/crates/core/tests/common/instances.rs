//! Random instances of each kernel rule whose premises are true by
//! construction: every premise postcondition contains the strongest
//! postcondition of its statement, computed from the model.

use std::collections::BTreeMap;

use rand::rngs::StdRng;
use rand::Rng;

use nrb_core::eval::{Domain, StateSet};
use nrb_core::kernel::{ProofNode, RuleName};
use nrb_core::lang::{BoolTerm, Colour, Ident, Judgement, ModalFormula, Stmt, Subroutines};
use nrb_core::model::{GotoEnv, Interpreter};
use nrb_core::wp::render;

use super::gen;

type Out = BTreeMap<Colour, StateSet>;

pub struct Builder<'a> {
    pub dom: &'a Domain,
    pub subs: &'a Subroutines,
    interp: Interpreter<'a>,
}

fn get(out: &Out, c: &Colour) -> StateSet {
    out.get(c).cloned().unwrap_or_default()
}

fn union(a: &StateSet, b: &StateSet) -> StateSet {
    a.union(b).copied().collect()
}

fn without(g: &GotoEnv, l: &Ident) -> GotoEnv {
    let mut g = g.clone();
    g.0.remove(l);
    g
}

impl<'a> Builder<'a> {
    pub fn new(dom: &'a Domain, subs: &'a Subroutines) -> Self {
        Builder {
            dom,
            subs,
            interp: Interpreter::new(dom, subs),
        }
    }

    fn sp(&self, stmt: &Stmt, g: &GotoEnv, from: &StateSet) -> Out {
        let mut out = Out::new();
        for t in self.interp.interpret_from(stmt, g, from).unwrap() {
            out.entry(t.colour).or_default().insert(t.to);
        }
        out
    }

    fn some(&self, r: &mut StdRng) -> StateSet {
        gen::states(r, self.dom, 0.5)
    }

    /// Adds random states to some colours of the palette.
    fn weaken(&self, r: &mut StdRng, out: &Out) -> Out {
        let mut w = out.clone();
        for c in gen::colours() {
            if r.gen_bool(0.3) {
                let extra = gen::states(r, self.dom, 0.3);
                w.entry(c).or_default().extend(extra);
            }
        }
        w
    }

    fn post(&self, out: &Out) -> ModalFormula {
        out.iter()
            .filter(|(_, s)| !s.is_empty())
            .map(|(c, s)| ModalFormula::modal(c.clone(), ModalFormula::Base(render(s, self.dom))))
            .reduce(ModalFormula::or)
            .unwrap_or(ModalFormula::Base(BoolTerm::False))
    }

    fn judgement(&self, g: &GotoEnv, pre: &StateSet, stmt: &Stmt, out: &Out) -> Judgement {
        Judgement {
            assumptions: g.0.iter().map(|(l, s)| (l.clone(), render(s, self.dom))).collect(),
            pre: render(pre, self.dom),
            stmt: stmt.clone(),
            post: self.post(out),
        }
    }

    fn leaf(&self, j: Judgement) -> ProofNode {
        ProofNode::new(RuleName::Conseq, j, Vec::new())
    }

    /// A true judgement about `stmt` from `pre`, with a weakened postcondition.
    fn premise(&self, r: &mut StdRng, g: &GotoEnv, pre: &StateSet, stmt: &Stmt) -> (ProofNode, Out) {
        let out = self.weaken(r, &self.sp(stmt, g, pre));
        (self.leaf(self.judgement(g, pre, stmt, &out)), out)
    }

    fn small(&self, r: &mut StdRng, max: usize) -> Stmt {
        let size = r.gen_range(1..=max);
        gen::open_stmt(r, size)
    }

    /// An instance of `rule`, or `None` when the random choices admit none.
    pub fn instance(&self, rule: RuleName, r: &mut StdRng) -> Option<ProofNode> {
        let dom = self.dom;
        let mut g = gen::env(r, dom);
        let a = self.some(r);
        let node = |c: Judgement, ps: Vec<ProofNode>| Some(ProofNode::new(rule, c, ps));
        match rule {
            RuleName::Skp | RuleName::Ret | RuleName::Brk | RuleName::Throw | RuleName::Go => {
                let (stmt, colour) = match rule {
                    RuleName::Skp => (Stmt::Skip, Colour::N),
                    RuleName::Ret => (Stmt::Return, Colour::R),
                    RuleName::Brk => (Stmt::Break, Colour::B),
                    RuleName::Throw => {
                        let k = gen::KINDS[r.gen_range(0..2)];
                        (Stmt::throw(k), Colour::exc(k))
                    }
                    _ => {
                        let l = Ident::new(gen::LABELS[r.gen_range(0..2)]);
                        g = g.with(&l, union(g.get(&l), &a));
                        (Stmt::Goto(l.clone()), Colour::G(l))
                    }
                };
                let out = Out::from([(colour, a.clone())]);
                node(self.judgement(&g, &a, &stmt, &out), vec![])
            }
            RuleName::Let => {
                let x = gen::var(r);
                let e = gen::closed_term(r);
                let target = self.some(r);
                let var = dom.var_index(x).unwrap();
                let pre: StateSet = dom
                    .ids()
                    .filter(|&s| {
                        let v = dom.eval_term(&e, s).unwrap();
                        dom.update(s, var, v).is_some_and(|s1| target.contains(&s1))
                    })
                    .collect();
                let out = Out::from([(Colour::N, target)]);
                node(self.judgement(&g, &pre, &Stmt::assign(x, e), &out), vec![])
            }
            RuleName::Seq => {
                let (p, q) = (self.small(r, 4), self.small(r, 4));
                let (first, out1) = self.premise(r, &g, &a, &p);
                let mid = get(&out1, &Colour::N);
                let (second, out2) = self.premise(r, &g, &mid, &q);
                let mut out = out1.clone();
                out.remove(&Colour::N);
                for (c, s) in &out2 {
                    out.entry(c.clone()).or_default().extend(s.iter().copied());
                }
                let mut out = self.weaken(r, &out);
                out.insert(Colour::N, get(&out2, &Colour::N));
                node(self.judgement(&g, &a, &Stmt::seq(p, q), &out), vec![first, second])
            }
            RuleName::Do => {
                let body = self.small(r, 5);
                let mut inv = a;
                loop {
                    let next = union(&inv, &get(&self.sp(&body, &g, &inv), &Colour::N));
                    if next == inv {
                        break;
                    }
                    inv = next;
                }
                let mut out = self.weaken(r, &self.sp(&body, &g, &inv));
                out.insert(Colour::N, inv.clone());
                let exit = get(&out, &Colour::B);
                let premise = self.leaf(self.judgement(&g, &inv, &body, &out));
                let mut concl = out.clone();
                concl.remove(&Colour::B);
                let mut concl = self.weaken(r, &concl);
                concl.insert(Colour::N, exit);
                concl.remove(&Colour::B);
                node(self.judgement(&g, &inv, &Stmt::do_loop(body), &concl), vec![premise])
            }
            RuleName::Grd => {
                let b = gen::boolean(r, 1);
                let body = self.small(r, 5);
                let inner: StateSet = dom.satisfying(&b).unwrap().intersection(&a).copied().collect();
                let (premise, out) = self.premise(r, &g, &inner, &body);
                let out = self.weaken(r, &out);
                node(self.judgement(&g, &a, &Stmt::guard(b, body), &out), vec![premise])
            }
            RuleName::Dsj => {
                let (p, q) = (self.small(r, 4), self.small(r, 4));
                let (left, out1) = self.premise(r, &g, &a, &p);
                let (right, out2) = self.premise(r, &g, &a, &q);
                let mut out = out1;
                for (c, s) in out2 {
                    out.entry(c).or_default().extend(s);
                }
                let out = self.weaken(r, &out);
                node(self.judgement(&g, &a, &Stmt::choice(p, q), &out), vec![left, right])
            }
            RuleName::Frm => {
                let l = gen::LABELS[r.gen_range(0..2)];
                let body = self.small(r, 5);
                let (premise, out) = self.premise(r, &g, &a, &body);
                let mut out = self.weaken(r, &out);
                out.entry(Colour::N).or_default().extend(g.get(&Ident::new(l)).iter().copied());
                node(self.judgement(&g, &a, &Stmt::labelled(body, l), &out), vec![premise])
            }
            RuleName::Lbl => {
                let l = Ident::new(gen::LABELS[r.gen_range(0..2)]);
                let body = self.small(r, 6);
                let outer = without(&g, &l);
                let fix = self.interp.label_fixpoint(&l, &body, &outer).unwrap();
                let mut entry = union(&fix, &gen::states(r, dom, 0.2));
                loop {
                    let inner = outer.with(&l, entry.clone());
                    let next = union(&entry, &get(&self.sp(&body, &inner, &a), &Colour::G(l.clone())));
                    if next == entry {
                        break;
                    }
                    entry = next;
                }
                let inner = outer.with(&l, entry.clone());
                let mut out = self.weaken(r, &self.sp(&body, &inner, &a));
                out.insert(Colour::G(l.clone()), entry);
                let premise = self.leaf(self.judgement(&inner, &a, &body, &out));
                let mut concl = self.weaken(r, &out);
                concl.remove(&Colour::G(l.clone()));
                node(self.judgement(&outer, &a, &Stmt::LabelDecl(l, Box::new(body)), &concl), vec![premise])
            }
            RuleName::Sub => {
                let h = if r.gen_bool(0.5) { "f" } else { "g" };
                let body = &self.subs[h];
                let none = GotoEnv::new();
                let mut out = self.sp(body, &none, &a);
                for c in [Colour::R, Colour::exc("k"), Colour::exc("k2")] {
                    if r.gen_bool(0.3) {
                        out.entry(c).or_default().extend(gen::states(r, dom, 0.3));
                    }
                }
                let premise = self.leaf(self.judgement(&none, &a, body, &out));
                let mut concl: Out = out.iter().filter(|(c, _)| matches!(c, Colour::E(_))).map(|(c, s)| (c.clone(), s.clone())).collect();
                for k in gen::KINDS {
                    if r.gen_bool(0.3) {
                        concl.entry(Colour::exc(k)).or_default().extend(gen::states(r, dom, 0.3));
                    }
                }
                concl.insert(Colour::N, get(&out, &Colour::R));
                node(self.judgement(&g, &a, &Stmt::call(h), &concl), vec![premise])
            }
            RuleName::Try => {
                let k = gen::KINDS[r.gen_range(0..2)];
                let (p, q) = (self.small(r, 4), self.small(r, 4));
                let (body, out1) = self.premise(r, &g, &a, &p);
                let caught = get(&out1, &Colour::exc(k));
                let (handler, out2) = self.premise(r, &g, &caught, &q);
                let mut out = out1;
                out.remove(&Colour::exc(k));
                for (c, s) in out2 {
                    out.entry(c).or_default().extend(s);
                }
                let out = self.weaken(r, &out);
                node(self.judgement(&g, &a, &Stmt::try_catch(p, k, q), &out), vec![body, handler])
            }
            RuleName::PreOr => {
                let stmt = self.small(r, 6);
                let n = r.gen_range(1..=3);
                let mut pre = StateSet::new();
                let mut out = Out::new();
                let mut ps = Vec::new();
                for _ in 0..n {
                    let ai = self.some(r);
                    let (p, o) = self.premise(r, &g, &ai, &stmt);
                    pre.extend(ai);
                    for (c, s) in o {
                        out.entry(c).or_default().extend(s);
                    }
                    ps.push(p);
                }
                let out = self.weaken(r, &out);
                node(self.judgement(&g, &pre, &stmt, &out), ps)
            }
            RuleName::PostAnd => {
                let stmt = self.small(r, 6);
                let n = r.gen_range(1..=3);
                let mut ps = Vec::new();
                let mut meet: Option<Out> = None;
                for _ in 0..n {
                    let (p, o) = self.premise(r, &g, &a, &stmt);
                    ps.push(p);
                    meet = Some(match meet {
                        None => o,
                        Some(m) => gen::colours()
                            .into_iter()
                            .map(|c| {
                                let s = get(&m, &c).intersection(&get(&o, &c)).copied().collect();
                                (c, s)
                            })
                            .collect(),
                    });
                }
                node(self.judgement(&g, &a, &stmt, &meet.unwrap()), ps)
            }
            RuleName::AssumeOr => {
                let stmt = self.small(r, 6);
                let l = Ident::new(gen::LABELS[r.gen_range(0..2)]);
                let whole = g.get(&l).clone();
                let part: StateSet = whole.iter().copied().filter(|_| r.gen_bool(0.5)).collect();
                let rest: StateSet = whole.iter().copied().filter(|s| !part.contains(s) || r.gen_bool(0.3)).collect();
                let (premise, out) = self.premise(r, &g, &a, &stmt);
                let mut split = premise;
                split.conclusion.assumptions.retain(|(m, _)| *m != l);
                split.conclusion.assumptions.push((l.clone(), render(&part, dom)));
                split.conclusion.assumptions.push((l.clone(), render(&rest, dom)));
                let out = self.weaken(r, &out);
                node(self.judgement(&g, &a, &stmt, &out), vec![split])
            }
            RuleName::Conseq => {
                let stmt = self.small(r, 6);
                let (premise, out) = self.premise(r, &g, &a, &stmt);
                let pre: StateSet = a.iter().copied().filter(|_| r.gen_bool(0.7)).collect();
                let mut concl = self.weaken(r, &out);
                let mut smaller = GotoEnv::new();
                for (l, s) in &g.0 {
                    let jumps = get(&out, &Colour::G(l.clone()));
                    if !jumps.is_subset(s) {
                        return None;
                    }
                    let keep: StateSet = s.iter().copied().filter(|x| jumps.contains(x) || r.gen_bool(0.5)).collect();
                    let goto: StateSet = get(&concl, &Colour::G(l.clone())).intersection(&keep).copied().collect();
                    concl.insert(Colour::G(l.clone()), union(&goto, &jumps));
                    smaller = smaller.with(l, keep);
                }
                node(self.judgement(&smaller, &pre, &stmt, &concl), vec![premise])
            }
        }
    }
}
