//! Derivations in the NRB rule system: rule schemata and their checker, proof
//! generation for deterministic programs, and the JSON exchange format.
//!
//! Postconditions are compared per colour after decomposition, and every
//! comparison is decided extensionally over the finite domain.

mod generate;
mod json;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{Domain, StateSet};
use crate::lang::{BoolTerm, Colour, Ident, Judgement, ModalFormula, Stmt, Subroutines};
use crate::modal::{colours_of, component, component_of_rest, implies};
use crate::model::{possible_colours, GotoEnv, Interpreter};
use crate::wp::render;

pub use generate::{generate_proof, ProofGenerator};
pub use json::{proof_from_json, proof_to_json};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum RuleName {
    Seq,
    Do,
    Skp,
    Ret,
    Brk,
    Go,
    Throw,
    Let,
    Grd,
    Dsj,
    Frm,
    Lbl,
    Sub,
    Try,
    PreOr,
    PostAnd,
    AssumeOr,
    Conseq,
}

impl RuleName {
    pub const ALL: [RuleName; 18] = [
        RuleName::Seq,
        RuleName::Do,
        RuleName::Skp,
        RuleName::Ret,
        RuleName::Brk,
        RuleName::Go,
        RuleName::Throw,
        RuleName::Let,
        RuleName::Grd,
        RuleName::Dsj,
        RuleName::Frm,
        RuleName::Lbl,
        RuleName::Sub,
        RuleName::Try,
        RuleName::PreOr,
        RuleName::PostAnd,
        RuleName::AssumeOr,
        RuleName::Conseq,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleName::Seq => "seq",
            RuleName::Do => "do",
            RuleName::Skp => "skp",
            RuleName::Ret => "ret",
            RuleName::Brk => "brk",
            RuleName::Go => "go",
            RuleName::Throw => "throw",
            RuleName::Let => "let",
            RuleName::Grd => "grd",
            RuleName::Dsj => "dsj",
            RuleName::Frm => "frm",
            RuleName::Lbl => "lbl",
            RuleName::Sub => "sub",
            RuleName::Try => "try",
            RuleName::PreOr => "preOr",
            RuleName::PostAnd => "postAnd",
            RuleName::AssumeOr => "assumeOr",
            RuleName::Conseq => "conseq",
        }
    }

    pub fn from_name(name: &str) -> Option<RuleName> {
        RuleName::ALL.into_iter().find(|r| r.name() == name)
    }
}

impl fmt::Display for RuleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// An implication the rule instance relies on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SideCondition {
    pub description: String,
    pub antecedent: BoolTerm,
    pub consequent: BoolTerm,
}

impl SideCondition {
    pub fn new(description: impl Into<String>, antecedent: BoolTerm, consequent: BoolTerm) -> Self {
        SideCondition {
            description: description.into(),
            antecedent,
            consequent,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofNode {
    pub rule: RuleName,
    pub conclusion: Judgement,
    pub premises: Vec<ProofNode>,
    pub side_conditions: Vec<SideCondition>,
}

impl ProofNode {
    pub fn new(rule: RuleName, conclusion: Judgement, premises: Vec<ProofNode>) -> Self {
        ProofNode {
            rule,
            conclusion,
            premises,
            side_conditions: Vec::new(),
        }
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(ProofNode::size).sum::<usize>()
    }

    pub fn rules_used(&self) -> BTreeSet<RuleName> {
        let mut out = BTreeSet::from([self.rule]);
        for p in &self.premises {
            out.extend(p.rules_used());
        }
        out
    }

    /// The node reached by following premise indices from this one.
    pub fn at(&self, path: &[usize]) -> Option<&ProofNode> {
        match path.split_first() {
            None => Some(self),
            Some((&i, rest)) => self.premises.get(i)?.at(rest),
        }
    }

    pub fn at_mut(&mut self, path: &[usize]) -> Option<&mut ProofNode> {
        match path.split_first() {
            None => Some(self),
            Some((&i, rest)) => self.premises.get_mut(i)?.at_mut(rest),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", content = "at", rename_all = "camelCase")]
pub enum DiagnosticKind {
    Arity,
    StatementShape,
    AssumptionMismatch(String),
    PreconditionMismatch,
    /// A colour component that should match between judgements does not.
    ComponentMismatch(String),
    /// A colour the rule's class forbids carries a non-empty component.
    ColourClass(String),
    SideConditionFailed(String),
    Evaluation,
}

impl fmt::Display for DiagnosticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiagnosticKind::Arity => f.write_str("Arity"),
            DiagnosticKind::StatementShape => f.write_str("StatementShape"),
            DiagnosticKind::AssumptionMismatch(l) => write!(f, "AssumptionMismatch({l})"),
            DiagnosticKind::PreconditionMismatch => f.write_str("PreconditionMismatch"),
            DiagnosticKind::ComponentMismatch(c) => write!(f, "ComponentMismatch({c})"),
            DiagnosticKind::ColourClass(c) => write!(f, "ColourClass({c})"),
            DiagnosticKind::SideConditionFailed(d) => write!(f, "SideConditionFailed({d})"),
            DiagnosticKind::Evaluation => f.write_str("Evaluation"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub rule: RuleName,
    /// Premise indices leading from the root to the offending node.
    pub path: Vec<usize>,
    pub kind: DiagnosticKind,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path: Vec<String> = self.path.iter().map(usize::to_string).collect();
        write!(f, "[{}] {}: {}: {}", path.join("."), self.rule, self.kind, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProofVerdict {
    pub diagnostics: Vec<Diagnostic>,
}

impl ProofVerdict {
    pub fn holds(&self) -> bool {
        self.diagnostics.is_empty()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct KernelOptions {
    /// Drop the `G_l q' -> G_l p_l'` clause of conseq.
    pub lax_conseq: bool,
}

/// A position in a colour decomposition: one colour, or every colour outside
/// the universe under consideration.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Slot {
    Colour(Colour),
    Rest,
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::Colour(c) => write!(f, "{c}"),
            Slot::Rest => f.write_str("other"),
        }
    }
}

fn slot_component(q: &ModalFormula, slot: &Slot) -> BoolTerm {
    match slot {
        Slot::Colour(c) => component(q, c),
        Slot::Rest => component_of_rest(q),
    }
}

fn is_normal(s: &Slot) -> bool {
    *s == Slot::Colour(Colour::N)
}

pub struct Kernel<'a> {
    interp: Interpreter<'a>,
    options: KernelOptions,
}

type Found = Vec<(DiagnosticKind, String)>;

impl<'a> Kernel<'a> {
    pub fn new(dom: &'a Domain, subs: &'a Subroutines) -> Self {
        Kernel {
            interp: Interpreter::new(dom, subs),
            options: KernelOptions::default(),
        }
    }

    pub fn with_options(mut self, options: KernelOptions) -> Self {
        self.options = options;
        self
    }

    pub fn interpreter(&self) -> &Interpreter<'a> {
        &self.interp
    }

    fn dom(&self) -> &'a Domain {
        self.interp.domain()
    }

    fn sat(&self, b: &BoolTerm) -> Result<StateSet> {
        self.dom().satisfying(b)
    }

    /// Colours that can matter for a node: everything its statements can
    /// emit, everything its formulas mention and every assumed label.
    fn universe(&self, node: &ProofNode) -> Vec<Slot> {
        let subs = self.interp.subs();
        let mut colours = BTreeSet::from([Colour::N, Colour::R, Colour::B]);
        for j in std::iter::once(&node.conclusion).chain(node.premises.iter().map(|p| &p.conclusion)) {
            colours.extend(possible_colours(&j.stmt, subs));
            colours.extend(colours_of(&j.post));
            colours.extend(j.assumptions.iter().map(|(l, _)| Colour::G(l.clone())));
        }
        if let Stmt::LabelDecl(l, _) = &node.conclusion.stmt {
            colours.insert(Colour::G(l.clone()));
        }
        colours.into_iter().map(Slot::Colour).chain([Slot::Rest]).collect()
    }

    fn comp(&self, q: &ModalFormula, slot: &Slot) -> Result<StateSet> {
        self.sat(&slot_component(q, slot))
    }

    /// The implications a node depends on, recomputed from its judgements.
    pub fn side_conditions(&self, node: &ProofNode) -> Result<Vec<SideCondition>> {
        let c = &node.conclusion;
        let mut out = Vec::new();
        match (node.rule, &c.stmt) {
            (RuleName::Go, Stmt::Goto(l)) => {
                out.push(SideCondition::new("p -> p_l", c.pre.clone(), c.assumption(l)));
            }
            (RuleName::Frm, Stmt::Labelled(_, l)) => {
                out.push(SideCondition::new(
                    "N p_l -> q",
                    c.assumption(l),
                    component(&c.post, &Colour::N),
                ));
            }
            (RuleName::Lbl, Stmt::LabelDecl(l, body)) => {
                if let Some(prem) = node.premises.first() {
                    let entries = self.label_entries(l, body, c)?;
                    out.push(SideCondition::new(
                        format!("entries of {l} -> p_l"),
                        render(&entries, self.dom()),
                        prem.conclusion.assumption(l),
                    ));
                }
            }
            (RuleName::Conseq, _) => {
                if let Some(prem) = node.premises.first() {
                    let p = &prem.conclusion;
                    out.push(SideCondition::new("p' -> p", c.pre.clone(), p.pre.clone()));
                    for slot in self.universe(node) {
                        out.push(SideCondition::new(
                            format!("q -> q' at {slot}"),
                            slot_component(&p.post, &slot),
                            slot_component(&c.post, &slot),
                        ));
                    }
                    for l in labels_of(&[c, p]) {
                        out.push(SideCondition::new(
                            format!("p_l' -> p_l at {l}"),
                            c.assumption(&l),
                            p.assumption(&l),
                        ));
                    }
                    if !self.options.lax_conseq {
                        for l in c.assumption_labels() {
                            out.push(SideCondition::new(
                                format!("G_l q' -> G_l p_l' at {l}"),
                                component(&c.post, &Colour::G(l.clone())),
                                c.assumption(&l),
                            ));
                        }
                    }
                }
            }
            _ => {}
        }
        Ok(out)
    }

    /// Entry states of `l` that the declaration's model actually uses from
    /// the precondition: the whole label fixpoint if some statement labelled
    /// `l` is run, nothing otherwise.
    fn label_entries(&self, l: &Ident, body: &Stmt, c: &Judgement) -> Result<StateSet> {
        let g = GotoEnv::from_assumptions(&c.assumptions, self.dom())?;
        let fix = self.interp.label_fixpoint(l, body, &g)?;
        let from = self.sat(&c.pre)?;
        if self.interp.labelled_entered(l, body, &g.with(l, fix.clone()), &from)? {
            Ok(fix)
        } else {
            Ok(StateSet::new())
        }
    }

    /// Diagnostics for a single node; empty when it instantiates its rule.
    pub fn check_rule(&self, node: &ProofNode) -> Vec<Diagnostic> {
        let found = match self.check_node(node) {
            Ok(found) => found,
            Err(e) => vec![(DiagnosticKind::Evaluation, e.to_string())],
        };
        found
            .into_iter()
            .map(|(kind, message)| Diagnostic {
                rule: node.rule,
                path: Vec::new(),
                kind,
                message,
            })
            .collect()
    }

    pub fn check_proof(&self, root: &ProofNode) -> ProofVerdict {
        let mut diagnostics = Vec::new();
        let mut stack = vec![(root, Vec::new())];
        while let Some((node, path)) = stack.pop() {
            for mut d in self.check_rule(node) {
                d.path = path.clone();
                diagnostics.push(d);
            }
            for (i, p) in node.premises.iter().enumerate().rev() {
                let mut sub = path.clone();
                sub.push(i);
                stack.push((p, sub));
            }
        }
        ProofVerdict { diagnostics }
    }

    fn check_node(&self, node: &ProofNode) -> Result<Found> {
        let mut ck = NodeCheck {
            k: self,
            node,
            slots: self.universe(node),
            found: Vec::new(),
        };
        ck.run()?;
        let mut failed = BTreeSet::new();
        for sc in self.side_conditions(node)?.iter().chain(&node.side_conditions) {
            if !implies(&sc.antecedent, &sc.consequent, self.dom())? && failed.insert(sc.description.clone()) {
                ck.found.push((
                    DiagnosticKind::SideConditionFailed(sc.description.clone()),
                    format!("{} does not imply {}", sc.antecedent, sc.consequent),
                ));
            }
        }
        Ok(ck.found)
    }
}

fn labels_of(js: &[&Judgement]) -> BTreeSet<Ident> {
    js.iter().flat_map(|j| j.assumption_labels()).collect()
}

struct NodeCheck<'k, 'a> {
    k: &'k Kernel<'a>,
    node: &'k ProofNode,
    slots: Vec<Slot>,
    found: Found,
}

impl NodeCheck<'_, '_> {
    fn report(&mut self, kind: DiagnosticKind, message: String) {
        self.found.push((kind, message));
    }

    fn concl(&self) -> &Judgement {
        &self.node.conclusion
    }

    fn prem(&self, i: usize) -> &Judgement {
        &self.node.premises[i].conclusion
    }

    fn arity(&mut self, n: usize) -> bool {
        let got = self.node.premises.len();
        if got != n {
            self.report(DiagnosticKind::Arity, format!("expected {n} premise(s), found {got}"));
            return false;
        }
        true
    }

    fn shape(&mut self, ok: bool, expected: &str) -> bool {
        if !ok {
            let msg = format!("expected {expected}, found `{}`", self.concl().stmt);
            self.report(DiagnosticKind::StatementShape, msg);
        }
        ok
    }

    fn premise_stmt(&mut self, i: usize, expected: &Stmt) {
        if self.prem(i).stmt != *expected {
            let msg = format!("premise {i} proves `{}` instead of `{expected}`", self.prem(i).stmt);
            self.report(DiagnosticKind::StatementShape, msg);
        }
    }

    /// Premise `i` carries the conclusion's assumptions, except for `skip`.
    fn passes_assumptions(&mut self, i: usize, skip: Option<&Ident>) -> Result<()> {
        let node = self.node;
        let (c, p) = (&node.conclusion, &node.premises[i].conclusion);
        for l in labels_of(&[c, p]) {
            if Some(&l) == skip {
                continue;
            }
            let (a, b) = (c.assumption(&l), p.assumption(&l));
            if self.k.sat(&a)? != self.k.sat(&b)? {
                let msg = format!("premise {i} assumes G({l}) {b}, conclusion assumes {a}");
                self.report(DiagnosticKind::AssumptionMismatch(l.name.clone()), msg);
            }
        }
        Ok(())
    }

    fn same_pre(&mut self, what: &str, got: &BoolTerm, want: &StateSet) -> Result<()> {
        if self.k.sat(got)? != *want {
            let msg = format!("{what} `{got}` is not {}", render(want, self.k.dom()));
            self.report(DiagnosticKind::PreconditionMismatch, msg);
        }
        Ok(())
    }

    /// Components passed from a premise to the conclusion may be weakened on
    /// the way, so the premise's component only has to be contained.
    fn covered(&mut self, slot: &Slot, prem: &ModalFormula, concl: &ModalFormula, what: &str) -> Result<()> {
        if !self.k.comp(prem, slot)?.is_subset(&self.k.comp(concl, slot)?) {
            let msg = format!("{what}: colour {slot} of the premise is not covered by the conclusion");
            self.report(DiagnosticKind::ComponentMismatch(slot.to_string()), msg);
        }
        Ok(())
    }

    fn slot_is(&mut self, slot: &Slot, q: &ModalFormula, want: &StateSet, what: &str) -> Result<()> {
        if self.k.comp(q, slot)? != *want {
            let msg = format!("{what} at colour {slot} is not {}", render(want, self.k.dom()));
            self.report(DiagnosticKind::ComponentMismatch(slot.to_string()), msg);
        }
        Ok(())
    }

    fn slot_empty(&mut self, slot: &Slot, q: &ModalFormula, what: &str) -> Result<()> {
        if !self.k.comp(q, slot)?.is_empty() {
            let msg = format!("{what} admits colour {slot}, which the rule excludes");
            self.report(DiagnosticKind::ColourClass(slot.to_string()), msg);
        }
        Ok(())
    }

    fn run(&mut self) -> Result<()> {
        let node = self.node;
        let c = &node.conclusion;
        let slots = self.slots.clone();
        let pre = self.k.sat(&c.pre)?;
        match node.rule {
            RuleName::Skp | RuleName::Ret | RuleName::Brk | RuleName::Go | RuleName::Throw => {
                let (colour, ok, expected) = match (node.rule, &c.stmt) {
                    (RuleName::Skp, s) => (Colour::N, *s == Stmt::Skip, "skip"),
                    (RuleName::Ret, s) => (Colour::R, *s == Stmt::Return, "return"),
                    (RuleName::Brk, s) => (Colour::B, *s == Stmt::Break, "break"),
                    (RuleName::Go, Stmt::Goto(l)) => (Colour::G(l.clone()), true, "goto"),
                    (RuleName::Throw, Stmt::Throw(k)) => (Colour::E(k.clone()), true, "throw"),
                    (RuleName::Go, _) => (Colour::N, false, "goto"),
                    _ => (Colour::N, false, "throw"),
                };
                if !self.arity(0) | !self.shape(ok, expected) {
                    return Ok(());
                }
                for slot in &slots {
                    if *slot == Slot::Colour(colour.clone()) {
                        self.slot_is(slot, &c.post, &pre, "postcondition")?;
                    } else {
                        self.slot_empty(slot, &c.post, "postcondition")?;
                    }
                }
            }
            RuleName::Let => {
                let Stmt::Assign(x, e) = &c.stmt else {
                    self.shape(false, "an assignment");
                    return Ok(());
                };
                if !self.arity(0) {
                    return Ok(());
                }
                let dom = self.k.dom();
                let var = dom.var_index(x.as_str()).ok_or_else(|| Error::UnboundVariable(x.name.clone()))?;
                let target = self.k.comp(&c.post, &Slot::Colour(Colour::N))?;
                let mut want = StateSet::new();
                for s in dom.ids() {
                    let v = dom.eval_term(e, s)?;
                    if dom.update(s, var, v).is_some_and(|s1| target.contains(&s1)) {
                        want.insert(s);
                    }
                }
                self.same_pre("precondition", &c.pre, &want)?;
                for slot in slots.iter().filter(|s| !is_normal(s)) {
                    self.slot_empty(slot, &c.post, "postcondition")?;
                }
            }
            RuleName::Seq => {
                let Stmt::Seq(p, q) = &c.stmt else {
                    self.shape(false, "a sequence");
                    return Ok(());
                };
                if !self.arity(2) {
                    return Ok(());
                }
                self.premise_stmt(0, p);
                self.premise_stmt(1, q);
                self.passes_assumptions(0, None)?;
                self.passes_assumptions(1, None)?;
                let (p0, p1) = (self.prem(0).clone(), self.prem(1).clone());
                self.same_pre("first premise precondition", &p0.pre, &pre)?;
                let mid = self.k.comp(&p0.post, &Slot::Colour(Colour::N))?;
                self.same_pre("second premise precondition", &p1.pre, &mid)?;
                for slot in &slots {
                    if !is_normal(slot) {
                        self.covered(slot, &p0.post, &c.post, "first premise and conclusion")?;
                    }
                    if is_normal(slot) {
                        let want = self.k.comp(&c.post, slot)?;
                        self.slot_is(slot, &p1.post, &want, "second premise")?;
                    } else {
                        self.covered(slot, &p1.post, &c.post, "second premise and conclusion")?;
                    }
                }
            }
            RuleName::Do => {
                let Stmt::Do(body) = &c.stmt else {
                    self.shape(false, "a loop");
                    return Ok(());
                };
                if !self.arity(1) {
                    return Ok(());
                }
                self.premise_stmt(0, body);
                self.passes_assumptions(0, None)?;
                let p0 = self.prem(0).clone();
                self.same_pre("premise precondition", &p0.pre, &pre)?;
                for slot in &slots {
                    match slot {
                        Slot::Colour(Colour::N) => self.slot_is(slot, &p0.post, &pre, "invariant")?,
                        Slot::Colour(Colour::B) => {
                            let exit = self.k.comp(&c.post, &Slot::Colour(Colour::N))?;
                            self.slot_is(slot, &p0.post, &exit, "loop exit")?;
                            self.slot_empty(slot, &c.post, "conclusion")?;
                        }
                        _ => self.covered(slot, &p0.post, &c.post, "premise and conclusion")?,
                    }
                }
            }
            RuleName::Grd => {
                let Stmt::Guard(b, body) = &c.stmt else {
                    self.shape(false, "a guard");
                    return Ok(());
                };
                if !self.arity(1) {
                    return Ok(());
                }
                self.premise_stmt(0, body);
                self.passes_assumptions(0, None)?;
                let p0 = self.prem(0).clone();
                let want: StateSet = self.k.sat(b)?.intersection(&pre).copied().collect();
                self.same_pre("premise precondition", &p0.pre, &want)?;
                for slot in &slots {
                    self.covered(slot, &p0.post, &c.post, "premise and conclusion")?;
                }
            }
            RuleName::Dsj => {
                let Stmt::Choice(p, q) = &c.stmt else {
                    self.shape(false, "a choice");
                    return Ok(());
                };
                if !self.arity(2) {
                    return Ok(());
                }
                self.premise_stmt(0, p);
                self.premise_stmt(1, q);
                for i in 0..2 {
                    self.passes_assumptions(i, None)?;
                    let pi = self.prem(i).clone();
                    self.same_pre("premise precondition", &pi.pre, &pre)?;
                    for slot in &slots {
                        self.covered(slot, &pi.post, &c.post, "premise and conclusion")?;
                    }
                }
            }
            RuleName::Frm => {
                let Stmt::Labelled(body, _) = &c.stmt else {
                    self.shape(false, "a labelled statement");
                    return Ok(());
                };
                if !self.arity(1) {
                    return Ok(());
                }
                self.premise_stmt(0, body);
                self.passes_assumptions(0, None)?;
                let p0 = self.prem(0).clone();
                self.same_pre("premise precondition", &p0.pre, &pre)?;
                for slot in &slots {
                    self.covered(slot, &p0.post, &c.post, "premise and conclusion")?;
                }
            }
            RuleName::Lbl => {
                let Stmt::LabelDecl(l, body) = &c.stmt else {
                    self.shape(false, "a label declaration");
                    return Ok(());
                };
                if !self.arity(1) {
                    return Ok(());
                }
                self.premise_stmt(0, body);
                self.passes_assumptions(0, Some(l))?;
                let p0 = self.prem(0).clone();
                self.same_pre("premise precondition", &p0.pre, &pre)?;
                let gl = Slot::Colour(Colour::G(l.clone()));
                let entry = self.k.sat(&p0.assumption(l))?;
                for slot in &slots {
                    if *slot == gl {
                        self.slot_is(slot, &p0.post, &entry, "premise")?;
                        self.slot_empty(slot, &c.post, "conclusion")?;
                    } else {
                        self.covered(slot, &p0.post, &c.post, "premise and conclusion")?;
                    }
                }
            }
            RuleName::Sub => {
                let Stmt::Call(h) = &c.stmt else {
                    self.shape(false, "a call");
                    return Ok(());
                };
                if !self.arity(1) {
                    return Ok(());
                }
                match self.k.interp.subs().get(&h.name) {
                    Some(body) => self.premise_stmt(0, body),
                    None => {
                        self.report(DiagnosticKind::StatementShape, format!("no subroutine named `{h}`"));
                        return Ok(());
                    }
                }
                let p0 = self.prem(0).clone();
                for (l, a) in &p0.assumptions {
                    if !self.k.sat(a)?.is_empty() {
                        let msg = format!("the body must be proved without assumptions, found G({l}) {a}");
                        self.report(DiagnosticKind::AssumptionMismatch(l.name.clone()), msg);
                    }
                }
                self.same_pre("premise precondition", &p0.pre, &pre)?;
                let returned = self.k.comp(&p0.post, &Slot::Colour(Colour::R))?;
                for slot in &slots {
                    match slot {
                        Slot::Colour(Colour::N) => {
                            self.slot_empty(slot, &p0.post, "body")?;
                            self.slot_is(slot, &c.post, &returned, "conclusion")?;
                        }
                        Slot::Colour(Colour::E(_)) | Slot::Rest => {
                            self.covered(slot, &p0.post, &c.post, "body and call")?;
                        }
                        _ => {
                            if !matches!(slot, Slot::Colour(Colour::R)) {
                                self.slot_empty(slot, &p0.post, "body")?;
                            }
                            self.slot_empty(slot, &c.post, "conclusion")?;
                        }
                    }
                }
            }
            RuleName::Try => {
                let Stmt::TryCatch(p, k, q) = &c.stmt else {
                    self.shape(false, "a try statement");
                    return Ok(());
                };
                if !self.arity(2) {
                    return Ok(());
                }
                self.premise_stmt(0, p);
                self.premise_stmt(1, q);
                self.passes_assumptions(0, None)?;
                self.passes_assumptions(1, None)?;
                let (p0, p1) = (self.prem(0).clone(), self.prem(1).clone());
                self.same_pre("first premise precondition", &p0.pre, &pre)?;
                let ek = Slot::Colour(Colour::E(k.clone()));
                let caught = self.k.comp(&p0.post, &ek)?;
                self.same_pre("handler precondition", &p1.pre, &caught)?;
                for slot in &slots {
                    if *slot != ek {
                        self.covered(slot, &p0.post, &c.post, "body and conclusion")?;
                    }
                    self.covered(slot, &p1.post, &c.post, "handler and conclusion")?;
                }
            }
            RuleName::PreOr => {
                if self.node.premises.is_empty() {
                    self.report(DiagnosticKind::Arity, "expected at least one premise".into());
                    return Ok(());
                }
                let mut union = StateSet::new();
                for i in 0..self.node.premises.len() {
                    let stmt = c.stmt.clone();
                    self.premise_stmt(i, &stmt);
                    self.passes_assumptions(i, None)?;
                    let pi = self.prem(i).clone();
                    union.extend(self.k.sat(&pi.pre)?);
                    for slot in &slots {
                        self.covered(slot, &pi.post, &c.post, "premise and conclusion")?;
                    }
                }
                self.same_pre("precondition (union of the premises')", &c.pre, &union)?;
            }
            RuleName::PostAnd => {
                if self.node.premises.is_empty() {
                    self.report(DiagnosticKind::Arity, "expected at least one premise".into());
                    return Ok(());
                }
                for i in 0..self.node.premises.len() {
                    let stmt = c.stmt.clone();
                    self.premise_stmt(i, &stmt);
                    self.passes_assumptions(i, None)?;
                    let pi = self.prem(i).clone();
                    self.same_pre("premise precondition", &pi.pre, &pre)?;
                }
                for slot in &slots {
                    let mut meet = self.k.dom().all();
                    for p in &self.node.premises {
                        let s = self.k.comp(&p.conclusion.post, slot)?;
                        meet = meet.intersection(&s).copied().collect();
                    }
                    self.slot_is(slot, &c.post, &meet, "conclusion (intersection of the premises')")?;
                }
            }
            RuleName::AssumeOr => {
                if !self.arity(1) {
                    return Ok(());
                }
                let stmt = c.stmt.clone();
                self.premise_stmt(0, &stmt);
                self.passes_assumptions(0, None)?;
                let p0 = self.prem(0).clone();
                self.same_pre("premise precondition", &p0.pre, &pre)?;
                for slot in &slots {
                    self.covered(slot, &p0.post, &c.post, "premise and conclusion")?;
                }
            }
            RuleName::Conseq => {
                if !self.arity(1) {
                    return Ok(());
                }
                let stmt = c.stmt.clone();
                self.premise_stmt(0, &stmt);
            }
        }
        Ok(())
    }
}

pub fn check_rule(node: &ProofNode, dom: &Domain, subs: &Subroutines) -> Vec<Diagnostic> {
    Kernel::new(dom, subs).check_rule(node)
}

pub fn check_proof(root: &ProofNode, dom: &Domain, subs: &Subroutines) -> ProofVerdict {
    Kernel::new(dom, subs).check_proof(root)
}
