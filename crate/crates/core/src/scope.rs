//! Label scoping, subroutine references and call-graph acyclicity.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::lang::{Ident, Program, Span, Stmt, Subroutines};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScopeDiagnostic {
    UndeclaredLabel(Ident),
    /// `label l.` inside the scope of another `label l.`
    Redeclared(Ident),
    UndefinedSubroutine(Ident),
    RecursiveCall(Ident),
    DuplicateSubroutine(Ident),
    DuplicateVariable(Ident),
    EmptyRange(Ident),
}

impl ScopeDiagnostic {
    pub fn ident(&self) -> &Ident {
        match self {
            ScopeDiagnostic::UndeclaredLabel(i)
            | ScopeDiagnostic::Redeclared(i)
            | ScopeDiagnostic::UndefinedSubroutine(i)
            | ScopeDiagnostic::RecursiveCall(i)
            | ScopeDiagnostic::DuplicateSubroutine(i)
            | ScopeDiagnostic::DuplicateVariable(i)
            | ScopeDiagnostic::EmptyRange(i) => i,
        }
    }

    pub fn span(&self) -> Option<Span> {
        self.ident().span
    }
}

impl fmt::Display for ScopeDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(span) = self.span() {
            write!(f, "{span}: ")?;
        }
        match self {
            ScopeDiagnostic::UndeclaredLabel(l) => write!(f, "label `{l}` used outside its declaration"),
            ScopeDiagnostic::Redeclared(l) => write!(f, "label `{l}` declared again in its own scope"),
            ScopeDiagnostic::UndefinedSubroutine(h) => write!(f, "call to undefined subroutine `{h}`"),
            ScopeDiagnostic::RecursiveCall(h) => write!(f, "subroutine `{h}` is (mutually) recursive"),
            ScopeDiagnostic::DuplicateSubroutine(h) => write!(f, "subroutine `{h}` defined twice"),
            ScopeDiagnostic::DuplicateVariable(x) => write!(f, "variable `{x}` declared twice"),
            ScopeDiagnostic::EmptyRange(x) => write!(f, "variable `{x}` has an empty range"),
        }
    }
}

/// Labels used by `goto` or `P : l` that no enclosing `label` binds.
pub fn free_labels(stmt: &Stmt) -> BTreeSet<Ident> {
    let mut out = BTreeSet::new();
    collect_free(stmt, &mut Vec::new(), &mut out);
    out
}

fn collect_free<'a>(stmt: &'a Stmt, bound: &mut Vec<&'a Ident>, out: &mut BTreeSet<Ident>) {
    match stmt {
        Stmt::Goto(l) => {
            if !bound.contains(&l) {
                out.insert(l.clone());
            }
        }
        Stmt::Labelled(s, l) => {
            collect_free(s, bound, out);
            if !bound.contains(&l) {
                out.insert(l.clone());
            }
        }
        Stmt::LabelDecl(l, s) => {
            bound.push(l);
            collect_free(s, bound, out);
            bound.pop();
        }
        Stmt::Seq(a, b) | Stmt::Choice(a, b) | Stmt::TryCatch(a, _, b) => {
            collect_free(a, bound, out);
            collect_free(b, bound, out);
        }
        Stmt::Guard(_, s) | Stmt::Do(s) => collect_free(s, bound, out),
        Stmt::Skip
        | Stmt::Return
        | Stmt::Break
        | Stmt::Throw(_)
        | Stmt::Assign(..)
        | Stmt::Call(_) => {}
    }
}

/// Subroutine names called directly from `stmt`, with their call sites.
pub fn calls(stmt: &Stmt) -> Vec<Ident> {
    let mut out = Vec::new();
    collect_calls(stmt, &mut out);
    out
}

fn collect_calls(stmt: &Stmt, out: &mut Vec<Ident>) {
    match stmt {
        Stmt::Call(h) => out.push(h.clone()),
        Stmt::Seq(a, b) | Stmt::Choice(a, b) | Stmt::TryCatch(a, _, b) => {
            collect_calls(a, out);
            collect_calls(b, out);
        }
        Stmt::Guard(_, s) | Stmt::Do(s) | Stmt::Labelled(s, _) | Stmt::LabelDecl(_, s) => {
            collect_calls(s, out)
        }
        _ => {}
    }
}

fn check_labels(stmt: &Stmt, bound: &mut Vec<Ident>, out: &mut Vec<ScopeDiagnostic>) {
    match stmt {
        Stmt::Goto(l) => {
            if !bound.contains(l) {
                out.push(ScopeDiagnostic::UndeclaredLabel(l.clone()));
            }
        }
        Stmt::Labelled(s, l) => {
            check_labels(s, bound, out);
            if !bound.contains(l) {
                out.push(ScopeDiagnostic::UndeclaredLabel(l.clone()));
            }
        }
        Stmt::LabelDecl(l, s) => {
            if bound.contains(l) {
                out.push(ScopeDiagnostic::Redeclared(l.clone()));
            }
            bound.push(l.clone());
            check_labels(s, bound, out);
            bound.pop();
        }
        Stmt::Seq(a, b) | Stmt::Choice(a, b) | Stmt::TryCatch(a, _, b) => {
            check_labels(a, bound, out);
            check_labels(b, bound, out);
        }
        Stmt::Guard(_, s) | Stmt::Do(s) => check_labels(s, bound, out),
        _ => {}
    }
}

/// Label scoping and subroutine references for a statement of its own;
/// labels in `free` count as declared by the context.
pub fn check_stmt(stmt: &Stmt, free: &[Ident], subs: &Subroutines) -> Vec<ScopeDiagnostic> {
    let mut out = Vec::new();
    check_labels(stmt, &mut free.to_vec(), &mut out);
    for h in calls(stmt) {
        if !subs.contains_key(&h.name) {
            out.push(ScopeDiagnostic::UndefinedSubroutine(h));
        }
    }
    out
}

/// Check label scoping, subroutine references and call-graph acyclicity.
/// An empty result means the program is well formed.
pub fn scope_check(program: &Program) -> Vec<ScopeDiagnostic> {
    let mut out = Vec::new();

    let mut seen_vars = BTreeSet::new();
    for decl in &program.vars {
        if !seen_vars.insert(decl.name.name.clone()) {
            out.push(ScopeDiagnostic::DuplicateVariable(decl.name.clone()));
        }
        if decl.low > decl.high {
            out.push(ScopeDiagnostic::EmptyRange(decl.name.clone()));
        }
    }

    let mut seen_subs = BTreeSet::new();
    for name in &program.sub_names {
        if !seen_subs.insert(name.name.clone()) {
            out.push(ScopeDiagnostic::DuplicateSubroutine(name.clone()));
        }
    }

    let mut bodies: Vec<(&Ident, &Stmt)> = Vec::new();
    for name in &program.sub_names {
        if let Some(body) = program.subs.get(&name.name) {
            if !bodies.iter().any(|(n, _)| *n == name) {
                bodies.push((name, body));
            }
        }
    }

    for (_, body) in &bodies {
        check_labels(body, &mut Vec::new(), &mut out);
    }
    check_labels(&program.main, &mut Vec::new(), &mut out);

    for (_, body) in &bodies {
        for h in calls(body) {
            if !program.subs.contains_key(&h.name) {
                out.push(ScopeDiagnostic::UndefinedSubroutine(h));
            }
        }
    }
    for h in calls(&program.main) {
        if !program.subs.contains_key(&h.name) {
            out.push(ScopeDiagnostic::UndefinedSubroutine(h));
        }
    }

    out.extend(recursive_calls(&bodies));
    out
}

/// One diagnostic per back edge of the call graph, reported at the call site
/// that closes the cycle.
fn recursive_calls(bodies: &[(&Ident, &Stmt)]) -> Vec<ScopeDiagnostic> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Fresh,
        Active,
        Done,
    }

    let edges: BTreeMap<&str, Vec<Ident>> = bodies
        .iter()
        .map(|(n, b)| (n.as_str(), calls(b)))
        .collect();
    let mut marks: BTreeMap<&str, Mark> = edges.keys().map(|k| (*k, Mark::Fresh)).collect();
    let mut out = Vec::new();

    fn visit<'a>(
        node: &'a str,
        edges: &'a BTreeMap<&'a str, Vec<Ident>>,
        marks: &mut BTreeMap<&'a str, Mark>,
        out: &mut Vec<ScopeDiagnostic>,
    ) {
        marks.insert(node, Mark::Active);
        for callee in &edges[node] {
            let Some((key, _)) = edges.get_key_value(callee.as_str()) else {
                continue;
            };
            match marks[key] {
                Mark::Active => out.push(ScopeDiagnostic::RecursiveCall(callee.clone())),
                Mark::Fresh => visit(key, edges, marks, out),
                Mark::Done => {}
            }
        }
        marks.insert(node, Mark::Done);
    }

    for (name, _) in bodies {
        if marks[name.as_str()] == Mark::Fresh {
            visit(name.as_str(), &edges, &mut marks, &mut out);
        }
    }
    out
}
