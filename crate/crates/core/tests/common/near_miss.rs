//! One almost-correct derivation step per rule, with the diagnostic the
//! kernel must give for it. Domain: `x` in `0..2`; `f` is `x = 1; return`.

use nrb_core::eval::Domain;
use nrb_core::kernel::{DiagnosticKind, ProofNode, RuleName};
use nrb_core::lang::Subroutines;
use nrb_core::syntax::{parse_judgement, parse_stmt};

pub fn domain() -> Domain {
    Domain::new([("x", 0, 2)]).unwrap()
}

pub fn subroutines() -> Subroutines {
    let mut subs = Subroutines::new();
    subs.insert("f".into(), parse_stmt("x = 1; return").unwrap());
    subs
}

fn n(rule: RuleName, j: &str, premises: Vec<ProofNode>) -> ProofNode {
    ProofNode::new(rule, parse_judgement(j).unwrap(), premises)
}

fn leaf(j: &str) -> ProofNode {
    n(RuleName::Conseq, j, vec![])
}

pub struct NearMiss {
    pub rule: RuleName,
    pub what: &'static str,
    pub node: ProofNode,
    pub expected: DiagnosticKind,
}

pub fn all() -> Vec<NearMiss> {
    use DiagnosticKind::*;
    use RuleName::*;
    let cm = |c: &str| ComponentMismatch(c.into());
    let cc = |c: &str| ColourClass(c.into());
    let sc = |d: &str| SideConditionFailed(d.into());
    let miss = |rule, what, node, expected| NearMiss { rule, what, node, expected };
    vec![
        miss(Skp, "skip may also return", n(Skp, "pre: true; prog: skip; post: N[true] \\/ R[true]", vec![]), cc("R")),
        miss(Ret, "return narrows its state", n(Ret, "pre: true; prog: return; post: R[x = 0]", vec![]), cm("R")),
        miss(Brk, "break may end normally", n(Brk, "pre: true; prog: break; post: B[true] \\/ N[x = 1]", vec![]), cc("N")),
        miss(
            Go,
            "goto from states outside the assumption",
            n(Go, "assume G(l): x = 0; pre: true; prog: goto l; post: G(l)[true]", vec![]),
            sc("p -> p_l"),
        ),
        miss(
            Throw,
            "throw of the wrong kind admitted",
            n(Throw, "pre: true; prog: throw k; post: E(k)[true] \\/ E(k2)[true]", vec![]),
            cc("E:k2"),
        ),
        miss(Let, "assignment with the wrong precondition", n(Let, "pre: x = 0; prog: x = x + 1; post: N[x = 2]", vec![]), PreconditionMismatch),
        miss(
            Seq,
            "second step starts from the wrong states",
            n(
                Seq,
                "pre: x = 0; prog: skip; return; post: R[x = 1]",
                vec![
                    leaf("pre: x = 0; prog: skip; post: N[x = 0]"),
                    leaf("pre: x = 1; prog: return; post: R[x = 1]"),
                ],
            ),
            PreconditionMismatch,
        ),
        miss(
            Do,
            "loop body does not preserve the invariant",
            n(Do, "pre: x = 0; prog: do {x = x + 1}; post: N[false]", vec![leaf("pre: x = 0; prog: x = x + 1; post: N[x = 1]")]),
            cm("N"),
        ),
        miss(
            Grd,
            "guarded premise ignores the guard",
            n(Grd, "pre: true; prog: x = 0 -> skip; post: N[true]", vec![leaf("pre: true; prog: skip; post: N[true]")]),
            PreconditionMismatch,
        ),
        miss(
            Dsj,
            "choice loses a branch's return",
            n(
                Dsj,
                "pre: true; prog: skip | return; post: N[true]",
                vec![leaf("pre: true; prog: skip; post: N[true]"), leaf("pre: true; prog: return; post: R[true]")],
            ),
            cm("R"),
        ),
        miss(
            Frm,
            "arrivals at the label are not covered",
            n(
                Frm,
                "assume G(l): x = 2; pre: x = 0; prog: skip : l; post: N[x = 0]",
                vec![leaf("assume G(l): x = 2; pre: x = 0; prog: skip; post: N[x = 0]")],
            ),
            sc("N p_l -> q"),
        ),
        miss(
            Lbl,
            "label assumption below the states that really arrive",
            n(
                Lbl,
                "pre: x = 0; prog: label l. {x = 1 -> goto l | x = 0 -> skip; skip : l}; post: N[x = 0]",
                vec![leaf(
                    "assume G(l): false; pre: x = 0; prog: x = 1 -> goto l | x = 0 -> skip; skip : l; post: N[x = 0]",
                )],
            ),
            sc("entries of l -> p_l"),
        ),
        miss(
            Sub,
            "call ends in states the body does not return",
            n(Sub, "pre: true; prog: call f; post: N[x = 0]", vec![leaf("pre: true; prog: x = 1; return; post: R[x = 1]")]),
            cm("N"),
        ),
        miss(
            Try,
            "handler assumes fewer states than are thrown",
            n(
                Try,
                "pre: true; prog: try {throw k} catch (k) {skip}; post: N[true]",
                vec![
                    leaf("pre: true; prog: throw k; post: E(k)[true]"),
                    leaf("pre: x = 0; prog: skip; post: N[x = 0]"),
                ],
            ),
            PreconditionMismatch,
        ),
        miss(
            PreOr,
            "precondition larger than the union",
            n(PreOr, "pre: true; prog: skip; post: N[true]", vec![leaf("pre: x = 0; prog: skip; post: N[x = 0]")]),
            PreconditionMismatch,
        ),
        miss(
            PostAnd,
            "postcondition larger than the intersection",
            n(
                PostAnd,
                "pre: true; prog: skip; post: N[true]",
                vec![leaf("pre: true; prog: skip; post: N[true]"), leaf("pre: true; prog: skip; post: N[x = 0]")],
            ),
            cm("N"),
        ),
        miss(
            AssumeOr,
            "assumption grows without a matching premise",
            n(
                AssumeOr,
                "assume G(l): x = 0 \\/ x = 1; pre: true; prog: skip : l; post: N[true]",
                vec![leaf("assume G(l): x = 0; pre: true; prog: skip : l; post: N[true]")],
            ),
            AssumptionMismatch("l".into()),
        ),
        miss(
            Conseq,
            "weakened goto exits escape the narrowed assumption",
            n(
                Conseq,
                "assume G(l): x = 0; pre: true; prog: goto l; post: G(l)[true]",
                vec![leaf("assume G(l): true; pre: true; prog: goto l; post: G(l)[true]")],
            ),
            sc("G_l q' -> G_l p_l' at l"),
        ),
    ]
}
