//! Exhaustive enumeration of small programs over one variable `x` in `0..1`.

use nrb_core::lang::{BoolTerm, Stmt, Subroutines, Term};
use nrb_core::scope::check_stmt;
use nrb_core::syntax::parse_stmt;

pub fn subroutines() -> Subroutines {
    let mut subs = Subroutines::new();
    subs.insert("f".into(), parse_stmt("x = 0 -> throw k | x = 1 -> return").unwrap());
    subs
}

fn leaves() -> Vec<Stmt> {
    vec![
        Stmt::Skip,
        Stmt::Return,
        Stmt::Break,
        Stmt::goto("l"),
        Stmt::throw("k"),
        Stmt::assign("x", Term::Int(0)),
        Stmt::assign("x", Term::Int(1)),
        Stmt::call("f"),
    ]
}

fn unary(s: &Stmt) -> Vec<Stmt> {
    vec![
        Stmt::guard(BoolTerm::var_eq("x", 0), s.clone()),
        Stmt::guard(BoolTerm::var_eq("x", 1), s.clone()),
        Stmt::do_loop(s.clone()),
        Stmt::labelled(s.clone(), "l"),
        Stmt::label("l", s.clone()),
    ]
}

fn binary(a: &Stmt, b: &Stmt) -> Vec<Stmt> {
    vec![
        Stmt::seq(a.clone(), b.clone()),
        Stmt::choice(a.clone(), b.clone()),
        Stmt::try_catch(a.clone(), "k", b.clone()),
    ]
}

/// Every statement with at most `max` nodes, grouped by size. Scoping is
/// not enforced here.
pub fn all_statements(max: usize) -> Vec<Vec<Stmt>> {
    let mut by_size: Vec<Vec<Stmt>> = vec![Vec::new(), leaves()];
    for n in 2..=max {
        let mut here = Vec::new();
        for s in &by_size[n - 1] {
            here.extend(unary(s));
        }
        for left in 1..n - 1 {
            let right = n - 1 - left;
            for a in &by_size[left] {
                for b in &by_size[right] {
                    here.extend(binary(a, b));
                }
            }
        }
        by_size.push(here);
    }
    by_size
}

/// Well-scoped closed programs of at most `max` nodes.
pub fn closed_programs(max: usize) -> Vec<Stmt> {
    let subs = subroutines();
    all_statements(max)
        .into_iter()
        .flatten()
        .filter(|s| check_stmt(s, &[], &subs).is_empty())
        .collect()
}
