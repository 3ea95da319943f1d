use std::path::Path;

use serde_json::{json, Value};

use nrb_core::eval::Domain;
use nrb_core::kernel::{proof_from_json, proof_to_json, Diagnostic, Kernel, KernelOptions, ProofGenerator};
use nrb_core::lang::{Judgement, Program};
use nrb_core::model::{check_triple, histogram, interpret, is_deterministic, to_dot, to_json, transition_json, GotoEnv};
use nrb_core::scope::{check_stmt, scope_check};
use nrb_core::syntax::{parse_formula, parse_judgement_source, parse_program};
use nrb_core::wp::WpEngine;
use nrb_core::Error;

use crate::report::{Class, Report};
use crate::Opts;

pub fn read(command: &'static str, path: &Path) -> Result<String, Report> {
    std::fs::read_to_string(path).map_err(|e| Report::error(command, Class::Input, format!("{}: {e}", path.display())))
}

fn write(command: &'static str, path: &Path, text: &str) -> Result<(), Report> {
    std::fs::write(path, text).map_err(|e| Report::error(command, Class::Runtime, format!("{}: {e}", path.display())))
}

/// A loaded, scope-checked program with its state space.
pub struct Session<'o> {
    command: &'static str,
    opts: &'o Opts,
    program: Program,
    dom: Domain,
}

impl<'o> Session<'o> {
    pub fn load(command: &'static str, path: &Path, opts: &'o Opts) -> Result<Session<'o>, Report> {
        let text = read(command, path)?;
        let program = parse_program(&text).map_err(|e| with_file(command, path, e))?;
        let problems = scope_check(&program);
        if !problems.is_empty() {
            return Err(scope_error(command, path, &problems));
        }
        let dom = Domain::from_decls(&program.vars, opts.max_states).map_err(|e| Report::from((command, e)))?;
        Ok(Session {
            command,
            opts,
            program,
            dom,
        })
    }

    fn fail(&self, e: Error) -> Report {
        Report::from((self.command, e))
    }

    fn kernel_options(&self) -> KernelOptions {
        KernelOptions {
            lax_conseq: self.opts.lax_conseq,
        }
    }

    /// A judgement file; without a `prog:` part it is about the program's
    /// main statement.
    fn judgement(&self, path: &Path) -> Result<Judgement, Report> {
        let text = read(self.command, path)?;
        let src = parse_judgement_source(&text).map_err(|e| with_file(self.command, path, e))?;
        let j = src.with_stmt(self.program.main.clone());
        self.scope(&j, path)?;
        Ok(j)
    }

    fn scope(&self, j: &Judgement, path: &Path) -> Result<(), Report> {
        let problems = check_stmt(&j.stmt, &j.assumption_labels(), &self.program.subs);
        match problems.is_empty() {
            true => Ok(()),
            false => Err(scope_error(self.command, path, &problems)),
        }
    }

    fn counterexamples(&self, j: &Judgement) -> Result<(usize, Vec<Value>), Report> {
        let v = check_triple(j, &self.dom, &self.program.subs).map_err(|e| self.fail(e))?;
        let shown = v
            .counterexamples
            .iter()
            .take(self.opts.max_counterexamples)
            .map(|t| transition_json(&self.dom, t))
            .collect();
        Ok((v.counterexamples.len(), shown))
    }

    pub fn check(&self, path: &Path) -> Result<Report, Report> {
        let j = self.judgement(path)?;
        let (total, shown) = self.counterexamples(&j)?;
        let details = json!({
            "judgement": j.to_string(),
            "verdict": if total == 0 { "holds" } else { "fails" },
            "counterexample_total": total,
            "counterexamples": shown,
        });
        Ok(match total {
            0 => Report::ok(self.command, details),
            _ => Report::fail(self.command, details),
        })
    }

    pub fn wp(&self, post: &str) -> Result<Report, Report> {
        let q = parse_formula(post.trim()).map_err(|e| self.fail(e))?;
        let engine = WpEngine::new(&self.dom, &self.program.subs);
        let g = GotoEnv::new();
        let p = engine.wp(&self.program.main, &q, &g).map_err(|e| self.fail(e))?;
        let verified = match self.opts.verify {
            false => None,
            true => Some(engine.verify_wp(&self.program.main, &q, &g).map_err(|e| self.fail(e))?),
        };
        if verified == Some(false) {
            return Err(Report::error(
                self.command,
                Class::OracleMismatch,
                format!("structural wp {} disagrees with the brute-force oracle", p.rendering),
            ));
        }
        Ok(Report::ok(
            self.command,
            json!({
                "post": q.to_string(),
                "rendering": p.rendering.to_string(),
                "states": p.states.len(),
                "domain_states": self.dom.len(),
                "verified": verified,
            }),
        ))
    }

    pub fn prove(&self, path: &Path, out: Option<&Path>) -> Result<Report, Report> {
        let j = self.judgement(path)?;
        let gen = ProofGenerator::new(&self.dom, &self.program.subs).with_options(self.kernel_options());
        let proof = match gen.generate(&j) {
            Ok(p) => p,
            Err(Error::TripleDoesNotHold { .. }) => {
                let (total, shown) = self.counterexamples(&j)?;
                return Ok(Report::fail(
                    self.command,
                    json!({
                        "judgement": j.to_string(),
                        "verdict": "fails",
                        "counterexample_total": total,
                        "counterexamples": shown,
                    }),
                ));
            }
            Err(e) => return Err(self.fail(e)),
        };
        let verdict = gen.kernel().check_proof(&proof);
        let text = proof_to_json(&proof);
        let rules: Vec<&str> = proof.rules_used().into_iter().map(|r| r.name()).collect();
        let mut details = json!({
            "judgement": j.to_string(),
            "nodes": proof.size(),
            "rules": rules,
        });
        if !verdict.holds() {
            details["diagnostics"] = diagnostics(&verdict.diagnostics);
            return Ok(Report::fail(self.command, details));
        }
        match out {
            Some(path) => {
                write(self.command, path, &format!("{text}\n"))?;
                details["proof_file"] = json!(path.display().to_string());
            }
            None => details["proof"] = serde_json::from_str(&text).expect("proof JSON parses"),
        }
        Ok(Report::ok(self.command, details))
    }

    pub fn check_proof(&self, path: &Path) -> Result<Report, Report> {
        let text = read(self.command, path)?;
        let proof = proof_from_json(&text).map_err(|e| with_file(self.command, path, e))?;
        self.scope(&proof.conclusion, path)?;
        let kernel = Kernel::new(&self.dom, &self.program.subs).with_options(self.kernel_options());
        let verdict = kernel.check_proof(&proof);
        let details = json!({
            "judgement": proof.conclusion.to_string(),
            "nodes": proof.size(),
            "verdict": if verdict.holds() { "accepted" } else { "rejected" },
            "diagnostics": diagnostics(&verdict.diagnostics),
        });
        Ok(match verdict.holds() {
            true => Report::ok(self.command, details),
            false => Report::fail(self.command, details),
        })
    }

    pub fn model(&self, dot: Option<&Path>, json_out: Option<&Path>) -> Result<Report, Report> {
        let ts = interpret(&self.program.main, &GotoEnv::new(), &self.dom, &self.program.subs).map_err(|e| self.fail(e))?;
        if let Some(path) = dot {
            write(self.command, path, &to_dot(&ts, &self.dom))?;
        }
        if let Some(path) = json_out {
            let text = serde_json::to_string_pretty(&to_json(&ts, &self.dom)).expect("model serializes");
            write(self.command, path, &format!("{text}\n"))?;
        }
        let hist: serde_json::Map<String, Value> =
            histogram(&ts).into_iter().map(|(c, n)| (c.to_string(), json!(n))).collect();
        Ok(Report::ok(
            self.command,
            json!({
                "states": self.dom.len(),
                "transitions": ts.len(),
                "histogram": hist,
                "deterministic": is_deterministic(&ts),
            }),
        ))
    }
}

fn diagnostics(ds: &[Diagnostic]) -> Value {
    ds.iter()
        .map(|d| json!({ "rule": d.rule.name(), "path": d.path, "kind": d.kind.to_string(), "message": d.message }))
        .collect()
}

/// Prefix input errors with the file; positioned ones read `file:line:col: ...`.
fn with_file(command: &'static str, path: &Path, e: Error) -> Report {
    let class = crate::report::classify(&e);
    let sep = match e {
        Error::Syntax { .. } | Error::NonModalRequired { .. } => ":",
        _ => ": ",
    };
    match class {
        Class::Input => Report::error(command, class, format!("{}{sep}{e}", path.display())),
        _ => Report::from((command, e)),
    }
}

fn scope_error(command: &'static str, path: &Path, problems: &[impl std::fmt::Display]) -> Report {
    let msgs: Vec<String> = problems.iter().map(|p| format!("{}: {p}", path.display())).collect();
    Report::error(command, Class::Input, msgs.join("; "))
}
