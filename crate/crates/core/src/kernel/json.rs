//! Proof documents: one JSON object per node with the conclusion and side
//! conditions written in the concrete syntax.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::syntax::{parse_bool, parse_judgement};

use super::{ProofNode, RuleName, SideCondition};

#[derive(Serialize, Deserialize)]
struct NodeDoc {
    rule: String,
    conclusion: String,
    side_conditions: Vec<SideConditionDoc>,
    premises: Vec<NodeDoc>,
}

#[derive(Serialize, Deserialize)]
struct SideConditionDoc {
    description: String,
    antecedent: String,
    consequent: String,
}

fn to_doc(node: &ProofNode) -> NodeDoc {
    NodeDoc {
        rule: node.rule.name().to_string(),
        conclusion: node.conclusion.to_string(),
        side_conditions: node
            .side_conditions
            .iter()
            .map(|sc| SideConditionDoc {
                description: sc.description.clone(),
                antecedent: sc.antecedent.to_string(),
                consequent: sc.consequent.to_string(),
            })
            .collect(),
        premises: node.premises.iter().map(to_doc).collect(),
    }
}

fn from_doc(doc: NodeDoc) -> Result<ProofNode> {
    let rule = RuleName::from_name(&doc.rule).ok_or_else(|| Error::ProofFormat(format!("unknown rule `{}`", doc.rule)))?;
    let conclusion = parse_judgement(&doc.conclusion)?;
    let side_conditions = doc
        .side_conditions
        .into_iter()
        .map(|sc| {
            Ok(SideCondition {
                description: sc.description,
                antecedent: parse_bool(&sc.antecedent)?,
                consequent: parse_bool(&sc.consequent)?,
            })
        })
        .collect::<Result<_>>()?;
    let premises = doc.premises.into_iter().map(from_doc).collect::<Result<_>>()?;
    Ok(ProofNode {
        rule,
        conclusion,
        premises,
        side_conditions,
    })
}

pub fn proof_to_json(node: &ProofNode) -> String {
    serde_json::to_string_pretty(&to_doc(node)).expect("proof documents always serialize")
}

pub fn proof_from_json(text: &str) -> Result<ProofNode> {
    let doc: NodeDoc = serde_json::from_str(text).map_err(|e| Error::ProofFormat(e.to_string()))?;
    from_doc(doc)
}
