//! JSON form of a policy: states as sorted fluent lists, the chosen action,
//! mode and solver statistics. Stable field and entry order keeps the bytes
//! reproducible.

use super::solve::Policy;
use super::{Mode, PlanError};
use crate::fond::{GCond, GroundedModel};
use serde::{Deserialize, Serialize};
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsDoc {
    pub states_expanded: usize,
    pub policy_size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionDoc {
    pub name: String,
    pub args: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryDoc {
    pub state: Vec<String>,
    pub action: ActionDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolicyDoc {
    pub mode: String,
    pub goal: String,
    pub initial: Vec<String>,
    pub stats: StatsDoc,
    pub entries: Vec<EntryDoc>,
}

fn atom_sexp(a: &crate::fond::GroundAtom) -> String {
    if a.args.is_empty() {
        format!("({})", a.pred)
    } else {
        format!("({} {})", a.pred, a.args.join(" "))
    }
}

fn gcond_text(m: &GroundedModel, c: &GCond) -> String {
    match c {
        GCond::True => "(and)".into(),
        GCond::Basic(i) => atom_sexp(&m.basic_atoms[*i]),
        GCond::Derived(i) => atom_sexp(&m.derived_atoms[*i]),
        GCond::Not(inner) => format!("(not {})", gcond_text(m, inner)),
        GCond::And(cs) => {
            let parts: Vec<String> = cs.iter().map(|c| gcond_text(m, c)).collect();
            format!("(and {})", parts.join(" "))
        }
        GCond::Or(cs) => {
            let parts: Vec<String> = cs.iter().map(|c| gcond_text(m, c)).collect();
            format!("(or {})", parts.join(" "))
        }
    }
}

pub fn policy_to_doc(m: &GroundedModel, policy: &Policy) -> PolicyDoc {
    let entries = policy
        .entries
        .iter()
        .map(|(state, action)| {
            let a = &m.actions[*action];
            EntryDoc {
                state: m.state_atom_names(state),
                action: ActionDoc { name: a.name.clone(), args: a.args.clone() },
            }
        })
        .collect();
    PolicyDoc {
        mode: policy.mode.to_string(),
        goal: gcond_text(m, &m.goal),
        initial: m.state_atom_names(&m.init),
        stats: StatsDoc {
            states_expanded: policy.stats.states_expanded,
            policy_size: policy.stats.policy_size,
        },
        entries,
    }
}

pub fn policy_from_doc(m: &GroundedModel, doc: &PolicyDoc) -> Result<Policy, PlanError> {
    let mode = Mode::from_str(&doc.mode)?;
    let mut entries = std::collections::BTreeMap::new();
    for e in &doc.entries {
        let state = m.state_from_atom_names(&e.state)?;
        let action = m
            .actions
            .iter()
            .position(|a| a.name == e.action.name && a.args == e.action.args)
            .ok_or_else(|| {
                PlanError::UnknownAction(format!("{}({})", e.action.name, e.action.args.join(",")))
            })?;
        entries.insert(state, action);
    }
    Ok(Policy {
        mode,
        entries,
        stats: super::solve::SolverStats {
            states_expanded: doc.stats.states_expanded,
            policy_size: doc.stats.policy_size,
        },
    })
}

impl PolicyDoc {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("policy serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<PolicyDoc, PlanError> {
        serde_json::from_str(text).map_err(|e| PlanError::Json(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::super::solve::{plan, PlanOutcome};
    use super::*;
    use crate::fond::{parse_domain, parse_problem, GroundedModel};

    #[test]
    fn json_round_trip() {
        let d = parse_domain(
            "(define (domain d)
               (:requirements :strips :non-deterministic)
               (:predicates (a) (goal))
               (:action go :parameters () :precondition (and) :effect (oneof (goal) (a)))
               (:action back :parameters () :precondition (a) :effect (not (a))))",
        )
        .unwrap();
        let p = parse_problem("(define (problem p) (:domain d) (:init) (:goal (and (goal))))")
            .unwrap();
        let m = GroundedModel::ground(&d, &p).unwrap();
        let policy = match plan(&m, Mode::StrongCyclic) {
            PlanOutcome::Solved(pi) => pi,
            PlanOutcome::Unsolvable => panic!(),
        };
        let doc = policy_to_doc(&m, &policy);
        let json = doc.to_json();
        let doc2 = PolicyDoc::from_json(&json).unwrap();
        assert_eq!(doc, doc2);
        let policy2 = policy_from_doc(&m, &doc2).unwrap();
        assert_eq!(policy.entries, policy2.entries);
        // byte-stable
        assert_eq!(json, policy_to_doc(&m, &policy2).to_json());
    }
}
