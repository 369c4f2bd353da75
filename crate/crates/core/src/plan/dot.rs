//! Policy graph as DOT: rectangular state nodes labeled with their true
//! fluents, action edges, oneof siblings sharing a source. Goal nodes get a
//! double border. Node order follows the state ordering, so output bytes are
//! stable.

use super::solve::Policy;
use crate::fond::{GroundedModel, State};
use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write;

pub fn export_dot(m: &GroundedModel, policy: &Policy) -> String {
    // collect the policy-reachable states (mapped states plus outcomes)
    let init = m.initial_state();
    let mut seen: BTreeMap<State, ()> = BTreeMap::new();
    seen.insert(init.basic.clone(), ());
    let mut queue = VecDeque::from([init.clone()]);
    let mut arrows: Vec<(State, usize, usize, State)> = Vec::new();
    while let Some(st) = queue.pop_front() {
        if m.is_goal(&st) {
            continue;
        }
        let Some(action) = policy.action_for(&st.basic) else { continue };
        if !m.actions[action].pre.eval(&st) {
            continue;
        }
        let succs = m.successors(&st, action).expect("applicable");
        for (branch, succ) in succs.into_iter().enumerate() {
            arrows.push((st.basic.clone(), action, branch, succ.basic.clone()));
            if seen.insert(succ.basic.clone(), ()).is_none() {
                queue.push_back(succ);
            }
        }
    }
    let ids: BTreeMap<&State, usize> =
        seen.keys().enumerate().map(|(i, s)| (s, i)).collect();

    let mut out = String::new();
    let _ = writeln!(out, "digraph policy {{");
    let _ = writeln!(out, "  rankdir=LR;");
    let _ = writeln!(out, "  node [shape=box];");
    for (state, id) in &ids {
        let atoms = m.state_atom_names(state);
        let label = if atoms.is_empty() { "(empty)".to_string() } else { atoms.join("\\n") };
        let evaluated = m.evaluate(state);
        let goal_attr = if m.is_goal(&evaluated) { ", peripheries=2" } else { "" };
        let _ = writeln!(out, "  s{id} [label=\"{label}\"{goal_attr}];");
    }
    arrows.sort_by(|a, b| {
        (ids[&a.0], a.1, a.2, ids[&a.3]).cmp(&(ids[&b.0], b.1, b.2, ids[&b.3]))
    });
    for (src, action, branch, dst) in &arrows {
        let a = &m.actions[*action];
        let label = if a.branches.len() > 1 {
            format!("{} #{branch}", a.display_name())
        } else {
            a.display_name()
        };
        let _ = writeln!(out, "  s{} -> s{} [label=\"{label}\"];", ids[src], ids[dst]);
    }
    let _ = writeln!(out, "}}");
    out
}

#[cfg(test)]
mod tests {
    use super::super::solve::{plan, PlanOutcome};
    use super::*;
    use crate::fond::{parse_domain, parse_problem};
    use crate::plan::Mode;

    #[test]
    fn empty_policy_single_goal_node() {
        let d = parse_domain(
            "(define (domain d) (:requirements :strips) (:predicates (g))
               (:action a :parameters () :precondition (and) :effect (g)))",
        )
        .unwrap();
        let p =
            parse_problem("(define (problem p) (:domain d) (:init (g)) (:goal (and (g))))").unwrap();
        let m = GroundedModel::ground(&d, &p).unwrap();
        let pi = match plan(&m, Mode::Strong) {
            PlanOutcome::Solved(pi) => pi,
            PlanOutcome::Unsolvable => panic!(),
        };
        let dot = export_dot(&m, &pi);
        assert_eq!(dot.matches("shape=box").count(), 1);
        assert_eq!(dot.matches("s0 [").count(), 1);
        assert!(dot.contains("peripheries=2"));
        assert!(!dot.contains("->"));
    }

    #[test]
    fn oneof_siblings_share_source() {
        let d = parse_domain(
            "(define (domain d) (:requirements :strips :non-deterministic)
               (:predicates (g) (x))
               (:action try :parameters () :precondition (and) :effect (oneof (g) (x)))
               (:action fix :parameters () :precondition (x) :effect (and (g) (not (x)))))",
        )
        .unwrap();
        let p =
            parse_problem("(define (problem p) (:domain d) (:init) (:goal (and (g))))").unwrap();
        let m = GroundedModel::ground(&d, &p).unwrap();
        let pi = match plan(&m, Mode::StrongCyclic) {
            PlanOutcome::Solved(pi) => pi,
            PlanOutcome::Unsolvable => panic!(),
        };
        let dot = export_dot(&m, &pi);
        assert!(dot.contains("try #0"));
        assert!(dot.contains("try #1"));
        // deterministic output
        assert_eq!(dot, export_dot(&m, &pi));
    }
}
