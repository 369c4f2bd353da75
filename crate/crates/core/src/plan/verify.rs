//! Adversarial policy verification, independent of the solver.
//!
//! The verifier walks the policy from the initial state enumerating every
//! oneof resolution and checks each finished branch's trace against the
//! temporal oracle. Strong policies must close every branch within the
//! horizon; strong-cyclic policies must additionally keep a goal path open
//! from every reachable state (the fairness assumption), while branches the
//! horizon cuts off are not failures.

use super::solve::Policy;
use super::{Mode, PlanError};
use crate::fond::{Evaluated, GroundedModel};
use crate::pltl::{eval_trace, Assignment, Formula, Trace};
use std::collections::{BTreeMap, VecDeque};

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Valid,
    CounterExample { reason: String, trace: Trace },
}

struct Checker<'a> {
    m: &'a GroundedModel,
    policy: &'a Policy,
    goal: &'a Formula,
    horizon: usize,
    path: Vec<Assignment>,
}

impl<'a> Checker<'a> {
    fn assignment(&self, st: &Evaluated) -> Result<Assignment, PlanError> {
        self.m.to_assignment(&st.basic).map_err(|e| PlanError::AtomName {
            atom: e.0.clone(),
            reason: "not a functional-syntax identifier".into(),
        })
    }

    fn trace_here(&self) -> Trace {
        self.path.iter().cloned().collect()
    }

    fn fail(&self, reason: impl Into<String>) -> Verdict {
        Verdict::CounterExample { reason: reason.into(), trace: self.trace_here() }
    }

    /// Depth-first enumeration of all outcome resolutions.
    fn walk(&mut self, st: &Evaluated, depth: usize) -> Result<Option<Verdict>, PlanError> {
        self.path.push(self.assignment(st)?);
        let out = self.node(st, depth)?;
        self.path.pop();
        Ok(out)
    }

    fn node(&mut self, st: &Evaluated, depth: usize) -> Result<Option<Verdict>, PlanError> {
        if self.m.is_goal(st) {
            let trace = self.trace_here();
            return if eval_trace(self.goal, &trace)? {
                Ok(None)
            } else {
                Ok(Some(self.fail("goal state reached but the trace violates the formula")))
            };
        }
        if depth == self.horizon {
            return match self.policy.mode {
                Mode::Strong => Ok(Some(self.fail("horizon exceeded before reaching the goal"))),
                // cut off by the bound, not a failure under fairness
                Mode::StrongCyclic => Ok(None),
            };
        }
        let action = match self.policy.action_for(&st.basic) {
            Some(a) => a,
            None => return Ok(Some(self.fail("reachable state is not mapped by the policy"))),
        };
        if !self.m.actions[action].pre.eval(st) {
            return Ok(Some(
                self.fail(format!(
                    "policy action `{}` is not applicable",
                    self.m.actions[action].display_name()
                )),
            ));
        }
        for succ in self.m.successors(st, action)? {
            if let Some(v) = self.walk(&succ, depth + 1)? {
                return Ok(Some(v));
            }
        }
        Ok(None)
    }
}

/// Every-cycle-keeps-a-goal-path check for strong-cyclic policies: over the
/// graph induced by the policy, every reachable state must reach a goal.
fn goal_path_check(m: &GroundedModel, policy: &Policy) -> Result<Option<Verdict>, PlanError> {
    let init = m.initial_state();
    let mut states: Vec<Evaluated> = vec![init.clone()];
    let mut index: BTreeMap<crate::fond::State, usize> = BTreeMap::new();
    index.insert(init.basic.clone(), 0);
    let mut parent: Vec<Option<usize>> = vec![None];
    let mut edges: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(s) = queue.pop_front() {
        let st = states[s].clone();
        let mut out = Vec::new();
        if !m.is_goal(&st) {
            if let Some(a) = policy.action_for(&st.basic) {
                if m.actions[a].pre.eval(&st) {
                    for succ in m.successors(&st, a)? {
                        let id = match index.get(&succ.basic) {
                            Some(id) => *id,
                            None => {
                                let id = states.len();
                                index.insert(succ.basic.clone(), id);
                                states.push(succ);
                                parent.push(Some(s));
                                queue.push_back(id);
                                id
                            }
                        };
                        out.push(id);
                    }
                }
            }
        }
        edges.push(out);
    }
    // backward reachability from the goal states through policy edges
    let n = states.len();
    let mut reaches = vec![false; n];
    for (s, st) in states.iter().enumerate() {
        if m.is_goal(st) {
            reaches[s] = true;
        }
    }
    loop {
        let mut changed = false;
        for s in 0..n {
            if !reaches[s] && edges[s].iter().any(|t| reaches[*t]) {
                reaches[s] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    if let Some(s) = reaches.iter().position(|r| !r) {
        // reconstruct the path into the dead region for the report
        let mut chain = vec![s];
        let mut cur = s;
        while let Some(p) = parent[cur] {
            chain.push(p);
            cur = p;
        }
        chain.reverse();
        let mut trace = Trace::new();
        for i in chain {
            trace.push(m.to_assignment(&states[i].basic).map_err(|e| PlanError::AtomName {
                atom: e.0.clone(),
                reason: "not a functional-syntax identifier".into(),
            })?);
        }
        return Ok(Some(Verdict::CounterExample {
            reason: "policy can reach a state with no remaining goal path".into(),
            trace,
        }));
    }
    Ok(None)
}

/// Exhaustively check a policy against the model and the temporal goal.
pub fn verify_policy(
    m: &GroundedModel,
    policy: &Policy,
    goal: &Formula,
    horizon: usize,
) -> Result<Verdict, PlanError> {
    if horizon == 0 {
        return Err(PlanError::BadHorizon);
    }
    if policy.mode == Mode::StrongCyclic {
        if let Some(v) = goal_path_check(m, policy)? {
            return Ok(v);
        }
    }
    let mut checker = Checker { m, policy, goal, horizon, path: Vec::new() };
    let init = m.initial_state();
    Ok(checker.walk(&init, 0)?.unwrap_or(Verdict::Valid))
}

#[cfg(test)]
mod tests {
    use super::super::solve::{plan, PlanOutcome};
    use super::*;
    use crate::fond::{parse_domain, parse_problem};
    use crate::pltl::parse_formula;

    fn model(domain: &str, problem: &str) -> GroundedModel {
        let d = parse_domain(domain).unwrap();
        let p = parse_problem(problem).unwrap();
        GroundedModel::ground(&d, &p).unwrap()
    }

    const RETRY: &str = "\
(define (domain retry)
  (:requirements :strips :non-deterministic)
  (:predicates (goal))
  (:action gamble :parameters () :precondition (and) :effect (oneof (goal) (and))))";

    #[test]
    fn validates_solver_output() {
        let m = model(
            RETRY,
            "(define (problem p) (:domain retry) (:init) (:goal (and (goal))))",
        );
        let pi = match plan(&m, Mode::StrongCyclic) {
            PlanOutcome::Solved(pi) => pi,
            PlanOutcome::Unsolvable => panic!(),
        };
        let g = parse_formula("O(goal)").unwrap();
        assert_eq!(verify_policy(&m, &pi, &g, 8).unwrap(), Verdict::Valid);
    }

    #[test]
    fn corrupted_policy_yields_counterexample() {
        let m = model(
            RETRY,
            "(define (problem p) (:domain retry) (:init) (:goal (and (goal))))",
        );
        let mut pi = match plan(&m, Mode::StrongCyclic) {
            PlanOutcome::Solved(pi) => pi,
            PlanOutcome::Unsolvable => panic!(),
        };
        pi.entries.clear();
        let g = parse_formula("O(goal)").unwrap();
        assert!(matches!(
            verify_policy(&m, &pi, &g, 8).unwrap(),
            Verdict::CounterExample { .. }
        ));
    }

    #[test]
    fn strong_horizon_overrun_reported() {
        // deterministic two-step chain with a one-step horizon
        let m = model(
            "(define (domain d)
               (:requirements :strips)
               (:predicates (a) (goal))
               (:action s1 :parameters () :precondition (and) :effect (a))
               (:action s2 :parameters () :precondition (a) :effect (goal)))",
            "(define (problem p) (:domain d) (:init) (:goal (and (goal))))",
        );
        let pi = match plan(&m, Mode::Strong) {
            PlanOutcome::Solved(pi) => pi,
            PlanOutcome::Unsolvable => panic!(),
        };
        let g = parse_formula("O(goal)").unwrap();
        assert_eq!(verify_policy(&m, &pi, &g, 4).unwrap(), Verdict::Valid);
        assert!(matches!(
            verify_policy(&m, &pi, &g, 1).unwrap(),
            Verdict::CounterExample { .. }
        ));
        assert!(verify_policy(&m, &pi, &g, 0).is_err());
    }

    #[test]
    fn temporal_violation_caught_even_at_goal() {
        // reachability goal holds but the temporal formula demands H(clean)
        let m = model(
            "(define (domain d)
               (:requirements :strips)
               (:predicates (clean) (goal))
               (:action s :parameters () :precondition (and) :effect (and (goal) (not (clean)))))",
            "(define (problem p) (:domain d) (:init (clean)) (:goal (and (goal))))",
        );
        let pi = match plan(&m, Mode::Strong) {
            PlanOutcome::Solved(pi) => pi,
            PlanOutcome::Unsolvable => panic!(),
        };
        let ok = parse_formula("O(goal)").unwrap();
        assert_eq!(verify_policy(&m, &pi, &ok, 4).unwrap(), Verdict::Valid);
        let bad = parse_formula("H(clean)").unwrap();
        assert!(matches!(
            verify_policy(&m, &pi, &bad, 4).unwrap(),
            Verdict::CounterExample { .. }
        ));
    }
}
