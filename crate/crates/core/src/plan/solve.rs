//! Explicit-state policy synthesis.
//!
//! Strong mode runs the backward fixpoint over the AND-OR graph: a state is
//! won when some applicable action sends *every* oneof outcome into the won
//! set; states added in fixpoint round `k` pick their action against the
//! round `k-1` set, which yields an acyclic progress measure for free.
//!
//! Strong-cyclic mode runs the classic prune-and-reach fixpoint over
//! state-action pairs: drop pairs with an outcome outside the candidate set,
//! drop pairs from which the goal is unreachable through candidates, repeat
//! until stable. The surviving pair with the smallest backward layer (ties:
//! lowest action index) becomes the policy choice, so from every policy
//! state a goal path through policy actions remains.

use super::Mode;
use crate::fond::{Evaluated, GroundedModel, State};
use std::collections::{BTreeMap, BTreeSet, VecDeque};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverStats {
    /// Reachable evaluated states enumerated during search.
    pub states_expanded: usize,
    /// Mapped states in the final policy.
    pub policy_size: usize,
}

/// Partial mapping from basic-state fingerprints to ground action indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Policy {
    pub mode: Mode,
    pub entries: BTreeMap<State, usize>,
    pub stats: SolverStats,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlanOutcome {
    Solved(Policy),
    Unsolvable,
}

struct Graph {
    states: Vec<Evaluated>,
    /// Per state: (action index, successor state indices per branch),
    /// ascending action index.
    edges: Vec<Vec<(usize, Vec<usize>)>>,
    goal: Vec<bool>,
}

fn explore(m: &GroundedModel) -> Graph {
    let init = m.initial_state();
    let mut states = vec![init.clone()];
    let mut index = BTreeMap::new();
    index.insert(init.basic.clone(), 0usize);
    let mut edges: Vec<Vec<(usize, Vec<usize>)>> = Vec::new();
    let mut goal = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(s) = queue.pop_front() {
        debug_assert_eq!(s, goal.len(), "pop order matches insertion order");
        let st = states[s].clone();
        goal.push(m.is_goal(&st));
        let mut out = Vec::new();
        // goal states are absorbing: execution stops there
        if !goal[s] {
            for a in m.applicable(&st) {
                let succs = m.successors(&st, a).expect("applicable action");
                let mut ids = Vec::with_capacity(succs.len());
                for succ in succs {
                    let id = match index.get(&succ.basic) {
                        Some(id) => *id,
                        None => {
                            let id = states.len();
                            index.insert(succ.basic.clone(), id);
                            states.push(succ);
                            queue.push_back(id);
                            id
                        }
                    };
                    ids.push(id);
                }
                out.push((a, ids));
            }
        }
        edges.push(out);
    }
    Graph { states, edges, goal }
}

/// Backward layers over surviving pairs: a pair's layer is one more than
/// the smallest layer among the states some outcome can land in, with goal
/// states at layer 0. Pairs that never get a finite layer cannot reach the
/// goal through the candidate set.
fn backward_layers(g: &Graph, alive: &[BTreeSet<usize>]) -> BTreeMap<(usize, usize), usize> {
    const INF: usize = usize::MAX;
    let n = g.states.len();
    let mut state_layer: Vec<usize> = g.goal.iter().map(|&is| if is { 0 } else { INF }).collect();
    let mut pair_layer: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    loop {
        let mut changed = false;
        for s in 0..n {
            for (a, succs) in g.edges[s].iter().filter(|(a, _)| alive[s].contains(a)) {
                let best = succs.iter().map(|t| state_layer[*t]).min().unwrap_or(INF);
                if best == INF {
                    continue;
                }
                let cand = best + 1;
                let cur = pair_layer.get(&(s, *a)).copied().unwrap_or(INF);
                if cand < cur {
                    pair_layer.insert((s, *a), cand);
                    changed = true;
                }
                if !g.goal[s] && cand < state_layer[s] {
                    state_layer[s] = cand;
                    changed = true;
                }
            }
        }
        if !changed {
            return pair_layer;
        }
    }
}

fn closure_from_init(g: &Graph, choice: &[Option<usize>]) -> BTreeMap<State, usize> {
    let mut entries = BTreeMap::new();
    let mut seen = vec![false; g.states.len()];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(s) = queue.pop_front() {
        if g.goal[s] {
            continue;
        }
        let a = choice[s].expect("winning non-goal state has a choice");
        entries.insert(g.states[s].basic.clone(), a);
        let succs = g.edges[s].iter().find(|(act, _)| *act == a).map(|(_, t)| t).unwrap();
        for &t in succs {
            if !seen[t] {
                seen[t] = true;
                queue.push_back(t);
            }
        }
    }
    entries
}

fn solve_strong(g: &Graph) -> Option<BTreeMap<State, usize>> {
    let n = g.states.len();
    let mut won = g.goal.clone();
    let mut choice: Vec<Option<usize>> = vec![None; n];
    loop {
        let mut added: Vec<(usize, usize)> = Vec::new();
        for s in 0..n {
            if won[s] {
                continue;
            }
            for (a, succs) in &g.edges[s] {
                if succs.iter().all(|t| won[*t]) {
                    added.push((s, *a));
                    break;
                }
            }
        }
        if added.is_empty() {
            break;
        }
        for (s, a) in added {
            won[s] = true;
            choice[s] = Some(a);
        }
    }
    if won[0] {
        Some(closure_from_init(g, &choice))
    } else {
        None
    }
}

fn solve_strong_cyclic(g: &Graph) -> Option<BTreeMap<State, usize>> {
    let n = g.states.len();
    let mut alive: Vec<BTreeSet<usize>> = g
        .edges
        .iter()
        .map(|out| out.iter().map(|(a, _)| *a).collect::<BTreeSet<usize>>())
        .collect();
    loop {
        let mut changed = false;
        // prune outgoing: every outcome must stay inside goal or candidate states
        loop {
            let in_candidates: Vec<bool> =
                (0..n).map(|s| g.goal[s] || !alive[s].is_empty()).collect();
            let mut removed = false;
            for (s, actions) in alive.iter_mut().enumerate() {
                let doomed: Vec<usize> = g.edges[s]
                    .iter()
                    .filter(|(a, succs)| {
                        actions.contains(a) && succs.iter().any(|t| !in_candidates[*t])
                    })
                    .map(|(a, _)| *a)
                    .collect();
                for a in doomed {
                    actions.remove(&a);
                    removed = true;
                }
            }
            if !removed {
                break;
            }
            changed = true;
        }
        // prune unconnected: keep pairs with a backward layer
        let layers = backward_layers(g, &alive);
        for (s, actions) in alive.iter_mut().enumerate() {
            let unlaid: Vec<usize> =
                actions.iter().copied().filter(|a| !layers.contains_key(&(s, *a))).collect();
            for a in unlaid {
                actions.remove(&a);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    if !g.goal[0] && alive[0].is_empty() {
        return None;
    }
    let layers = backward_layers(g, &alive);
    let choice: Vec<Option<usize>> = (0..n)
        .map(|s| {
            alive[s]
                .iter()
                .copied()
                .min_by_key(|a| (layers.get(&(s, *a)).copied().unwrap_or(usize::MAX), *a))
        })
        .collect();
    Some(closure_from_init(g, &choice))
}

/// Compute a policy for the model, or report unsolvability.
pub fn plan(m: &GroundedModel, mode: Mode) -> PlanOutcome {
    let g = explore(m);
    let entries = match mode {
        Mode::Strong => solve_strong(&g),
        Mode::StrongCyclic => solve_strong_cyclic(&g),
    };
    match entries {
        Some(entries) => {
            let stats =
                SolverStats { states_expanded: g.states.len(), policy_size: entries.len() };
            PlanOutcome::Solved(Policy { mode, entries, stats })
        }
        None => PlanOutcome::Unsolvable,
    }
}

impl Policy {
    /// Action chosen for a basic-state fingerprint.
    pub fn action_for(&self, basic: &State) -> Option<usize> {
        self.entries.get(basic).copied()
    }

    /// Distinct ground actions used by the policy.
    pub fn action_set(&self) -> BTreeSet<usize> {
        self.entries.values().copied().collect()
    }
}

/// Reachable evaluated states of the model (used for verification horizons).
pub fn reachable_state_count(m: &GroundedModel) -> usize {
    explore(m).states.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fond::{parse_domain, parse_problem};

    fn model(domain: &str, problem: &str) -> GroundedModel {
        let d = parse_domain(domain).unwrap();
        let p = parse_problem(problem).unwrap();
        GroundedModel::ground(&d, &p).unwrap()
    }

    const CHAIN: &str = "\
(define (domain chain)
  (:requirements :strips :non-deterministic)
  (:predicates (a) (b) (c) (goal))
  (:action step1 :parameters () :precondition (and) :effect (a))
  (:action step2 :parameters () :precondition (a) :effect (goal))
  (:action flaky :parameters () :precondition (and) :effect (oneof (goal) (b))))";

    #[test]
    fn strong_plan_prefers_certain_route() {
        let m = model(
            CHAIN,
            "(define (problem p) (:domain chain) (:init) (:goal (and (goal))))",
        );
        match plan(&m, Mode::Strong) {
            PlanOutcome::Solved(pi) => {
                // flaky can strand us in {b}; the strong plan goes step1 then step2
                let init = m.initial_state();
                let a = pi.action_for(&init.basic).unwrap();
                assert_eq!(m.actions[a].name, "step1");
                assert_eq!(pi.entries.len(), 2);
            }
            PlanOutcome::Unsolvable => panic!("solvable"),
        }
    }

    #[test]
    fn goal_in_init_gives_empty_policy() {
        let m = model(
            CHAIN,
            "(define (problem p) (:domain chain) (:init (goal)) (:goal (and (goal))))",
        );
        for mode in [Mode::Strong, Mode::StrongCyclic] {
            match plan(&m, mode) {
                PlanOutcome::Solved(pi) => assert!(pi.entries.is_empty()),
                PlanOutcome::Unsolvable => panic!("trivially solvable"),
            }
        }
    }

    #[test]
    fn unreachable_goal_is_unsolvable() {
        // c appears in no effect and not in the initial state
        let m = model(
            CHAIN,
            "(define (problem p) (:domain chain) (:init) (:goal (and (c))))",
        );
        assert_eq!(plan(&m, Mode::Strong), PlanOutcome::Unsolvable);
        assert_eq!(plan(&m, Mode::StrongCyclic), PlanOutcome::Unsolvable);
    }

    const RETRY: &str = "\
(define (domain retry)
  (:requirements :strips :non-deterministic)
  (:predicates (goal) (lost))
  (:action gamble :parameters () :precondition (and) :effect (oneof (goal) (and)))
  (:action burn :parameters () :precondition (and) :effect (lost)))";

    #[test]
    fn cyclic_solves_what_strong_cannot() {
        let m = model(
            RETRY,
            "(define (problem p) (:domain retry) (:init) (:goal (and (goal))))",
        );
        assert_eq!(plan(&m, Mode::Strong), PlanOutcome::Unsolvable);
        match plan(&m, Mode::StrongCyclic) {
            PlanOutcome::Solved(pi) => {
                let init = m.initial_state();
                let a = pi.action_for(&init.basic).unwrap();
                assert_eq!(m.actions[a].name, "gamble");
            }
            PlanOutcome::Unsolvable => panic!("cyclically solvable"),
        }
    }

    #[test]
    fn strong_implies_strong_cyclic() {
        for problem in [
            "(define (problem p) (:domain chain) (:init) (:goal (and (goal))))",
            "(define (problem p) (:domain chain) (:init (a)) (:goal (and (goal))))",
        ] {
            let m = model(CHAIN, problem);
            if matches!(plan(&m, Mode::Strong), PlanOutcome::Solved(_)) {
                assert!(matches!(plan(&m, Mode::StrongCyclic), PlanOutcome::Solved(_)));
            }
        }
    }

    #[test]
    fn determinism_same_input_same_policy() {
        let m = model(
            CHAIN,
            "(define (problem p) (:domain chain) (:init) (:goal (and (goal))))",
        );
        let a = plan(&m, Mode::StrongCyclic);
        let b = plan(&m, Mode::StrongCyclic);
        assert_eq!(a, b);
    }

    #[test]
    fn cyclic_extraction_avoids_live_loops() {
        // looper keeps the agent in place forever; the extraction must pick
        // the branching action whose layer actually reaches the goal
        let text = "\
(define (domain d)
  (:requirements :strips :non-deterministic)
  (:predicates (goal))
  (:action looper :parameters () :precondition (and) :effect (and))
  (:action attempt :parameters () :precondition (and) :effect (oneof (goal) (and))))";
        let m = model(text, "(define (problem p) (:domain d) (:init) (:goal (and (goal))))");
        match plan(&m, Mode::StrongCyclic) {
            PlanOutcome::Solved(pi) => {
                let a = pi.action_for(&m.initial_state().basic).unwrap();
                assert_eq!(m.actions[a].name, "attempt");
            }
            PlanOutcome::Unsolvable => panic!("solvable"),
        }
    }
}
