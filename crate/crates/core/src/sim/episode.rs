//! Episode loop: runtime fluents feed the policy lookup, the compiler's
//! memory fluents are replayed in lock-step through the single-step
//! evaluator so state fingerprints match the planner's, and the world trace
//! is logged in the trace text format with action/branch annotations.

use super::world::{build_registry, runtime_fluents, step, WorldState, DEFAULT_CELL_SIZE};
use super::SimError;
use crate::compile::CompilationMap;
use crate::fond::GroundedModel;
use crate::pltl::{eval_trace, Evaluator, Formula, Trace};
use crate::plan::Policy;
use crate::semantic::{Scenario, SemanticMap};
use std::fmt::Write;

/// How an episode ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpisodeStatus {
    GoalReached,
    MaxSteps,
}

impl std::fmt::Display for EpisodeStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EpisodeStatus::GoalReached => write!(f, "goal-reached"),
            EpisodeStatus::MaxSteps => write!(f, "max-steps"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Episode {
    pub trace: Trace,
    pub verdict: bool,
    pub status: EpisodeStatus,
    pub steps: usize,
    pub seed: u64,
    /// Trace text with `# action` / `# branch` annotations.
    pub log: String,
}

/// Deterministic resolver for oneof branches: the seed is read as a little
/// endian sequence of digits, one digit per nondeterministic choice, so
/// enumerating seeds enumerates outcome combinations.
#[derive(Debug, Clone)]
pub struct SeedStream {
    remaining: u64,
}

impl SeedStream {
    pub fn new(seed: u64) -> SeedStream {
        SeedStream { remaining: seed }
    }

    pub fn choice(&mut self, n: usize) -> usize {
        if n <= 1 {
            return 0;
        }
        let c = (self.remaining % n as u64) as usize;
        self.remaining /= n as u64;
        c
    }
}

/// Execute a policy in the world induced by the scenario and map.
#[allow(clippy::too_many_arguments)]
pub fn run(
    m: &GroundedModel,
    policy: &Policy,
    map: &CompilationMap,
    goal: &Formula,
    sc: &Scenario,
    sm: &SemanticMap,
    seed: u64,
    max_steps: usize,
) -> Result<Episode, SimError> {
    if max_steps == 0 {
        return Err(SimError::MaxStepsZero);
    }
    let mut world = WorldState::from_scene(sc, sm, DEFAULT_CELL_SIZE)?;
    let registry = build_registry(policy, m, sm, &world)?;
    let evaluator = Evaluator::new(goal);
    let mut valuation = evaluator.initial();
    let mut stream = SeedStream::new(seed);
    let mut trace = Trace::new();
    let mut log = String::new();
    let _ = writeln!(log, "# goal: {goal}");
    let _ = writeln!(log, "# seed: {seed}");
    let status;
    loop {
        let fluents = runtime_fluents(&world, &registry);
        let _ = writeln!(log, "{fluents}");
        trace.push(fluents.clone());
        let snapshot = evaluator.step(&valuation, &fluents)?;
        if snapshot.goal_truth() {
            status = EpisodeStatus::GoalReached;
            break;
        }
        if trace.len() > max_steps {
            status = EpisodeStatus::MaxSteps;
            break;
        }
        // fingerprint = world fluents plus the memory fluents entering this
        // instant, exactly the planner's basic state
        let mut names: Vec<String> = fluents.iter().map(|a| a.to_string()).collect();
        for (cell_index, (_, mem_name)) in map.memory.iter().enumerate() {
            if valuation.get(cell_index).unwrap_or(false) {
                names.push(mem_name.clone());
            }
        }
        let key = m.state_from_atom_names(&names).map_err(|e| SimError::AtomKey(e.to_string()))?;
        let action_id = policy
            .action_for(&key)
            .ok_or_else(|| SimError::PolicyMiss { state: names.join(", ") })?;
        let action = &m.actions[action_id];
        let evaluated = m.evaluate(&key);
        if !action.pre.eval(&evaluated) {
            return Err(SimError::Inapplicable { action: action.display_name() });
        }
        let (next_world, branch) = step(&world, action, &registry, &mut stream)?;
        let _ = writeln!(log, "# action {}", action.display_name());
        let _ = writeln!(log, "# branch {branch}");
        world = next_world;
        valuation = snapshot.next;
    }
    let verdict = eval_trace(goal, &trace)?;
    let _ = writeln!(log, "# verdict: {verdict}");
    Ok(Episode { steps: trace.len() - 1, trace, verdict, status, seed, log })
}
