//! Deterministic grid micro-world that executes policies: the environment
//! registry grounds policy symbols to world elements, nondeterministic
//! action outcomes resolve from the seed, runtime fluents key the policy
//! lookup (with the compiler's memory fluents replayed in lock-step), and
//! the induced trace is logged for oracle checking.

mod episode;
mod world;

pub use episode::{run, Episode, EpisodeStatus, SeedStream};
pub use world::{build_registry, runtime_fluents, step, Binding, Cell, GoalMark, Registry, WorldState};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("symbol `{symbol}` unresolvable against the semantic map")]
    Unresolvable { symbol: String },
    #[error("scenario provides no ball to play with")]
    NoBall,
    #[error("no built-in semantics for action `{0}`")]
    UnknownAction(String),
    #[error("action `{action}` has no target to aim at (no goal bound)")]
    NoTarget { action: String },
    #[error("policy action `{action}` violates its precondition at runtime")]
    Inapplicable { action: String },
    #[error("policy has no action for the reached state: {{{state}}}")]
    PolicyMiss { state: String },
    #[error("max_steps must be at least 1")]
    MaxStepsZero,
    #[error(transparent)]
    Eval(#[from] crate::pltl::EvalError),
    #[error("state atom cannot be keyed: {0}")]
    AtomKey(String),
    #[error(transparent)]
    Model(#[from] crate::fond::FondError),
}
