//! Strong and strong-cyclic FOND policy planning over a grounded model,
//! with an adversarial verifier that replays policies against the temporal
//! oracle, JSON serialization and a DOT export of the policy graph.

mod dot;
mod policy;
mod solve;
mod verify;

pub use dot::export_dot;
pub use policy::{policy_from_doc, policy_to_doc, ActionDoc, EntryDoc, PolicyDoc, StatsDoc};
pub use solve::{plan, reachable_state_count, PlanOutcome, Policy, SolverStats};
pub use verify::{verify_policy, Verdict};

use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Strong,
    StrongCyclic,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Strong => write!(f, "strong"),
            Mode::StrongCyclic => write!(f, "strong-cyclic"),
        }
    }
}

impl FromStr for Mode {
    type Err = PlanError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "strong" => Ok(Mode::Strong),
            "strong-cyclic" => Ok(Mode::StrongCyclic),
            _ => Err(PlanError::BadMode(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PlanError {
    #[error("unknown mode `{0}` (use strong or strong-cyclic)")]
    BadMode(String),
    #[error("horizon must be at least 1")]
    BadHorizon,
    #[error("policy references unknown action `{0}`")]
    UnknownAction(String),
    #[error("atom `{atom}` cannot appear in a trace: {reason}")]
    AtomName { atom: String, reason: String },
    #[error(transparent)]
    Model(#[from] crate::fond::FondError),
    #[error(transparent)]
    Eval(#[from] crate::pltl::EvalError),
    #[error("policy file is not valid JSON: {0}")]
    Json(String),
}
