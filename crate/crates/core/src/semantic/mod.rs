//! Sensory and conceptual layers at desk scale: scenario files stand in for
//! the perceptors, the ontology lifts ordinary objects to canonical concepts,
//! and the result is a semantic map (reference frame, geometric elements,
//! describing predicates) with a count-based comparison metric.

mod map;
mod ontology;
mod scenario;

pub use map::{conceptualize, deduced_predicates, delta, DeltaWeights, Instance, SemanticMap};
pub use ontology::{Ontology, PairRule};
pub use scenario::{load_scenario, perceive, PerceptSet, Scenario, WorldObject, AGENT_ID};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SemanticError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown kind `{kind}` (line {line})")]
    UnknownKind { kind: String, line: usize },
    #[error("duplicate object id `{id}` (line {line})")]
    DuplicateId { id: String, line: usize },
    #[error("malformed pose on line {line}: {msg}")]
    MalformedPose { line: usize, msg: String },
    #[error("IsA graph has a cycle through `{concept}`")]
    IsaCycle { concept: String },
    #[error("kind `{kind}` has more than one direct IsA target")]
    AmbiguousIsa { kind: String },
    #[error("pair rule for `{whole}` needs 0 < min < max, got min={min} max={max}")]
    BadPairWindow { whole: String, min: f64, max: f64 },
    #[error("dropout must lie in [0, 1), got {0}")]
    BadDropout(f64),
    #[error("delta weights must be non-negative and not both zero")]
    BadWeights,
    #[error("reference frames `{a}` and `{b}` do not coincide")]
    FrameMismatch { a: String, b: String },
    #[error("predicate `{atom}` is outside the planner vocabulary")]
    OutsideUniverse { atom: String },
    #[error("invalid identifier: {0}")]
    Ident(#[from] crate::pltl::InvalidIdent),
}
