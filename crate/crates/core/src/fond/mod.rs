//! FOND planning model: typed STRIPS plus conditional effects, `oneof`
//! nondeterminism and stratified derived-predicate axioms, with a parser and
//! a canonical printer for the supported PDDL subset and an explicit grounder.

mod ast;
mod ground;
mod parser;
mod printer;
mod validate;

pub use ast::{
    ActionDecl, Axiom, Cond, CondEffect, FondDomain, FondProblem, InitAtom, Literal,
    PredicateDecl, Requirement, SchemaAtom, Term, TypeDecl, TypedName, TypedParam,
};
pub use ground::{
    Evaluated, GCond, GroundAction, GroundAtom, GroundAxiom, GroundEffect, GroundedModel, State,
};
pub use parser::{parse_domain, parse_problem};
pub use printer::{print_domain, print_problem};
pub use validate::{validate_domain, validate_problem};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FondError {
    #[error("line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("undeclared {kind} `{name}` in {context}")]
    Undeclared { kind: String, name: String, context: String },
    #[error("predicate `{pred}` used with {got} arguments, declared with {expected}")]
    ArityMismatch { pred: String, expected: usize, got: usize },
    #[error("`{what}` has type `{ty}`, expected `{expected}`")]
    TypeMismatch { what: String, ty: String, expected: String },
    #[error("duplicate {kind} `{name}`")]
    Duplicate { kind: String, name: String },
    #[error("type `{name}` participates in an inheritance cycle")]
    TypeCycle { name: String },
    #[error("derived predicate `{pred}` appears in an effect of action `{action}`")]
    DerivedInEffect { pred: String, action: String },
    #[error("derived predicate `{pred}` appears in the initial state")]
    DerivedInInit { pred: String },
    #[error("axioms are not stratified (cycle through negation among: {involved})")]
    NotStratified { involved: String },
    #[error("construct `{construct}` requires `{requirement}`")]
    MissingRequirement { requirement: String, construct: String },
    #[error("problem is for domain `{got}`, expected `{expected}`")]
    DomainMismatch { expected: String, got: String },
    #[error("action `{action}` is not applicable in this state")]
    Inapplicable { action: String },
}
