//! Lifted FOND model: typed STRIPS with conditional effects, `oneof`
//! nondeterminism and derived-predicate axioms.

use std::collections::BTreeSet;
use std::fmt;

/// PDDL requirement flags the parser understands. Anything else is rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Requirement {
    Strips,
    Typing,
    NegativePreconditions,
    ConditionalEffects,
    DerivedPredicates,
    NonDeterministic,
}

impl Requirement {
    pub fn parse(s: &str) -> Option<Requirement> {
        match s {
            ":strips" => Some(Requirement::Strips),
            ":typing" => Some(Requirement::Typing),
            ":negative-preconditions" => Some(Requirement::NegativePreconditions),
            ":conditional-effects" => Some(Requirement::ConditionalEffects),
            ":derived-predicates" => Some(Requirement::DerivedPredicates),
            ":non-deterministic" => Some(Requirement::NonDeterministic),
            _ => None,
        }
    }
}

impl fmt::Display for Requirement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Requirement::Strips => ":strips",
            Requirement::Typing => ":typing",
            Requirement::NegativePreconditions => ":negative-preconditions",
            Requirement::ConditionalEffects => ":conditional-effects",
            Requirement::DerivedPredicates => ":derived-predicates",
            Requirement::NonDeterministic => ":non-deterministic",
        };
        write!(f, "{s}")
    }
}

/// A name paired with its type (objects, constants).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TypedName {
    pub name: String,
    pub ty: String,
}

/// A `?variable` parameter paired with its type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypedParam {
    pub var: String,
    pub ty: String,
}

/// Type with its parent; single inheritance rooted at `object`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeDecl {
    pub name: String,
    pub parent: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateDecl {
    pub name: String,
    pub params: Vec<TypedParam>,
}

/// Term in a schema atom: a parameter variable or a constant/object name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "?{v}"),
            Term::Const(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SchemaAtom {
    pub pred: String,
    pub terms: Vec<Term>,
}

impl SchemaAtom {
    pub fn ground(pred: impl Into<String>, args: &[&str]) -> SchemaAtom {
        SchemaAtom {
            pred: pred.into(),
            terms: args.iter().map(|a| Term::Const((*a).to_string())).collect(),
        }
    }
}

/// Boolean condition over schema atoms. `(and)` plays the role of true.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cond {
    True,
    Atom(SchemaAtom),
    Not(Box<Cond>),
    And(Vec<Cond>),
    Or(Vec<Cond>),
}

impl Cond {
    #[allow(clippy::should_implement_trait)]
    pub fn not(c: Cond) -> Cond {
        Cond::Not(Box::new(c))
    }

    /// All atoms referenced, with the nesting parity of negations.
    pub fn atoms_signed(&self) -> Vec<(&SchemaAtom, bool)> {
        let mut out = Vec::new();
        fn walk<'a>(c: &'a Cond, positive: bool, out: &mut Vec<(&'a SchemaAtom, bool)>) {
            match c {
                Cond::True => {}
                Cond::Atom(a) => out.push((a, positive)),
                Cond::Not(inner) => walk(inner, !positive, out),
                Cond::And(cs) | Cond::Or(cs) => {
                    for c in cs {
                        walk(c, positive, out);
                    }
                }
            }
        }
        walk(self, true, &mut out);
        out
    }
}

/// Positive or negative ground-able literal used in effects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Literal {
    pub positive: bool,
    pub atom: SchemaAtom,
}

/// One conditional effect: when the condition holds in the pre-state, the
/// literal is applied. Unconditional effects carry `Cond::True`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CondEffect {
    pub when: Cond,
    pub literal: Literal,
}

impl CondEffect {
    pub fn unconditional(literal: Literal) -> CondEffect {
        CondEffect { when: Cond::True, literal }
    }
}

/// Action schema. `branches` holds the oneof alternatives; a deterministic
/// action has exactly one branch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionDecl {
    pub name: String,
    pub params: Vec<TypedParam>,
    pub precondition: Cond,
    pub branches: Vec<Vec<CondEffect>>,
}

/// Derived-predicate axiom: head predicate defined by a body condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Axiom {
    pub head: PredicateDecl,
    pub body: Cond,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FondDomain {
    pub name: String,
    pub requirements: BTreeSet<Requirement>,
    pub types: Vec<TypeDecl>,
    pub constants: Vec<TypedName>,
    pub predicates: Vec<PredicateDecl>,
    pub axioms: Vec<Axiom>,
    pub actions: Vec<ActionDecl>,
}

impl FondDomain {
    pub fn predicate(&self, name: &str) -> Option<&PredicateDecl> {
        self.predicates.iter().find(|p| p.name == name)
    }

    pub fn axiom_head(&self, name: &str) -> Option<&Axiom> {
        self.axioms.iter().find(|a| a.head.name == name)
    }

    pub fn is_derived(&self, name: &str) -> bool {
        self.axioms.iter().any(|a| a.head.name == name)
    }

    /// All declared type names, including parents and the implicit root.
    pub fn type_names(&self) -> BTreeSet<String> {
        let mut names: BTreeSet<String> = BTreeSet::new();
        names.insert("object".to_string());
        for t in &self.types {
            names.insert(t.name.clone());
            names.insert(t.parent.clone());
        }
        names
    }

    /// Is `sub` equal to or a descendant of `sup`?
    pub fn type_compatible(&self, sub: &str, sup: &str) -> bool {
        if sup == "object" || sub == sup {
            return true;
        }
        let mut current = sub.to_string();
        // parent chains are acyclic after validation; bound the walk anyway
        for _ in 0..=self.types.len() {
            match self.types.iter().find(|t| t.name == current) {
                Some(t) => {
                    if t.parent == sup {
                        return true;
                    }
                    current = t.parent.clone();
                }
                None => return false,
            }
        }
        false
    }
}

/// Ground atom of a problem init state.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct InitAtom {
    pub pred: String,
    pub args: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FondProblem {
    pub name: String,
    pub domain: String,
    pub objects: Vec<TypedName>,
    pub init: Vec<InitAtom>,
    pub goal: Cond,
}
