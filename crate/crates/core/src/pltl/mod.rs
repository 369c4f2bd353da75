//! Pure-past linear temporal logic (PPLTL) on finite traces.
//!
//! Formulas are built from ground atoms, the boolean connectives and the past
//! operators `Y` (yesterday), `WY` (weak yesterday), `O` (once),
//! `H` (historically) and `S` (since). A formula is evaluated at the *final*
//! instant of a finite trace. Evaluation is incremental: a fixed set of
//! memory cells (one per temporally-headed sub-formula) carries everything
//! the past contributes, so a single left-to-right fold over the trace
//! decides satisfaction. That same single-step update is what the goal
//! compiler turns into derived predicates and conditional effects.

mod eval;
mod parser;
mod trace;

pub use eval::{
    eval_trace, memory_set, step_val, subformulas, EvalError, Evaluator, MemoryCell, MemoryKind,
    MemorySet, Step, Subformulas, Valuation,
};
pub use parser::{parse_atom, parse_formula, ParseError};
pub use trace::{parse_trace, Assignment, Trace};

use std::fmt;

/// A ground atom: a predicate name applied to zero or more constant
/// arguments. Names and arguments follow the identifier grammar
/// `[a-z][a-z0-9_]*`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    name: String,
    args: Vec<String>,
}

pub(crate) fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

/// Error for atoms built outside the parser.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid identifier `{0}`: expected [a-z][a-z0-9_]*")]
pub struct InvalidIdent(pub String);

impl Atom {
    pub fn new<S: Into<String>>(name: S, args: Vec<String>) -> Result<Self, InvalidIdent> {
        let name = name.into();
        if !is_ident(&name) {
            return Err(InvalidIdent(name));
        }
        for a in &args {
            if !is_ident(a) {
                return Err(InvalidIdent(a.clone()));
            }
        }
        Ok(Atom { name, args })
    }

    /// Atom with no arguments.
    pub fn nullary<S: Into<String>>(name: S) -> Result<Self, InvalidIdent> {
        Atom::new(name, Vec::new())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn args(&self) -> &[String] {
        &self.args
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.args.is_empty() {
            write!(f, "{}", self.name)
        } else {
            write!(f, "{}({})", self.name, self.args.join(","))
        }
    }
}

/// Abstract syntax tree of a PPLTL formula.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    True,
    False,
    Atom(Atom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Yesterday(Box<Formula>),
    WeakYesterday(Box<Formula>),
    Once(Box<Formula>),
    Historically(Box<Formula>),
    Since(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(a: Atom) -> Formula {
        Formula::Atom(a)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn yesterday(f: Formula) -> Formula {
        Formula::Yesterday(Box::new(f))
    }

    pub fn weak_yesterday(f: Formula) -> Formula {
        Formula::WeakYesterday(Box::new(f))
    }

    pub fn once(f: Formula) -> Formula {
        Formula::Once(Box::new(f))
    }

    pub fn historically(f: Formula) -> Formula {
        Formula::Historically(Box::new(f))
    }

    pub fn since(a: Formula, b: Formula) -> Formula {
        Formula::Since(Box::new(a), Box::new(b))
    }

    /// Node count of the tree.
    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => 1,
            Formula::Not(f)
            | Formula::Yesterday(f)
            | Formula::WeakYesterday(f)
            | Formula::Once(f)
            | Formula::Historically(f) => 1 + f.size(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Since(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// True when the top node is a past operator (a member of the memory set).
    pub fn is_temporal_head(&self) -> bool {
        matches!(
            self,
            Formula::Yesterday(_)
                | Formula::WeakYesterday(_)
                | Formula::Once(_)
                | Formula::Historically(_)
                | Formula::Since(_, _)
        )
    }

    /// Atoms occurring in the formula, deduplicated, in first-occurrence order.
    pub fn atoms(&self) -> Vec<Atom> {
        let mut out = Vec::new();
        fn walk(f: &Formula, out: &mut Vec<Atom>) {
            match f {
                Formula::True | Formula::False => {}
                Formula::Atom(a) => {
                    if !out.contains(a) {
                        out.push(a.clone());
                    }
                }
                Formula::Not(g)
                | Formula::Yesterday(g)
                | Formula::WeakYesterday(g)
                | Formula::Once(g)
                | Formula::Historically(g) => walk(g, out),
                Formula::And(a, b)
                | Formula::Or(a, b)
                | Formula::Implies(a, b)
                | Formula::Since(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
            }
        }
        walk(self, &mut out);
        out
    }

    fn prec(&self) -> u8 {
        match self {
            Formula::Implies(_, _) => 1,
            Formula::Or(_, _) => 2,
            Formula::And(_, _) => 3,
            Formula::Since(_, _) => 4,
            Formula::Not(_)
            | Formula::Yesterday(_)
            | Formula::WeakYesterday(_)
            | Formula::Once(_)
            | Formula::Historically(_) => 5,
            Formula::True | Formula::False | Formula::Atom(_) => 6,
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        let wrap = self.prec() < min_prec;
        if wrap {
            write!(f, "(")?;
        }
        match self {
            Formula::True => write!(f, "true")?,
            Formula::False => write!(f, "false")?,
            Formula::Atom(a) => write!(f, "{a}")?,
            Formula::Not(g) => {
                write!(f, "!")?;
                g.write(f, 5)?;
            }
            Formula::Yesterday(g) => {
                write!(f, "Y(")?;
                g.write(f, 0)?;
                write!(f, ")")?;
            }
            Formula::WeakYesterday(g) => {
                write!(f, "WY(")?;
                g.write(f, 0)?;
                write!(f, ")")?;
            }
            Formula::Once(g) => {
                write!(f, "O(")?;
                g.write(f, 0)?;
                write!(f, ")")?;
            }
            Formula::Historically(g) => {
                write!(f, "H(")?;
                g.write(f, 0)?;
                write!(f, ")")?;
            }
            Formula::Since(a, b) => {
                a.write(f, 5)?;
                write!(f, " S ")?;
                b.write(f, 4)?;
            }
            Formula::And(a, b) => {
                a.write(f, 3)?;
                write!(f, " & ")?;
                b.write(f, 4)?;
            }
            Formula::Or(a, b) => {
                a.write(f, 2)?;
                write!(f, " | ")?;
                b.write(f, 3)?;
            }
            Formula::Implies(a, b) => {
                a.write(f, 2)?;
                write!(f, " -> ")?;
                b.write(f, 1)?;
            }
        }
        if wrap {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(n: &str) -> Formula {
        Formula::Atom(Atom::nullary(n).unwrap())
    }

    #[test]
    fn size_counts_nodes() {
        let f = Formula::and(Formula::once(at("a")), at("b"));
        assert_eq!(f.size(), 4);
    }

    #[test]
    fn atom_identifier_grammar() {
        assert!(Atom::nullary("goalscored").is_ok());
        assert!(Atom::new("isat", vec!["robot1".into(), "ballposition".into()]).is_ok());
        assert!(Atom::nullary("Goal").is_err());
        assert!(Atom::nullary("1abc").is_err());
        assert!(Atom::new("p", vec!["X".into()]).is_err());
    }

    #[test]
    fn display_minimal_parens() {
        let g0 = Formula::once(Formula::Atom(
            Atom::new("isat", vec!["robot1".into(), "ballposition".into()]).unwrap(),
        ));
        assert_eq!(g0.to_string(), "O(isat(robot1,ballposition))");
        let f = Formula::and(Formula::and(at("a"), at("b")), at("c"));
        assert_eq!(f.to_string(), "a & b & c");
        let g = Formula::and(at("a"), Formula::and(at("b"), at("c")));
        assert_eq!(g.to_string(), "a & (b & c)");
        let s = Formula::and(at("a"), Formula::since(at("b"), at("c")));
        assert_eq!(s.to_string(), "a & b S c");
        let n = Formula::not(Formula::or(at("a"), at("b")));
        assert_eq!(n.to_string(), "!(a | b)");
    }
}
