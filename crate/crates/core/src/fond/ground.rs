//! Eager grounding and successor semantics.
//!
//! Ground atoms get dense indices in lexicographic `(predicate, args)` order,
//! so every downstream structure (states, policies, exports) is deterministic.
//! Basic and derived atoms live in separate id spaces; an evaluated state is
//! a basic bitset plus the least fixpoint of the stratified axioms over it.

use super::ast::*;
use super::validate::{stratify, validate_problem};
use super::FondError;
use crate::pltl;
use std::collections::BTreeMap;
use std::fmt;

/// Ground atom (basic or derived).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundAtom {
    pub pred: String,
    pub args: Vec<String>,
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.args.is_empty() {
            write!(f, "{}", self.pred)
        } else {
            write!(f, "{}({})", self.pred, self.args.join(","))
        }
    }
}

impl GroundAtom {
    /// Functional-syntax form used in traces, policies and reports.
    pub fn to_pltl_atom(&self) -> Result<pltl::Atom, pltl::InvalidIdent> {
        pltl::Atom::new(self.pred.clone(), self.args.clone())
    }
}

/// Fixed-width bitset over the basic (or derived) atom universe.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct State {
    bits: Vec<u64>,
}

impl State {
    pub fn empty(n_atoms: usize) -> State {
        State { bits: vec![0; n_atoms.div_ceil(64)] }
    }

    pub fn set(&mut self, i: usize, value: bool) {
        let (w, b) = (i / 64, i % 64);
        if value {
            self.bits[w] |= 1 << b;
        } else {
            self.bits[w] &= !(1 << b);
        }
    }

    pub fn get(&self, i: usize) -> bool {
        let (w, b) = (i / 64, i % 64);
        (self.bits[w] >> b) & 1 == 1
    }

    pub fn ones(&self, universe: usize) -> impl Iterator<Item = usize> + '_ {
        (0..universe).filter(move |i| self.get(*i))
    }

    pub fn is_subset(&self, other: &State) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }
}

/// Basic-state bitset plus the derived closure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluated {
    pub basic: State,
    pub derived: State,
}

/// Ground condition over dense atom ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GCond {
    True,
    Basic(usize),
    Derived(usize),
    Not(Box<GCond>),
    And(Vec<GCond>),
    Or(Vec<GCond>),
}

impl GCond {
    pub fn eval(&self, st: &Evaluated) -> bool {
        match self {
            GCond::True => true,
            GCond::Basic(i) => st.basic.get(*i),
            GCond::Derived(i) => st.derived.get(*i),
            GCond::Not(c) => !c.eval(st),
            GCond::And(cs) => cs.iter().all(|c| c.eval(st)),
            GCond::Or(cs) => cs.iter().any(|c| c.eval(st)),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GroundEffect {
    pub when: GCond,
    pub add: bool,
    pub atom: usize,
}

#[derive(Debug, Clone)]
pub struct GroundAction {
    pub name: String,
    pub args: Vec<String>,
    pub pre: GCond,
    pub branches: Vec<Vec<GroundEffect>>,
}

impl GroundAction {
    pub fn display_name(&self) -> String {
        if self.args.is_empty() {
            self.name.clone()
        } else {
            format!("{}({})", self.name, self.args.join(","))
        }
    }
}

#[derive(Debug, Clone)]
pub struct GroundAxiom {
    pub head: usize,
    pub body: GCond,
}

#[derive(Debug, Clone)]
pub struct GroundedModel {
    pub basic_atoms: Vec<GroundAtom>,
    pub derived_atoms: Vec<GroundAtom>,
    basic_index: BTreeMap<GroundAtom, usize>,
    derived_index: BTreeMap<GroundAtom, usize>,
    pub actions: Vec<GroundAction>,
    /// Ground axioms grouped by stratum, evaluated lowest first.
    pub strata: Vec<Vec<GroundAxiom>>,
    pub init: State,
    pub goal: GCond,
}

fn objects_of_type<'a>(
    d: &FondDomain,
    all: &'a [TypedName],
    ty: &str,
) -> Vec<&'a str> {
    all.iter().filter(|o| d.type_compatible(&o.ty, ty)).map(|o| o.name.as_str()).collect()
}

fn cartesian(domains: &[Vec<&str>]) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = vec![Vec::new()];
    for dom in domains {
        let mut next = Vec::with_capacity(out.len() * dom.len());
        for prefix in &out {
            for item in dom {
                let mut row = prefix.clone();
                row.push((*item).to_string());
                next.push(row);
            }
        }
        out = next;
    }
    out
}

struct Binder<'a> {
    vars: BTreeMap<&'a str, &'a str>,
}

impl<'a> Binder<'a> {
    fn subst(&self, atom: &SchemaAtom) -> GroundAtom {
        let args = atom
            .terms
            .iter()
            .map(|t| match t {
                Term::Var(v) => (*self.vars.get(v.as_str()).expect("validated variable")).to_string(),
                Term::Const(c) => c.clone(),
            })
            .collect();
        GroundAtom { pred: atom.pred.clone(), args }
    }
}

impl GroundedModel {
    pub fn basic_id(&self, atom: &GroundAtom) -> Option<usize> {
        self.basic_index.get(atom).copied()
    }

    pub fn derived_id(&self, atom: &GroundAtom) -> Option<usize> {
        self.derived_index.get(atom).copied()
    }

    fn ground_cond(&self, c: &Cond, binder: &Binder) -> Result<GCond, FondError> {
        Ok(match c {
            Cond::True => GCond::True,
            Cond::Atom(a) => {
                let g = binder.subst(a);
                if let Some(i) = self.basic_index.get(&g) {
                    GCond::Basic(*i)
                } else if let Some(i) = self.derived_index.get(&g) {
                    GCond::Derived(*i)
                } else {
                    return Err(FondError::Undeclared {
                        kind: "ground atom".into(),
                        name: g.to_string(),
                        context: "grounding".into(),
                    });
                }
            }
            Cond::Not(inner) => GCond::Not(Box::new(self.ground_cond(inner, binder)?)),
            Cond::And(cs) => GCond::And(
                cs.iter().map(|c| self.ground_cond(c, binder)).collect::<Result<_, _>>()?,
            ),
            Cond::Or(cs) => GCond::Or(
                cs.iter().map(|c| self.ground_cond(c, binder)).collect::<Result<_, _>>()?,
            ),
        })
    }

    /// Ground a domain/problem pair into an explicit model.
    pub fn ground(d: &FondDomain, p: &FondProblem) -> Result<GroundedModel, FondError> {
        validate_problem(d, p)?;
        let mut all_objects: Vec<TypedName> = d.constants.clone();
        all_objects.extend(p.objects.iter().cloned());
        all_objects.sort();

        let layers = stratify(d)?;
        let mut basic_atoms = Vec::new();
        let mut derived_atoms = Vec::new();
        for pred in &d.predicates {
            let domains: Vec<Vec<&str>> =
                pred.params.iter().map(|prm| objects_of_type(d, &all_objects, &prm.ty)).collect();
            for args in cartesian(&domains) {
                let atom = GroundAtom { pred: pred.name.clone(), args };
                if d.is_derived(&pred.name) {
                    derived_atoms.push(atom);
                } else {
                    basic_atoms.push(atom);
                }
            }
        }
        basic_atoms.sort();
        derived_atoms.sort();
        let basic_index: BTreeMap<GroundAtom, usize> =
            basic_atoms.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
        let derived_index: BTreeMap<GroundAtom, usize> =
            derived_atoms.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();

        let mut model = GroundedModel {
            basic_atoms,
            derived_atoms,
            basic_index,
            derived_index,
            actions: Vec::new(),
            strata: Vec::new(),
            init: State::empty(0),
            goal: GCond::True,
        };
        model.init = State::empty(model.basic_atoms.len());

        // actions, schema declaration order then lexicographic argument order
        for schema in &d.actions {
            let domains: Vec<Vec<&str>> =
                schema.params.iter().map(|prm| objects_of_type(d, &all_objects, &prm.ty)).collect();
            let mut rows = cartesian(&domains);
            rows.sort();
            for row in rows {
                let binder = Binder {
                    vars: schema
                        .params
                        .iter()
                        .map(|p| p.var.as_str())
                        .zip(row.iter().map(|s| s.as_str()))
                        .collect(),
                };
                let pre = model.ground_cond(&schema.precondition, &binder)?;
                let mut branches = Vec::with_capacity(schema.branches.len());
                for b in &schema.branches {
                    let mut effs = Vec::with_capacity(b.len());
                    for e in b {
                        let atom = binder.subst(&e.literal.atom);
                        let id = model.basic_index.get(&atom).copied().ok_or_else(|| {
                            FondError::Undeclared {
                                kind: "ground atom".into(),
                                name: atom.to_string(),
                                context: "effect grounding".into(),
                            }
                        })?;
                        effs.push(GroundEffect {
                            when: model.ground_cond(&e.when, &binder)?,
                            add: e.literal.positive,
                            atom: id,
                        });
                    }
                    branches.push(effs);
                }
                model.actions.push(GroundAction { name: schema.name.clone(), args: row, pre, branches });
            }
        }

        // axioms grouped by stratum
        let max_layer = layers.values().copied().max().unwrap_or(0);
        let mut strata: Vec<Vec<GroundAxiom>> = vec![Vec::new(); max_layer + 1];
        for ax in &d.axioms {
            let layer = layers[&ax.head.name];
            let domains: Vec<Vec<&str>> =
                ax.head.params.iter().map(|prm| objects_of_type(d, &all_objects, &prm.ty)).collect();
            let mut rows = cartesian(&domains);
            rows.sort();
            for row in rows {
                let binder = Binder {
                    vars: ax
                        .head
                        .params
                        .iter()
                        .map(|p| p.var.as_str())
                        .zip(row.iter().map(|s| s.as_str()))
                        .collect(),
                };
                let head_atom = binder.subst(&SchemaAtom {
                    pred: ax.head.name.clone(),
                    terms: ax
                        .head
                        .params
                        .iter()
                        .map(|p| Term::Var(p.var.clone()))
                        .collect(),
                });
                let head = model.derived_index[&head_atom];
                let body = model.ground_cond(&ax.body, &binder)?;
                strata[layer].push(GroundAxiom { head, body });
            }
        }
        if d.axioms.is_empty() {
            strata.clear();
        }
        model.strata = strata;

        for atom in &p.init {
            let g = GroundAtom { pred: atom.pred.clone(), args: atom.args.clone() };
            let id = model.basic_index.get(&g).ok_or_else(|| FondError::Undeclared {
                kind: "ground atom".into(),
                name: g.to_string(),
                context: "init".into(),
            })?;
            model.init.set(*id, true);
        }

        let binder = Binder { vars: BTreeMap::new() };
        model.goal = model.ground_cond(&p.goal, &binder)?;
        Ok(model)
    }

    /// Least-fixpoint closure of the axioms over a basic state, stratum by
    /// stratum.
    pub fn evaluate(&self, basic: &State) -> Evaluated {
        let mut st = Evaluated { basic: basic.clone(), derived: State::empty(self.derived_atoms.len()) };
        for stratum in &self.strata {
            loop {
                let mut changed = false;
                for ax in stratum {
                    if !st.derived.get(ax.head) && ax.body.eval(&st) {
                        st.derived.set(ax.head, true);
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
            }
        }
        st
    }

    pub fn initial_state(&self) -> Evaluated {
        self.evaluate(&self.init)
    }

    pub fn is_goal(&self, st: &Evaluated) -> bool {
        self.goal.eval(st)
    }

    /// Indices of the actions applicable in `st`, ascending.
    pub fn applicable(&self, st: &Evaluated) -> Vec<usize> {
        self.actions
            .iter()
            .enumerate()
            .filter(|(_, a)| a.pre.eval(st))
            .map(|(i, _)| i)
            .collect()
    }

    /// One successor per oneof branch. Effect conditions read the pre-state;
    /// within a branch deletes apply before adds.
    pub fn successors(&self, st: &Evaluated, action: usize) -> Result<Vec<Evaluated>, FondError> {
        let a = &self.actions[action];
        if !a.pre.eval(st) {
            return Err(FondError::Inapplicable { action: a.display_name() });
        }
        let mut out = Vec::with_capacity(a.branches.len());
        for branch in &a.branches {
            let mut dels = Vec::new();
            let mut adds = Vec::new();
            for e in branch {
                if e.when.eval(st) {
                    if e.add {
                        adds.push(e.atom);
                    } else {
                        dels.push(e.atom);
                    }
                }
            }
            let mut basic = st.basic.clone();
            for i in dels {
                basic.set(i, false);
            }
            for i in adds {
                basic.set(i, true);
            }
            out.push(self.evaluate(&basic));
        }
        Ok(out)
    }

    /// Pretty form of a basic state: the true atoms in functional syntax.
    pub fn state_atom_names(&self, basic: &State) -> Vec<String> {
        basic.ones(self.basic_atoms.len()).map(|i| self.basic_atoms[i].to_string()).collect()
    }

    /// Rebuild a basic state from functional-syntax atom names.
    pub fn state_from_atom_names(&self, names: &[String]) -> Result<State, FondError> {
        let by_name: BTreeMap<String, usize> =
            self.basic_atoms.iter().enumerate().map(|(i, a)| (a.to_string(), i)).collect();
        let mut st = State::empty(self.basic_atoms.len());
        for n in names {
            let id = by_name.get(n).ok_or_else(|| FondError::Undeclared {
                kind: "ground atom".into(),
                name: n.clone(),
                context: "policy state".into(),
            })?;
            st.set(*id, true);
        }
        Ok(st)
    }

    /// Basic assignment for oracle checking, in functional syntax.
    pub fn to_assignment(&self, basic: &State) -> Result<pltl::Assignment, pltl::InvalidIdent> {
        basic
            .ones(self.basic_atoms.len())
            .map(|i| self.basic_atoms[i].to_pltl_atom())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::super::parser::{parse_domain, parse_problem};
    use super::*;

    const MOVE: &str = "\
(define (domain mini)
  (:requirements :strips :typing)
  (:types robot loc - object)
  (:predicates (at ?r - robot ?l - loc))
  (:action move
    :parameters (?r - robot ?from - loc ?to - loc)
    :precondition (and (at ?r ?from))
    :effect (and (not (at ?r ?from)) (at ?r ?to))))";

    fn mini_problem(objects: &str, init: &str, goal: &str) -> FondProblem {
        parse_problem(&format!(
            "(define (problem p) (:domain mini) (:objects {objects}) (:init {init}) (:goal {goal}))"
        ))
        .unwrap()
    }

    #[test]
    fn grounds_typed_products() {
        let d = parse_domain(MOVE).unwrap();
        let p = mini_problem("r1 r2 - robot a b c - loc", "(at r1 a)", "(and (at r1 c))");
        let m = GroundedModel::ground(&d, &p).unwrap();
        // 2 robots x 3 locs for atoms, 2 x 3 x 3 for move
        assert_eq!(m.basic_atoms.len(), 6);
        assert_eq!(m.actions.len(), 18);
    }

    #[test]
    fn two_robots_three_locs_single_param_gives_six() {
        let d = parse_domain(
            "(define (domain mini)
               (:requirements :strips :typing)
               (:types robot loc - object)
               (:predicates (at ?r - robot ?l - loc))
               (:action warp
                 :parameters (?r - robot ?l - loc)
                 :precondition (and)
                 :effect (at ?r ?l)))",
        )
        .unwrap();
        let p = mini_problem("r1 r2 - robot a b c - loc", "", "(and)");
        let m = GroundedModel::ground(&d, &p).unwrap();
        assert_eq!(m.actions.len(), 6);
    }

    #[test]
    fn empty_type_grounds_nothing() {
        let d = parse_domain(MOVE).unwrap();
        let p = mini_problem("a b - loc", "", "(and)");
        let m = GroundedModel::ground(&d, &p).unwrap();
        assert_eq!(m.actions.len(), 0);
        assert!(m.is_goal(&m.initial_state()));
    }

    #[test]
    fn deterministic_successor_and_frame() {
        let d = parse_domain(MOVE).unwrap();
        let p = mini_problem("r1 - robot a b - loc", "(at r1 a)", "(and (at r1 b))");
        let m = GroundedModel::ground(&d, &p).unwrap();
        let st = m.initial_state();
        let apply: Vec<usize> = m.applicable(&st);
        // move(r1,a,a) and move(r1,a,b) are applicable
        assert_eq!(apply.len(), 2);
        let target = m
            .actions
            .iter()
            .position(|a| a.args == vec!["r1".to_string(), "a".to_string(), "b".to_string()])
            .unwrap();
        let succ = m.successors(&st, target).unwrap();
        assert_eq!(succ.len(), 1);
        assert!(m.is_goal(&succ[0]));
        // delete-then-add: moving in place keeps the atom
        let in_place = m
            .actions
            .iter()
            .position(|a| a.args == vec!["r1".to_string(), "a".to_string(), "a".to_string()])
            .unwrap();
        let same = m.successors(&st, in_place).unwrap();
        assert_eq!(same[0].basic, st.basic);
    }

    #[test]
    fn derived_closure_chained() {
        let text = "\
(define (domain k)
  (:requirements :strips :derived-predicates)
  (:predicates (p) (d1) (d2))
  (:derived (d1) (p))
  (:derived (d2) (d1))
  (:action a :parameters () :precondition (and) :effect (p)))";
        let d = parse_domain(text).unwrap();
        let p = parse_problem(
            "(define (problem x) (:domain k) (:init (p)) (:goal (and (d2))))",
        )
        .unwrap();
        let m = GroundedModel::ground(&d, &p).unwrap();
        let st = m.initial_state();
        assert!(st.derived.get(m.derived_id(&GroundAtom { pred: "d1".into(), args: vec![] }).unwrap()));
        assert!(m.is_goal(&st));
        // closure is a fixpoint: re-evaluating the basic part changes nothing
        let again = m.evaluate(&st.basic);
        assert_eq!(again, st);
    }

    #[test]
    fn applicable_honors_derived_preconditions() {
        let text = "\
(define (domain k)
  (:requirements :strips :derived-predicates)
  (:predicates (p) (q) (vp))
  (:derived (vp) (p))
  (:action a :parameters () :precondition (vp) :effect (q)))";
        let d = parse_domain(text).unwrap();
        let p0 = parse_problem("(define (problem x) (:domain k) (:init) (:goal (and (q))))").unwrap();
        let m = GroundedModel::ground(&d, &p0).unwrap();
        assert!(m.applicable(&m.initial_state()).is_empty());
        let p1 =
            parse_problem("(define (problem x) (:domain k) (:init (p)) (:goal (and (q))))").unwrap();
        let m = GroundedModel::ground(&d, &p1).unwrap();
        assert_eq!(m.applicable(&m.initial_state()).len(), 1);
    }

    #[test]
    fn conditional_effects_read_pre_state() {
        // both effects fire against the same pre-state, so a swap works
        let text = "\
(define (domain k)
  (:requirements :strips :conditional-effects)
  (:predicates (p) (q))
  (:action swap
    :parameters ()
    :precondition (and)
    :effect (and
      (when (p) (q))
      (when (q) (p))
      (when (p) (not (p)))
      (when (q) (not (q))))))";
        let d = parse_domain(text).unwrap();
        let p = parse_problem("(define (problem x) (:domain k) (:init (p)) (:goal (and (q))))").unwrap();
        let m = GroundedModel::ground(&d, &p).unwrap();
        let succ = m.successors(&m.initial_state(), 0).unwrap();
        let names = m.state_atom_names(&succ[0].basic);
        assert_eq!(names, vec!["q".to_string()]);
    }
}
