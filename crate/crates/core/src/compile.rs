//! Compilation of a PPLTL goal into a plain FOND reachability problem.
//!
//! Given a domain `d`, a problem `p` and a ground PPLTL goal `g`, the
//! transformation produces `(d', p')` such that any FOND planner solving the
//! reachability goal of `p'` realizes the temporal goal of the original
//! problem:
//!
//! 1. every temporally-headed sub-formula of `g` gets a fresh 0-ary basic
//!    *memory fluent* `mem_<i>` that carries its value from the previous
//!    instant;
//! 2. every sub-formula gets a fresh 0-ary *derived predicate* `val_<i>`
//!    whose axiom mirrors the single-step evaluation rules of
//!    [`crate::pltl`] (e.g. `val_{O a} <- val_a or mem_{O a}`);
//! 3. every oneof branch of every action is extended with a conditional
//!    effect pair per memory fluent: when the cell's source formula holds in
//!    the pre-state the fluent is added, otherwise deleted — after any
//!    action, each memory fluent equals its sub-formula's truth just before
//!    the action ran;
//! 4. the initial state adds the memory fluents that start true;
//! 5. the goal becomes the single derived atom for `g` itself (or its
//!    axiom-free unfolding over basic and memory fluents, for consumers
//!    without derived-predicate goals).
//!
//! Index `<i>` is the sub-formula's position in children-before-parents
//! order, so compiling is deterministic; name clashes with domain predicates
//! are resolved by appending `_c<k>` and recorded in the mapping.

use crate::fond::{
    Cond, CondEffect, FondDomain, FondProblem, InitAtom, Literal, PredicateDecl, Requirement,
    SchemaAtom, Term, TypedName,
};
use crate::pltl::{self, Formula};
use std::collections::BTreeSet;
use std::fmt::Write;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CompileError {
    #[error("goal atom `{atom}` is not a declared predicate of the domain")]
    UnknownPredicate { atom: String },
    #[error("goal atom `{atom}` has {got} arguments, predicate `{pred}` takes {expected}")]
    Arity { atom: String, pred: String, expected: usize, got: usize },
    #[error("goal atom argument `{arg}` is not an object of the problem or a domain constant")]
    UnknownObject { arg: String },
    #[error("goal atom argument `{arg}` has type `{ty}`, predicate `{pred}` expects `{expected}`")]
    ArgType { arg: String, ty: String, pred: String, expected: String },
    #[error("mapping line {line} is malformed: {text}")]
    MalformedMapping { line: usize, text: String },
    #[error(transparent)]
    Formula(#[from] pltl::ParseError),
}

/// Options for [`compile`].
#[derive(Debug, Clone, Copy, Default)]
pub struct CompileOptions {
    /// Emit the goal as the axiom-free unfolding over basic and memory
    /// fluents instead of the derived goal atom.
    pub unfold_goal: bool,
}

/// Name tables produced by a compilation: which derived predicate and which
/// memory fluent stands for which sub-formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompilationMap {
    /// One entry per sub-formula, children before parents.
    pub derived: Vec<(Formula, String)>,
    /// One entry per memory cell, in sub-formula order.
    pub memory: Vec<(Formula, String)>,
}

impl CompilationMap {
    pub fn derived_name(&self, f: &Formula) -> Option<&str> {
        self.derived.iter().find(|(g, _)| g == f).map(|(_, n)| n.as_str())
    }

    pub fn memory_name(&self, f: &Formula) -> Option<&str> {
        self.memory.iter().find(|(g, _)| g == f).map(|(_, n)| n.as_str())
    }

    pub fn formula_of_memory(&self, name: &str) -> Option<&Formula> {
        self.memory.iter().find(|(_, n)| n == name).map(|(f, _)| f)
    }

    /// Sidecar text: one `name = formula` line per symbol.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (f, n) in &self.derived {
            let _ = writeln!(out, "{n} = {f}");
        }
        for (f, n) in &self.memory {
            let _ = writeln!(out, "{n} = {f}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<CompilationMap, CompileError> {
        let mut derived = Vec::new();
        let mut memory = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (name, formula) = line.split_once('=').ok_or_else(|| {
                CompileError::MalformedMapping { line: i + 1, text: line.to_string() }
            })?;
            let name = name.trim().to_string();
            let formula = pltl::parse_formula(formula.trim())?;
            if name.starts_with("mem") {
                memory.push((formula, name));
            } else {
                derived.push((formula, name));
            }
        }
        Ok(CompilationMap { derived, memory })
    }
}

/// Counts of the symbols [`compile`] would introduce: `(memory fluents,
/// derived predicates)`. Both are linear in the goal size.
pub fn added_symbol_count(g: &Formula) -> (usize, usize) {
    (pltl::memory_set(g).len(), pltl::subformulas(g).len())
}

fn fresh_name(base: String, taken: &mut BTreeSet<String>) -> String {
    if taken.insert(base.clone()) {
        return base;
    }
    let mut k = 1;
    loop {
        let candidate = format!("{base}_c{k}");
        if taken.insert(candidate.clone()) {
            return candidate;
        }
        k += 1;
    }
}

fn goal_atom_to_schema(a: &pltl::Atom) -> SchemaAtom {
    SchemaAtom {
        pred: a.name().to_string(),
        terms: a.args().iter().map(|s| Term::Const(s.clone())).collect(),
    }
}

fn check_goal_atoms(d: &FondDomain, p: &FondProblem, g: &Formula) -> Result<(), CompileError> {
    let object_type = |name: &str| -> Option<String> {
        d.constants
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.ty.clone())
            .or_else(|| p.objects.iter().find(|o| o.name == name).map(|o| o.ty.clone()))
    };
    for a in g.atoms() {
        let decl = d
            .predicate(a.name())
            .ok_or_else(|| CompileError::UnknownPredicate { atom: a.to_string() })?;
        if decl.params.len() != a.args().len() {
            return Err(CompileError::Arity {
                atom: a.to_string(),
                pred: a.name().to_string(),
                expected: decl.params.len(),
                got: a.args().len(),
            });
        }
        for (arg, param) in a.args().iter().zip(&decl.params) {
            let ty = object_type(arg)
                .ok_or_else(|| CompileError::UnknownObject { arg: arg.clone() })?;
            if !d.type_compatible(&ty, &param.ty) {
                return Err(CompileError::ArgType {
                    arg: arg.clone(),
                    ty,
                    pred: a.name().to_string(),
                    expected: param.ty.clone(),
                });
            }
        }
    }
    Ok(())
}

/// Compile `(d, p, g)` into a reachability problem `(d', p')` plus the name
/// tables.
pub fn compile(
    d: &FondDomain,
    p: &FondProblem,
    g: &Formula,
    opts: CompileOptions,
) -> Result<(FondDomain, FondProblem, CompilationMap), CompileError> {
    check_goal_atoms(d, p, g)?;
    let subs = pltl::subformulas(g);
    let cells = pltl::memory_set(g);

    let mut taken: BTreeSet<String> = d.predicates.iter().map(|q| q.name.clone()).collect();
    let derived: Vec<(Formula, String)> = subs
        .list()
        .iter()
        .enumerate()
        .map(|(i, f)| (f.clone(), fresh_name(format!("val_{i}"), &mut taken)))
        .collect();
    let memory: Vec<(Formula, String)> = cells
        .cells()
        .iter()
        .map(|c| (c.formula.clone(), fresh_name(format!("mem_{}", c.sub_index), &mut taken)))
        .collect();
    let map = CompilationMap { derived, memory };

    let val = |f: &Formula| -> Cond {
        Cond::Atom(SchemaAtom { pred: map.derived_name(f).unwrap().to_string(), terms: vec![] })
    };
    let mem = |f: &Formula| -> Cond {
        Cond::Atom(SchemaAtom { pred: map.memory_name(f).unwrap().to_string(), terms: vec![] })
    };

    let mut d2 = d.clone();
    d2.requirements.insert(Requirement::DerivedPredicates);
    d2.requirements.insert(Requirement::ConditionalEffects);
    d2.requirements.insert(Requirement::NegativePreconditions);

    // objects named by the goal become domain constants so the axiom bodies
    // stay well-formed at the domain level
    let mut p2 = p.clone();
    let goal_args: BTreeSet<String> =
        g.atoms().iter().flat_map(|a| a.args().iter().cloned()).collect();
    let promoted: Vec<TypedName> =
        p.objects.iter().filter(|o| goal_args.contains(&o.name)).cloned().collect();
    for k in promoted {
        p2.objects.retain(|o| o.name != k.name);
        d2.constants.push(k);
    }

    // memory fluents are plain 0-ary basic predicates
    for (_, name) in &map.memory {
        d2.predicates.push(PredicateDecl { name: name.clone(), params: vec![] });
    }

    // one derived predicate per sub-formula, axiom body per the step rules
    for (f, name) in &map.derived {
        d2.predicates.push(PredicateDecl { name: name.clone(), params: vec![] });
        let body = match f {
            Formula::True => Cond::True,
            Formula::False => Cond::not(Cond::True),
            Formula::Atom(a) => Cond::Atom(goal_atom_to_schema(a)),
            Formula::Not(x) => Cond::not(val(x)),
            Formula::And(a, b) => Cond::And(vec![val(a), val(b)]),
            Formula::Or(a, b) => Cond::Or(vec![val(a), val(b)]),
            Formula::Implies(a, b) => Cond::Or(vec![Cond::not(val(a)), val(b)]),
            Formula::Yesterday(_) | Formula::WeakYesterday(_) => mem(f),
            Formula::Once(x) => Cond::Or(vec![val(x), mem(f)]),
            Formula::Historically(x) => Cond::And(vec![val(x), mem(f)]),
            Formula::Since(a, b) => Cond::Or(vec![val(b), Cond::And(vec![val(a), mem(f)])]),
        };
        d2.axioms.push(crate::fond::Axiom {
            head: PredicateDecl { name: name.clone(), params: vec![] },
            body,
        });
    }

    // conditional update pair per memory cell, appended to every branch of
    // every action; conditions read the pre-state, which is exactly what
    // makes the fluent mean "value one instant ago"
    let mut updates: Vec<(Cond, String)> = Vec::new();
    for cell in cells.cells() {
        let source = match &cell.formula {
            Formula::Yesterday(x) | Formula::WeakYesterday(x) => val(x),
            f => val(f),
        };
        updates.push((source, map.memory_name(&cell.formula).unwrap().to_string()));
    }
    for action in &mut d2.actions {
        for branch in &mut action.branches {
            for (source, mem_name) in &updates {
                let atom = SchemaAtom { pred: mem_name.clone(), terms: vec![] };
                branch.push(CondEffect {
                    when: source.clone(),
                    literal: Literal { positive: true, atom: atom.clone() },
                });
                branch.push(CondEffect {
                    when: Cond::not(source.clone()),
                    literal: Literal { positive: false, atom },
                });
            }
        }
    }

    // initial memory values per the first-instant conventions
    for (cell, (_, name)) in cells.cells().iter().zip(&map.memory) {
        if cell.kind.initial() {
            p2.init.push(InitAtom { pred: name.clone(), args: vec![] });
        }
    }

    p2.goal = if opts.unfold_goal { unfold(g, &map) } else { Cond::And(vec![val(g)]) };

    Ok((d2, p2, map))
}

/// Axiom-free expansion of the goal over basic atoms and memory fluents.
fn unfold(f: &Formula, map: &CompilationMap) -> Cond {
    let mem = |g: &Formula| -> Cond {
        Cond::Atom(SchemaAtom { pred: map.memory_name(g).unwrap().to_string(), terms: vec![] })
    };
    match f {
        Formula::True => Cond::True,
        Formula::False => Cond::not(Cond::True),
        Formula::Atom(a) => Cond::Atom(goal_atom_to_schema(a)),
        Formula::Not(x) => Cond::not(unfold(x, map)),
        Formula::And(a, b) => Cond::And(vec![unfold(a, map), unfold(b, map)]),
        Formula::Or(a, b) => Cond::Or(vec![unfold(a, map), unfold(b, map)]),
        Formula::Implies(a, b) => Cond::Or(vec![Cond::not(unfold(a, map)), unfold(b, map)]),
        Formula::Yesterday(_) | Formula::WeakYesterday(_) => mem(f),
        Formula::Once(x) => Cond::Or(vec![unfold(x, map), mem(f)]),
        Formula::Historically(x) => Cond::And(vec![unfold(x, map), mem(f)]),
        Formula::Since(a, b) => {
            Cond::Or(vec![unfold(b, map), Cond::And(vec![unfold(a, map), mem(f)])])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assets;
    use crate::fond::{validate_domain, validate_problem, GroundedModel};
    use crate::pltl::parse_formula;

    fn soccer() -> (FondDomain, FondProblem) {
        let d = assets::default_domain();
        let p = crate::fond::parse_problem(
            "(define (problem t)
               (:domain soccer)
               (:objects robot1 - robot ball - item startposition - location)
               (:init (isat robot1 startposition) (isat ball ballposition) (present ball))
               (:goal (and)))",
        )
        .unwrap();
        (d, p)
    }

    #[test]
    fn g0_counts_and_shape() {
        let (d, p) = soccer();
        let g0 = parse_formula("O(isat(robot1,ballposition))").unwrap();
        let (d2, p2, map) = compile(&d, &p, &g0, CompileOptions::default()).unwrap();
        assert_eq!(map.memory.len(), 1);
        assert_eq!(map.derived.len(), 2);
        assert_eq!(d2.axioms.len(), 2);
        // every action branch gained the add/delete pair for the one cell
        for a in &d2.actions {
            let orig = d.actions.iter().find(|x| x.name == a.name).unwrap();
            for (b2, b) in a.branches.iter().zip(&orig.branches) {
                assert_eq!(b2.len(), b.len() + 2);
            }
        }
        assert_eq!(p2.goal, Cond::And(vec![Cond::Atom(SchemaAtom::ground("val_1", &[]))]));
        // output is well-formed and groundable
        validate_domain(&d2).unwrap();
        validate_problem(&d2, &p2).unwrap();
        GroundedModel::ground(&d2, &p2).unwrap();
    }

    #[test]
    fn single_atom_goal_adds_no_memory() {
        let (d, p) = soccer();
        let g = parse_formula("goalscored").unwrap();
        let (d2, p2, map) = compile(&d, &p, &g, CompileOptions::default()).unwrap();
        assert!(map.memory.is_empty());
        assert_eq!(map.derived.len(), 1);
        // actions keep their original effects
        for (a2, a) in d2.actions.iter().zip(&d.actions) {
            assert_eq!(a2.branches, a.branches);
        }
        assert_eq!(p2.init.len(), p.init.len());
        assert_eq!(added_symbol_count(&g), (0, 1));
    }

    #[test]
    fn added_counts() {
        let g = parse_formula("O(p)").unwrap();
        assert_eq!(added_symbol_count(&g), (1, 2));
        let g2 = parse_formula(
            "O(isat(robot1,ballposition)) & O(goalscored) & ballsafe S isat(robot1,ballposition)",
        )
        .unwrap();
        assert_eq!(added_symbol_count(&g2), (3, 8));
    }

    #[test]
    fn collision_renaming() {
        let mut d = assets::default_domain();
        d.predicates.push(PredicateDecl { name: "val_1".into(), params: vec![] });
        let p = crate::fond::parse_problem(
            "(define (problem t)
               (:domain soccer)
               (:objects robot1 - robot startposition - location)
               (:init (isat robot1 startposition))
               (:goal (and)))",
        )
        .unwrap();
        let g0 = parse_formula("O(isat(robot1,ballposition))").unwrap();
        let (_, _, map) = compile(&d, &p, &g0, CompileOptions::default()).unwrap();
        assert_eq!(map.derived[1].1, "val_1_c1");
    }

    #[test]
    fn rejects_unknown_goal_atoms() {
        let (d, p) = soccer();
        let bad = parse_formula("O(flying(robot1))").unwrap();
        assert!(matches!(
            compile(&d, &p, &bad, CompileOptions::default()),
            Err(CompileError::UnknownPredicate { .. })
        ));
        let bad_arg = parse_formula("O(isat(robot9,ballposition))").unwrap();
        assert!(matches!(
            compile(&d, &p, &bad_arg, CompileOptions::default()),
            Err(CompileError::UnknownObject { .. })
        ));
    }

    #[test]
    fn compiling_twice_is_identical() {
        let (d, p) = soccer();
        let g = parse_formula("O(isat(robot1,ballposition)) & O(goalscored)").unwrap();
        let a = compile(&d, &p, &g, CompileOptions::default()).unwrap();
        let b = compile(&d, &p, &g, CompileOptions::default()).unwrap();
        assert_eq!(crate::fond::print_domain(&a.0), crate::fond::print_domain(&b.0));
        assert_eq!(crate::fond::print_problem(&a.1), crate::fond::print_problem(&b.1));
        assert_eq!(a.2, b.2);
    }

    #[test]
    fn unfolded_goal_mentions_no_derived_symbols() {
        let (d, p) = soccer();
        let g = parse_formula("O(goalscored)").unwrap();
        let (_, p2, map) = compile(&d, &p, &g, CompileOptions { unfold_goal: true }).unwrap();
        for (atom, _) in p2.goal.atoms_signed() {
            assert!(map.derived.iter().all(|(_, n)| n != &atom.pred));
        }
    }

    #[test]
    fn mapping_text_round_trip() {
        let (d, p) = soccer();
        let g = parse_formula("O(isat(robot1,ballposition)) & O(goalscored)").unwrap();
        let (_, _, map) = compile(&d, &p, &g, CompileOptions::default()).unwrap();
        let parsed = CompilationMap::parse(&map.to_text()).unwrap();
        assert_eq!(parsed, map);
    }
}
