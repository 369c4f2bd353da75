//! Shared test machinery: the whole-prefix reference evaluator, random
//! formula and planning-instance generators, and the brute-force adversarial
//! game oracle used to cross-check the compile-then-plan route. None of this
//! code calls into the compiler or the solver.

#![allow(dead_code)]

use pastfond::fond::{
    ActionDecl, Cond, CondEffect, FondDomain, FondProblem, GroundedModel, InitAtom, Literal,
    PredicateDecl, Requirement, SchemaAtom,
};
use pastfond::pltl::{Assignment, Atom, Evaluator, Formula, Trace, Valuation};
use rand::prelude::*;
use std::collections::BTreeMap;

/// Definitional PPLTL semantics: look back over the whole prefix instead of
/// folding a memory. This is the oracle the incremental evaluator is checked
/// against.
pub fn naive_eval(f: &Formula, trace: &Trace) -> bool {
    assert!(!trace.is_empty(), "naive evaluator needs a non-empty trace");
    naive_at(f, trace.instants(), trace.len() - 1)
}

fn naive_at(f: &Formula, states: &[Assignment], i: usize) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Atom(a) => states[i].contains(a),
        Formula::Not(g) => !naive_at(g, states, i),
        Formula::And(a, b) => naive_at(a, states, i) && naive_at(b, states, i),
        Formula::Or(a, b) => naive_at(a, states, i) || naive_at(b, states, i),
        Formula::Implies(a, b) => !naive_at(a, states, i) || naive_at(b, states, i),
        Formula::Yesterday(g) => i > 0 && naive_at(g, states, i - 1),
        Formula::WeakYesterday(g) => i == 0 || naive_at(g, states, i - 1),
        Formula::Once(g) => (0..=i).any(|j| naive_at(g, states, j)),
        Formula::Historically(g) => (0..=i).all(|j| naive_at(g, states, j)),
        Formula::Since(a, b) => (0..=i)
            .any(|j| naive_at(b, states, j) && ((j + 1)..=i).all(|k| naive_at(a, states, k))),
    }
}

/// Indexed form of a formula for the exhaustive-trace runs: atoms become
/// positions in a small alphabet so an instant is one bitmask.
pub enum MaskOp {
    True,
    False,
    Atom(u8),
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Implies(usize, usize),
    Yesterday(usize),
    WeakYesterday(usize),
    Once(usize),
    Historically(usize),
    Since(usize, usize),
}

pub struct MaskFormula {
    pub ops: Vec<MaskOp>,
    pub root: usize,
}

pub fn index_formula(f: &Formula, alphabet: &[Atom]) -> MaskFormula {
    fn build(f: &Formula, alphabet: &[Atom], ops: &mut Vec<MaskOp>) -> usize {
        let op = match f {
            Formula::True => MaskOp::True,
            Formula::False => MaskOp::False,
            Formula::Atom(a) => {
                let i = alphabet.iter().position(|x| x == a).expect("atom in alphabet");
                MaskOp::Atom(i as u8)
            }
            Formula::Not(g) => MaskOp::Not(build(g, alphabet, ops)),
            Formula::And(a, b) => {
                MaskOp::And(build(a, alphabet, ops), build(b, alphabet, ops))
            }
            Formula::Or(a, b) => MaskOp::Or(build(a, alphabet, ops), build(b, alphabet, ops)),
            Formula::Implies(a, b) => {
                MaskOp::Implies(build(a, alphabet, ops), build(b, alphabet, ops))
            }
            Formula::Yesterday(g) => MaskOp::Yesterday(build(g, alphabet, ops)),
            Formula::WeakYesterday(g) => MaskOp::WeakYesterday(build(g, alphabet, ops)),
            Formula::Once(g) => MaskOp::Once(build(g, alphabet, ops)),
            Formula::Historically(g) => MaskOp::Historically(build(g, alphabet, ops)),
            Formula::Since(a, b) => {
                MaskOp::Since(build(a, alphabet, ops), build(b, alphabet, ops))
            }
        };
        ops.push(op);
        ops.len() - 1
    }
    let mut ops = Vec::new();
    let root = build(f, alphabet, &mut ops);
    MaskFormula { ops, root }
}

/// Same definitional semantics as [`naive_eval`], over mask traces.
pub fn naive_mask_eval(mf: &MaskFormula, trace: &[u8]) -> bool {
    naive_mask_at(mf, mf.root, trace, trace.len() - 1)
}

fn naive_mask_at(mf: &MaskFormula, idx: usize, tr: &[u8], i: usize) -> bool {
    match &mf.ops[idx] {
        MaskOp::True => true,
        MaskOp::False => false,
        MaskOp::Atom(bit) => (tr[i] >> bit) & 1 == 1,
        MaskOp::Not(c) => !naive_mask_at(mf, *c, tr, i),
        MaskOp::And(a, b) => naive_mask_at(mf, *a, tr, i) && naive_mask_at(mf, *b, tr, i),
        MaskOp::Or(a, b) => naive_mask_at(mf, *a, tr, i) || naive_mask_at(mf, *b, tr, i),
        MaskOp::Implies(a, b) => !naive_mask_at(mf, *a, tr, i) || naive_mask_at(mf, *b, tr, i),
        MaskOp::Yesterday(c) => i > 0 && naive_mask_at(mf, *c, tr, i - 1),
        MaskOp::WeakYesterday(c) => i == 0 || naive_mask_at(mf, *c, tr, i - 1),
        MaskOp::Once(c) => (0..=i).any(|j| naive_mask_at(mf, *c, tr, j)),
        MaskOp::Historically(c) => (0..=i).all(|j| naive_mask_at(mf, *c, tr, j)),
        MaskOp::Since(a, b) => (0..=i).any(|j| {
            naive_mask_at(mf, *b, tr, j) && ((j + 1)..=i).all(|k| naive_mask_at(mf, *a, tr, k))
        }),
    }
}

/// Random formula over the given atoms, with all operators represented.
pub fn random_formula(rng: &mut StdRng, depth: usize, atoms: &[Atom]) -> Formula {
    if depth == 0 || rng.gen_ratio(1, 4) {
        return match rng.gen_range(0..10) {
            0 => Formula::True,
            1 => Formula::False,
            _ => Formula::Atom(atoms[rng.gen_range(0..atoms.len())].clone()),
        };
    }
    let next = depth - 1;
    match rng.gen_range(0..9) {
        0 => Formula::not(random_formula(rng, next, atoms)),
        1 => Formula::and(random_formula(rng, next, atoms), random_formula(rng, next, atoms)),
        2 => Formula::or(random_formula(rng, next, atoms), random_formula(rng, next, atoms)),
        3 => Formula::implies(random_formula(rng, next, atoms), random_formula(rng, next, atoms)),
        4 => Formula::yesterday(random_formula(rng, next, atoms)),
        5 => Formula::weak_yesterday(random_formula(rng, next, atoms)),
        6 => Formula::once(random_formula(rng, next, atoms)),
        7 => Formula::historically(random_formula(rng, next, atoms)),
        _ => Formula::since(random_formula(rng, next, atoms), random_formula(rng, next, atoms)),
    }
}

/// Small random FOND instance over 0-ary predicates.
pub struct SmallInstance {
    pub domain: FondDomain,
    pub problem: FondProblem,
    pub atoms: Vec<Atom>,
}

pub fn random_instance(rng: &mut StdRng, n_atoms: usize, n_actions: usize) -> SmallInstance {
    let names: Vec<String> = (0..n_atoms).map(|i| format!("p{i}")).collect();
    let atom_of = |name: &str| SchemaAtom { pred: name.to_string(), terms: vec![] };
    let mut actions = Vec::new();
    for k in 0..n_actions {
        // precondition: conjunction of up to two literals
        let mut pre = Vec::new();
        for _ in 0..rng.gen_range(0..=2usize) {
            let name = &names[rng.gen_range(0..names.len())];
            let lit = Cond::Atom(atom_of(name));
            pre.push(if rng.gen_bool(0.3) { Cond::not(lit) } else { lit });
        }
        let n_branches = rng.gen_range(1..=2usize);
        let mut branches = Vec::new();
        for _ in 0..n_branches {
            let mut effs = Vec::new();
            for _ in 0..rng.gen_range(1..=3usize) {
                let name = &names[rng.gen_range(0..names.len())];
                effs.push(CondEffect::unconditional(Literal {
                    positive: rng.gen_bool(0.6),
                    atom: atom_of(name),
                }));
            }
            branches.push(effs);
        }
        actions.push(ActionDecl {
            name: format!("act{k}"),
            params: vec![],
            precondition: if pre.is_empty() { Cond::True } else { Cond::And(pre) },
            branches,
        });
    }
    let domain = FondDomain {
        name: "rnd".into(),
        requirements: [
            Requirement::Strips,
            Requirement::NegativePreconditions,
            Requirement::NonDeterministic,
        ]
        .into_iter()
        .collect(),
        types: vec![],
        constants: vec![],
        predicates: names.iter().map(|n| PredicateDecl { name: n.clone(), params: vec![] }).collect(),
        axioms: vec![],
        actions,
    };
    let init: Vec<InitAtom> = names
        .iter()
        .filter(|_| rng.gen_bool(0.4))
        .map(|n| InitAtom { pred: n.clone(), args: vec![] })
        .collect();
    let problem = FondProblem {
        name: "rnd".into(),
        domain: "rnd".into(),
        objects: vec![],
        init,
        goal: Cond::True,
    };
    pastfond::fond::validate_domain(&domain).expect("generated domain is well-formed");
    pastfond::fond::validate_problem(&domain, &problem).expect("generated problem is well-formed");
    let atoms = names.iter().map(|n| Atom::nullary(n.clone()).unwrap()).collect();
    SmallInstance { domain, problem, atoms }
}

/// Brute-force adversarial game on the original domain with the temporal
/// oracle as win condition: the agent picks actions, the environment picks
/// oneof outcomes, and the agent wins on positions whose trace-so-far
/// satisfies the goal. Solved by backward induction over the product of
/// domain states and evaluator memory, without touching the compiler or the
/// planner.
pub fn game_has_winning_strategy(d: &FondDomain, p: &FondProblem, goal: &Formula) -> bool {
    let m = GroundedModel::ground(d, p).expect("instance grounds");
    let ev = Evaluator::new(goal);

    #[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
    struct NodeKey(pastfond::fond::State, Valuation);

    struct Node {
        winning_now: bool,
        moves: Vec<Vec<usize>>, // per applicable action, successor node ids
    }

    let mut index: BTreeMap<NodeKey, usize> = BTreeMap::new();
    let mut nodes: Vec<Node> = Vec::new();
    let mut queue = std::collections::VecDeque::new();

    let root_key = NodeKey(m.initial_state().basic.clone(), ev.initial());
    index.insert(root_key.clone(), 0);
    queue.push_back(root_key);

    while let Some(key) = queue.pop_front() {
        let NodeKey(basic, valuation) = &key;
        let evaluated = m.evaluate(basic);
        let assignment = m.to_assignment(basic).expect("atom names are identifiers");
        let step = ev.step(valuation, &assignment).expect("valuation matches");
        let winning_now = step.goal_truth();
        let mut moves = Vec::new();
        if !winning_now {
            for action in m.applicable(&evaluated) {
                let mut succs = Vec::new();
                for succ in m.successors(&evaluated, action).expect("applicable") {
                    let succ_key = NodeKey(succ.basic.clone(), step.next.clone());
                    let id = match index.get(&succ_key) {
                        Some(id) => *id,
                        None => {
                            let id = index.len();
                            index.insert(succ_key.clone(), id);
                            queue.push_back(succ_key);
                            id
                        }
                    };
                    succs.push(id);
                }
                moves.push(succs);
            }
        }
        nodes.push(Node { winning_now, moves });
    }

    let n = nodes.len();
    let mut won: Vec<bool> = nodes.iter().map(|node| node.winning_now).collect();
    loop {
        let mut changed = false;
        for s in 0..n {
            if won[s] {
                continue;
            }
            if nodes[s].moves.iter().any(|succs| succs.iter().all(|t| won[*t])) {
                won[s] = true;
                changed = true;
            }
        }
        if !changed {
            return won[0];
        }
    }
}

/// All assignments over an alphabet, as reusable values.
pub fn alphabet_assignments(atoms: &[Atom]) -> Vec<Assignment> {
    let n = atoms.len();
    (0..(1usize << n))
        .map(|mask| {
            atoms
                .iter()
                .enumerate()
                .filter(|(i, _)| (mask >> i) & 1 == 1)
                .map(|(_, a)| a.clone())
                .collect()
        })
        .collect()
}

/// Standard three-atom alphabet for formula tests.
pub fn abc() -> Vec<Atom> {
    ["a", "b", "c"].iter().map(|n| Atom::nullary(*n).unwrap()).collect()
}
