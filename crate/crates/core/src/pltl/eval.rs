//! Finite-trace semantics via a single-step memory update.
//!
//! For a formula `g` the evaluator keeps one boolean memory cell per
//! temporally-headed sub-formula. At each instant the truth of every
//! sub-formula is computed bottom-up from the current assignment and the
//! *previous* cell values:
//!
//! ```text
//! Y a     = cell            (cell stores the truth of a, one instant ago)
//! WY a    = cell            (same cell rule, different initial value)
//! O a     = a  or cell      (cell stores the truth of O a, one instant ago)
//! H a     = a  and cell     (cell stores the truth of H a, one instant ago)
//! a S b   = b  or (a and cell)
//! ```
//!
//! After the bottom-up pass the cells are refreshed: `Y`/`WY` cells take the
//! truth of their operand, `O`/`H`/`S` cells take the truth of the whole
//! sub-formula. The initial valuation makes the first instant collapse to the
//! first-instant semantics (`O a = a`, `H a = a`, `a S b = b`, `Y a = false`,
//! `WY a = true`): `Y`/`O`/`S` cells start false, `WY`/`H` cells start true.
//!
//! `eval_trace` folds this step over a trace and reads the truth of the whole
//! formula at the final instant; it is the reference oracle for the goal
//! compiler, the planner's verifier and the simulator verdict.

use super::{Assignment, Atom, Formula, Trace};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("cannot evaluate on an empty trace")]
    EmptyTrace,
    #[error("memory valuation has {got} cells, formula needs {expected}")]
    ValuationSize { expected: usize, got: usize },
}

/// The sub-formulas of a formula, children before parents, deduplicated by
/// structural equality. The last entry is the formula itself.
#[derive(Debug, Clone)]
pub struct Subformulas {
    list: Vec<Formula>,
}

impl Subformulas {
    pub fn list(&self) -> &[Formula] {
        &self.list
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }

    pub fn index_of(&self, f: &Formula) -> Option<usize> {
        self.list.iter().position(|g| g == f)
    }
}

/// Compute `sub(g)` in children-before-parents order.
pub fn subformulas(f: &Formula) -> Subformulas {
    let mut list: Vec<Formula> = Vec::new();
    fn walk(f: &Formula, list: &mut Vec<Formula>) {
        match f {
            Formula::True | Formula::False | Formula::Atom(_) => {}
            Formula::Not(g)
            | Formula::Yesterday(g)
            | Formula::WeakYesterday(g)
            | Formula::Once(g)
            | Formula::Historically(g) => walk(g, list),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Since(a, b) => {
                walk(a, list);
                walk(b, list);
            }
        }
        if !list.contains(f) {
            list.push(f.clone());
        }
    }
    walk(f, &mut list);
    Subformulas { list }
}

/// Which past operator heads a memory cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MemoryKind {
    Yesterday,
    WeakYesterday,
    Once,
    Historically,
    Since,
}

impl MemoryKind {
    /// Cell value before the first instant.
    pub fn initial(self) -> bool {
        match self {
            MemoryKind::Yesterday | MemoryKind::Once | MemoryKind::Since => false,
            MemoryKind::WeakYesterday | MemoryKind::Historically => true,
        }
    }
}

/// One memory cell: a temporally-headed member of `sub(g)` together with its
/// position in the sub-formula order, which also names the cell.
#[derive(Debug, Clone)]
pub struct MemoryCell {
    pub formula: Formula,
    pub sub_index: usize,
    pub kind: MemoryKind,
}

impl MemoryCell {
    /// Deterministic cell name derived from the topological index.
    pub fn name(&self) -> String {
        format!("val_{}", self.sub_index)
    }
}

/// The memory set: exactly the temporally-headed sub-formulas, in
/// sub-formula order.
#[derive(Debug, Clone)]
pub struct MemorySet {
    cells: Vec<MemoryCell>,
}

impl MemorySet {
    pub fn cells(&self) -> &[MemoryCell] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn index_of(&self, f: &Formula) -> Option<usize> {
        self.cells.iter().position(|c| &c.formula == f)
    }

    /// Valuation for the first instant.
    pub fn initial(&self) -> Valuation {
        Valuation { values: self.cells.iter().map(|c| c.kind.initial()).collect() }
    }
}

/// Extract the memory set of a formula.
pub fn memory_set(f: &Formula) -> MemorySet {
    let subs = subformulas(f);
    let mut cells = Vec::new();
    for (i, s) in subs.list().iter().enumerate() {
        let kind = match s {
            Formula::Yesterday(_) => MemoryKind::Yesterday,
            Formula::WeakYesterday(_) => MemoryKind::WeakYesterday,
            Formula::Once(_) => MemoryKind::Once,
            Formula::Historically(_) => MemoryKind::Historically,
            Formula::Since(_, _) => MemoryKind::Since,
            _ => continue,
        };
        cells.push(MemoryCell { formula: s.clone(), sub_index: i, kind });
    }
    MemorySet { cells }
}

/// Total mapping from memory cells to booleans, positional over a
/// [`MemorySet`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Valuation {
    values: Vec<bool>,
}

impl Valuation {
    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn get(&self, cell: usize) -> Option<bool> {
        self.values.get(cell).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn from_values(values: Vec<bool>) -> Self {
        Valuation { values }
    }
}

enum Node {
    True,
    False,
    Atom(Atom),
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Implies(usize, usize),
    Yesterday { cell: usize },
    WeakYesterday { cell: usize },
    Once { child: usize, cell: usize },
    Historically { child: usize, cell: usize },
    Since { lhs: usize, rhs: usize, cell: usize },
}

enum CellSource {
    Operand(usize),
    SelfTruth(usize),
}

/// Reusable single-step evaluator for one formula. Pre-compiles the
/// sub-formula table so that stepping allocates only the output vectors.
pub struct Evaluator {
    subs: Subformulas,
    memory: MemorySet,
    nodes: Vec<Node>,
    cell_updates: Vec<CellSource>,
}

/// Result of one step: the truth of every sub-formula at this instant plus
/// the refreshed memory valuation.
pub struct Step {
    truths: Vec<bool>,
    pub next: Valuation,
}

impl Step {
    /// Truth of the sub-formula with the given index.
    pub fn truth(&self, sub_index: usize) -> bool {
        self.truths[sub_index]
    }

    /// Truth of the whole formula at this instant.
    pub fn goal_truth(&self) -> bool {
        *self.truths.last().expect("formula has at least one sub-formula")
    }

    pub fn truths(&self) -> &[bool] {
        &self.truths
    }
}

impl Evaluator {
    pub fn new(f: &Formula) -> Self {
        let subs = subformulas(f);
        let memory = memory_set(f);
        let idx = |g: &Formula| subs.index_of(g).expect("child precedes parent");
        let cell = |g: &Formula| memory.index_of(g).expect("temporal head has a cell");
        let mut nodes = Vec::with_capacity(subs.len());
        for s in subs.list() {
            let node = match s {
                Formula::True => Node::True,
                Formula::False => Node::False,
                Formula::Atom(a) => Node::Atom(a.clone()),
                Formula::Not(g) => Node::Not(idx(g)),
                Formula::And(a, b) => Node::And(idx(a), idx(b)),
                Formula::Or(a, b) => Node::Or(idx(a), idx(b)),
                Formula::Implies(a, b) => Node::Implies(idx(a), idx(b)),
                Formula::Yesterday(_) => Node::Yesterday { cell: cell(s) },
                Formula::WeakYesterday(_) => Node::WeakYesterday { cell: cell(s) },
                Formula::Once(g) => Node::Once { child: idx(g), cell: cell(s) },
                Formula::Historically(g) => Node::Historically { child: idx(g), cell: cell(s) },
                Formula::Since(a, b) => Node::Since { lhs: idx(a), rhs: idx(b), cell: cell(s) },
            };
            nodes.push(node);
        }
        let cell_updates = memory
            .cells()
            .iter()
            .map(|c| match &c.formula {
                Formula::Yesterday(g) | Formula::WeakYesterday(g) => CellSource::Operand(idx(g)),
                _ => CellSource::SelfTruth(c.sub_index),
            })
            .collect();
        Evaluator { subs, memory, nodes, cell_updates }
    }

    pub fn subformulas(&self) -> &Subformulas {
        &self.subs
    }

    pub fn memory(&self) -> &MemorySet {
        &self.memory
    }

    pub fn initial(&self) -> Valuation {
        self.memory.initial()
    }

    /// Evaluate one instant given the previous memory valuation.
    pub fn step(&self, prev: &Valuation, s: &Assignment) -> Result<Step, EvalError> {
        if prev.len() != self.memory.len() {
            return Err(EvalError::ValuationSize { expected: self.memory.len(), got: prev.len() });
        }
        let mut truths = vec![false; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            truths[i] = match node {
                Node::True => true,
                Node::False => false,
                Node::Atom(a) => s.contains(a),
                Node::Not(c) => !truths[*c],
                Node::And(a, b) => truths[*a] && truths[*b],
                Node::Or(a, b) => truths[*a] || truths[*b],
                Node::Implies(a, b) => !truths[*a] || truths[*b],
                Node::Yesterday { cell } => prev.values[*cell],
                Node::WeakYesterday { cell } => prev.values[*cell],
                Node::Once { child, cell } => truths[*child] || prev.values[*cell],
                Node::Historically { child, cell } => truths[*child] && prev.values[*cell],
                Node::Since { lhs, rhs, cell } => {
                    truths[*rhs] || (truths[*lhs] && prev.values[*cell])
                }
            };
        }
        let next = Valuation {
            values: self
                .cell_updates
                .iter()
                .map(|u| match u {
                    CellSource::Operand(i) => truths[*i],
                    CellSource::SelfTruth(i) => truths[*i],
                })
                .collect(),
        };
        Ok(Step { truths, next })
    }

    /// Fold over a whole trace; truth of the formula at the final instant.
    pub fn eval(&self, trace: &Trace) -> Result<bool, EvalError> {
        if trace.is_empty() {
            return Err(EvalError::EmptyTrace);
        }
        let mut val = self.initial();
        let mut last = false;
        for s in trace.instants() {
            let step = self.step(&val, s)?;
            last = step.goal_truth();
            val = step.next;
        }
        Ok(last)
    }
}

/// One-shot step: truth of every sub-formula plus the next valuation.
/// Convenience wrapper over [`Evaluator`] for callers that step rarely.
pub fn step_val(
    f: &Formula,
    prev: &Valuation,
    s: &Assignment,
) -> Result<(Vec<(Formula, bool)>, Valuation), EvalError> {
    let ev = Evaluator::new(f);
    let step = ev.step(prev, s)?;
    let truth = ev
        .subs
        .list()
        .iter()
        .cloned()
        .zip(step.truths.iter().copied())
        .collect();
    Ok((truth, step.next))
}

/// Satisfaction of `f` at the final instant of `trace`.
pub fn eval_trace(f: &Formula, trace: &Trace) -> Result<bool, EvalError> {
    Evaluator::new(f).eval(trace)
}
