//! Grid world, environment registry and the built-in action semantics.
//!
//! Poses discretize to cells (default 0.5 m). The registry binds the policy's
//! symbols to world elements; `ballposition` is a live binding that always
//! names the ball's current cell, and `openfield` matches any cell that no
//! named spot claims. Built-in actions:
//!
//! * `moveto` — robot teleports to the target cell (deterministic);
//! * `kick` — branch 0 sends the ball into the goal mouth (scoring when the
//!   target is a goal mouth), branch 1 drops it at the midpoint cell;
//! * `dribble`/`protect` — robot and ball advance one cell toward the goal,
//!   holding one cell short of the mouth, and the ball becomes safe.

use super::SimError;
use crate::fond::{GroundAction, GroundedModel};
use crate::pltl::{Assignment, Atom};
use crate::semantic::{Scenario, SemanticMap, AGENT_ID};
use crate::plan::Policy;
use std::collections::{BTreeMap, BTreeSet};

pub const DEFAULT_CELL_SIZE: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Cell {
    pub x: i32,
    pub y: i32,
}

impl Cell {
    fn from_pose(x: f64, y: f64, cell_size: f64) -> Cell {
        Cell { x: (x / cell_size).round() as i32, y: (y / cell_size).round() as i32 }
    }

    fn dist2(&self, other: &Cell) -> i64 {
        let dx = (self.x - other.x) as i64;
        let dy = (self.y - other.y) as i64;
        dx * dx + dy * dy
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoalMark {
    pub id: String,
    pub mouth: Cell,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorldState {
    pub cell_size: f64,
    pub robot: Cell,
    pub start: Cell,
    pub ball: Cell,
    pub goals: Vec<GoalMark>,
    pub goalscored: bool,
    pub ballsafe: bool,
    pub steps: u32,
}

impl WorldState {
    pub fn from_scene(
        sc: &Scenario,
        sm: &SemanticMap,
        cell_size: f64,
    ) -> Result<WorldState, SimError> {
        let ball = sm
            .instances_of("Ball")
            .next()
            .map(|b| Cell::from_pose(b.x, b.y, cell_size))
            .ok_or(SimError::NoBall)?;
        let start = sc
            .agent()
            .map(|a| Cell::from_pose(a.x, a.y, cell_size))
            .unwrap_or(Cell { x: 0, y: 0 });
        let goals = sm
            .instances_of("Goal")
            .map(|g| GoalMark { id: g.id.clone(), mouth: Cell::from_pose(g.x, g.y, cell_size) })
            .collect();
        Ok(WorldState {
            cell_size,
            robot: start,
            start,
            ball,
            goals,
            goalscored: false,
            ballsafe: false,
            steps: 0,
        })
    }
}

/// What a policy symbol stands for in the world.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Binding {
    RobotSelf,
    BallItem,
    BallCell,
    StartCell,
    GoalMouth(String),
    GoalItem(String),
    Wildcard,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Registry {
    pub bindings: BTreeMap<String, Binding>,
}

impl Registry {
    pub fn binding(&self, symbol: &str) -> Option<&Binding> {
        self.bindings.get(symbol)
    }

    fn mouth_of(&self, w: &WorldState, id: &str) -> Option<Cell> {
        w.goals.iter().find(|g| g.id == id).map(|g| g.mouth)
    }

    /// Cell a location symbol currently names, if it is a location.
    pub fn resolve_cell(&self, symbol: &str, w: &WorldState) -> Option<Cell> {
        match self.bindings.get(symbol)? {
            Binding::BallCell => Some(w.ball),
            Binding::StartCell => Some(w.start),
            Binding::GoalMouth(id) => self.mouth_of(w, id),
            _ => None,
        }
    }

    /// The goal mouth kicks and dribbles aim at.
    pub fn target_mouth(&self, w: &WorldState) -> Option<Cell> {
        self.bindings.values().find_map(|b| match b {
            Binding::GoalMouth(id) => self.mouth_of(w, id),
            _ => None,
        })
    }
}

/// Bind every symbol the policy mentions to a world element. `goalposition`
/// resolves to the opponent goal: the mouth farther from the start pose
/// (ties broken by instance id).
pub fn build_registry(
    policy: &Policy,
    m: &GroundedModel,
    sm: &SemanticMap,
    w: &WorldState,
) -> Result<Registry, SimError> {
    let mut symbols: BTreeSet<String> = BTreeSet::new();
    for (state, action) in &policy.entries {
        for name in m.state_atom_names(state) {
            if let Ok(atom) = crate::pltl::parse_atom(&name) {
                for arg in atom.args() {
                    symbols.insert(arg.clone());
                }
            }
        }
        symbols.extend(m.actions[*action].args.iter().cloned());
    }
    let opponent = || -> Option<String> {
        w.goals
            .iter()
            .max_by(|a, b| {
                a.mouth
                    .dist2(&w.start)
                    .cmp(&b.mouth.dist2(&w.start))
                    .then_with(|| b.id.cmp(&a.id))
            })
            .map(|g| g.id.clone())
    };
    let mut bindings = BTreeMap::new();
    for symbol in symbols {
        let binding = match symbol.as_str() {
            AGENT_ID => Binding::RobotSelf,
            "ball" => {
                if sm.instances_of("Ball").next().is_none() {
                    return Err(SimError::Unresolvable { symbol });
                }
                Binding::BallItem
            }
            "ballposition" => {
                if sm.instances_of("Ball").next().is_none() {
                    return Err(SimError::Unresolvable { symbol: "ballposition".into() });
                }
                Binding::BallCell
            }
            "startposition" => Binding::StartCell,
            "openfield" => Binding::Wildcard,
            "goalposition" => match opponent() {
                Some(id) => Binding::GoalMouth(id),
                None => return Err(SimError::Unresolvable { symbol }),
            },
            "goal1" => match opponent() {
                Some(id) => Binding::GoalItem(id),
                None => return Err(SimError::Unresolvable { symbol }),
            },
            _ => return Err(SimError::Unresolvable { symbol }),
        };
        bindings.insert(symbol, binding);
    }
    Ok(Registry { bindings })
}

/// Ground atoms the policy states are keyed on, as a function of the world.
pub fn runtime_fluents(w: &WorldState, reg: &Registry) -> Assignment {
    let mut atoms: Vec<Atom> = Vec::new();
    let atom = |name: &str, args: Vec<String>| {
        Atom::new(name, args).expect("registry symbols are identifiers")
    };
    // named locations currently in play
    let mut locations: Vec<(String, Cell)> = Vec::new();
    let mut wildcard: Option<String> = None;
    for (symbol, binding) in &reg.bindings {
        match binding {
            Binding::BallCell => locations.push((symbol.clone(), w.ball)),
            Binding::StartCell => locations.push((symbol.clone(), w.start)),
            Binding::GoalMouth(id) => {
                if let Some(cell) = reg.mouth_of(w, id) {
                    locations.push((symbol.clone(), cell));
                }
            }
            Binding::Wildcard => wildcard = Some(symbol.clone()),
            _ => {}
        }
    }
    // entities and their cells
    let mut entities: Vec<(String, Cell)> = Vec::new();
    for (symbol, binding) in &reg.bindings {
        match binding {
            Binding::RobotSelf => entities.push((symbol.clone(), w.robot)),
            Binding::BallItem => {
                entities.push((symbol.clone(), w.ball));
                atoms.push(atom("present", vec![symbol.clone()]));
            }
            Binding::GoalItem(id) => {
                if let Some(cell) = reg.mouth_of(w, id) {
                    entities.push((symbol.clone(), cell));
                    atoms.push(atom("present", vec![symbol.clone()]));
                }
            }
            _ => {}
        }
    }
    for (entity, cell) in &entities {
        let mut anywhere = false;
        for (location, lcell) in &locations {
            if cell == lcell {
                atoms.push(atom("isat", vec![entity.clone(), location.clone()]));
                anywhere = true;
            }
        }
        if !anywhere {
            if let Some(of) = &wildcard {
                atoms.push(atom("isat", vec![entity.clone(), of.clone()]));
            }
        }
    }
    if w.goalscored {
        atoms.push(atom("goalscored", vec![]));
    }
    if w.ballsafe {
        atoms.push(atom("ballsafe", vec![]));
    }
    atoms.into_iter().collect()
}

fn toward(from: Cell, to: Cell) -> Cell {
    Cell { x: from.x + (to.x - from.x).signum(), y: from.y + (to.y - from.y).signum() }
}

/// Apply one ground action to the world. Returns the new world and the
/// oneof branch index that fired.
pub fn step(
    w: &WorldState,
    action: &GroundAction,
    reg: &Registry,
    stream: &mut super::SeedStream,
) -> Result<(WorldState, usize), SimError> {
    let mut next = w.clone();
    next.steps += 1;
    let branch = match action.name.as_str() {
        "moveto" => {
            let target_symbol = action.args.get(2).cloned().unwrap_or_default();
            let target = reg
                .resolve_cell(&target_symbol, w)
                .ok_or(SimError::Unresolvable { symbol: target_symbol })?;
            next.robot = target;
            0
        }
        "kick" => {
            let target = reg.target_mouth(w).ok_or(SimError::NoTarget {
                action: action.display_name(),
            })?;
            let branch = stream.choice(action.branches.len());
            if branch == 0 {
                next.ball = target;
                let is_mouth = w.goals.iter().any(|g| g.mouth == target);
                if is_mouth {
                    next.goalscored = true;
                }
            } else {
                // short kick: midpoint cell; adjacent kicks leave the ball
                let mid = Cell {
                    x: w.ball.x + (target.x - w.ball.x) / 2,
                    y: w.ball.y + (target.y - w.ball.y) / 2,
                };
                next.ball = mid;
            }
            branch
        }
        "dribble" | "protect" => {
            if let Some(target) = reg.target_mouth(w) {
                let advanced = toward(w.ball, target);
                if advanced != target {
                    next.ball = advanced;
                    next.robot = advanced;
                }
            }
            next.ballsafe = true;
            0
        }
        other => return Err(SimError::UnknownAction(other.to_string())),
    };
    Ok((next, branch))
}
