//! Toolkit for playing goal-directed games in unstructured environments:
//! pure-past temporal-logic goals are derived from a semantic map of the
//! perceived scene, compiled into plain FOND planning problems, solved with a
//! strong / strong-cyclic policy planner, and executed in a deterministic
//! grid micro-simulator that logs the induced trace for oracle checking.

pub mod assets;
pub mod compile;
pub mod fond;
pub mod hierarchy;
pub mod pipeline;
pub mod plan;
pub mod pltl;
pub mod semantic;
pub mod sim;
