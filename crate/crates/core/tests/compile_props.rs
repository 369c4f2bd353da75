//! Properties of the goal compilation: trace equivalence along random
//! executions, the linear symbol bound, and agreement between the compiled
//! goal's two emission styles.

mod common;

use common::{random_formula, random_instance};
use pastfond::compile::{added_symbol_count, compile, CompileOptions};
use pastfond::fond::GroundedModel;
use pastfond::pltl::{eval_trace, Trace};
use rand::prelude::*;

/// Random walks through the compiled model: projecting the basic world atoms
/// (dropping the memory fluents) must give a trace whose oracle verdict
/// matches the compiled goal's truth in the final state.
#[test]
fn compiled_goal_tracks_the_oracle_along_random_walks() {
    let mut rng = StdRng::seed_from_u64(0xC0FFEE);
    for round in 0..60 {
        let inst = random_instance(&mut rng, 4, 3);
        let goal = random_formula(&mut rng, 3, &inst.atoms);
        let (d2, p2, map) =
            compile(&inst.domain, &inst.problem, &goal, CompileOptions::default()).unwrap();
        let m = GroundedModel::ground(&d2, &p2).unwrap();
        let mem_names: Vec<&str> = map.memory.iter().map(|(_, n)| n.as_str()).collect();

        let mut state = m.initial_state();
        let mut trace = Trace::new();
        for _ in 0..rng.gen_range(1..=8usize) {
            let projected: pastfond::pltl::Assignment = state
                .basic
                .ones(m.basic_atoms.len())
                .map(|i| &m.basic_atoms[i])
                .filter(|a| !mem_names.contains(&a.pred.as_str()))
                .map(|a| a.to_pltl_atom().unwrap())
                .collect();
            trace.push(projected);

            let truth = eval_trace(&goal, &trace).unwrap();
            assert_eq!(
                m.is_goal(&state),
                truth,
                "round {round}: compiled goal diverges from the oracle on {goal}"
            );

            let apply = m.applicable(&state);
            if apply.is_empty() {
                break;
            }
            let action = apply[rng.gen_range(0..apply.len())];
            let succs = m.successors(&state, action).unwrap();
            state = succs[rng.gen_range(0..succs.len())].clone();
        }
    }
}

/// Atoms not mentioned by a fired effect keep their value across successors.
#[test]
fn frame_property_on_random_walks() {
    let mut rng = StdRng::seed_from_u64(0xF7A3E);
    for _ in 0..50 {
        let inst = random_instance(&mut rng, 5, 4);
        let m = GroundedModel::ground(&inst.domain, &inst.problem).unwrap();
        let mut state = m.initial_state();
        for _ in 0..8 {
            let apply = m.applicable(&state);
            if apply.is_empty() {
                break;
            }
            let action = apply[rng.gen_range(0..apply.len())];
            let succs = m.successors(&state, action).unwrap();
            for (branch, succ) in succs.iter().enumerate() {
                let fired: Vec<usize> = m.actions[action].branches[branch]
                    .iter()
                    .filter(|e| e.when.eval(&state))
                    .map(|e| e.atom)
                    .collect();
                for atom in 0..m.basic_atoms.len() {
                    if !fired.contains(&atom) {
                        assert_eq!(
                            state.basic.get(atom),
                            succ.basic.get(atom),
                            "untouched atom {} changed",
                            m.basic_atoms[atom]
                        );
                    }
                }
            }
            let pick = rng.gen_range(0..succs.len());
            state = succs.into_iter().nth(pick).unwrap();
        }
    }
}

#[test]
fn symbol_counts_are_linear_in_goal_size() {
    let mut rng = StdRng::seed_from_u64(42);
    let atoms = common::abc();
    for _ in 0..300 {
        let goal = random_formula(&mut rng, 4, &atoms);
        let (n_memory, n_derived) = added_symbol_count(&goal);
        assert!(n_memory + n_derived <= 2 * goal.size(), "bound violated for {goal}");
        assert!(n_memory <= goal.size());
        assert_eq!(n_derived, pastfond::pltl::subformulas(&goal).len());
    }
}

/// The unfolded goal and the derived goal accept exactly the same states.
#[test]
fn unfolded_goal_matches_derived_goal() {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..40 {
        let inst = random_instance(&mut rng, 4, 3);
        let goal = random_formula(&mut rng, 3, &inst.atoms);
        let derived_form =
            compile(&inst.domain, &inst.problem, &goal, CompileOptions::default()).unwrap();
        let unfolded_form = compile(
            &inst.domain,
            &inst.problem,
            &goal,
            CompileOptions { unfold_goal: true },
        )
        .unwrap();
        let md = GroundedModel::ground(&derived_form.0, &derived_form.1).unwrap();
        let mu = GroundedModel::ground(&unfolded_form.0, &unfolded_form.1).unwrap();
        // walk both models with the same action choices
        let mut sd = md.initial_state();
        let mut su = mu.initial_state();
        for _ in 0..6 {
            assert_eq!(md.is_goal(&sd), mu.is_goal(&su));
            let apply = md.applicable(&sd);
            if apply.is_empty() {
                break;
            }
            let action = apply[rng.gen_range(0..apply.len())];
            let branch = {
                let n = md.successors(&sd, action).unwrap().len();
                rng.gen_range(0..n)
            };
            sd = md.successors(&sd, action).unwrap().swap_remove(branch);
            su = mu.successors(&su, action).unwrap().swap_remove(branch);
        }
    }
}
