//! Properties of the semantic layer: the comparison metric behaves like a
//! pseudo-metric on sampled maps, conceptualization is deterministic, and
//! perception monotonicity holds on the bundled scenarios.

mod common;

use pastfond::assets;
use pastfond::pltl::Atom;
use pastfond::semantic::{
    conceptualize, delta, load_scenario, perceive, DeltaWeights, Instance, SemanticMap,
};
use proptest::prelude::*;
use std::collections::BTreeSet;

/// Random semantic map over a small concept pool.
fn map_strategy() -> impl Strategy<Value = SemanticMap> {
    let concepts = ["Ball", "GoalPost", "Goal", "Field", "Player"];
    proptest::collection::vec(0usize..4, concepts.len()).prop_map(move |counts| {
        let mut instances = Vec::new();
        let mut predicates = BTreeSet::new();
        for (concept, n) in concepts.iter().zip(counts) {
            for k in 1..=n {
                let id = if *concept == "Ball" && k == 1 {
                    "ball".to_string()
                } else {
                    format!("{}{}", concept.to_ascii_lowercase(), k)
                };
                predicates.insert(Atom::new("present", vec![id.clone()]).unwrap());
                instances.push(Instance {
                    concept: concept.to_string(),
                    id,
                    x: k as f64,
                    y: 0.0,
                    sources: vec![],
                });
            }
        }
        SemanticMap { frame: "f".into(), instances, predicates }
    })
}

proptest! {
    #[test]
    fn delta_is_a_pseudo_metric(
        a in map_strategy(),
        b in map_strategy(),
        c in map_strategy(),
    ) {
        let w = DeltaWeights::default();
        let ab = delta(&a, &b, w).unwrap();
        let ba = delta(&b, &a, w).unwrap();
        let aa = delta(&a, &a, w).unwrap();
        let ac = delta(&a, &c, w).unwrap();
        let cb = delta(&c, &b, w).unwrap();
        prop_assert!(ab >= 0.0);
        prop_assert_eq!(ab, ba);
        prop_assert_eq!(aa, 0.0);
        prop_assert!(ab <= ac + cb, "triangle: d(a,b)={} d(a,c)={} d(c,b)={}", ab, ac, cb);
    }
}

#[test]
fn conceptualize_is_deterministic() {
    let ont = assets::default_ontology();
    for text in [
        assets::SCENARIO_BALL_ONLY,
        assets::SCENARIO_SODA_CANS,
        assets::SCENARIO_FOUR_POSTS,
        assets::SCENARIO_FULL_FIELD,
    ] {
        let sc = load_scenario(text, &ont).unwrap();
        let ps = perceive(&sc, 0.0, 0).unwrap();
        let a = conceptualize(&ps, &ont).unwrap();
        let b = conceptualize(&ps, &ont).unwrap();
        assert_eq!(a, b);
    }
}

/// Raising the dropout for a fixed seed only ever removes percepts, so the
/// selected level falls monotonically along a dropout sweep.
#[test]
fn dropout_sweep_lowers_levels_monotonically() {
    let ont = assets::default_ontology();
    let templates = assets::default_templates();
    let sc = load_scenario(assets::SCENARIO_FULL_FIELD, &ont).unwrap();
    let rank = |choice: &pastfond::hierarchy::LevelChoice| match choice {
        pastfond::hierarchy::LevelChoice::Idle { .. } => -1i32,
        pastfond::hierarchy::LevelChoice::Level(l) => *l as i32,
    };
    for seed in 0..50u64 {
        let mut prev = i32::MAX;
        for step in 0..10 {
            let dropout = step as f64 * 0.1;
            let ps = perceive(&sc, dropout, seed).unwrap();
            let sm = conceptualize(&ps, &ont).unwrap();
            let (choice, _) = pastfond::hierarchy::select_level(&sm, &templates).unwrap();
            let r = rank(&choice);
            assert!(r <= prev, "seed {seed}: level rose from {prev} to {r} at dropout {dropout}");
            prev = r;
        }
    }
}

/// Dropping percepts never increases any concept count.
#[test]
fn perception_is_monotone_on_bundled_scenarios() {
    let ont = assets::default_ontology();
    for text in [assets::SCENARIO_SODA_CANS, assets::SCENARIO_FOUR_POSTS, assets::SCENARIO_FULL_FIELD]
    {
        let sc = load_scenario(text, &ont).unwrap();
        let full = perceive(&sc, 0.0, 0).unwrap();
        let full_counts = conceptualize(&full, &ont).unwrap().counts();
        for seed in 0..200u64 {
            let ps = perceive(&sc, 0.5, seed).unwrap();
            let counts = conceptualize(&ps, &ont).unwrap().counts();
            for (concept, n) in counts {
                assert!(
                    n <= full_counts.get(&concept).copied().unwrap_or(0),
                    "seed {seed}: {concept} grew after dropping percepts"
                );
            }
        }
    }
}
