//! Semantic maps: frame, concept instances with poses, and the describing
//! predicate set, plus the count-based comparison metric and the deduced
//! planner predicates.

use super::{Ontology, PerceptSet, SemanticError};
use crate::pltl::Atom;
use std::collections::{BTreeMap, BTreeSet};

/// One geometric element of the map: a concept instance anchored in the
/// reference frame, with the percepts or parts it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub concept: String,
    pub id: String,
    pub x: f64,
    pub y: f64,
    pub sources: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SemanticMap {
    pub frame: String,
    pub instances: Vec<Instance>,
    pub predicates: BTreeSet<Atom>,
}

impl SemanticMap {
    pub fn count(&self, concept: &str) -> usize {
        self.instances.iter().filter(|i| i.concept == concept).count()
    }

    pub fn counts(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        for i in &self.instances {
            *out.entry(i.concept.clone()).or_insert(0) += 1;
        }
        out
    }

    pub fn instances_of<'a>(&'a self, concept: &'a str) -> impl Iterator<Item = &'a Instance> {
        self.instances.iter().filter(move |i| i.concept == concept)
    }

    /// Re-express the map in another frame through a rigid transform
    /// (rotation by `theta`, then translation).
    pub fn reframe(&self, frame: impl Into<String>, theta: f64, dx: f64, dy: f64) -> SemanticMap {
        let (sin, cos) = theta.sin_cos();
        let instances = self
            .instances
            .iter()
            .map(|i| Instance {
                x: i.x * cos - i.y * sin + dx,
                y: i.x * sin + i.y * cos + dy,
                ..i.clone()
            })
            .collect();
        SemanticMap { frame: frame.into(), instances, predicates: self.predicates.clone() }
    }
}

/// Instance id convention: the ball keeps its bare concept name, everything
/// else is numbered from 1 (`goalpost1`, `goal1`, `player1`, ...).
fn instance_id(concept: &str, ordinal: usize) -> String {
    let base = concept.to_ascii_lowercase();
    if base == "ball" && ordinal == 1 {
        base
    } else {
        format!("{base}{ordinal}")
    }
}

/// Lift percepts to concept instances: IsA for kinds, greedy nearest-pair
/// matching for pair rules (each part used once), IsPartOf aggregation for
/// the remaining wholes. The agent's own entry never becomes an instance.
pub fn conceptualize(ps: &PerceptSet, ont: &Ontology) -> Result<SemanticMap, SemanticError> {
    let mut percepts: Vec<&super::WorldObject> =
        ps.objects.iter().filter(|o| !o.is_agent()).collect();
    percepts.sort_by(|a, b| a.id.cmp(&b.id));

    let mut instances: Vec<Instance> = Vec::new();
    let mut ordinals: BTreeMap<String, usize> = BTreeMap::new();
    for obj in &percepts {
        let concept = match ont.direct_concept(&obj.kind) {
            Some(c) => c.to_string(),
            None => continue,
        };
        let n = ordinals.entry(concept.clone()).or_insert(0);
        *n += 1;
        instances.push(Instance {
            id: instance_id(&concept, *n),
            concept,
            x: obj.x,
            y: obj.y,
            sources: vec![obj.id.clone()],
        });
    }

    // pair rules: greedy nearest pair inside the distance window
    for rule in &ont.pairs {
        let parts: Vec<Instance> =
            instances.iter().filter(|i| i.concept == rule.part).cloned().collect();
        let mut candidates: Vec<(f64, String, String)> = Vec::new();
        for (k, a) in parts.iter().enumerate() {
            for b in parts.iter().skip(k + 1) {
                let d = ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt();
                if d >= rule.min && d <= rule.max {
                    candidates.push((d, a.id.clone(), b.id.clone()));
                }
            }
        }
        candidates.sort_by(|x, y| {
            x.0.partial_cmp(&y.0).unwrap().then_with(|| (&x.1, &x.2).cmp(&(&y.1, &y.2)))
        });
        let mut used: BTreeSet<String> = BTreeSet::new();
        for (_, ida, idb) in candidates {
            if used.contains(&ida) || used.contains(&idb) {
                continue;
            }
            used.insert(ida.clone());
            used.insert(idb.clone());
            let a = parts.iter().find(|i| i.id == ida).unwrap();
            let b = parts.iter().find(|i| i.id == idb).unwrap();
            let n = ordinals.entry(rule.whole.clone()).or_insert(0);
            *n += 1;
            instances.push(Instance {
                id: instance_id(&rule.whole, *n),
                concept: rule.whole.clone(),
                x: (a.x + b.x) / 2.0,
                y: (a.y + b.y) / 2.0,
                sources: vec![ida, idb],
            });
        }
    }

    // plain part-of aggregation: any parts yield one whole at their centroid
    for (part, whole) in ont.plain_aggregations() {
        let parts: Vec<Instance> =
            instances.iter().filter(|i| &i.concept == part).cloned().collect();
        if parts.is_empty() {
            continue;
        }
        let n = ordinals.entry(whole.clone()).or_insert(0);
        *n += 1;
        instances.push(Instance {
            id: instance_id(whole, *n),
            concept: whole.clone(),
            x: parts.iter().map(|p| p.x).sum::<f64>() / parts.len() as f64,
            y: parts.iter().map(|p| p.y).sum::<f64>() / parts.len() as f64,
            sources: parts.into_iter().map(|p| p.id).collect(),
        });
    }

    let mut predicates = BTreeSet::new();
    for i in &instances {
        predicates.insert(Atom::new("present", vec![i.id.clone()])?);
    }
    Ok(SemanticMap { frame: ps.frame.clone(), instances, predicates })
}

/// Weights of the two components of the comparison metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaWeights {
    pub geom: f64,
    pub pred: f64,
}

impl Default for DeltaWeights {
    fn default() -> Self {
        DeltaWeights { geom: 1.0, pred: 1.0 }
    }
}

impl DeltaWeights {
    pub fn new(geom: f64, pred: f64) -> Result<Self, SemanticError> {
        if geom < 0.0 || pred < 0.0 || (geom == 0.0 && pred == 0.0) {
            return Err(SemanticError::BadWeights);
        }
        Ok(DeltaWeights { geom, pred })
    }
}

/// Comparison metric between two maps sharing a frame: weighted sum of the
/// per-concept count differences and the predicate-set symmetric difference.
pub fn delta(a: &SemanticMap, b: &SemanticMap, w: DeltaWeights) -> Result<f64, SemanticError> {
    DeltaWeights::new(w.geom, w.pred)?;
    if a.frame != b.frame {
        return Err(SemanticError::FrameMismatch { a: a.frame.clone(), b: b.frame.clone() });
    }
    let ca = a.counts();
    let cb = b.counts();
    let concepts: BTreeSet<&String> = ca.keys().chain(cb.keys()).collect();
    let geom: usize = concepts
        .into_iter()
        .map(|c| {
            let x = ca.get(c).copied().unwrap_or(0);
            let y = cb.get(c).copied().unwrap_or(0);
            x.abs_diff(y)
        })
        .sum();
    let pred = a.predicates.symmetric_difference(&b.predicates).count();
    Ok(w.geom * geom as f64 + w.pred * pred as f64)
}

/// Normalization table from map instances into the planner vocabulary:
///
/// | concept | predicates |
/// |---------|------------|
/// | Ball    | `present(ball)`, `isat(ball, ballposition)` |
/// | Goal k  | `present(goal<k>)`, `isat(goal<k>, goalposition[<k>])` |
///
/// The first goal's location symbol is plain `goalposition`; later goals get
/// a numeric suffix. Everything else in the map stays at the conceptual
/// layer. Output atoms are checked against the vocabulary (`present/1`,
/// `isat/2`).
pub fn deduced_predicates(sm: &SemanticMap) -> Result<BTreeSet<Atom>, SemanticError> {
    let mut out = BTreeSet::new();
    for (k, inst) in sm.instances_of("Ball").enumerate() {
        out.insert(Atom::new("present", vec![inst.id.clone()])?);
        if k == 0 {
            out.insert(Atom::new("isat", vec![inst.id.clone(), "ballposition".into()])?);
        }
    }
    for (k, inst) in sm.instances_of("Goal").enumerate() {
        let loc = if k == 0 { "goalposition".to_string() } else { format!("goalposition{}", k + 1) };
        out.insert(Atom::new("present", vec![inst.id.clone()])?);
        out.insert(Atom::new("isat", vec![inst.id.clone(), loc])?);
    }
    for atom in &out {
        let ok = matches!(
            (atom.name(), atom.args().len()),
            ("present", 1) | ("isat", 2)
        );
        if !ok {
            return Err(SemanticError::OutsideUniverse { atom: atom.to_string() });
        }
    }
    Ok(out)
}
