//! Structural validation: declared symbols, arities, typing, derived
//! predicates kept out of effects, and stratification of the axiom set.

use super::ast::*;
use super::FondError;
use std::collections::{BTreeMap, BTreeSet};

fn check_atom_shape(
    d: &FondDomain,
    atom: &SchemaAtom,
    vars: &BTreeMap<String, String>,
    context: &str,
) -> Result<(), FondError> {
    let decl = d.predicate(&atom.pred).ok_or_else(|| FondError::Undeclared {
        kind: "predicate".into(),
        name: atom.pred.clone(),
        context: context.into(),
    })?;
    if decl.params.len() != atom.terms.len() {
        return Err(FondError::ArityMismatch {
            pred: atom.pred.clone(),
            expected: decl.params.len(),
            got: atom.terms.len(),
        });
    }
    for (term, param) in atom.terms.iter().zip(&decl.params) {
        match term {
            Term::Var(v) => {
                let ty = vars.get(v).ok_or_else(|| FondError::Undeclared {
                    kind: "variable".into(),
                    name: format!("?{v}"),
                    context: context.into(),
                })?;
                if !d.type_compatible(ty, &param.ty) {
                    return Err(FondError::TypeMismatch {
                        what: format!("?{v}"),
                        ty: ty.clone(),
                        expected: param.ty.clone(),
                    });
                }
            }
            Term::Const(c) => {
                let ty = d
                    .constants
                    .iter()
                    .find(|k| &k.name == c)
                    .map(|k| k.ty.clone())
                    .ok_or_else(|| FondError::Undeclared {
                        kind: "constant".into(),
                        name: c.clone(),
                        context: context.into(),
                    })?;
                if !d.type_compatible(&ty, &param.ty) {
                    return Err(FondError::TypeMismatch {
                        what: c.clone(),
                        ty,
                        expected: param.ty.clone(),
                    });
                }
            }
        }
    }
    Ok(())
}

fn check_cond(
    d: &FondDomain,
    cond: &Cond,
    vars: &BTreeMap<String, String>,
    context: &str,
) -> Result<(), FondError> {
    for (atom, _) in cond.atoms_signed() {
        check_atom_shape(d, atom, vars, context)?;
    }
    Ok(())
}

fn param_map(params: &[TypedParam]) -> BTreeMap<String, String> {
    params.iter().map(|p| (p.var.clone(), p.ty.clone())).collect()
}

/// Stratification of the derived predicates: the dependency graph between
/// derived predicates must have no cycle through a negated reference.
/// Returns the stratum of each derived predicate name.
pub(crate) fn stratify(d: &FondDomain) -> Result<BTreeMap<String, usize>, FondError> {
    let derived: BTreeSet<&str> = d.axioms.iter().map(|a| a.head.name.as_str()).collect();
    // edges dep -> head, flagged negative when dep occurs under a negation
    let mut edges: Vec<(String, String, bool)> = Vec::new();
    for ax in &d.axioms {
        for (atom, positive) in ax.body.atoms_signed() {
            if derived.contains(atom.pred.as_str()) {
                edges.push((atom.pred.clone(), ax.head.name.clone(), !positive));
            }
        }
    }
    // longest-path layering; a negative edge bumps the stratum. If layers keep
    // growing past the number of predicates there is a negative cycle.
    let mut layer: BTreeMap<String, usize> =
        derived.iter().map(|n| (n.to_string(), 0usize)).collect();
    let bound = derived.len() + 1;
    for round in 0..=bound {
        let mut changed = false;
        for (dep, head, negative) in &edges {
            let need = layer[dep] + usize::from(*negative);
            if layer[head] < need {
                layer.insert(head.clone(), need);
                changed = true;
            }
        }
        if !changed {
            return Ok(layer);
        }
        if round == bound {
            break;
        }
    }
    // still changing: some cycle passes through a negation, or positive cycles
    // interleave with negative edges without a consistent layering
    let names: Vec<String> = derived.iter().map(|s| s.to_string()).collect();
    Err(FondError::NotStratified { involved: names.join(", ") })
}

pub fn validate_domain(d: &FondDomain) -> Result<(), FondError> {
    // type hierarchy: single inheritance, acyclic, parents known
    let type_names = d.type_names();
    let mut seen_types = BTreeSet::new();
    for t in &d.types {
        if !seen_types.insert(&t.name) {
            return Err(FondError::Duplicate { kind: "type".into(), name: t.name.clone() });
        }
        let mut current = t.name.clone();
        for _ in 0..=d.types.len() {
            match d.types.iter().find(|x| x.name == current) {
                Some(x) => current = x.parent.clone(),
                None => break,
            }
            if current == t.name {
                return Err(FondError::TypeCycle { name: t.name.clone() });
            }
        }
    }
    for c in &d.constants {
        if !type_names.contains(&c.ty) {
            return Err(FondError::Undeclared {
                kind: "type".into(),
                name: c.ty.clone(),
                context: format!("constant `{}`", c.name),
            });
        }
    }
    let mut pred_names = BTreeSet::new();
    for p in &d.predicates {
        if !pred_names.insert(&p.name) {
            return Err(FondError::Duplicate { kind: "predicate".into(), name: p.name.clone() });
        }
        for param in &p.params {
            if !type_names.contains(&param.ty) {
                return Err(FondError::Undeclared {
                    kind: "type".into(),
                    name: param.ty.clone(),
                    context: format!("predicate `{}`", p.name),
                });
            }
        }
    }

    // axioms: head declared as a predicate, body well-formed over head params,
    // and a gate on the requirement flag
    if !d.axioms.is_empty() && !d.requirements.contains(&Requirement::DerivedPredicates) {
        return Err(FondError::MissingRequirement {
            requirement: Requirement::DerivedPredicates.to_string(),
            construct: ":derived".into(),
        });
    }
    let derived: BTreeSet<&str> = d.axioms.iter().map(|a| a.head.name.as_str()).collect();
    for ax in &d.axioms {
        if d.predicate(&ax.head.name).is_none() {
            return Err(FondError::Undeclared {
                kind: "predicate".into(),
                name: ax.head.name.clone(),
                context: "axiom head".into(),
            });
        }
        let vars = param_map(&ax.head.params);
        check_cond(d, &ax.body, &vars, &format!("axiom `{}`", ax.head.name))?;
    }
    stratify(d)?;

    for a in &d.actions {
        let vars = param_map(&a.params);
        for param in &a.params {
            if !type_names.contains(&param.ty) {
                return Err(FondError::Undeclared {
                    kind: "type".into(),
                    name: param.ty.clone(),
                    context: format!("action `{}`", a.name),
                });
            }
        }
        check_cond(d, &a.precondition, &vars, &format!("action `{}` precondition", a.name))?;
        if a.branches.is_empty() {
            return Err(FondError::Parse {
                line: 0,
                col: 0,
                msg: format!("action `{}` has no effect branch", a.name),
            });
        }
        if a.branches.len() > 1 && !d.requirements.contains(&Requirement::NonDeterministic) {
            return Err(FondError::MissingRequirement {
                requirement: Requirement::NonDeterministic.to_string(),
                construct: "oneof".into(),
            });
        }
        for branch in &a.branches {
            for eff in branch {
                if eff.when != Cond::True
                    && !d.requirements.contains(&Requirement::ConditionalEffects)
                {
                    return Err(FondError::MissingRequirement {
                        requirement: Requirement::ConditionalEffects.to_string(),
                        construct: "when".into(),
                    });
                }
                check_cond(d, &eff.when, &vars, &format!("action `{}` effect condition", a.name))?;
                check_atom_shape(
                    d,
                    &eff.literal.atom,
                    &vars,
                    &format!("action `{}` effect", a.name),
                )?;
                if derived.contains(eff.literal.atom.pred.as_str()) {
                    return Err(FondError::DerivedInEffect {
                        pred: eff.literal.atom.pred.clone(),
                        action: a.name.clone(),
                    });
                }
            }
        }
    }
    Ok(())
}

pub fn validate_problem(d: &FondDomain, p: &FondProblem) -> Result<(), FondError> {
    if p.domain != d.name {
        return Err(FondError::DomainMismatch { expected: d.name.clone(), got: p.domain.clone() });
    }
    let type_names = d.type_names();
    let mut names = BTreeSet::new();
    for c in &d.constants {
        names.insert(c.name.clone());
    }
    for o in &p.objects {
        if !names.insert(o.name.clone()) {
            return Err(FondError::Duplicate { kind: "object".into(), name: o.name.clone() });
        }
        if !type_names.contains(&o.ty) {
            return Err(FondError::Undeclared {
                kind: "type".into(),
                name: o.ty.clone(),
                context: format!("object `{}`", o.name),
            });
        }
    }
    let object_type = |name: &str| -> Option<String> {
        d.constants
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.ty.clone())
            .or_else(|| p.objects.iter().find(|o| o.name == name).map(|o| o.ty.clone()))
    };
    let derived: BTreeSet<&str> = d.axioms.iter().map(|a| a.head.name.as_str()).collect();
    for atom in &p.init {
        if derived.contains(atom.pred.as_str()) {
            return Err(FondError::DerivedInInit { pred: atom.pred.clone() });
        }
        let decl = d.predicate(&atom.pred).ok_or_else(|| FondError::Undeclared {
            kind: "predicate".into(),
            name: atom.pred.clone(),
            context: "init".into(),
        })?;
        if decl.params.len() != atom.args.len() {
            return Err(FondError::ArityMismatch {
                pred: atom.pred.clone(),
                expected: decl.params.len(),
                got: atom.args.len(),
            });
        }
        for (arg, param) in atom.args.iter().zip(&decl.params) {
            let ty = object_type(arg).ok_or_else(|| FondError::Undeclared {
                kind: "object".into(),
                name: arg.clone(),
                context: "init".into(),
            })?;
            if !d.type_compatible(&ty, &param.ty) {
                return Err(FondError::TypeMismatch {
                    what: arg.clone(),
                    ty,
                    expected: param.ty.clone(),
                });
            }
        }
    }
    // goal: ground condition over declared symbols
    for (atom, _) in p.goal.atoms_signed() {
        let decl = d.predicate(&atom.pred).ok_or_else(|| FondError::Undeclared {
            kind: "predicate".into(),
            name: atom.pred.clone(),
            context: "goal".into(),
        })?;
        if decl.params.len() != atom.terms.len() {
            return Err(FondError::ArityMismatch {
                pred: atom.pred.clone(),
                expected: decl.params.len(),
                got: atom.terms.len(),
            });
        }
        for term in &atom.terms {
            match term {
                Term::Var(v) => {
                    return Err(FondError::Undeclared {
                        kind: "variable".into(),
                        name: format!("?{v}"),
                        context: "goal (must be ground)".into(),
                    })
                }
                Term::Const(c) => {
                    if object_type(c).is_none() {
                        return Err(FondError::Undeclared {
                            kind: "object".into(),
                            name: c.clone(),
                            context: "goal".into(),
                        });
                    }
                }
            }
        }
    }
    Ok(())
}
