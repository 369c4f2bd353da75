//! Canonical pretty-printer: two-space indent, one effect per line,
//! byte-stable output. `parse(print(x))` is the identity on the AST.

use super::ast::*;
use std::fmt::Write;

fn write_typed_list<'a, I>(out: &mut String, items: I)
where
    I: Iterator<Item = (&'a str, &'a str)>,
{
    // group consecutive names that share a type, PDDL style
    let items: Vec<(&str, &str)> = items.collect();
    let mut i = 0;
    let mut first = true;
    while i < items.len() {
        let ty = items[i].1;
        let mut j = i;
        while j < items.len() && items[j].1 == ty {
            j += 1;
        }
        if !first {
            out.push(' ');
        }
        first = false;
        let names: Vec<&str> = items[i..j].iter().map(|(n, _)| *n).collect();
        let _ = write!(out, "{} - {}", names.join(" "), ty);
        i = j;
    }
}

fn cond_to_sexp(c: &Cond) -> String {
    match c {
        Cond::True => "(and)".to_string(),
        Cond::Atom(a) => atom_to_sexp(a),
        Cond::Not(inner) => format!("(not {})", cond_to_sexp(inner)),
        Cond::And(cs) => {
            let parts: Vec<String> = cs.iter().map(cond_to_sexp).collect();
            format!("(and {})", parts.join(" "))
        }
        Cond::Or(cs) => {
            let parts: Vec<String> = cs.iter().map(cond_to_sexp).collect();
            format!("(or {})", parts.join(" "))
        }
    }
}

fn atom_to_sexp(a: &SchemaAtom) -> String {
    if a.terms.is_empty() {
        format!("({})", a.pred)
    } else {
        let terms: Vec<String> = a.terms.iter().map(|t| t.to_string()).collect();
        format!("({} {})", a.pred, terms.join(" "))
    }
}

fn literal_to_sexp(l: &Literal) -> String {
    if l.positive {
        atom_to_sexp(&l.atom)
    } else {
        format!("(not {})", atom_to_sexp(&l.atom))
    }
}

fn effect_line(e: &CondEffect) -> String {
    if e.when == Cond::True {
        literal_to_sexp(&e.literal)
    } else {
        format!("(when {} {})", cond_to_sexp(&e.when), literal_to_sexp(&e.literal))
    }
}

fn write_branch(out: &mut String, branch: &[CondEffect], indent: &str) {
    if branch.len() == 1 {
        let _ = write!(out, "{indent}{}", effect_line(&branch[0]));
        return;
    }
    let _ = write!(out, "{indent}(and");
    for e in branch {
        let _ = write!(out, "\n{indent}  {}", effect_line(e));
    }
    let _ = write!(out, ")");
}

pub fn print_domain(d: &FondDomain) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "(define (domain {})", d.name);
    if !d.requirements.is_empty() {
        let reqs: Vec<String> = d.requirements.iter().map(|r| r.to_string()).collect();
        let _ = writeln!(out, "  (:requirements {})", reqs.join(" "));
    }
    if !d.types.is_empty() {
        let mut line = String::new();
        write_typed_list(&mut line, d.types.iter().map(|t| (t.name.as_str(), t.parent.as_str())));
        let _ = writeln!(out, "  (:types {line})");
    }
    if !d.constants.is_empty() {
        let mut line = String::new();
        write_typed_list(&mut line, d.constants.iter().map(|c| (c.name.as_str(), c.ty.as_str())));
        let _ = writeln!(out, "  (:constants {line})");
    }
    if !d.predicates.is_empty() {
        let _ = writeln!(out, "  (:predicates");
        for (i, p) in d.predicates.iter().enumerate() {
            let sep = if i + 1 == d.predicates.len() { ")" } else { "" };
            let _ = writeln!(out, "    {}{sep}", pred_decl_to_sexp(p));
        }
    }
    for ax in &d.axioms {
        let _ = writeln!(out, "  (:derived {}", pred_decl_to_sexp(&ax.head));
        let _ = writeln!(out, "    {})", cond_to_sexp(&ax.body));
    }
    for a in &d.actions {
        let _ = writeln!(out, "  (:action {}", a.name);
        let mut rendered = String::new();
        write_typed_list_vars(&mut rendered, &a.params);
        let _ = writeln!(out, "    :parameters ({rendered})");
        let _ = writeln!(out, "    :precondition {}", cond_to_sexp(&a.precondition));
        if a.branches.len() == 1 {
            let _ = writeln!(out, "    :effect");
            write_branch(&mut out, &a.branches[0], "      ");
            let _ = writeln!(out, ")");
        } else {
            let _ = writeln!(out, "    :effect (oneof");
            for (i, b) in a.branches.iter().enumerate() {
                write_branch(&mut out, b, "      ");
                let _ = writeln!(out, "{}", if i + 1 == a.branches.len() { "))" } else { "" });
            }
        }
    }
    let _ = writeln!(out, ")");
    out
}

fn write_typed_list_vars(out: &mut String, params: &[TypedParam]) {
    let with_sigils: Vec<(String, &str)> =
        params.iter().map(|p| (format!("?{}", p.var), p.ty.as_str())).collect();
    let mut i = 0;
    let mut first = true;
    while i < with_sigils.len() {
        let ty = with_sigils[i].1;
        let mut j = i;
        while j < with_sigils.len() && with_sigils[j].1 == ty {
            j += 1;
        }
        if !first {
            out.push(' ');
        }
        first = false;
        let names: Vec<&str> = with_sigils[i..j].iter().map(|(n, _)| n.as_str()).collect();
        let _ = write!(out, "{} - {}", names.join(" "), ty);
        i = j;
    }
}

fn pred_decl_to_sexp(p: &PredicateDecl) -> String {
    if p.params.is_empty() {
        format!("({})", p.name)
    } else {
        let mut rendered = String::new();
        write_typed_list_vars(&mut rendered, &p.params);
        format!("({} {})", p.name, rendered)
    }
}

pub fn print_problem(p: &FondProblem) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "(define (problem {})", p.name);
    let _ = writeln!(out, "  (:domain {})", p.domain);
    if !p.objects.is_empty() {
        let mut line = String::new();
        write_typed_list(&mut line, p.objects.iter().map(|o| (o.name.as_str(), o.ty.as_str())));
        let _ = writeln!(out, "  (:objects {line})");
    }
    let _ = writeln!(out, "  (:init");
    for (i, atom) in p.init.iter().enumerate() {
        let sep = if i + 1 == p.init.len() { ")" } else { "" };
        if atom.args.is_empty() {
            let _ = writeln!(out, "    ({}){sep}", atom.pred);
        } else {
            let _ = writeln!(out, "    ({} {}){sep}", atom.pred, atom.args.join(" "));
        }
    }
    if p.init.is_empty() {
        let _ = writeln!(out, "  )");
    }
    let _ = writeln!(out, "  (:goal {})", cond_to_sexp(&p.goal));
    let _ = writeln!(out, ")");
    out
}

#[cfg(test)]
mod tests {
    use super::super::parser::{parse_domain, parse_problem};
    use super::*;

    const MINI: &str = "\
(define (domain mini)
  (:requirements :strips :typing :non-deterministic)
  (:types robot loc - object)
  (:predicates (at ?r - robot ?l - loc) (flag))
  (:action move
    :parameters (?r - robot ?from - loc ?to - loc)
    :precondition (and (at ?r ?from) (not (flag)))
    :effect (and (not (at ?r ?from)) (at ?r ?to)))
  (:action gamble
    :parameters (?r - robot ?a - loc ?b - loc)
    :precondition (and)
    :effect (oneof (and (at ?r ?a) (flag)) (at ?r ?b))))";

    #[test]
    fn domain_round_trip() {
        let d = parse_domain(MINI).unwrap();
        let printed = print_domain(&d);
        let reparsed = parse_domain(&printed).unwrap();
        assert_eq!(d, reparsed);
        // canonical print is a fixpoint
        assert_eq!(print_domain(&reparsed), printed);
    }

    #[test]
    fn problem_round_trip() {
        let text = "\
(define (problem p)
  (:domain mini)
  (:objects r - robot a b - loc)
  (:init (at r a))
  (:goal (and (at r b) (not (flag)))))";
        let p = parse_problem(text).unwrap();
        let printed = print_problem(&p);
        assert_eq!(parse_problem(&printed).unwrap(), p);
    }
}
