//! Parser for the supported PDDL subset. Unsupported constructs are rejected
//! with their source location rather than skipped.

use super::ast::*;
use super::FondError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone)]
enum Sexp {
    Sym(String, Pos),
    List(Vec<Sexp>, Pos),
}

impl Sexp {
    fn pos(&self) -> Pos {
        match self {
            Sexp::Sym(_, p) | Sexp::List(_, p) => *p,
        }
    }

    fn sym(&self) -> Option<&str> {
        match self {
            Sexp::Sym(s, _) => Some(s),
            Sexp::List(_, _) => None,
        }
    }

    fn list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(items, _) => Some(items),
            Sexp::Sym(_, _) => None,
        }
    }

    fn head(&self) -> Option<&str> {
        self.list().and_then(|items| items.first()).and_then(|s| s.sym())
    }
}

fn err(pos: Pos, msg: impl Into<String>) -> FondError {
    FondError::Parse { line: pos.line, col: pos.col, msg: msg.into() }
}

fn tokenize(text: &str) -> Result<Vec<(String, Pos)>, FondError> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut cur = String::new();
    let mut cur_pos = Pos { line: 1, col: 1 };
    let mut in_comment = false;
    for c in text.chars() {
        let here = Pos { line, col };
        if c == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
        if in_comment {
            if c == '\n' {
                in_comment = false;
            }
            continue;
        }
        match c {
            ';' => {
                if !cur.is_empty() {
                    out.push((std::mem::take(&mut cur), cur_pos));
                }
                in_comment = true;
            }
            '(' | ')' => {
                if !cur.is_empty() {
                    out.push((std::mem::take(&mut cur), cur_pos));
                }
                out.push((c.to_string(), here));
            }
            c if c.is_whitespace() => {
                if !cur.is_empty() {
                    out.push((std::mem::take(&mut cur), cur_pos));
                }
            }
            c => {
                if cur.is_empty() {
                    cur_pos = here;
                }
                // symbols are case-insensitive in PDDL; normalize down
                for lc in c.to_lowercase() {
                    cur.push(lc);
                }
            }
        }
    }
    if !cur.is_empty() {
        out.push((cur, cur_pos));
    }
    Ok(out)
}

fn read(tokens: &[(String, Pos)], at: &mut usize) -> Result<Sexp, FondError> {
    let (tok, pos) = tokens
        .get(*at)
        .ok_or(FondError::Parse { line: 0, col: 0, msg: "unexpected end of input".into() })?;
    *at += 1;
    match tok.as_str() {
        "(" => {
            let mut items = Vec::new();
            loop {
                match tokens.get(*at) {
                    Some((t, _)) if t == ")" => {
                        *at += 1;
                        return Ok(Sexp::List(items, *pos));
                    }
                    Some(_) => items.push(read(tokens, at)?),
                    None => return Err(err(*pos, "unclosed `(`")),
                }
            }
        }
        ")" => Err(err(*pos, "unexpected `)`")),
        _ => Ok(Sexp::Sym(tok.clone(), *pos)),
    }
}

fn read_all(text: &str) -> Result<Sexp, FondError> {
    let tokens = tokenize(text)?;
    let mut at = 0;
    let sexp = read(&tokens, &mut at)?;
    if at != tokens.len() {
        return Err(err(tokens[at].1, "trailing content after top-level form"));
    }
    Ok(sexp)
}

/// Parse `name ... - type name ... - type name ...` segments. Untyped names
/// default to `object`.
fn parse_typed_names(items: &[Sexp]) -> Result<Vec<(String, String)>, FondError> {
    let mut pending: Vec<String> = Vec::new();
    let mut out = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let sym = items[i]
            .sym()
            .ok_or_else(|| err(items[i].pos(), "expected a name in typed list"))?;
        if sym == "-" {
            i += 1;
            let ty = items
                .get(i)
                .and_then(|s| s.sym())
                .ok_or_else(|| err(items[i - 1].pos(), "expected a type after `-`"))?;
            for name in pending.drain(..) {
                out.push((name, ty.to_string()));
            }
        } else {
            pending.push(sym.to_string());
        }
        i += 1;
    }
    for name in pending {
        out.push((name, "object".to_string()));
    }
    Ok(out)
}

fn parse_params(items: &[Sexp]) -> Result<Vec<TypedParam>, FondError> {
    let pos = items.first().map(|s| s.pos()).unwrap_or(Pos { line: 0, col: 0 });
    let typed = parse_typed_names(items)?;
    typed
        .into_iter()
        .map(|(name, ty)| {
            let var = name
                .strip_prefix('?')
                .ok_or_else(|| err(pos, format!("parameter `{name}` must start with `?`")))?;
            Ok(TypedParam { var: var.to_string(), ty })
        })
        .collect()
}

fn parse_schema_atom(sexp: &Sexp) -> Result<SchemaAtom, FondError> {
    let items = sexp.list().ok_or_else(|| err(sexp.pos(), "expected an atom"))?;
    let pred = items
        .first()
        .and_then(|s| s.sym())
        .ok_or_else(|| err(sexp.pos(), "expected a predicate name"))?;
    let mut terms = Vec::new();
    for t in &items[1..] {
        let sym = t.sym().ok_or_else(|| err(t.pos(), "expected a term"))?;
        terms.push(match sym.strip_prefix('?') {
            Some(v) => Term::Var(v.to_string()),
            None => Term::Const(sym.to_string()),
        });
    }
    Ok(SchemaAtom { pred: pred.to_string(), terms })
}

fn parse_cond(sexp: &Sexp) -> Result<Cond, FondError> {
    let items = sexp.list().ok_or_else(|| err(sexp.pos(), "expected a condition"))?;
    match items.first().and_then(|s| s.sym()) {
        Some("and") => {
            if items.len() == 1 {
                Ok(Cond::True)
            } else {
                Ok(Cond::And(items[1..].iter().map(parse_cond).collect::<Result<_, _>>()?))
            }
        }
        Some("or") => Ok(Cond::Or(items[1..].iter().map(parse_cond).collect::<Result<_, _>>()?)),
        Some("not") => {
            if items.len() != 2 {
                return Err(err(sexp.pos(), "`not` takes exactly one operand"));
            }
            Ok(Cond::not(parse_cond(&items[1])?))
        }
        Some(kw) if kw.starts_with(':') || kw == "forall" || kw == "exists" || kw == "imply" => {
            Err(err(sexp.pos(), format!("unsupported construct `{kw}` in condition")))
        }
        Some(_) => Ok(Cond::Atom(parse_schema_atom(sexp)?)),
        None => Err(err(sexp.pos(), "empty condition")),
    }
}

fn parse_literal(sexp: &Sexp) -> Result<Literal, FondError> {
    match sexp.head() {
        Some("not") => {
            let items = sexp.list().unwrap();
            if items.len() != 2 {
                return Err(err(sexp.pos(), "`not` takes exactly one literal"));
            }
            Ok(Literal { positive: false, atom: parse_schema_atom(&items[1])? })
        }
        _ => Ok(Literal { positive: true, atom: parse_schema_atom(sexp)? }),
    }
}

/// Effects inside a branch: literals and `when` clauses, possibly grouped
/// under `and`.
fn parse_branch(sexp: &Sexp) -> Result<Vec<CondEffect>, FondError> {
    let mut out = Vec::new();
    collect_branch_effects(sexp, &mut out)?;
    Ok(out)
}

fn collect_branch_effects(sexp: &Sexp, out: &mut Vec<CondEffect>) -> Result<(), FondError> {
    match sexp.head() {
        Some("and") => {
            for item in &sexp.list().unwrap()[1..] {
                collect_branch_effects(item, out)?;
            }
            Ok(())
        }
        Some("when") => {
            let items = sexp.list().unwrap();
            if items.len() != 3 {
                return Err(err(sexp.pos(), "`when` takes a condition and an effect"));
            }
            let when = parse_cond(&items[1])?;
            match items[2].head() {
                Some("and") => {
                    for lit in &items[2].list().unwrap()[1..] {
                        out.push(CondEffect { when: when.clone(), literal: parse_literal(lit)? });
                    }
                }
                _ => out.push(CondEffect { when, literal: parse_literal(&items[2])? }),
            }
            Ok(())
        }
        Some("oneof") => Err(err(sexp.pos(), "nested `oneof` is not supported")),
        Some("forall") => Err(err(sexp.pos(), "unsupported construct `forall` in effect")),
        _ => {
            out.push(CondEffect::unconditional(parse_literal(sexp)?));
            Ok(())
        }
    }
}

fn parse_effect(sexp: &Sexp) -> Result<Vec<Vec<CondEffect>>, FondError> {
    match sexp.head() {
        Some("oneof") => {
            let items = sexp.list().unwrap();
            if items.len() < 2 {
                return Err(err(sexp.pos(), "`oneof` needs at least one branch"));
            }
            items[1..].iter().map(parse_branch).collect()
        }
        _ => Ok(vec![parse_branch(sexp)?]),
    }
}

fn parse_action(items: &[Sexp], pos: Pos) -> Result<ActionDecl, FondError> {
    let name = items
        .get(1)
        .and_then(|s| s.sym())
        .ok_or_else(|| err(pos, "action needs a name"))?
        .to_string();
    let mut params = Vec::new();
    let mut precondition = Cond::True;
    let mut branches = None;
    let mut i = 2;
    while i < items.len() {
        let key = items[i].sym().ok_or_else(|| err(items[i].pos(), "expected a keyword"))?;
        let value = items
            .get(i + 1)
            .ok_or_else(|| err(items[i].pos(), format!("`{key}` needs a value")))?;
        match key {
            ":parameters" => {
                params = parse_params(
                    value.list().ok_or_else(|| err(value.pos(), "expected a parameter list"))?,
                )?
            }
            ":precondition" => precondition = parse_cond(value)?,
            ":effect" => branches = Some(parse_effect(value)?),
            _ => return Err(err(items[i].pos(), format!("unsupported action field `{key}`"))),
        }
        i += 2;
    }
    let branches = branches.ok_or_else(|| err(pos, format!("action `{name}` has no effect")))?;
    Ok(ActionDecl { name, params, precondition, branches })
}

/// Parse a FOND domain from text and validate it.
pub fn parse_domain(text: &str) -> Result<FondDomain, FondError> {
    let top = read_all(text)?;
    let items = top.list().ok_or_else(|| err(top.pos(), "expected `(define ...)`"))?;
    if items.first().and_then(|s| s.sym()) != Some("define") {
        return Err(err(top.pos(), "expected `(define ...)`"));
    }
    let mut domain = FondDomain {
        name: String::new(),
        requirements: Default::default(),
        types: Vec::new(),
        constants: Vec::new(),
        predicates: Vec::new(),
        axioms: Vec::new(),
        actions: Vec::new(),
    };
    for item in &items[1..] {
        let sub = item.list().ok_or_else(|| err(item.pos(), "expected a section"))?;
        match item.head() {
            Some("domain") => {
                domain.name = sub
                    .get(1)
                    .and_then(|s| s.sym())
                    .ok_or_else(|| err(item.pos(), "domain needs a name"))?
                    .to_string();
            }
            Some(":requirements") => {
                for r in &sub[1..] {
                    let sym = r.sym().ok_or_else(|| err(r.pos(), "expected a requirement"))?;
                    let req = Requirement::parse(sym).ok_or_else(|| {
                        err(r.pos(), format!("unsupported requirement `{sym}`"))
                    })?;
                    domain.requirements.insert(req);
                }
            }
            Some(":types") => {
                for (name, parent) in parse_typed_names(&sub[1..])? {
                    domain.types.push(TypeDecl { name, parent });
                }
            }
            Some(":constants") => {
                for (name, ty) in parse_typed_names(&sub[1..])? {
                    domain.constants.push(TypedName { name, ty });
                }
            }
            Some(":predicates") => {
                for p in &sub[1..] {
                    let atom_items =
                        p.list().ok_or_else(|| err(p.pos(), "expected a predicate"))?;
                    let name = atom_items
                        .first()
                        .and_then(|s| s.sym())
                        .ok_or_else(|| err(p.pos(), "expected a predicate name"))?;
                    let params = parse_params(&atom_items[1..])?;
                    domain.predicates.push(PredicateDecl { name: name.to_string(), params });
                }
            }
            Some(":derived") => {
                let head_sexp =
                    sub.get(1).ok_or_else(|| err(item.pos(), "`:derived` needs a head"))?;
                let head_items =
                    head_sexp.list().ok_or_else(|| err(head_sexp.pos(), "expected a head"))?;
                let name = head_items
                    .first()
                    .and_then(|s| s.sym())
                    .ok_or_else(|| err(head_sexp.pos(), "expected a head predicate name"))?;
                let params = parse_params(&head_items[1..])?;
                let body_sexp =
                    sub.get(2).ok_or_else(|| err(item.pos(), "`:derived` needs a body"))?;
                domain.axioms.push(Axiom {
                    head: PredicateDecl { name: name.to_string(), params },
                    body: parse_cond(body_sexp)?,
                });
            }
            Some(":action") => domain.actions.push(parse_action(sub, item.pos())?),
            Some(other) => {
                return Err(err(item.pos(), format!("unsupported domain section `{other}`")))
            }
            None => return Err(err(item.pos(), "expected a section keyword")),
        }
    }
    super::validate::validate_domain(&domain)?;
    Ok(domain)
}

/// Parse a FOND problem from text. Validation against a particular domain is
/// a separate step ([`super::validate::validate_problem`]).
pub fn parse_problem(text: &str) -> Result<FondProblem, FondError> {
    let top = read_all(text)?;
    let items = top.list().ok_or_else(|| err(top.pos(), "expected `(define ...)`"))?;
    if items.first().and_then(|s| s.sym()) != Some("define") {
        return Err(err(top.pos(), "expected `(define ...)`"));
    }
    let mut name = String::new();
    let mut domain = String::new();
    let mut objects = Vec::new();
    let mut init = Vec::new();
    let mut goal = None;
    for item in &items[1..] {
        let sub = item.list().ok_or_else(|| err(item.pos(), "expected a section"))?;
        match item.head() {
            Some("problem") => {
                name = sub
                    .get(1)
                    .and_then(|s| s.sym())
                    .ok_or_else(|| err(item.pos(), "problem needs a name"))?
                    .to_string();
            }
            Some(":domain") => {
                domain = sub
                    .get(1)
                    .and_then(|s| s.sym())
                    .ok_or_else(|| err(item.pos(), "`:domain` needs a name"))?
                    .to_string();
            }
            Some(":objects") => {
                for (name, ty) in parse_typed_names(&sub[1..])? {
                    objects.push(TypedName { name, ty });
                }
            }
            Some(":init") => {
                for a in &sub[1..] {
                    let atom = parse_schema_atom(a)?;
                    let mut args = Vec::new();
                    for t in atom.terms {
                        match t {
                            Term::Const(c) => args.push(c),
                            Term::Var(v) => {
                                return Err(err(
                                    a.pos(),
                                    format!("init atom contains variable `?{v}`"),
                                ))
                            }
                        }
                    }
                    init.push(InitAtom { pred: atom.pred, args });
                }
            }
            Some(":goal") => {
                let g = sub.get(1).ok_or_else(|| err(item.pos(), "`:goal` needs a condition"))?;
                goal = Some(parse_cond(g)?);
            }
            Some(other) => {
                return Err(err(item.pos(), format!("unsupported problem section `{other}`")))
            }
            None => return Err(err(item.pos(), "expected a section keyword")),
        }
    }
    let goal = goal.ok_or(FondError::Parse {
        line: 0,
        col: 0,
        msg: "problem has no `:goal`".into(),
    })?;
    Ok(FondProblem { name, domain, objects, init, goal })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINI: &str = "\
(define (domain mini)
  (:requirements :strips :typing)
  (:types robot loc - object)
  (:predicates (at ?r - robot ?l - loc))
  (:action move
    :parameters (?r - robot ?from - loc ?to - loc)
    :precondition (and (at ?r ?from))
    :effect (and
      (not (at ?r ?from))
      (at ?r ?to))))";

    #[test]
    fn parses_minimal_domain() {
        let d = parse_domain(MINI).unwrap();
        assert_eq!(d.actions.len(), 1);
        assert_eq!(d.axioms.len(), 0);
        assert_eq!(d.actions[0].branches.len(), 1);
        assert_eq!(d.actions[0].branches[0].len(), 2);
    }

    #[test]
    fn parses_oneof_effect() {
        let text = "\
(define (domain k)
  (:requirements :strips :typing :non-deterministic)
  (:types b loc - object)
  (:predicates (at ?b - b ?l - loc))
  (:action kick
    :parameters (?b - b ?to - loc ?mid - loc)
    :precondition (and)
    :effect (oneof (at ?b ?to) (at ?b ?mid))))";
        let d = parse_domain(text).unwrap();
        assert_eq!(d.actions[0].branches.len(), 2);
    }

    #[test]
    fn parses_derived_axiom() {
        let text = "\
(define (domain k)
  (:requirements :strips :derived-predicates)
  (:predicates (p) (val_mem) (val_g))
  (:derived (val_g) (or (p) (val_mem))))";
        let d = parse_domain(text).unwrap();
        assert_eq!(d.axioms.len(), 1);
        assert_eq!(d.axioms[0].head.name, "val_g");
    }

    #[test]
    fn rejects_unsupported_loudly() {
        let bad = "\
(define (domain k)
  (:requirements :strips :probabilistic-effects)
  (:predicates (p)))";
        assert!(matches!(parse_domain(bad), Err(FondError::Parse { .. })));
        let nested = "\
(define (domain k)
  (:requirements :strips :non-deterministic)
  (:predicates (p) (q))
  (:action a
    :parameters ()
    :precondition (and)
    :effect (oneof (p) (oneof (q) (p)))))";
        let e = parse_domain(nested).unwrap_err();
        assert!(e.to_string().contains("oneof"));
        let forall = "\
(define (domain k)
  (:requirements :strips)
  (:predicates (p ?x))
  (:action a
    :parameters (?x)
    :precondition (and)
    :effect (forall (?y) (p ?y))))";
        assert!(parse_domain(forall).is_err());
    }

    #[test]
    fn parses_problem() {
        let text = "\
(define (problem p1)
  (:domain mini)
  (:objects r1 r2 - robot l1 l2 l3 - loc)
  (:init (at r1 l1) (at r2 l2))
  (:goal (and (at r1 l3))))";
        let p = parse_problem(text).unwrap();
        assert_eq!(p.objects.len(), 5);
        assert_eq!(p.init.len(), 2);
    }
}
