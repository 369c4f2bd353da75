//! Finite traces: sequences of ground-atom assignments.
//!
//! Text format: one instant per line with the true atoms comma-separated,
//! a blank line for an empty assignment, `#` starts a comment. Comment-only
//! lines are annotations and do not contribute an instant; a single trailing
//! newline does not either.

use super::parser::{parse_atom, ParseError};
use super::Atom;
use std::collections::BTreeSet;
use std::fmt;

/// Set of ground atoms true at one instant.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Assignment(BTreeSet<Atom>);

impl Assignment {
    pub fn new() -> Self {
        Assignment(BTreeSet::new())
    }

    pub fn insert(&mut self, a: Atom) {
        self.0.insert(a);
    }

    pub fn contains(&self, a: &Atom) -> bool {
        self.0.contains(a)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Atom> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<Atom> for Assignment {
    fn from_iter<T: IntoIterator<Item = Atom>>(iter: T) -> Self {
        Assignment(iter.into_iter().collect())
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for a in &self.0 {
            if !first {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
            first = false;
        }
        Ok(())
    }
}

/// Finite sequence of assignments. Evaluation requires at least one instant.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace(Vec<Assignment>);

impl Trace {
    pub fn new() -> Self {
        Trace(Vec::new())
    }

    pub fn push(&mut self, s: Assignment) {
        self.0.push(s);
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn instants(&self) -> &[Assignment] {
        &self.0
    }
}

impl FromIterator<Assignment> for Trace {
    fn from_iter<T: IntoIterator<Item = Assignment>>(iter: T) -> Self {
        Trace(iter.into_iter().collect())
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Parse the trace text format.
pub fn parse_trace(text: &str) -> Result<Trace, ParseError> {
    let mut out = Vec::new();
    let mut lines: Vec<&str> = text.split('\n').collect();
    if lines.last() == Some(&"") {
        lines.pop();
    }
    for (lineno, raw) in lines.iter().enumerate() {
        let body = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let trimmed = body.trim();
        if trimmed.is_empty() {
            if raw.contains('#') {
                continue; // comment-only line
            }
            out.push(Assignment::new());
            continue;
        }
        let mut s = Assignment::new();
        // atoms may contain commas inside argument lists, so scan with a
        // parenthesis depth counter instead of a plain split
        let mut depth = 0usize;
        let mut start = 0usize;
        let bytes = trimmed.as_bytes();
        for i in 0..=bytes.len() {
            let split_here = i == bytes.len() || (bytes[i] == b',' && depth == 0);
            if split_here {
                let piece = trimmed[start..i].trim();
                if !piece.is_empty() {
                    let atom = parse_atom(piece).map_err(|e| ParseError {
                        line: lineno + 1,
                        col: e.col,
                        msg: e.msg,
                    })?;
                    s.insert(atom);
                }
                start = i + 1;
            } else if bytes[i] == b'(' {
                depth += 1;
            } else if bytes[i] == b')' {
                depth = depth.saturating_sub(1);
            }
        }
        out.push(s);
    }
    Ok(Trace(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_instants_blanks_and_comments() {
        let text = "# header\nisat(robot1,ballposition), goalscored\n\nballsafe\n";
        let t = parse_trace(text).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.instants()[0].len(), 2);
        assert!(t.instants()[1].is_empty());
        assert!(t.instants()[2].contains(&Atom::nullary("ballsafe").unwrap()));
    }

    #[test]
    fn display_round_trip() {
        let text = "a, b\n\nisat(robot1,ballposition)\n";
        let t = parse_trace(text).unwrap();
        assert_eq!(parse_trace(&t.to_string()).unwrap(), t);
    }
}
