//! Recursive-descent parser for the concrete formula syntax.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! implies := or ( "->" implies )?            right associative
//! or      := and ( "|" and )*
//! and     := since ( "&" since )*
//! since   := unary ( "S" since )?            right associative
//! unary   := ( "!" | "Y" | "WY" | "O" | "H" ) unary | primary
//! primary := "true" | "false" | atom | "(" implies ")"
//! atom    := ident ( "(" ident ( "," ident )* ")" )?
//! ```
//!
//! `->` desugars to `!a | b` at parse time.

use super::{Atom, Formula};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    True,
    False,
    OpY,
    OpWY,
    OpO,
    OpH,
    OpS,
    Bang,
    Amp,
    Pipe,
    Arrow,
    LParen,
    RParen,
    Comma,
    Eof,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

type Spanned = (Tok, usize, usize);

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0, line: 1, col: 1 }
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError { line: self.line, col: self.col, msg: msg.into() }
    }

    fn bump(&mut self) -> u8 {
        let c = self.src[self.pos];
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        c
    }

    fn tokens(mut self) -> Result<Vec<Spanned>, ParseError> {
        let mut out = Vec::new();
        while self.pos < self.src.len() {
            let (line, col) = (self.line, self.col);
            let c = self.src[self.pos];
            match c {
                b' ' | b'\t' | b'\r' | b'\n' => {
                    self.bump();
                }
                b'#' => {
                    while self.pos < self.src.len() && self.src[self.pos] != b'\n' {
                        self.bump();
                    }
                }
                b'(' => {
                    self.bump();
                    out.push((Tok::LParen, line, col));
                }
                b')' => {
                    self.bump();
                    out.push((Tok::RParen, line, col));
                }
                b',' => {
                    self.bump();
                    out.push((Tok::Comma, line, col));
                }
                b'!' => {
                    self.bump();
                    out.push((Tok::Bang, line, col));
                }
                b'&' => {
                    self.bump();
                    out.push((Tok::Amp, line, col));
                }
                b'|' => {
                    self.bump();
                    out.push((Tok::Pipe, line, col));
                }
                b'-' => {
                    self.bump();
                    if self.pos < self.src.len() && self.src[self.pos] == b'>' {
                        self.bump();
                        out.push((Tok::Arrow, line, col));
                    } else {
                        return Err(self.err("expected `>` after `-`"));
                    }
                }
                b'a'..=b'z' => {
                    let mut word = String::new();
                    while self.pos < self.src.len() {
                        let c = self.src[self.pos];
                        if c.is_ascii_lowercase() || c.is_ascii_digit() || c == b'_' {
                            word.push(self.bump() as char);
                        } else {
                            break;
                        }
                    }
                    let tok = match word.as_str() {
                        "true" => Tok::True,
                        "false" => Tok::False,
                        _ => Tok::Ident(word),
                    };
                    out.push((tok, line, col));
                }
                b'A'..=b'Z' => {
                    let mut word = String::new();
                    while self.pos < self.src.len() {
                        let c = self.src[self.pos];
                        if c.is_ascii_alphanumeric() || c == b'_' {
                            word.push(self.bump() as char);
                        } else {
                            break;
                        }
                    }
                    let tok = match word.as_str() {
                        "Y" => Tok::OpY,
                        "WY" => Tok::OpWY,
                        "O" => Tok::OpO,
                        "H" => Tok::OpH,
                        "S" => Tok::OpS,
                        _ => {
                            return Err(ParseError {
                                line,
                                col,
                                msg: format!("unknown operator `{word}` (expected Y, WY, O, H or S)"),
                            })
                        }
                    };
                    out.push((tok, line, col));
                }
                _ => return Err(self.err(format!("unexpected character `{}`", c as char))),
            }
        }
        out.push((Tok::Eof, self.line, self.col));
        Ok(out)
    }
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn here(&self) -> (usize, usize) {
        let (_, l, c) = self.toks[self.pos];
        (l, c)
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        let (line, col) = self.here();
        ParseError { line, col, msg: msg.into() }
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    fn implies(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implies()?;
            // a -> b is kept as !a | b; see the module docs
            Ok(Formula::or(Formula::not(lhs), rhs))
        } else {
            Ok(lhs)
        }
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            let rhs = self.and()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.since()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.since()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn since(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.unary()?;
        if *self.peek() == Tok::OpS {
            self.bump();
            let rhs = self.since()?;
            Ok(Formula::since(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::OpY => {
                self.bump();
                Ok(Formula::yesterday(self.unary()?))
            }
            Tok::OpWY => {
                self.bump();
                Ok(Formula::weak_yesterday(self.unary()?))
            }
            Tok::OpO => {
                self.bump();
                Ok(Formula::once(self.unary()?))
            }
            Tok::OpH => {
                self.bump();
                Ok(Formula::historically(self.unary()?))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::True => {
                self.bump();
                if *self.peek() == Tok::LParen {
                    return Err(self.err("reserved word `true` used as atom"));
                }
                Ok(Formula::True)
            }
            Tok::False => {
                self.bump();
                if *self.peek() == Tok::LParen {
                    return Err(self.err("reserved word `false` used as atom"));
                }
                Ok(Formula::False)
            }
            Tok::Ident(name) => {
                self.bump();
                let mut args = Vec::new();
                if *self.peek() == Tok::LParen {
                    self.bump();
                    loop {
                        match self.bump() {
                            Tok::Ident(a) => args.push(a),
                            Tok::True | Tok::False => {
                                return Err(self.err("reserved word used as atom argument"))
                            }
                            _ => return Err(self.err("expected argument identifier")),
                        }
                        match self.bump() {
                            Tok::Comma => continue,
                            Tok::RParen => break,
                            _ => return Err(self.err("expected `,` or `)`")),
                        }
                    }
                }
                // identifiers from the lexer already satisfy the atom grammar
                let atom = Atom::new(name, args)
                    .map_err(|e| self.err(e.to_string()))?;
                Ok(Formula::Atom(atom))
            }
            Tok::LParen => {
                self.bump();
                let f = self.implies()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            _ => Err(self.err("expected a formula")),
        }
    }
}

/// Parse a PPLTL formula from its concrete syntax.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let toks = Lexer::new(text).tokens()?;
    let mut p = Parser { toks, pos: 0 };
    let f = p.implies()?;
    p.expect(Tok::Eof, "end of input")?;
    Ok(f)
}

/// Parse a single ground atom (used by the trace text format).
pub fn parse_atom(text: &str) -> Result<Atom, ParseError> {
    let toks = Lexer::new(text).tokens()?;
    let mut p = Parser { toks, pos: 0 };
    match p.primary()? {
        Formula::Atom(a) => {
            p.expect(Tok::Eof, "end of input")?;
            Ok(a)
        }
        _ => Err(ParseError { line: 1, col: 1, msg: "expected an atom".into() }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(n: &str) -> Formula {
        Formula::Atom(Atom::nullary(n).unwrap())
    }

    #[test]
    fn parses_level_goals() {
        assert_eq!(parse_formula("O(goalscored)").unwrap(), Formula::once(at("goalscored")));
        let since = parse_formula("ballsafe S isat(robot1,ballposition)").unwrap();
        assert_eq!(
            since,
            Formula::since(
                at("ballsafe"),
                Formula::Atom(
                    Atom::new("isat", vec!["robot1".into(), "ballposition".into()]).unwrap()
                )
            )
        );
        assert_eq!(parse_formula("true").unwrap(), Formula::True);
    }

    #[test]
    fn precedence() {
        // S binds tighter than &, & tighter than |, -> loosest and right-assoc
        let f = parse_formula("a & b S c | d").unwrap();
        assert_eq!(
            f,
            Formula::or(Formula::and(at("a"), Formula::since(at("b"), at("c"))), at("d"))
        );
        let imp = parse_formula("a -> b -> c").unwrap();
        assert_eq!(
            imp,
            Formula::or(
                Formula::not(at("a")),
                Formula::or(Formula::not(at("b")), at("c"))
            )
        );
        let unary = parse_formula("Y a S b").unwrap();
        assert_eq!(unary, Formula::since(Formula::yesterday(at("a")), at("b")));
    }

    #[test]
    fn errors_carry_location() {
        let e = parse_formula("a &\n& b").unwrap_err();
        assert_eq!(e.line, 2);
        assert_eq!(e.col, 1);
        let e = parse_formula("true(x)").unwrap_err();
        assert!(e.msg.contains("reserved"));
        assert!(parse_formula("").is_err());
        assert!(parse_formula("X a").is_err());
    }

    #[test]
    fn print_parse_round_trip() {
        for text in [
            "O(isat(robot1,ballposition)) & O(goalscored) & ballsafe S isat(robot1,ballposition)",
            "!(a | b) & Y(WY(c))",
            "H(a) | O(b S c)",
        ] {
            let f = parse_formula(text).unwrap();
            let printed = f.to_string();
            assert_eq!(parse_formula(&printed).unwrap(), f);
        }
    }
}
