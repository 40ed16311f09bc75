//! Surface grammar for types and terms.
//!
//! ```text
//! type ::= "N" | "Unit" | "Empty" | type "->" type | type "*" type
//!        | type "+" type | "(" type ")"        (-> right-assoc; *, + bind tighter)
//! term ::= name | nat-literal | "fn" name ":" type "." term
//!        | term term | "(" term ")"            (application is left-assoc)
//! ```
//!
//! Nat literals desugar to `succᵏ zero`. The parser is total on untrusted
//! input: nesting depth and literal size are capped so that no input can
//! exhaust the stack.

use thiserror::Error;

use super::term::{Comb, Term};
use super::types::TypeExpr;

/// Maximum parenthesis/lambda nesting depth.
const MAX_DEPTH: usize = 512;
/// Largest accepted nat literal (numerals are materialized as succ chains).
const MAX_NAT_LITERAL: u64 = 65_536;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at {line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Nat(u64),
    LParen,
    RParen,
    Arrow,
    Star,
    Plus,
    Colon,
    Dot,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
    len: usize,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src,
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            col: self.col,
            message: message.into(),
        }
    }

    fn bump(&mut self, c: char) {
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
    }

    fn tokens(mut self) -> Result<Vec<Spanned>, ParseError> {
        let mut out = Vec::new();
        while let Some(c) = self.src[self.pos..].chars().next() {
            let (line, col) = (self.line, self.col);
            match c {
                c if c.is_whitespace() => self.bump(c),
                '(' => {
                    self.bump(c);
                    out.push(Spanned {
                        tok: Tok::LParen,
                        line,
                        col,
                        len: 1,
                    });
                }
                ')' => {
                    self.bump(c);
                    out.push(Spanned {
                        tok: Tok::RParen,
                        line,
                        col,
                        len: 1,
                    });
                }
                '*' => {
                    self.bump(c);
                    out.push(Spanned {
                        tok: Tok::Star,
                        line,
                        col,
                        len: 1,
                    });
                }
                '+' => {
                    self.bump(c);
                    out.push(Spanned {
                        tok: Tok::Plus,
                        line,
                        col,
                        len: 1,
                    });
                }
                ':' => {
                    self.bump(c);
                    out.push(Spanned {
                        tok: Tok::Colon,
                        line,
                        col,
                        len: 1,
                    });
                }
                '.' => {
                    self.bump(c);
                    out.push(Spanned {
                        tok: Tok::Dot,
                        line,
                        col,
                        len: 1,
                    });
                }
                '-' => {
                    self.bump(c);
                    match self.src[self.pos..].chars().next() {
                        Some('>') => {
                            self.bump('>');
                            out.push(Spanned {
                                tok: Tok::Arrow,
                                line,
                                col,
                                len: 2,
                            });
                        }
                        _ => return Err(self.err("expected '>' after '-'")),
                    }
                }
                c if c.is_ascii_digit() => {
                    let start = self.pos;
                    while let Some(d) = self.src[self.pos..].chars().next() {
                        if d.is_ascii_digit() {
                            self.bump(d);
                        } else {
                            break;
                        }
                    }
                    let text = &self.src[start..self.pos];
                    let n: u64 = text
                        .parse()
                        .map_err(|_| self.err(format!("nat literal out of range: {text}")))?;
                    if n > MAX_NAT_LITERAL {
                        return Err(self.err(format!(
                            "nat literal {n} exceeds the maximum {MAX_NAT_LITERAL}"
                        )));
                    }
                    out.push(Spanned {
                        tok: Tok::Nat(n),
                        line,
                        col,
                        len: text.len(),
                    });
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let start = self.pos;
                    while let Some(d) = self.src[self.pos..].chars().next() {
                        if d.is_ascii_alphanumeric() || d == '_' || d == '\'' {
                            self.bump(d);
                        } else {
                            break;
                        }
                    }
                    let text = &self.src[start..self.pos];
                    out.push(Spanned {
                        tok: Tok::Ident(text.to_string()),
                        line,
                        col,
                        len: text.len(),
                    });
                }
                c => return Err(self.err(format!("unexpected character {c:?}"))),
            }
        }
        Ok(out)
    }
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    depth: usize,
    env: Vec<(String, TypeExpr)>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        match self.toks.get(self.pos) {
            Some(s) => (s.line, s.col),
            None => self
                .toks
                .last()
                .map(|s| (s.line, s.col + s.len))
                .unwrap_or((1, 1)),
        }
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        let (line, col) = self.here();
        ParseError {
            line,
            col,
            message: message.into(),
        }
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|s| s.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if *t == tok => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err(format!("expected {what}"))),
        }
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.err(format!("nesting deeper than {MAX_DEPTH}")));
        }
        Ok(())
    }

    fn leave(&mut self) {
        self.depth -= 1;
    }

    // Types: arrow (right-assoc, lowest) < sum < product < atom.
    fn ty(&mut self) -> Result<TypeExpr, ParseError> {
        let lhs = self.ty_sum()?;
        if matches!(self.peek(), Some(Tok::Arrow)) {
            self.pos += 1;
            self.enter()?;
            let rhs = self.ty()?;
            self.leave();
            Ok(TypeExpr::arrow(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn ty_sum(&mut self) -> Result<TypeExpr, ParseError> {
        let mut lhs = self.ty_prod()?;
        while matches!(self.peek(), Some(Tok::Plus)) {
            self.pos += 1;
            let rhs = self.ty_prod()?;
            lhs = TypeExpr::sum(lhs, rhs);
        }
        Ok(lhs)
    }

    fn ty_prod(&mut self) -> Result<TypeExpr, ParseError> {
        let mut lhs = self.ty_atom()?;
        while matches!(self.peek(), Some(Tok::Star)) {
            self.pos += 1;
            let rhs = self.ty_atom()?;
            lhs = TypeExpr::prod(lhs, rhs);
        }
        Ok(lhs)
    }

    fn ty_atom(&mut self) -> Result<TypeExpr, ParseError> {
        match self.next() {
            Some(Tok::Ident(s)) => match s.as_str() {
                "N" => Ok(TypeExpr::Nat),
                "Unit" => Ok(TypeExpr::Unit),
                "Empty" => Ok(TypeExpr::Empty),
                other => {
                    self.pos -= 1;
                    Err(self.err(format!("unknown type name {other:?}")))
                }
            },
            Some(Tok::LParen) => {
                self.enter()?;
                let t = self.ty()?;
                self.leave();
                self.expect(Tok::RParen, "')'")?;
                Ok(t)
            }
            _ => {
                if self.pos > 0 {
                    self.pos -= 1;
                }
                Err(self.err("expected a type"))
            }
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let mut head = self.term_atom()?;
        while let Some(Tok::Ident(_) | Tok::Nat(_) | Tok::LParen) = self.peek() {
            let arg = self.term_atom()?;
            head = Term::app(head, arg);
        }
        Ok(head)
    }

    fn term_atom(&mut self) -> Result<Term, ParseError> {
        match self.next() {
            Some(Tok::Ident(s)) if s == "fn" => {
                self.enter()?;
                let name = match self.next() {
                    Some(Tok::Ident(n)) if n != "fn" && comb_of(&n).is_none() => n,
                    Some(Tok::Ident(n)) => {
                        self.pos -= 1;
                        return Err(self.err(format!("{n:?} cannot be a binder name")));
                    }
                    _ => {
                        if self.pos > 0 {
                            self.pos -= 1;
                        }
                        return Err(self.err("expected a binder name after 'fn'"));
                    }
                };
                self.expect(Tok::Colon, "':' after binder name")?;
                let ty = self.ty()?;
                self.expect(Tok::Dot, "'.' after binder type")?;
                self.env.push((name.clone(), ty.clone()));
                let body = self.term();
                self.env.pop();
                self.leave();
                Ok(Term::lam(&name, ty, body?))
            }
            Some(Tok::Ident(s)) => match comb_of(&s) {
                Some(c) => Ok(Term::constant(c)),
                None => match self.env.iter().rev().find(|(n, _)| *n == s) {
                    Some((_, ty)) => Ok(Term::var(&s, ty.clone())),
                    None => {
                        self.pos -= 1;
                        Err(self.err(format!("unbound variable {s:?}")))
                    }
                },
            },
            Some(Tok::Nat(n)) => Ok(Term::numeral(n)),
            Some(Tok::LParen) => {
                self.enter()?;
                let t = self.term()?;
                self.leave();
                self.expect(Tok::RParen, "')'")?;
                Ok(t)
            }
            _ => {
                if self.pos > 0 {
                    self.pos -= 1;
                }
                Err(self.err("expected a term"))
            }
        }
    }
}

fn comb_of(name: &str) -> Option<Comb> {
    Some(match name {
        "K" => Comb::K,
        "S" => Comb::S,
        "pair" => Comb::Pair,
        "fst" => Comb::Fst,
        "snd" => Comb::Snd,
        "inl" => Comb::Inl,
        "inr" => Comb::Inr,
        "case" => Comb::Case,
        "zero" => Comb::Zero,
        "succ" => Comb::Succ,
        "rec" => Comb::Rec,
        "exf" => Comb::Exf,
        "unit" => Comb::UnitVal,
        _ => return None,
    })
}

/// Parse a type expression.
pub fn parse_type(text: &str) -> Result<TypeExpr, ParseError> {
    let toks = Lexer::new(text).tokens()?;
    let mut p = Parser {
        toks,
        pos: 0,
        depth: 0,
        env: Vec::new(),
    };
    let t = p.ty()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input after type"));
    }
    Ok(t)
}

/// Parse a surface term. Lambdas are retained as binding nodes; bracket
/// abstraction turns them into combinators later. Variables carry their
/// binders' annotations; unbound names are rejected here.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let toks = Lexer::new(text).tokens()?;
    let mut p = Parser {
        toks,
        pos: 0,
        depth: 0,
        env: Vec::new(),
    };
    let t = p.term()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input after term"));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_applications_left_associated() {
        let t = parse_term("fst (pair zero unit)").unwrap();
        let expect = Term::app(
            Term::constant(Comb::Fst),
            Term::apps(
                Term::constant(Comb::Pair),
                [Term::constant(Comb::Zero), Term::constant(Comb::UnitVal)],
            ),
        );
        assert_eq!(t, expect);
    }

    #[test]
    fn parses_lambda_with_annotated_binder() {
        let t = parse_term("fn x:N. succ x").unwrap();
        let expect = Term::lam(
            "x",
            TypeExpr::Nat,
            Term::app(Term::constant(Comb::Succ), Term::var("x", TypeExpr::Nat)),
        );
        assert_eq!(t, expect);
    }

    #[test]
    fn unbalanced_parenthesis_is_a_syntax_error() {
        let e = parse_term("(pair zero").unwrap_err();
        assert!(e.message.contains("expected ')'"), "{e}");
        assert_eq!((e.line, e.col), (1, 11));
    }

    #[test]
    fn literals_desugar_to_succ_chains() {
        assert_eq!(parse_term("3").unwrap(), Term::numeral(3));
        assert!(parse_term("99999999").is_err());
    }

    #[test]
    fn unbound_variables_are_rejected() {
        assert!(parse_term("x").is_err());
        assert!(parse_term("fn x:N. y").is_err());
    }

    #[test]
    fn types_parse_with_the_stated_precedences() {
        assert_eq!(
            parse_type("N -> N * N + Unit").unwrap(),
            TypeExpr::arrow(
                TypeExpr::Nat,
                TypeExpr::sum(TypeExpr::prod(TypeExpr::Nat, TypeExpr::Nat), TypeExpr::Unit),
            )
        );
        assert_eq!(parse_type("(N -> N) -> N").unwrap(), TypeExpr::finite(2));
        assert!(parse_type("N ->").is_err());
    }

    #[test]
    fn deep_nesting_is_rejected_not_crashing() {
        let mut s = String::new();
        for _ in 0..2000 {
            s.push('(');
        }
        s.push_str("zero");
        for _ in 0..2000 {
            s.push(')');
        }
        assert!(parse_term(&s).is_err());
    }

    #[test]
    fn shadowing_binds_to_the_innermost_binder() {
        let t = parse_term("fn x:N. fn x:Unit. x").unwrap();
        match t {
            Term::Lam(_, _, b) => match &*b {
                Term::Lam(_, ty, body) => {
                    assert_eq!(*ty, TypeExpr::Unit);
                    assert_eq!(**body, Term::var("x", TypeExpr::Unit));
                }
                other => panic!("unexpected {other:?}"),
            },
            other => panic!("unexpected {other:?}"),
        }
    }
}
