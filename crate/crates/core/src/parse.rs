//! Text syntax for polynomials: integer and rational constants, variables,
//! `+ - * / ^` and parentheses. Division is only allowed by constants.

use std::sync::Arc;

use num::bigint::BigInt;

use crate::error::AlgebraError;
use crate::field::{FieldDesc, FieldElement, RatFun};
use crate::poly::{Polynomial, Ring};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Sym(char),
}

fn tokenize(s: &str) -> Result<Vec<(usize, Tok)>, AlgebraError> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            out.push((start + 1, Tok::Num(text.parse().expect("digits"))));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((start + 1, Tok::Ident(chars[start..i].iter().collect())));
        } else if "+-*/^()".contains(c) {
            out.push((i + 1, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(AlgebraError::Syntax {
                column: i + 1,
                message: format!("unexpected character {c:?}"),
            });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    ring: &'a Arc<Ring>,
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end_col: usize,
}

impl Parser<'_> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, AlgebraError> {
        let column = self.toks.get(self.pos).map(|t| t.0).unwrap_or(self.end_col);
        Err(AlgebraError::Syntax {
            column,
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Polynomial, AlgebraError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, AlgebraError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.unary()?;
            } else if self.eat('/') {
                let col = self.pos;
                let d = self.unary()?;
                if !d.is_constant() {
                    self.pos = col;
                    return self.err("division by a non-constant polynomial");
                }
                let c = d.constant_term();
                if c.is_zero() {
                    self.pos = col;
                    return self.err("division by zero");
                }
                acc = acc.scale(&c.inv()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Polynomial, AlgebraError> {
        if self.eat('-') {
            Ok(-&self.unary()?)
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Polynomial, AlgebraError> {
        let base = self.atom()?;
        if self.eat('^') {
            match self.peek().cloned() {
                Some(Tok::Num(n)) => {
                    self.pos += 1;
                    let e: u32 = match u32::try_from(n) {
                        Ok(e) => e,
                        Err(_) => return self.err("exponent too large"),
                    };
                    Ok(base.pow(e))
                }
                _ => self.err("expected a non-negative integer exponent"),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Polynomial, AlgebraError> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Polynomial::constant(self.ring, self.ring.field().from_bigint(&n)))
            }
            Some(Tok::Ident(name)) => {
                if let Some(i) = self.ring.var_index(&name) {
                    self.pos += 1;
                    return Ok(Polynomial::var(self.ring, i));
                }
                if let FieldDesc::RationalFunctions(params) = self.ring.field() {
                    if let Some(i) = params.var_index(&name) {
                        self.pos += 1;
                        let c = FieldElement::Fraction(RatFun::from_poly(Polynomial::var(params, i)));
                        return Ok(Polynomial::constant(self.ring, c));
                    }
                }
                self.err(format!("unknown variable {name}"))
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected ')'");
                }
                Ok(e)
            }
            Some(_) => self.err("unexpected token"),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses `text` as a polynomial in `ring`.
pub fn parse_poly(ring: &Arc<Ring>, text: &str) -> Result<Polynomial, AlgebraError> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        ring,
        toks,
        pos: 0,
        end_col: text.chars().count() + 1,
    };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}
