//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr     := term (('+'|'-') term)*
//! term     := factor ('*' factor | '/' factor)*
//! factor   := base ('^' uint)?
//! base     := rational | var | '(' expr ')'
//! rational := int ('/' uint)?
//! ```
//!
//! A leading unary minus is accepted at the start of a term. Whitespace is
//! insignificant.

use num_bigint::BigInt;

use super::{RationalFunction, Q};
use crate::error::{Error, Result};

pub fn parse_expr(text: &str, variables: &[String]) -> Result<RationalFunction> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        vars: variables,
    };
    let value = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(value)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: &'a [String],
}

impl<'a> Parser<'a> {
    fn n(&self) -> usize {
        self.vars.len()
    }

    fn error(&self, message: &str) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<RationalFunction> {
        let mut acc = self.signed_term()?;
        while let Some(c) = self.peek() {
            match c {
                b'+' => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                b'-' => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn signed_term(&mut self) -> Result<RationalFunction> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(-self.term()?);
        }
        self.term()
    }

    fn term(&mut self) -> Result<RationalFunction> {
        let mut acc = self.factor()?;
        while let Some(c) = self.peek() {
            match c {
                b'*' => {
                    self.pos += 1;
                    acc = &acc * &self.factor()?;
                }
                b'/' => {
                    self.pos += 1;
                    let at = self.pos;
                    let rhs = self.factor()?;
                    acc = acc.checked_div(&rhs).map_err(|_| Error::Syntax {
                        offset: at,
                        message: "division by zero".into(),
                    })?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<RationalFunction> {
        let base = self.base()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let e = self.uint()?;
            let e: i32 = e
                .try_into()
                .map_err(|_| self.error("exponent too large"))?;
            return base.pow(e).map_err(|_| self.error("zero raised to a power"));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<RationalFunction> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.uint()?;
                // rational := int '/' uint, only when a digit follows directly.
                let save = self.pos;
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    self.skip_ws();
                    if self.src.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
                        let at = self.pos;
                        let den = self.uint()?;
                        if den == BigInt::from(0) {
                            return Err(Error::Syntax {
                                offset: at,
                                message: "zero denominator in rational literal".into(),
                            });
                        }
                        return Ok(RationalFunction::constant(self.n(), Q::new(num, den)));
                    }
                    self.pos = save;
                }
                Ok(RationalFunction::constant(self.n(), Q::from_integer(num)))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self
                    .src
                    .get(self.pos)
                    .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                match self.vars.iter().position(|v| v == name) {
                    Some(i) => Ok(RationalFunction::var(self.n(), i)),
                    None => Err(Error::UnknownVariable(name.to_string())),
                }
            }
            Some(_) => Err(self.error("expected number, variable or `(`")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn uint(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected unsigned integer"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(s.parse().unwrap())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn parses_polynomial() {
        let v = vars(&["x", "y"]);
        let f = parse_expr("x^4 + 6*x^2*y^2 + y^4", &v).unwrap();
        assert!(f.is_polynomial());
        assert_eq!(f.numerator().len(), 3);
    }

    #[test]
    fn parses_rational_function() {
        let v = vars(&["x1", "x2"]);
        let f = parse_expr("(x1+x2)/(1 - x1)", &v).unwrap();
        let expected_den = parse_expr("1 - x1", &v).unwrap();
        assert_eq!(&f * &expected_den, parse_expr("x1 + x2", &v).unwrap());
    }

    #[test]
    fn syntax_error_offset() {
        let v = vars(&["x"]);
        match parse_expr("x^^2", &v) {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_variable() {
        let v = vars(&["x"]);
        assert_eq!(
            parse_expr("x + z1", &v).unwrap_err(),
            Error::UnknownVariable("z1".into())
        );
    }

    #[test]
    fn rational_literal_binds_before_power() {
        let v = vars(&["x"]);
        let f = parse_expr("2/3^2", &v).unwrap();
        assert_eq!(f.constant_value(), Some(Q::new(4.into(), 9.into())));
        let g = parse_expr("-x/2 + 1/2", &v).unwrap();
        assert_eq!(g, parse_expr("(1 - x)/2", &v).unwrap());
    }
}
