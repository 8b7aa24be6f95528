//! Recursive-descent parser for the expression language.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?          -- right-associative
//! atom  := number | 'x' | 'y' | 'pi' | 'e' | name '(' expr ')' | '(' expr ')'
//! ```
//!
//! Numbers are decimal literals like `2`, `0.5`, `12.25`.

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use super::{Axis, Expr};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error at byte {offset}: expected {expected}, found {found}")]
pub struct ParseError {
    pub offset: usize,
    pub expected: String,
    pub found: String,
}

/// Parses an expression; the whole input must be consumed.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        bytes: text.as_bytes(),
        pos: 0,
    };
    let expr = p.expr()?;
    p.skip_ws();
    if p.pos < p.bytes.len() {
        return Err(p.error("end of input"));
    }
    Ok(expr)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn error(&self, expected: &str) -> ParseError {
        let found = match self.bytes.get(self.pos) {
            Some(&b) => format!("{:?}", b as char),
            None => "end of input".to_string(),
        };
        ParseError {
            offset: self.pos,
            expected: expected.to_string(),
            found,
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = Expr::add(acc, self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = Expr::sub(acc, self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = Expr::mul(acc, self.unary()?);
                }
                Some(b'/') => {
                    self.pos += 1;
                    acc = Expr::div(acc, self.unary()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(Expr::neg(self.unary()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exponent = self.unary()?;
            return Ok(Expr::pow(base, exponent));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(b) if b.is_ascii_digit() => self.number(),
            Some(b) if b.is_ascii_alphabetic() => self.name(),
            _ => Err(self.error("a number, 'x', 'y', 'pi', 'e', a function name, or '('")),
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let mut frac_digits = 0usize;
        if self.bytes.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            let frac_start = self.pos;
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            frac_digits = self.pos - frac_start;
            if frac_digits == 0 {
                return Err(self.error("digits after the decimal point"));
            }
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii digits");
        let digits: String = text.chars().filter(|c| *c != '.').collect();
        let numer: BigInt = digits.parse().expect("digit string");
        let denom = BigInt::from(10u32).pow(frac_digits as u32);
        Ok(Expr::num(BigRational::new(numer, denom)))
    }

    fn name(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        let word = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii letters");
        match word {
            "x" => Ok(Expr::var(Axis::X)),
            "y" => Ok(Expr::var(Axis::Y)),
            "pi" => Ok(Expr::Pi),
            "e" => Ok(Expr::E),
            "sin" | "cos" | "exp" | "ln" | "sqrt" => {
                if self.peek() != Some(b'(') {
                    return Err(self.error(&format!("'(' after {word}")));
                }
                self.pos += 1;
                let arg = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("')'"));
                }
                self.pos += 1;
                Ok(match word {
                    "sin" => Expr::sin(arg),
                    "cos" => Expr::cos(arg),
                    "exp" => Expr::exp(arg),
                    "ln" => Expr::ln(arg),
                    _ => Expr::sqrt(arg),
                })
            }
            other => {
                self.pos = start;
                Err(self.error(&format!(
                    "'x', 'y', 'pi', 'e', or a function name (got {other:?})"
                )))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_simple_products() {
        let e = parse("x*y").unwrap();
        assert_eq!(
            e,
            Expr::Mul(Expr::var(Axis::X).into(), Expr::var(Axis::Y).into())
        );
    }

    #[test]
    fn parses_function_applications() {
        let e = parse("sin(x)*cos(y)").unwrap();
        let expect = Expr::Mul(
            Expr::Sin(Expr::var(Axis::X).into()).into(),
            Expr::Cos(Expr::var(Axis::Y).into()).into(),
        );
        assert_eq!(e, expect);
    }

    #[test]
    fn truncated_input_reports_the_offset() {
        let err = parse("x + ").unwrap_err();
        assert_eq!(err.offset, 4);
        assert!(err.found.contains("end of input"));

        let err = parse("x + @").unwrap_err();
        assert_eq!(err.offset, 4);
    }

    #[test]
    fn power_is_right_associative_with_unary_exponents() {
        assert_eq!(parse("x^y^2").unwrap(), parse("x^(y^2)").unwrap());
        assert_eq!(
            parse("x^-2").unwrap(),
            Expr::Pow(Expr::var(Axis::X).into(), Expr::num_int(-2).into())
        );
        // 2^3^2 folds to 512, not 64.
        assert_eq!(parse("2^3^2").unwrap(), Expr::num_int(512));
    }

    #[test]
    fn whitespace_and_decimals() {
        assert_eq!(parse(" 0.5 * x ").unwrap(), parse("0.5*x").unwrap());
        assert_eq!(
            parse("12.25").unwrap(),
            Expr::num(BigRational::new(BigInt::from(49), BigInt::from(4)))
        );
        assert!(parse("1.").is_err());
        assert!(parse("sin x").is_err());
        assert!(parse("foo(x)").is_err());
    }

    #[test]
    fn constant_folding_applies_lightly() {
        assert_eq!(parse("0*sin(x) + y").unwrap(), parse("y").unwrap());
        assert_eq!(parse("x*1").unwrap(), parse("x").unwrap());
        assert_eq!(parse("2 + 3*4").unwrap(), Expr::num_int(14));
        // Division by a syntactic zero is preserved for evaluation to reject.
        assert!(matches!(parse("x/0").unwrap(), Expr::Div(..)));
    }
}
