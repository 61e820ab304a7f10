//! Recursive-descent parser for polynomial text.
//!
//! ```text
//! expr   := sign? term (('+' | '-') term)*
//! term   := power (('*' | '/') power)*      divisor must be a nonzero constant
//! power  := factor ('^' uint)*
//! factor := uint | 'x' uint | '(' expr ')' | sign factor
//! ```
//!
//! Whitespace between tokens is ignored. Implicit multiplication (`2x1`) is
//! rejected.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::poly::{Poly, Scalar};

pub fn parse_poly(text: &str, n: usize) -> Result<Poly> {
    let mut parser = Parser::new(text, n);
    let p = parser.expr()?;
    parser.skip_ws();
    if parser.pos < parser.src.len() {
        return Err(parser.unexpected());
    }
    Ok(p)
}

/// Parses a rational literal such as `-3`, `7/2` or `-1/4`.
pub fn parse_scalar(text: &str) -> Result<Scalar> {
    let p = parse_poly(text, 0)?;
    p.constant_value()
        .ok_or_else(|| Error::syntax(0, "expected a rational constant"))
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    n: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, n: usize) -> Self {
        Parser {
            src: text.as_bytes(),
            pos: 0,
            n,
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

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn unexpected(&mut self) -> Error {
        match self.peek() {
            Some(c) => Error::syntax(self.pos, format!("unexpected character '{}'", c as char)),
            None => Error::syntax(self.pos, "unexpected end of input"),
        }
    }

    fn expr(&mut self) -> Result<Poly> {
        let negate = if self.eat(b'-') {
            true
        } else {
            self.eat(b'+');
            false
        };
        let first = self.term()?;
        let mut acc = if negate { -first } else { first };
        loop {
            if self.eat(b'+') {
                acc = &acc + &self.term()?;
            } else if self.eat(b'-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.power()?;
        loop {
            if self.eat(b'*') {
                acc = &acc * &self.power()?;
            } else if self.peek() == Some(b'/') {
                let at = self.pos;
                self.pos += 1;
                let divisor = self.power()?;
                match divisor.constant_value() {
                    Some(c) if !c.is_zero() => acc = acc.scale(&c.recip()),
                    Some(_) => return Err(Error::syntax(at, "division by zero")),
                    None => return Err(Error::syntax(at, "divisor must be a constant")),
                }
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self) -> Result<Poly> {
        let mut base = self.factor()?;
        while self.eat(b'^') {
            let at = self.pos;
            let e = self.uint()?;
            let e: u32 = e
                .try_into()
                .map_err(|_| Error::syntax(at, "exponent too large"))?;
            base = base.pow(e)?;
        }
        Ok(base)
    }

    fn factor(&mut self) -> Result<Poly> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.unexpected());
                }
                Ok(inner)
            }
            Some(b'x') => {
                self.pos += 1;
                let at = self.pos;
                if !self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
                    return Err(Error::syntax(at, "expected variable index after 'x'"));
                }
                let idx = self.uint()?;
                let idx: usize = idx
                    .try_into()
                    .map_err(|_| Error::syntax(at, "variable index too large"))?;
                if idx == 0 {
                    return Err(Error::syntax(at, "variables are numbered from x1"));
                }
                if idx > self.n {
                    return Err(Error::VariableOutOfRange {
                        index: idx,
                        n: self.n,
                    });
                }
                Ok(Poly::var(self.n, idx - 1))
            }
            Some(c) if c.is_ascii_digit() => {
                let v = self.big_uint();
                Ok(Poly::constant(self.n, Scalar::from_integer(v)))
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.factor()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.factor()
            }
            _ => Err(self.unexpected()),
        }
    }

    fn big_uint(&mut self) -> BigInt {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        digits.parse().expect("nonempty digit run")
    }

    fn uint(&mut self) -> Result<u64> {
        self.skip_ws();
        let at = self.pos;
        if !self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            return Err(Error::syntax(at, "expected unsigned integer"));
        }
        let v = self.big_uint();
        if v > BigInt::from(u64::MAX) {
            return Err(Error::syntax(at, "integer too large"));
        }
        Ok(v.try_into().unwrap_or(0))
    }
}

/// One-based variable index of a token like `x3`.
pub(crate) fn parse_var_token(token: &str, n: usize, offset: usize) -> Result<usize> {
    let t = token.trim();
    let digits = t
        .strip_prefix('x')
        .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
        .ok_or_else(|| Error::syntax(offset, format!("expected variable like x1, found '{t}'")))?;
    let idx: usize = digits
        .parse()
        .map_err(|_| Error::syntax(offset, "variable index too large"))?;
    if idx == 0 {
        return Err(Error::syntax(offset, "variables are numbered from x1"));
    }
    if idx > n {
        return Err(Error::VariableOutOfRange { index: idx, n });
    }
    Ok(idx)
}
