//! Recursive-descent reader for polynomial expressions such as
//! `1 - x1*x2*x3/3 + (1/2+i)*e3^2`. Accepts everything [`Jet`]'s `Display` prints.

use num_bigint::BigInt;

use super::{GaussianRational, Jet, JetError, Var};

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    budget: u32,
}

impl<'a> Parser<'a> {
    fn err(&self) -> JetError {
        JetError::Parse(String::from_utf8_lossy(self.src).into_owned())
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

    fn integer(&mut self) -> Result<BigInt, JetError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| self.err())
    }

    fn expr(&mut self) -> Result<Jet, JetError> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -self.term()?
            }
            Some(b'+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Jet, JetError> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = &acc * &self.power()?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let d = self.integer()?;
                    let inv = GaussianRational::from_bigint(d).inv()?;
                    acc = acc.scale(&inv);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<Jet, JetError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let n: u32 = self.integer()?.try_into().map_err(|_| self.err())?;
            let mut acc = Jet::one(self.budget);
            for _ in 0..n {
                acc = &acc * &base;
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Jet, JetError> {
        match self.peek().ok_or_else(|| self.err())? {
            b'(' => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err());
                }
                self.pos += 1;
                Ok(inner)
            }
            b'-' => {
                self.pos += 1;
                Ok(-self.power()?)
            }
            b'i' => {
                self.pos += 1;
                Ok(Jet::constant(GaussianRational::i(), self.budget))
            }
            c @ (b'x' | b'e') => {
                self.pos += 1;
                let k: usize = self.integer()?.try_into().map_err(|_| self.err())?;
                if !(1..=3).contains(&k) {
                    return Err(JetError::BadVariable(k));
                }
                let v = if c == b'x' { Var::x(k - 1) } else { Var::eta(k - 1) };
                Ok(Jet::var(v, self.budget))
            }
            c if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(Jet::constant(GaussianRational::from_bigint(n), self.budget))
            }
            _ => Err(self.err()),
        }
    }
}

impl Jet {
    /// Parses a polynomial in `x1..x3`, `e1..e3` and `i` with integer and
    /// rational constants, truncating at `budget`.
    pub fn parse(s: &str, budget: u32) -> Result<Jet, JetError> {
        if budget > super::MAX_BUDGET {
            return Err(JetError::BudgetTooLarge(budget));
        }
        let mut p = Parser {
            src: s.as_bytes(),
            pos: 0,
            budget,
        };
        let j = p.expr()?;
        if p.peek().is_some() {
            return Err(p.err());
        }
        Ok(j)
    }
}
