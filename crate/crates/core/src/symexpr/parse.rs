//! Text input for expressions, mirroring the rendering.
//!
//! ```text
//! expr    := term (("+" | "-") term)*
//! term    := unary (("*" | "/") unary)*
//! unary   := "-" unary | power
//! power   := primary ("^" nat)?
//! primary := number | name | "(" expr ")"
//! ```
//!
//! Names: `a f g k h` with primes or `{n}` for derivatives, `u`, `ux`, `q`,
//! `c`, `D`, `p_c`, `v` (same as `u`), `v_<c..t..x..>` and `v_(h,t,x)`.
//! Division is only allowed by expressions of the form `r q^k`.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::atom::{Atom, FuncBase};
use super::expr::SymExpr;
use crate::error::{Error, Result};
use crate::trees::ParamIndex;

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).copied()
    }

    fn fail<T>(&self, expected: &[&str]) -> Result<T> {
        Err(Error::Parse { pos: self.pos, expected: expected.iter().map(|s| s.to_string()).collect() })
    }

    fn expr(&mut self) -> Result<SymExpr> {
        let mut e = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    e = e + self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    e = e - self.term()?;
                }
                _ => return Ok(e),
            }
        }
    }

    fn term(&mut self) -> Result<SymExpr> {
        let mut e = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    e = e * self.unary()?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let at = self.pos;
                    let d = self.unary()?;
                    match d.try_inverse() {
                        Some(inv) => e = e * inv,
                        None => {
                            return Err(Error::Parse { pos: at, expected: vec!["a constant times a power of q".into()] })
                        }
                    }
                }
                _ => return Ok(e),
            }
        }
    }

    fn unary(&mut self) -> Result<SymExpr> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(-self.unary()?);
        }
        let base = self.primary()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let n = self.nat()?;
            return Ok(base.pow(n));
        }
        Ok(base)
    }

    fn nat(&mut self) -> Result<u32> {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.fail(&["natural number"]);
        }
        std::str::from_utf8(&self.s[start..self.pos]).unwrap().parse().or_else(|_| self.fail(&["natural number"]))
    }

    fn primary(&mut self) -> Result<SymExpr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.fail(&[")"]);
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let n: BigInt = std::str::from_utf8(&self.s[start..self.pos]).unwrap().parse().unwrap();
                Ok(SymExpr::constant(BigRational::from_integer(n)))
            }
            Some(c) if c.is_ascii_alphabetic() => self.name(),
            _ => self.fail(&["number", "name", "("]),
        }
    }

    fn name(&mut self) -> Result<SymExpr> {
        let start = self.pos;
        while self.pos < self.s.len() && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_') {
            self.pos += 1;
        }
        let word = std::str::from_utf8(&self.s[start..self.pos]).unwrap().to_string();
        match word.as_str() {
            "u" | "v" => return Ok(SymExpr::u()),
            "ux" => return Ok(SymExpr::ux()),
            "q" => return Ok(SymExpr::q()),
            "c" => return Ok(SymExpr::atom(Atom::Param)),
            "D" => return Ok(SymExpr::grading()),
            "p_c" => return Ok(SymExpr::p_c()),
            "v_" if self.s.get(self.pos) == Some(&b'(') => {
                self.pos += 1;
                let h = self.nat()?;
                self.expect(b',')?;
                let t = self.nat()?;
                self.expect(b',')?;
                let x = self.nat()?;
                self.expect(b')')?;
                return Ok(SymExpr::v(ParamIndex::new(h, t, x)));
            }
            _ => {}
        }
        if let Some(suffix) = word.strip_prefix("v_") {
            let mut idx = ParamIndex::ZERO;
            for ch in suffix.chars() {
                match ch {
                    'c' => idx.h += 1,
                    't' => idx.st.t += 1,
                    'x' => idx.st.x += 1,
                    _ => return Err(Error::Parse { pos: start, expected: vec!["v_ followed by c, t, x".into()] }),
                }
            }
            return Ok(SymExpr::v(idx));
        }
        let mut chars = word.chars();
        if let (Some(c), None) = (chars.next(), chars.next()) {
            if let Some(base) = FuncBase::from_name(c) {
                let mut n = 0;
                while self.s.get(self.pos) == Some(&b'\'') {
                    n += 1;
                    self.pos += 1;
                }
                if n == 0 && self.s.get(self.pos) == Some(&b'{') {
                    self.pos += 1;
                    n = self.nat()?;
                    self.expect(b'}')?;
                }
                return Ok(SymExpr::func(base, n));
            }
        }
        Err(Error::Parse { pos: start, expected: vec!["known symbol".into()] })
    }

    fn expect(&mut self, b: u8) -> Result<()> {
        if self.peek() == Some(b) {
            self.pos += 1;
            Ok(())
        } else {
            self.fail(&[&(b as char).to_string()])
        }
    }
}

pub fn parse_expr(text: &str) -> Result<SymExpr> {
    let mut p = Parser { s: text.as_bytes(), pos: 0 };
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.fail(&["operator", "end of input"]);
    }
    Ok(e)
}

impl std::str::FromStr for SymExpr {
    type Err = Error;
    fn from_str(s: &str) -> Result<SymExpr> {
        parse_expr(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_renders_back() {
        for s in ["g*g'", "a'*g^2/q^2", "(a''*g + a'*g')/q", "-a'*g^2", "2*a*a'*g^2", "D*a + v_ccx*a{4}"] {
            let e = parse_expr(s).unwrap();
            assert_eq!(parse_expr(&e.to_string()).unwrap(), e, "{s}");
        }
    }

    #[test]
    fn q_is_expanded() {
        assert_eq!(parse_expr("q*g - g + a'*v_c*g").unwrap(), SymExpr::zero());
        assert_eq!(parse_expr("(1 - a'*v_c)/q").unwrap(), SymExpr::one());
        assert_eq!(parse_expr("v_(1,0,1)").unwrap(), parse_expr("v_cx").unwrap());
        assert_eq!(parse_expr("p_c").unwrap(), parse_expr("a''*v_c + a'^2*v_cc").unwrap());
    }

    #[test]
    fn rejects_general_division() {
        assert!(parse_expr("1/g").is_err());
        assert!(parse_expr("g +").is_err());
        assert!(parse_expr("w").is_err());
    }
}
