//! Text form of decorated trees.
//!
//! ```text
//! tree      := node ("*" node)*
//! node      := noise ("[" childlist? "]")?
//! noise     := "Xi" | "One" | "X^(" nat "," nat ")" "Xi"?
//! childlist := child ("," child)*
//! child     := edge "(" tree ")"
//! edge      := ("I" | "Ix" | "I_(" nat "," nat ")") ("{" nat "}")?
//! ```
//!
//! `Ix` is a spatial derivative on the kernel, `{n}` is the number of
//! parameter derivatives and `I_(t,x)` is the general space-time form.

use std::fmt;

use super::index::{MultiIndex, ParamIndex};
use super::tree::{Edge, Noise, Tree};
use crate::error::{Error, Result};

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek_str(&mut self, s: &str) -> bool {
        self.skip_ws();
        self.src[self.pos..].starts_with(s.as_bytes())
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.peek_str(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn fail<T>(&self, expected: &[&str]) -> Result<T> {
        Err(Error::Parse { pos: self.pos, expected: expected.iter().map(|s| s.to_string()).collect() })
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        if self.eat(s) {
            Ok(())
        } else {
            self.fail(&[s])
        }
    }

    fn nat(&mut self) -> Result<u32> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.fail(&["natural number"]);
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| Error::Parse { pos: start, expected: vec!["natural number".into()] })
    }

    fn pair(&mut self) -> Result<MultiIndex> {
        let t = self.nat()?;
        self.expect(",")?;
        let x = self.nat()?;
        self.expect(")")?;
        Ok(MultiIndex::new(t, x))
    }

    fn tree(&mut self) -> Result<Tree> {
        let mut t = self.node()?;
        while self.eat("*") {
            let rhs = self.node()?;
            t = t.product(&rhs)?;
        }
        Ok(t)
    }

    fn node(&mut self) -> Result<Tree> {
        let (noise, deco) = if self.eat("Xi") {
            (Noise::Xi, MultiIndex::ZERO)
        } else if self.eat("One") {
            (Noise::One, MultiIndex::ZERO)
        } else if self.eat("X^(") {
            let k = self.pair()?;
            let noise = if self.eat("Xi") { Noise::Xi } else { Noise::One };
            (noise, k)
        } else {
            return self.fail(&["Xi", "One", "X^("]);
        };
        let mut children = Vec::new();
        if self.eat("[")
            && !self.eat("]") {
                loop {
                    children.push(self.child()?);
                    if self.eat("]") {
                        break;
                    }
                    if !self.eat(",") {
                        return self.fail(&[",", "]"]);
                    }
                }
            }
        Ok(Tree { noise, deco, children }.canonicalize())
    }

    fn child(&mut self) -> Result<Edge> {
        let st = if self.eat("I_(") {
            self.pair()?
        } else if self.eat("Ix") {
            MultiIndex::X
        } else if self.eat("I") {
            MultiIndex::ZERO
        } else {
            return self.fail(&["I", "Ix", "I_("]);
        };
        let h = if self.eat("{") {
            let h = self.nat()?;
            self.expect("}")?;
            h
        } else {
            0
        };
        self.expect("(")?;
        let tree = self.tree()?;
        self.expect(")")?;
        Ok(Edge { index: ParamIndex { h, st }, tree })
    }
}

/// Parse a tree; the result is canonical.
pub fn parse_tree(text: &str) -> Result<Tree> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let t = p.tree()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return p.fail(&["end of input", "*"]);
    }
    Ok(t)
}

impl std::str::FromStr for Tree {
    type Err = Error;
    fn from_str(s: &str) -> Result<Tree> {
        parse_tree(s)
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.noise, self.deco.is_zero()) {
            (Noise::Xi, true) => write!(f, "Xi")?,
            (Noise::One, true) => write!(f, "One")?,
            (noise, false) => {
                write!(f, "X^({},{})", self.deco.t, self.deco.x)?;
                if noise == Noise::Xi {
                    write!(f, "Xi")?;
                }
            }
        }
        if self.children.is_empty() {
            return Ok(());
        }
        write!(f, "[")?;
        for (i, e) in self.children.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            match (e.index.st.t, e.index.st.x) {
                (0, 0) => write!(f, "I")?,
                (0, 1) => write!(f, "Ix")?,
                (t, x) => write!(f, "I_({t},{x})")?,
            }
            if e.index.h > 0 {
                write!(f, "{{{}}}", e.index.h)?;
            }
            write!(f, "({})", e.tree)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar_examples() {
        let cherry = parse_tree("Xi[I(Xi)]").unwrap();
        assert_eq!(cherry, Tree::xi().product(&Tree::plant(ParamIndex::ZERO, Tree::xi())).unwrap());
        let thick = parse_tree("One[Ix(Xi), Ix(Xi)]").unwrap();
        assert_eq!(thick.symmetry_factor(), 2);
        let p = parse_tree("Xi[I{1}(Xi)]").unwrap();
        assert_eq!(p.children[0].index, ParamIndex::C);
        let prod = parse_tree("Xi * One[I(Xi)]").unwrap();
        assert_eq!(prod, cherry);
        let m = parse_tree("X^(0,1)Xi").unwrap();
        assert_eq!(m.deco, MultiIndex::X);
        assert_eq!(m.noise, Noise::Xi);
        let g = parse_tree("One[I_(1,0){2}(Xi)]").unwrap();
        assert_eq!(g.children[0].index, ParamIndex::new(2, 1, 0));
    }

    #[test]
    fn render_round_trips() {
        for s in ["Xi", "One", "Xi[I(Xi)]", "One[Ix(Xi), Ix{1}(Xi)]", "X^(1,0)Xi[I_(0,2){3}(Xi[I(Xi)])]", "X^(0,1)"] {
            let t = parse_tree(s).unwrap();
            assert_eq!(parse_tree(&t.to_string()).unwrap(), t);
        }
        let t = parse_tree("One[I(Xi), Ix(Xi)]").unwrap();
        assert_eq!(t, parse_tree("One[Ix(Xi), I(Xi)]").unwrap());
        assert_eq!(t.to_string(), "One[Ix(Xi), I(Xi)]");
    }

    #[test]
    fn errors_report_position() {
        match parse_tree("Xi[J(Xi)]") {
            Err(Error::Parse { pos, expected }) => {
                assert_eq!(pos, 3);
                assert!(expected.contains(&"I".to_string()));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_tree("Xi[I(Xi)").is_err());
        assert!(parse_tree("Xi * Xi").is_err());
        assert!(parse_tree("Xi junk").is_err());
    }
}
