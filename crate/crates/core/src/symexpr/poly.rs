use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::atom::{Atom, FuncBase};
use crate::trees::ParamIndex;

/// Product `D^d Π atom^power`, factors sorted by atom.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub d: u8,
    pub factors: Vec<(Atom, u32)>,
}

impl Monomial {
    pub fn one() -> Monomial {
        Monomial::default()
    }

    pub fn atom(a: Atom) -> Monomial {
        Monomial { d: 0, factors: vec![(a, 1)] }
    }

    pub fn power_of(&self, a: &Atom) -> u32 {
        match self.factors.binary_search_by(|(b, _)| b.cmp(a)) {
            Ok(i) => self.factors[i].1,
            Err(_) => 0,
        }
    }

    /// `None` when the nilpotent grading symbol squares to zero.
    pub fn mul(&self, other: &Monomial) -> Option<Monomial> {
        let d = self.d + other.d;
        if d > 1 {
            return None;
        }
        let mut factors = Vec::with_capacity(self.factors.len() + other.factors.len());
        let (mut i, mut j) = (0, 0);
        while i < self.factors.len() && j < other.factors.len() {
            let (a, p) = self.factors[i];
            let (b, r) = other.factors[j];
            match a.cmp(&b) {
                std::cmp::Ordering::Less => {
                    factors.push((a, p));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    factors.push((b, r));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    factors.push((a, p + r));
                    i += 1;
                    j += 1;
                }
            }
        }
        factors.extend_from_slice(&self.factors[i..]);
        factors.extend_from_slice(&other.factors[j..]);
        Some(Monomial { d, factors })
    }

    pub fn with_power(&self, a: Atom, power: u32) -> Monomial {
        let mut factors: Vec<(Atom, u32)> = self.factors.iter().filter(|(b, _)| *b != a).cloned().collect();
        if power > 0 {
            let pos = factors.partition_point(|(b, _)| *b < a);
            factors.insert(pos, (a, power));
        }
        Monomial { d: self.d, factors }
    }

    pub fn is_constant(&self) -> bool {
        self.d == 0 && self.factors.is_empty()
    }
}

/// Polynomial with exact rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    pub terms: BTreeMap<Monomial, BigRational>,
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn constant(c: BigRational) -> Poly {
        let mut p = Poly::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn one() -> Poly {
        Poly::constant(BigRational::one())
    }

    pub fn atom(a: Atom) -> Poly {
        let mut p = Poly::zero();
        p.add_term(Monomial::atom(a), BigRational::one());
        p
    }

    pub fn monomial(m: Monomial, c: BigRational) -> Poly {
        let mut p = Poly::zero();
        p.add_term(m, c);
        p
    }

    /// `q = 1 - a' v_c`
    pub fn q() -> Poly {
        let mut p = Poly::one();
        let m = Monomial::atom(Atom::Func(FuncBase::A, 1)).mul(&Monomial::atom(Atom::V(ParamIndex::C))).unwrap();
        p.add_term(m, rat(-1));
        p
    }

    pub fn q_pow(n: u32) -> Poly {
        let q = Poly::q();
        let mut p = Poly::one();
        for _ in 0..n {
            p = p.mul(&q);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_constant().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(old) => {
                *old += c;
                if old.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add_assign(&mut self, other: &Poly) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut p = self.clone();
        p.add_assign(other);
        p
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, d)| (m.clone(), d * c)).collect() }
    }

    pub fn neg(&self) -> Poly {
        self.scale(&rat(-1))
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut p = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                if let Some(m) = m1.mul(m2) {
                    p.add_term(m, c1 * c2);
                }
            }
        }
        p
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &BigRational) -> Poly {
        let mut p = Poly::zero();
        for (m1, c1) in &self.terms {
            if let Some(mm) = m1.mul(m) {
                p.add_term(mm, c1 * c);
            }
        }
        p
    }

    /// Exact division by `q = 1 - a' v_c`, or `None` when `q` does not divide.
    ///
    /// Write each monomial as `a'^i v_c^j r` and set `t = a' v_c`. Monomials
    /// sharing `r` and `i - j` form a polynomial `P(t)` times a fixed factor,
    /// and `q` divides iff every such `P` vanishes at `t = 1`.
    pub fn div_q(&self) -> Option<Poly> {
        let a1 = Atom::Func(FuncBase::A, 1);
        let vc = Atom::V(ParamIndex::C);
        let mut groups: BTreeMap<Monomial, BTreeMap<u32, BigRational>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let i = m.power_of(&a1);
            let j = m.power_of(&vc);
            let s = i.min(j);
            let base = m.with_power(a1, i - s).with_power(vc, j - s);
            groups.entry(base).or_default().insert(s, c.clone());
        }
        let mut out = Poly::zero();
        for (base, coeffs) in groups {
            let total: BigRational = coeffs.values().sum();
            if !total.is_zero() {
                return None;
            }
            let top = *coeffs.keys().next_back().unwrap();
            let mut running = BigRational::zero();
            for k in 0..top {
                if let Some(c) = coeffs.get(&k) {
                    running += c;
                }
                if !running.is_zero() {
                    let m = base
                        .with_power(a1, base.power_of(&a1) + k)
                        .with_power(vc, base.power_of(&vc) + k);
                    out.add_term(m, running.clone());
                }
            }
        }
        Some(out)
    }

    /// Drop every monomial in which `a` appears to a power above `max`.
    pub fn truncate_power(&self, a: &Atom, max: u32) -> Poly {
        Poly { terms: self.terms.iter().filter(|(m, _)| m.power_of(a) <= max).map(|(m, c)| (m.clone(), c.clone())).collect() }
    }

    pub fn max_d(&self) -> u8 {
        self.terms.keys().map(|m| m.d).max().unwrap_or(0)
    }

    /// Split into the parts of grading degree 0 and 1.
    pub fn split_d(&self) -> (Poly, Poly) {
        let mut p0 = Poly::zero();
        let mut p1 = Poly::zero();
        for (m, c) in &self.terms {
            if m.d == 0 {
                p0.add_term(m.clone(), c.clone());
            } else {
                p1.add_term(Monomial { d: 0, factors: m.factors.clone() }, c.clone());
            }
        }
        (p0, p1)
    }

    pub fn atoms(&self) -> std::collections::BTreeSet<Atom> {
        self.terms.keys().flat_map(|m| m.factors.iter().map(|(a, _)| *a)).collect()
    }
}
