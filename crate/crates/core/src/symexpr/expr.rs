use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use super::atom::{Atom, FuncBase};
use super::poly::{rat, Monomial, Poly};
use crate::trees::ParamIndex;

/// `num / q^qpow` with `q = 1 - a' v_c`, reduced so that `q` does not divide `num`.
///
/// The numerator never mentions `q`; equality of values is equality of
/// representations.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct SymExpr {
    num: Poly,
    qpow: u32,
}

impl SymExpr {
    pub fn zero() -> SymExpr {
        SymExpr::default()
    }

    pub fn one() -> SymExpr {
        SymExpr::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> SymExpr {
        SymExpr { num: Poly::constant(c), qpow: 0 }
    }

    pub fn int(n: i64) -> SymExpr {
        SymExpr::constant(rat(n))
    }

    pub fn ratio(n: i64, d: i64) -> SymExpr {
        SymExpr::constant(BigRational::new(n.into(), d.into()))
    }

    pub fn atom(a: Atom) -> SymExpr {
        SymExpr { num: Poly::atom(a), qpow: 0 }
    }

    pub fn func(base: FuncBase, n: u32) -> SymExpr {
        SymExpr::atom(Atom::Func(base, n))
    }

    /// `v_α`; `v_0` is `u`.
    pub fn v(alpha: ParamIndex) -> SymExpr {
        SymExpr::atom(Atom::v(alpha))
    }

    pub fn u() -> SymExpr {
        SymExpr::atom(Atom::U)
    }

    pub fn ux() -> SymExpr {
        SymExpr::atom(Atom::Ux)
    }

    /// The grading symbol `D` with `D² = 0`.
    pub fn grading() -> SymExpr {
        SymExpr { num: Poly::monomial(Monomial { d: 1, factors: vec![] }, BigRational::one()), qpow: 0 }
    }

    pub fn q() -> SymExpr {
        SymExpr { num: Poly::q(), qpow: 0 }
    }

    /// `q^{-n}`
    pub fn q_inv_pow(n: u32) -> SymExpr {
        SymExpr { num: Poly::one(), qpow: n }
    }

    /// `q^n` for any integer `n`.
    pub fn q_pow(n: i32) -> SymExpr {
        if n >= 0 {
            SymExpr { num: Poly::q_pow(n as u32), qpow: 0 }
        } else {
            SymExpr::q_inv_pow((-n) as u32)
        }
    }

    /// `p_c = a'' v_c + (a')² v_cc`, so that `∂_v q = -p_c / q`.
    pub fn p_c() -> SymExpr {
        let a1 = SymExpr::func(FuncBase::A, 1);
        SymExpr::func(FuncBase::A, 2) * SymExpr::v(ParamIndex::C) + &a1 * &a1 * SymExpr::v(ParamIndex::CC)
    }

    pub fn from_parts(num: Poly, qpow: u32) -> SymExpr {
        let mut e = SymExpr { num, qpow };
        e.reduce();
        e
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn q_power(&self) -> u32 {
        self.qpow
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.qpow = 0;
            return;
        }
        while self.qpow > 0 {
            match self.num.div_q() {
                Some(p) => {
                    self.num = p;
                    self.qpow -= 1;
                }
                None => break,
            }
        }
    }

    /// Re-establish the normal form; constructors already return normal forms.
    pub fn normalize(&self) -> SymExpr {
        SymExpr::from_parts(self.num.clone(), self.qpow)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        if self.qpow == 0 {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn scale(&self, c: &BigRational) -> SymExpr {
        SymExpr { num: self.num.scale(c), qpow: if c.is_zero() { 0 } else { self.qpow } }
    }

    pub fn pow(&self, n: u32) -> SymExpr {
        let mut r = SymExpr::one();
        for _ in 0..n {
            r = &r * self;
        }
        r
    }

    /// Inverse of `c q^k` type expressions; `None` for anything else.
    pub fn try_inverse(&self) -> Option<SymExpr> {
        let mut n = self.num.clone();
        let mut k = 0;
        if n.is_zero() {
            return None;
        }
        loop {
            if let Some(c) = n.as_constant() {
                let inv = BigRational::one() / c;
                return Some(SymExpr::from_parts(Poly::q_pow(self.qpow).scale(&inv), k));
            }
            {
                let p = n.div_q()?;
                n = p;
                k += 1;
            }
        }
    }

    /// Parts without and with the grading symbol.
    pub fn split_grading(&self) -> (SymExpr, SymExpr) {
        let (p0, p1) = self.num.split_d();
        (SymExpr::from_parts(p0, self.qpow), SymExpr::from_parts(p1, self.qpow))
    }

    pub fn has_grading(&self) -> bool {
        self.num.max_d() > 0
    }

    pub fn atoms(&self) -> std::collections::BTreeSet<Atom> {
        let mut s = self.num.atoms();
        if self.qpow > 0 {
            s.insert(Atom::Func(FuncBase::A, 1));
            s.insert(Atom::V(ParamIndex::C));
        }
        s
    }

    /// True when the expression involves none of the `v_α` variables and no `q`.
    pub fn is_local(&self) -> bool {
        self.qpow == 0 && self.num.atoms().iter().all(|a| !matches!(a, Atom::V(_)))
    }

    /// Ring homomorphism fixing `D`, sending atoms through `f` (or to themselves when `f` gives `None`).
    pub fn substitute(&self, f: &dyn Fn(&Atom) -> Option<SymExpr>) -> SymExpr {
        let mut cache: BTreeMap<Atom, SymExpr> = BTreeMap::new();
        let mut image = |a: &Atom| -> SymExpr {
            cache.entry(*a).or_insert_with(|| f(a).unwrap_or_else(|| SymExpr::atom(*a))).clone()
        };
        let mut acc = Accumulator::new();
        for (m, c) in &self.num.terms {
            let mut term = SymExpr::constant(c.clone());
            if m.d == 1 {
                term = &term * &SymExpr::grading();
            }
            for (a, p) in &m.factors {
                term = &term * &image(a).pow(*p);
            }
            acc.add(&term);
        }
        let q = SymExpr::q().substitute_simple(&mut image);
        let qinv = q.try_inverse().expect("substitution must keep q invertible");
        &acc.finish() * &qinv.pow(self.qpow)
    }

    fn substitute_simple(&self, image: &mut dyn FnMut(&Atom) -> SymExpr) -> SymExpr {
        let mut acc = Accumulator::new();
        for (m, c) in &self.num.terms {
            let mut term = SymExpr::constant(c.clone());
            for (a, p) in &m.factors {
                term = &term * &image(a).pow(*p);
            }
            acc.add(&term);
        }
        acc.finish()
    }

    /// Replace the independent symbol `∂_x u` by `v_x / q`.
    pub fn ux_to_v(&self) -> SymExpr {
        self.substitute(&|a| match a {
            Atom::Ux => Some(SymExpr::v(ParamIndex::X) * SymExpr::q_inv_pow(1)),
            _ => None,
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("expression serialises")
    }
}

/// Collects a sum of expressions with a single normalization at the end.
#[derive(Default)]
pub struct Accumulator {
    parts: BTreeMap<u32, Poly>,
}

impl Accumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, e: &SymExpr) {
        if e.is_zero() {
            return;
        }
        self.parts.entry(e.qpow).or_default().add_assign(&e.num);
    }

    pub fn add_scaled(&mut self, e: &SymExpr, c: &BigRational) {
        if e.is_zero() || c.is_zero() {
            return;
        }
        self.parts.entry(e.qpow).or_default().add_assign(&e.num.scale(c));
    }

    pub fn finish(self) -> SymExpr {
        let top = match self.parts.keys().next_back() {
            Some(t) => *t,
            None => return SymExpr::zero(),
        };
        let mut num = Poly::zero();
        for (p, n) in self.parts {
            num.add_assign(&n.mul(&Poly::q_pow(top - p)));
        }
        SymExpr::from_parts(num, top)
    }
}

fn combine(a: &SymExpr, b: &SymExpr, sign: i64) -> SymExpr {
    let top = a.qpow.max(b.qpow);
    let na = if a.qpow < top { a.num.mul(&Poly::q_pow(top - a.qpow)) } else { a.num.clone() };
    let nb = if b.qpow < top { b.num.mul(&Poly::q_pow(top - b.qpow)) } else { b.num.clone() };
    let nb = if sign < 0 { nb.neg() } else { nb };
    SymExpr::from_parts(na.add(&nb), top)
}

macro_rules! binop {
    ($tr:ident, $f:ident, $body:expr) => {
        impl std::ops::$tr<&SymExpr> for &SymExpr {
            type Output = SymExpr;
            fn $f(self, rhs: &SymExpr) -> SymExpr {
                $body(self, rhs)
            }
        }
        impl std::ops::$tr<SymExpr> for SymExpr {
            type Output = SymExpr;
            fn $f(self, rhs: SymExpr) -> SymExpr {
                $body(&self, &rhs)
            }
        }
        impl std::ops::$tr<&SymExpr> for SymExpr {
            type Output = SymExpr;
            fn $f(self, rhs: &SymExpr) -> SymExpr {
                $body(&self, rhs)
            }
        }
        impl std::ops::$tr<SymExpr> for &SymExpr {
            type Output = SymExpr;
            fn $f(self, rhs: SymExpr) -> SymExpr {
                $body(self, &rhs)
            }
        }
    };
}

binop!(Add, add, |a: &SymExpr, b: &SymExpr| combine(a, b, 1));
binop!(Sub, sub, |a: &SymExpr, b: &SymExpr| combine(a, b, -1));
binop!(Mul, mul, |a: &SymExpr, b: &SymExpr| {
    if a.is_zero() || b.is_zero() {
        return SymExpr::zero();
    }
    SymExpr::from_parts(a.num.mul(&b.num), a.qpow + b.qpow)
});

impl std::ops::Neg for SymExpr {
    type Output = SymExpr;
    fn neg(self) -> SymExpr {
        SymExpr { num: self.num.neg(), qpow: self.qpow }
    }
}

impl std::ops::Neg for &SymExpr {
    type Output = SymExpr;
    fn neg(self) -> SymExpr {
        -(self.clone())
    }
}

impl std::iter::Sum for SymExpr {
    fn sum<I: Iterator<Item = SymExpr>>(iter: I) -> SymExpr {
        let mut acc = Accumulator::new();
        for e in iter {
            acc.add(&e);
        }
        acc.finish()
    }
}

impl crate::trees::Coeff for SymExpr {
    fn zero() -> Self {
        SymExpr::zero()
    }
    fn one() -> Self {
        SymExpr::one()
    }
    fn is_zero(&self) -> bool {
        SymExpr::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn from_int(n: i64) -> Self {
        SymExpr::int(n)
    }
    fn from_ratio(n: i64, d: i64) -> Self {
        SymExpr::ratio(n, d)
    }
}

fn render_monomial(m: &Monomial) -> String {
    let mut parts: Vec<String> = Vec::new();
    if m.d == 1 {
        parts.push("D".into());
    }
    for (a, p) in &m.factors {
        if *p == 1 {
            parts.push(a.to_string());
        } else {
            parts.push(format!("{a}^{p}"));
        }
    }
    parts.join("*")
}

fn render_poly(p: &Poly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (m, c)) in p.terms.iter().enumerate() {
        let neg = c.is_negative();
        let abs = c.abs();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let body = render_monomial(m);
        if body.is_empty() {
            out.push_str(&abs.to_string());
        } else if abs.is_one() {
            out.push_str(&body);
        } else {
            out.push_str(&format!("{abs}*{body}"));
        }
    }
    out
}

impl fmt::Display for SymExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = render_poly(&self.num);
        match self.qpow {
            0 => write!(f, "{num}"),
            p => {
                let den = if p == 1 { "q".to_string() } else { format!("q^{p}") };
                if self.num.terms.len() == 1 && !num.starts_with('-') {
                    write!(f, "{num}/{den}")
                } else {
                    write!(f, "({num})/{den}")
                }
            }
        }
    }
}

impl Serialize for SymExpr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term {
            coeff: String,
            grading: u8,
            factors: Vec<(String, u32)>,
        }
        let terms: Vec<Term> = self
            .num
            .terms
            .iter()
            .map(|(m, c)| Term {
                coeff: c.to_string(),
                grading: m.d,
                factors: m.factors.iter().map(|(a, p)| (a.to_string(), *p)).collect(),
            })
            .collect();
        let mut st = s.serialize_struct("SymExpr", 3)?;
        st.serialize_field("text", &self.to_string())?;
        st.serialize_field("numerator", &terms)?;
        st.serialize_field("qDenominatorPower", &self.qpow)?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(n: u32) -> SymExpr {
        SymExpr::func(FuncBase::A, n)
    }
    fn g() -> SymExpr {
        SymExpr::func(FuncBase::G, 0)
    }

    #[test]
    fn q_relation_normalizes() {
        let e = (SymExpr::one() - a(1) * SymExpr::v(ParamIndex::C)) * SymExpr::q_inv_pow(1);
        assert_eq!(e, SymExpr::one());
        let z = SymExpr::q() * g() - g() + g() * a(1) * SymExpr::v(ParamIndex::C);
        assert!(z.is_zero());
        let d = SymExpr::grading();
        assert!((&d * &d * g()).is_zero());
    }

    #[test]
    fn q_powers_are_consistent() {
        assert_eq!(SymExpr::q_pow(2) * SymExpr::q_pow(-2), SymExpr::one());
        assert_eq!(a(1) * SymExpr::q_pow(-2), a(1) * SymExpr::q_inv_pow(1) * SymExpr::q_inv_pow(1));
        assert_eq!(SymExpr::q_pow(3).try_inverse().unwrap(), SymExpr::q_inv_pow(3));
        assert_eq!((SymExpr::int(2) * SymExpr::q_inv_pow(1)).try_inverse().unwrap(), SymExpr::ratio(1, 2) * SymExpr::q());
        assert!(g().try_inverse().is_none());
    }

    #[test]
    fn accumulator_matches_repeated_addition() {
        let terms = [g() * SymExpr::q_inv_pow(2), a(1), SymExpr::q() * g(), -(g() * SymExpr::q_inv_pow(2))];
        let mut acc = Accumulator::new();
        let mut s = SymExpr::zero();
        for t in &terms {
            acc.add(t);
            s = s + t;
        }
        assert_eq!(acc.finish(), s);
    }

    #[test]
    fn grading_split() {
        let e = g() + SymExpr::grading() * a(0);
        let (e0, e1) = e.split_grading();
        assert_eq!(e0, g());
        assert_eq!(e1, a(0));
    }

    #[test]
    fn ux_conversion() {
        let e = SymExpr::ux() * SymExpr::ux();
        let v = SymExpr::v(ParamIndex::X);
        assert_eq!(e.ux_to_v(), &v * &v * SymExpr::q_inv_pow(2));
    }

    #[test]
    fn rendering_is_deterministic() {
        let e = a(1) * g() * g() * SymExpr::q_inv_pow(2);
        assert_eq!(e.to_string(), "a'*g^2/q^2");
        assert_eq!(SymExpr::zero().to_string(), "0");
    }
}
