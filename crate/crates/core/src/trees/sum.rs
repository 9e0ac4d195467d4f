use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::tree::Tree;

/// Coefficient ring for linear combinations of trees.
pub trait Coeff: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn from_int(n: i64) -> Self;
    fn from_ratio(n: i64, d: i64) -> Self;
}

impl Coeff for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn from_int(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn from_ratio(n: i64, d: i64) -> Self {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }
}

/// Finite linear combination of canonical trees; zero coefficients are never stored.
#[derive(Clone, PartialEq)]
pub struct LinComb<C: Coeff = BigRational> {
    terms: BTreeMap<Tree, C>,
}

pub type TreeSum = LinComb<BigRational>;

impl<C: Coeff> Default for LinComb<C> {
    fn default() -> Self {
        LinComb { terms: BTreeMap::new() }
    }
}

impl<C: Coeff> LinComb<C> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn single(tree: Tree) -> Self {
        let mut s = Self::zero();
        s.add_term(tree, C::one());
        s
    }

    pub fn from_terms(iter: impl IntoIterator<Item = (Tree, C)>) -> Self {
        let mut s = Self::zero();
        for (t, c) in iter {
            s.add_term(t, c);
        }
        s
    }

    pub fn add_term(&mut self, tree: Tree, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&tree) {
            Some(old) => {
                let new = old.add(&c);
                if new.is_zero() {
                    self.terms.remove(&tree);
                } else {
                    *old = new;
                }
            }
            None => {
                self.terms.insert(tree, c);
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Self, c: &C) {
        for (t, d) in &other.terms {
            self.add_term(t.clone(), d.mul(c));
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut s = Self::zero();
        s.add_scaled(self, c);
        s
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut s = self.clone();
        s.add_scaled(other, &C::one());
        s
    }

    pub fn minus(&self, other: &Self) -> Self {
        let mut s = self.clone();
        s.add_scaled(other, &C::from_int(-1));
        s
    }

    pub fn coeff(&self, tree: &Tree) -> C {
        self.terms.get(tree).cloned().unwrap_or_else(C::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Tree, &C)> {
        self.terms.iter()
    }

    pub fn trees(&self) -> impl Iterator<Item = &Tree> {
        self.terms.keys()
    }

    /// Apply a linear map tree by tree.
    pub fn map_linear(&self, mut f: impl FnMut(&Tree) -> Self) -> Self {
        let mut s = Self::zero();
        for (t, c) in &self.terms {
            s.add_scaled(&f(t), c);
        }
        s
    }

    /// `⟨Σ c_σ σ, Σ d_τ τ⟩ = Σ c_τ d_τ S(τ)`
    pub fn inner_product(&self, other: &Self) -> C {
        let mut acc = C::zero();
        for (t, c) in &self.terms {
            if let Some(d) = other.terms.get(t) {
                acc = acc.add(&c.mul(d).mul(&C::from_int(t.symmetry_factor() as i64)));
            }
        }
        acc
    }
}

impl<C: Coeff> FromIterator<(Tree, C)> for LinComb<C> {
    fn from_iter<I: IntoIterator<Item = (Tree, C)>>(iter: I) -> Self {
        Self::from_terms(iter)
    }
}

impl<C: Coeff + fmt::Display> fmt::Display for LinComb<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (t, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c}) {t}")?;
        }
        Ok(())
    }
}

impl<C: Coeff> fmt::Debug for LinComb<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter().map(|(t, c)| (t.to_string(), c))).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::parse_tree;

    #[test]
    fn cancellation_removes_terms() {
        let t = parse_tree("Xi[I(Xi)]").unwrap();
        let mut s = TreeSum::single(t.clone());
        s.add_term(t.clone(), BigRational::from_int(-1));
        assert!(s.is_zero());
        s.add_term(t.clone(), BigRational::from_int(0));
        assert!(s.is_zero());
    }

    #[test]
    fn bilinear_inner_product() {
        let a = parse_tree("One[Ix(Xi), Ix(Xi)]").unwrap();
        let b = parse_tree("Xi").unwrap();
        let s = TreeSum::from_terms([(a.clone(), BigRational::from_int(3)), (b.clone(), BigRational::from_int(1))]);
        let r = TreeSum::from_terms([(a, BigRational::from_int(2))]);
        assert_eq!(s.inner_product(&r), BigRational::from_int(12));
        assert_eq!(r.inner_product(&s), BigRational::from_int(12));
    }
}
