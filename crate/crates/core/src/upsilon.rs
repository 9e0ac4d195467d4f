//! Elementary differentials `Υ_F`, `Υ_F̂` and `Υ_{V_α}`.
//!
//! Derivatives attached to the children of a node are applied in child
//! order: the first child's derivative acts first (innermost).

use std::collections::HashMap;
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::symexpr::{slot_partial, sym, v_derivatives, Slot, SymExpr};
use crate::trees::{Noise, ParamIndex, Tree};

/// `F = F_1 + F_ξ ξ` in the slots `u`, `∂_x u`.
#[derive(Clone, Debug, PartialEq)]
pub struct Nonlinearity {
    pub one: SymExpr,
    pub xi: SymExpr,
}

impl Nonlinearity {
    /// `F_1 = (f - a') (∂_x u)²`, `F_ξ = g`.
    pub fn reduced() -> Self {
        Nonlinearity { one: sym("(f - a')*ux^2"), xi: sym("g") }
    }

    /// Adds the lower-order terms `k(u) ∂_x u + h(u)` to `F_1`.
    pub fn full() -> Self {
        Nonlinearity { one: sym("(f - a')*ux^2 + k*ux + h"), xi: sym("g") }
    }

    pub fn part(&self, noise: Noise) -> &SymExpr {
        match noise {
            Noise::One => &self.one,
            Noise::Xi => &self.xi,
        }
    }
}

/// `F̂ = q F + (a a'² v_cc + a a'' v_c)(∂_x u)² + 2 a a' (∂_x u) v_cx + a' (∂_x u) v_x`.
pub fn hat(f: &Nonlinearity) -> Nonlinearity {
    let q = SymExpr::q();
    let extra = sym("(a*a'^2*v_cc + a*a''*v_c)*ux^2 + 2*a*a'*ux*v_cx + a'*ux*v_x");
    Nonlinearity { one: &q * &f.one + extra, xi: &q * &f.xi }
}

/// Evaluator for the elementary differentials of one pair `(F, F̂)`.
pub struct Upsilon {
    pub f: Nonlinearity,
    pub fhat: Nonlinearity,
    cache: Mutex<HashMap<Tree, SymExpr>>,
}

impl Default for Upsilon {
    fn default() -> Self {
        Upsilon::new(Nonlinearity::reduced())
    }
}

impl Clone for Upsilon {
    fn clone(&self) -> Self {
        Upsilon::with_hat(self.f.clone(), self.fhat.clone())
    }
}

impl Upsilon {
    pub fn new(f: Nonlinearity) -> Self {
        let fhat = hat(&f);
        Upsilon::with_hat(f, fhat)
    }

    /// Arbitrary `F̂`, e.g. a deliberately perturbed one.
    pub fn with_hat(f: Nonlinearity, fhat: Nonlinearity) -> Self {
        Upsilon { f, fhat, cache: Mutex::new(HashMap::new()) }
    }

    /// The same `F̂` with `∂_x u` rewritten as `v_x / q` before any
    /// differentiation. In this reading all `∂_{v_α}` with `h = 0` commute.
    pub fn ux_as_v(&self) -> Self {
        let fhat = Nonlinearity { one: self.fhat.one.ux_to_v(), xi: self.fhat.xi.ux_to_v() };
        Upsilon::with_hat(self.f.clone(), fhat)
    }

    /// `Υ_F[τ] = Π Υ_F[τ_i] · Π ∂_{∂^{α_i} u} F_l`.
    pub fn upsilon_f(&self, tau: &Tree) -> Result<SymExpr> {
        check_decorations(tau)?;
        if !tau.is_unparametrised() {
            return Err(Error::Unsupported(format!("Υ_F needs an unparametrised tree, got {tau}")));
        }
        Ok(self.upsilon_f_rec(tau))
    }

    fn upsilon_f_rec(&self, tau: &Tree) -> SymExpr {
        let mut e = self.f.part(tau.noise).clone();
        for c in &tau.children {
            e = match c.index.st {
                st if st.is_zero() => slot_partial(Slot::U, &e),
                st if st == crate::trees::MultiIndex::X => slot_partial(Slot::Ux, &e),
                _ => SymExpr::zero(),
            };
            if e.is_zero() {
                return e;
            }
        }
        for c in &tau.children {
            e = e * self.upsilon_f_rec(&c.tree);
        }
        e
    }

    /// `Υ_F̂[τ] = ∂_{v_{α_m}} ⋯ ∂_{v_{α_1}} F̂_l · Π Υ_F̂[τ_i]`.
    pub fn upsilon_fhat(&self, tau: &Tree) -> Result<SymExpr> {
        check_decorations(tau)?;
        Ok(self.upsilon_fhat_rec(tau))
    }

    fn upsilon_fhat_rec(&self, tau: &Tree) -> SymExpr {
        if let Some(e) = self.cache.lock().unwrap().get(tau) {
            return e.clone();
        }
        let alphas: Vec<ParamIndex> = tau.children.iter().map(|c| c.index).collect();
        let mut e = v_derivatives(&alphas, self.fhat.part(tau.noise));
        for c in &tau.children {
            if e.is_zero() {
                break;
            }
            e = e * self.upsilon_fhat_rec(&c.tree);
        }
        self.cache.lock().unwrap().insert(tau.clone(), e.clone());
        e
    }

    /// `Υ_{V_α}[Π I_{α_i}(τ_i)] = Π Υ_F̂[τ_i] · ∂_{v_{α_n}} ⋯ ∂_{v_{α_1}} v_α`.
    pub fn upsilon_v(&self, alpha: ParamIndex, tau: &Tree) -> Result<SymExpr> {
        check_decorations(tau)?;
        if tau.noise != Noise::One {
            return Err(Error::Unsupported(format!("Υ_V needs a product of planted trees, got {tau}")));
        }
        let alphas: Vec<ParamIndex> = tau.children.iter().map(|c| c.index).collect();
        let mut e = v_derivatives(&alphas, &SymExpr::v(alpha));
        for c in &tau.children {
            if e.is_zero() {
                break;
            }
            e = e * self.upsilon_fhat_rec(&c.tree);
        }
        Ok(e)
    }

    /// Same as [`Self::upsilon_v`] with the base symbol replaced by `base`.
    pub fn upsilon_base(&self, base: &SymExpr, tau: &Tree) -> Result<SymExpr> {
        check_decorations(tau)?;
        if tau.noise != Noise::One {
            return Err(Error::Unsupported(format!("expected a product of planted trees, got {tau}")));
        }
        let alphas: Vec<ParamIndex> = tau.children.iter().map(|c| c.index).collect();
        let mut e = v_derivatives(&alphas, base);
        for c in &tau.children {
            e = e * self.upsilon_fhat_rec(&c.tree);
        }
        Ok(e)
    }
}

fn check_decorations(tau: &Tree) -> Result<()> {
    if tau.has_zero_decorations() {
        Ok(())
    } else {
        Err(Error::Unsupported(format!("node decorations are not supported: {tau}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::parse_tree;

    fn t(s: &str) -> Tree {
        parse_tree(s).unwrap()
    }

    #[test]
    fn classical_values() {
        let ups = Upsilon::default();
        assert_eq!(ups.upsilon_f(&t("Xi")).unwrap(), sym("g"));
        assert_eq!(ups.upsilon_f(&t("Xi[I(Xi)]")).unwrap(), sym("g*g'"));
        let thick = ups.upsilon_f(&t("One[Ix(Xi), Ix(Xi)]")).unwrap();
        assert_eq!(thick * SymExpr::ratio(1, 2), sym("(f - a')*g^2"));
        assert!(ups.upsilon_f(&t("Xi[I{1}(Xi)]")).is_err());
    }

    #[test]
    fn hat_values() {
        let ups = Upsilon::default();
        assert_eq!(ups.upsilon_fhat(&t("Xi")).unwrap(), sym("q*g"));
        assert_eq!(ups.upsilon_fhat(&t("Xi[I(Xi)]")).unwrap(), sym("q*g*g' + (-a''*v_c - a'^2*v_cc)*g^2"));
        assert_eq!(ups.upsilon_fhat(&t("Xi[I{1}(Xi)]")).unwrap(), sym("-q*a'*g^2"));
        let thick = ups.upsilon_fhat(&t("One[Ix(Xi), Ix(Xi)]")).unwrap() * SymExpr::ratio(1, 2);
        assert_eq!(thick, sym("q*(f - a')*g^2 + (a*a'^2*v_cc + a*a''*v_c)*g^2 + q*a'*g^2"));
        let mixed = sym("2*q*a*a'*g^2");
        assert_eq!(ups.upsilon_fhat(&t("One[Ix{1}(Xi), Ix(Xi)]")).unwrap(), mixed);
        assert_eq!(ups.upsilon_fhat(&t("One[Ix(Xi), Ix{1}(Xi)]")).unwrap(), mixed);
    }

    #[test]
    fn v_values() {
        let ups = Upsilon::default();
        let tau = t("Xi[I(Xi)]");
        let planted = Tree::plant(ParamIndex::ZERO, tau.clone());
        let expected = ups.upsilon_fhat(&tau).unwrap() * SymExpr::q_inv_pow(1);
        assert_eq!(ups.upsilon_v(ParamIndex::ZERO, &planted).unwrap(), expected);
        let pair = Tree::node(Noise::One, Default::default(), vec![(ParamIndex::ZERO, t("Xi")), (ParamIndex::C, t("Xi"))]);
        let v = ups.upsilon_v(ParamIndex::C, &pair).unwrap();
        assert_eq!(v, sym("q^2*g^2*a'^2*v_cc/q^2"));
        assert_eq!(ups.upsilon_v(ParamIndex::CX, &Tree::one()).unwrap(), sym("v_cx"));
    }
}
