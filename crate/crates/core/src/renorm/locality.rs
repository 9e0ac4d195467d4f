//! Locality of covariant-derivative counterterms and the vanishing of higher
//! parameter derivatives.
//!
//! The prefixes of `∇^1` act as `∂(a·)X = X + a𝔇X` and `(∂·)X = 𝔇X`, where
//! `𝔇` is the grading symbol collecting parameter-slot derivatives. The
//! cherry part of `∇^1` is taken on one slot at a time.

use num_rational::BigRational;
use serde::Serialize;

use crate::calculus::{graft, nabla};
use crate::error::{Error, Result};
use crate::symexpr::{sym, SymExpr};
use crate::trees::{factorial, MultiIndex, Noise, ParamIndex, Tree, TreeSum};
use crate::upsilon::Upsilon;

fn hat_of(ups: &Upsilon, s: &TreeSum) -> Result<SymExpr> {
    let mut acc = SymExpr::zero();
    for (t, c) in s.iter() {
        acc = acc + ups.upsilon_fhat(t)?.scale(c);
    }
    Ok(acc)
}

/// `Υ_F` of the unparametrised part.
fn local_of(ups: &Upsilon, s: &TreeSum) -> Result<SymExpr> {
    let mut acc = SymExpr::zero();
    for (t, c) in s.iter() {
        if t.is_unparametrised() {
            acc = acc + ups.upsilon_f(t)?.scale(c);
        }
    }
    Ok(acc)
}

/// `Υ_F̂[τ] = q Υ_F[𝒫τ]`, with `𝒫` killing trees that carry `h > 0`.
pub fn is_local_tree(tau: &Tree, ups: &Upsilon) -> Result<bool> {
    let hat = ups.upsilon_fhat(tau)?;
    let local = if tau.is_unparametrised() { SymExpr::q() * ups.upsilon_f(tau)? } else { SymExpr::zero() };
    Ok(hat == local)
}

fn require_local(tau: &Tree, ups: &Upsilon) -> Result<()> {
    if is_local_tree(tau, ups)? {
        Ok(())
    } else {
        Err(Error::NotLocalInput(tau.to_string()))
    }
}

/// `I_x^{(k)}(τ1) I_x^{(l)}(τ2)` in this planar order.
fn cherry(tau1: &Tree, k: u32, tau2: &Tree, l: u32) -> Tree {
    Tree::node(Noise::One, MultiIndex::ZERO, vec![(ParamIndex::new(k, 0, 1), tau1.clone()), (ParamIndex::new(l, 0, 1), tau2.clone())])
        .canonicalize()
}

#[derive(Clone, Debug, Serialize)]
pub struct SlotCheck {
    /// Which argument carries the parameter derivative in the cherry.
    pub slot: usize,
    pub graded: SymExpr,
    pub free: SymExpr,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LocalityReport {
    pub tau1: Tree,
    pub tau2: Tree,
    /// `q Υ_F[𝒫 ∇_{τ2} τ1]`
    pub expected: SymExpr,
    pub slots: Vec<SlotCheck>,
    pub pass: bool,
}

/// `Υ_F̂[∇_{τ2}τ1] + Υ_F̂[∇¹_{τ2}τ1] = q Υ_F[𝒫 ∇_{τ2}τ1]`, with the
/// `𝔇`-graded part required to cancel.
pub fn check_locality(tau1: &Tree, tau2: &Tree, ups: &Upsilon) -> Result<LocalityReport> {
    require_local(tau1, ups)?;
    require_local(tau2, ups)?;
    let a = sym("a");
    let d = SymExpr::grading();
    let n0 = nabla(tau1, tau2, 0);
    let n1 = nabla(tau1, tau2, 1);
    let zeroth = &a * &hat_of(ups, &n0.single)? + hat_of(ups, &n0.cherry)?;
    let single1 = hat_of(ups, &n1.single)?;
    let expected = SymExpr::q() * (&a * &local_of(ups, &n0.single)? + local_of(ups, &n0.cherry)?);
    let half = BigRational::new(1.into(), 2.into());
    let mut slots = Vec::new();
    for slot in [1, 2] {
        let (k, l) = if slot == 1 { (1, 0) } else { (0, 1) };
        let c = ups.upsilon_fhat(&cherry(tau1, k, tau2, l))?.scale(&half);
        let total = &zeroth + &(&single1 * &(SymExpr::one() + &a * &d)) + &d * &c;
        let (free, graded) = total.split_grading();
        let pass = graded.is_zero() && free == expected;
        slots.push(SlotCheck { slot, graded, free, pass });
    }
    let pass = slots.iter().all(|s| s.pass);
    Ok(LocalityReport { tau1: tau1.clone(), tau2: tau2.clone(), expected, slots, pass })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NullKind {
    /// `τ1 ⟶_{(k,0)} τ2`
    Single(u32),
    /// `½ I_x^{(k)}(τ1) I_x^{(l)}(τ2) / (k! l!)`
    Cherry(u32, u32),
}

impl NullKind {
    /// Whether the vanishing statement covers this order.
    pub fn in_claim(&self) -> bool {
        match *self {
            NullKind::Single(k) => k > 1,
            NullKind::Cherry(k, l) => k + l > 1,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NullReport {
    pub kind: NullKind,
    pub hat: SymExpr,
    pub local: SymExpr,
    pub in_claim: bool,
    pub pass: bool,
}

/// Both `Υ_F̂` and `q Υ_F ∘ 𝒫` of the decorated term vanish.
pub fn check_null(tau1: &Tree, tau2: &Tree, kind: NullKind, ups: &Upsilon) -> Result<NullReport> {
    require_local(tau1, ups)?;
    require_local(tau2, ups)?;
    let terms = match kind {
        NullKind::Single(k) => graft(tau1, ParamIndex::new(k, 0, 0), tau2),
        NullKind::Cherry(k, l) => {
            let w = BigRational::new(1.into(), (2 * factorial(k) * factorial(l)).into());
            let mut s = TreeSum::zero();
            s.add_term(cherry(tau1, k, tau2, l), w);
            s
        }
    };
    let hat = hat_of(ups, &terms)?;
    let local = SymExpr::q() * local_of(ups, &terms)?;
    let pass = hat.is_zero() && local.is_zero();
    Ok(NullReport { kind, hat, local, in_claim: kind.in_claim(), pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::parse_tree;

    fn t(s: &str) -> Tree {
        parse_tree(s).unwrap()
    }

    #[test]
    fn noise_pair_is_local() {
        let r = check_locality(&Tree::xi(), &Tree::xi(), &Upsilon::default()).unwrap();
        assert!(r.pass, "{r:#?}");
        assert_eq!(r.expected, sym("q*a*g*g' + q*(f - a')*g^2"));
    }

    #[test]
    fn graded_parts_cancel_termwise() {
        let ups = Upsilon::default();
        let single = ups.upsilon_fhat(&t("Xi[I{1}(Xi)]")).unwrap() * sym("a");
        let mixed = ups.upsilon_fhat(&t("One[Ix{1}(Xi), Ix(Xi)]")).unwrap() * SymExpr::ratio(1, 2);
        assert_eq!(single, sym("-a*a'*q*g^2"));
        assert_eq!(mixed, sym("a*a'*q*g^2"));
    }

    #[test]
    fn non_local_inputs_are_rejected() {
        let r = check_locality(&Tree::xi(), &t("Xi[I(Xi)]"), &Upsilon::default());
        assert!(matches!(r, Err(Error::NotLocalInput(_))));
        assert!(is_local_tree(&t("Xi[I{2}(Xi)]"), &Upsilon::default()).unwrap());
    }

    #[test]
    fn null_orders() {
        let ups = Upsilon::default();
        let xi = Tree::xi();
        for kind in [NullKind::Single(2), NullKind::Single(3), NullKind::Cherry(1, 1), NullKind::Cherry(2, 0), NullKind::Cherry(0, 2)] {
            assert!(check_null(&xi, &xi, kind, &ups).unwrap().pass, "{kind:?}");
        }
        let edge = check_null(&xi, &xi, NullKind::Cherry(0, 1), &ups).unwrap();
        assert!(!edge.in_claim && !edge.pass);
        assert_eq!(edge.hat, sym("a*a'*q*g^2"));
    }
}
