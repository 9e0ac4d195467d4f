use std::collections::BTreeMap;

use num_rational::BigRational;

use super::atom::{Atom, FuncBase};
use super::expr::{Accumulator, SymExpr};
use super::poly::{rat, Poly};
use crate::trees::ParamIndex;

/// Argument slots of the lifted nonlinearity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    U,
    Ux,
    V(ParamIndex),
}

impl Slot {
    pub fn name(&self) -> String {
        match self {
            Slot::U => "u".into(),
            Slot::Ux => "ux".into(),
            Slot::V(a) => Atom::V(*a).to_string(),
        }
    }
}

/// Apply the derivation determined by its values on atoms (`D` is constant).
pub fn derive(e: &SymExpr, datom: &dyn Fn(&Atom) -> SymExpr) -> SymExpr {
    let mut cache: BTreeMap<Atom, SymExpr> = BTreeMap::new();
    let mut d = |a: &Atom| -> SymExpr { cache.entry(*a).or_insert_with(|| datom(a)).clone() };
    let num = e.numerator();
    let p = e.q_power();
    let mut acc = Accumulator::new();
    let dnum = derive_poly(num, &mut d);
    acc.add(&(&dnum * &SymExpr::q_inv_pow(p)));
    if p > 0 {
        let dq = derive_poly(&Poly::q(), &mut d);
        let term = &(&SymExpr::from_parts(num.clone(), 0) * &dq) * &SymExpr::q_inv_pow(p + 1);
        acc.add_scaled(&term, &rat(-(p as i64)));
    }
    acc.finish()
}

fn derive_poly(p: &Poly, d: &mut dyn FnMut(&Atom) -> SymExpr) -> SymExpr {
    let mut acc = Accumulator::new();
    for (m, c) in &p.terms {
        for (i, (a, pow)) in m.factors.iter().enumerate() {
            let da = d(a);
            if da.is_zero() {
                continue;
            }
            let mut rest = m.clone();
            if *pow == 1 {
                rest.factors.remove(i);
            } else {
                rest.factors[i].1 -= 1;
            }
            let coeff: BigRational = c * rat(*pow as i64);
            let term = &SymExpr::from_parts(Poly::monomial(rest, coeff), 0) * &da;
            acc.add(&term);
        }
    }
    acc.finish()
}

/// The non-commutative derivative `∂_{v_α}`.
///
/// - `∂_{v_α} F(u) = δ_{α,0} F'(u)/q`
/// - `∂_{v_α} v_β = δ_{α,0} a'(u) v_{β+(1,0)}/q + δ_{α,β}`
/// - `∂_{v_α} ∂_x u = δ_{α,(0,(0,1))}/q`
pub fn v_derivative(alpha: ParamIndex, e: &SymExpr) -> SymExpr {
    derive(e, &|a| v_derivative_atom(alpha, a))
}

fn v_derivative_atom(alpha: ParamIndex, a: &Atom) -> SymExpr {
    let at_zero = alpha.is_zero();
    match a {
        Atom::Func(b, n) if at_zero => SymExpr::func(*b, n + 1) * SymExpr::q_inv_pow(1),
        Atom::U if at_zero => SymExpr::q_inv_pow(1),
        Atom::Ux if alpha == ParamIndex::X => SymExpr::q_inv_pow(1),
        Atom::V(beta) => {
            let mut r = SymExpr::zero();
            if at_zero {
                r = SymExpr::func(FuncBase::A, 1) * SymExpr::v(beta.raise_h(1)) * SymExpr::q_inv_pow(1);
            }
            if *beta == alpha {
                r = r + SymExpr::one();
            }
            r
        }
        _ => SymExpr::zero(),
    }
}

/// Apply `∂_{v_{α_1}}` first, then `∂_{v_{α_2}}`, and so on.
pub fn v_derivatives(alphas: &[ParamIndex], e: &SymExpr) -> SymExpr {
    alphas.iter().fold(e.clone(), |acc, a| v_derivative(*a, &acc))
}

/// Ordinary partial derivative in one argument slot; `∂_x u` is independent of `v_x` here.
pub fn slot_partial(slot: Slot, e: &SymExpr) -> SymExpr {
    derive(e, &|a| match (slot, a) {
        (Slot::U, Atom::Func(b, n)) => SymExpr::func(*b, n + 1),
        (Slot::U, Atom::U) => SymExpr::one(),
        (Slot::Ux, Atom::Ux) => SymExpr::one(),
        (Slot::V(beta), Atom::V(g)) if beta == *g => SymExpr::one(),
        _ => SymExpr::zero(),
    })
}

/// Derivative in the formal parameter `c`.
pub fn param_derivative(e: &SymExpr) -> SymExpr {
    derive(e, &|a| if *a == Atom::Param { SymExpr::one() } else { SymExpr::zero() })
}
