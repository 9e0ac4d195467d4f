//! Expansion of the abstract fixed-point system `(U, V_α, F̂)` on products
//! of planted trees, and comparison of its coefficients with `Υ / S`.
//!
//! Products are commutative here. Every product is stored under one planar
//! representative: the children without parameter derivative come first in
//! canonical order, followed by the others in the same order. Polynomial
//! trees are never produced; scalar parts are injected by hand (`v_α` for
//! `V_α`, `∂_x u` for `DU`). Only trees that can still end up inside a tree
//! conforming to the saturated rule are kept.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rules::{conforms, RuleKind};
use crate::symexpr::{slot_partial, sym, Atom, FuncBase, Monomial, Poly, Slot, SymExpr};
use crate::trees::{compare_planted, factorial, Edge, LinComb, MultiIndex, Noise, ParamIndex, Tree};
use crate::upsilon::{hat, Nonlinearity, Upsilon};

pub type SymSum = LinComb<SymExpr>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Truncation {
    pub max_noises: usize,
    pub max_param: u32,
}

impl Truncation {
    pub fn new(max_noises: usize) -> Self {
        Truncation { max_noises, max_param: max_noises as u32 }
    }

    fn validate(&self) -> Result<()> {
        if (self.max_param as usize) < self.max_noises {
            return Err(Error::TruncationTooSmall(format!(
                "parameter order {} is below the noise bound {}",
                self.max_param, self.max_noises
            )));
        }
        Ok(())
    }
}

/// `scalar · 1 + Σ c_τ τ`
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Expansion {
    pub scalar: SymExpr,
    pub trees: SymSum,
}

fn thick_count(t: &Tree) -> Option<usize> {
    let mut n = 0;
    for e in &t.children {
        if e.index.st == MultiIndex::X {
            n += 1;
        } else if !e.index.st.is_zero() {
            return None;
        }
    }
    Some(n)
}

/// A product of planted trees whose root may still receive more edges.
fn keep_partial(t: &Tree, trunc: &Truncation) -> bool {
    if t.noise_count() > trunc.max_noises || !t.deco.is_zero() {
        return false;
    }
    let Some(thick) = thick_count(t) else { return false };
    let root_ok = match t.noise {
        Noise::Xi => thick == 0,
        Noise::One => thick <= 2,
    };
    root_ok && t.children.iter().all(|e| conforms(&e.tree, RuleKind::Saturated))
}

fn keep_full(t: &Tree, trunc: &Truncation) -> bool {
    t.noise_count() <= trunc.max_noises && conforms(t, RuleKind::Saturated)
}

fn normal_order(a: &Edge, b: &Edge) -> Ordering {
    (a.index.h != 0).cmp(&(b.index.h != 0)).then_with(|| compare_planted(a, b))
}

fn normal_sort(t: &mut Tree) {
    t.children.sort_by(normal_order);
}

/// Commutative product of two products of planted trees.
fn normal_product(a: &Tree, b: &Tree) -> Option<Tree> {
    let noise = match (a.noise, b.noise) {
        (Noise::Xi, Noise::Xi) => return None,
        (Noise::One, Noise::One) => Noise::One,
        _ => Noise::Xi,
    };
    let mut children = a.children.clone();
    children.extend(b.children.iter().cloned());
    let mut t = Tree { noise, deco: MultiIndex::ZERO, children };
    normal_sort(&mut t);
    Some(t)
}

impl Expansion {
    pub fn scalar(s: SymExpr) -> Self {
        Expansion { scalar: s, trees: SymSum::zero() }
    }

    pub fn coeff(&self, t: &Tree) -> SymExpr {
        if t.is_one() {
            self.scalar.clone()
        } else {
            self.trees.coeff(t)
        }
    }

    pub fn add(&self, other: &Expansion) -> Expansion {
        Expansion { scalar: &self.scalar + &other.scalar, trees: self.trees.plus(&other.trees) }
    }

    pub fn sub(&self, other: &Expansion) -> Expansion {
        Expansion { scalar: &self.scalar - &other.scalar, trees: self.trees.minus(&other.trees) }
    }

    pub fn scale(&self, c: &SymExpr) -> Expansion {
        Expansion { scalar: &self.scalar * c, trees: self.trees.scale(c) }
    }

    /// The part without the scalar.
    pub fn tilde(&self) -> Expansion {
        Expansion { scalar: SymExpr::zero(), trees: self.trees.clone() }
    }

    pub fn mul(&self, other: &Expansion, trunc: &Truncation) -> Expansion {
        let mut terms: BTreeMap<Tree, SymExpr> = BTreeMap::new();
        let mut push = |t: Tree, c: SymExpr| {
            if c.is_zero() {
                return;
            }
            match terms.get_mut(&t) {
                Some(old) => *old = &*old + &c,
                None => {
                    terms.insert(t, c);
                }
            }
        };
        if !self.scalar.is_zero() {
            for (t, c) in other.trees.iter() {
                push(t.clone(), &self.scalar * c);
            }
        }
        if !other.scalar.is_zero() {
            for (t, c) in self.trees.iter() {
                push(t.clone(), &other.scalar * c);
            }
        }
        for (t1, c1) in self.trees.iter() {
            let n1 = t1.noise_count();
            for (t2, c2) in other.trees.iter() {
                if n1 + t2.noise_count() > trunc.max_noises {
                    continue;
                }
                if let Some(t) = normal_product(t1, t2) {
                    if keep_partial(&t, trunc) {
                        push(t, c1 * c2);
                    }
                }
            }
        }
        Expansion { scalar: &self.scalar * &other.scalar, trees: terms.into_iter().collect() }
    }

    pub fn pow(&self, n: u32, trunc: &Truncation) -> Expansion {
        let mut r = Expansion::scalar(SymExpr::one());
        for _ in 0..n {
            r = r.mul(self, trunc);
        }
        r
    }

    /// Multiply by `Ξ`: every tree moves its root onto the noise.
    fn times_xi(&self, trunc: &Truncation) -> Expansion {
        let mut trees = SymSum::zero();
        if !self.scalar.is_zero() {
            trees.add_term(Tree::xi(), self.scalar.clone());
        }
        for (t, c) in self.trees.iter() {
            let x = t.with_noise(Noise::Xi);
            if keep_partial(&x, trunc) {
                trees.add_term(x, c.clone());
            }
        }
        Expansion { scalar: SymExpr::zero(), trees }
    }

    fn project_full(&self, trunc: &Truncation) -> Expansion {
        let trees = self.trees.iter().filter(|(t, _)| keep_full(t, trunc)).map(|(t, c)| (t.clone(), c.clone())).collect();
        Expansion { scalar: self.scalar.clone(), trees }
    }

    /// Largest noise count present.
    pub fn max_noises(&self) -> usize {
        self.trees.trees().map(|t| t.noise_count()).max().unwrap_or(0)
    }
}

/// `I_β(F̂)` without its polynomial part.
fn plant(fhat: &Expansion, beta: ParamIndex, trunc: &Truncation) -> SymSum {
    fhat.trees
        .iter()
        .filter(|(t, _)| t.noise_count() <= trunc.max_noises)
        .map(|(t, c)| (Tree::plant(beta, t.clone()), c.clone()))
        .collect()
}

/// `D_1` on products of planted trees, applied edge by edge at the root.
fn space_derivative(e: &SymSum, trunc: &Truncation) -> SymSum {
    let mut out = SymSum::zero();
    for (t, c) in e.iter() {
        for j in 0..t.children.len() {
            let mut d = t.clone();
            d.children[j].index = d.children[j].index.add_st(MultiIndex::X);
            normal_sort(&mut d);
            if keep_partial(&d, trunc) {
                out.add_term(d, c.clone());
            }
        }
    }
    out
}

/// `Σ_k φ^{(n+k)}(u)/k! Ẽ^k` for an expansion with scalar part `u`.
pub fn lift_compose(base: FuncBase, n: u32, e: &Expansion, trunc: &Truncation) -> Result<Expansion> {
    if e.scalar != SymExpr::u() {
        return Err(Error::Unsupported(format!("lift around {} instead of u", e.scalar)));
    }
    Ok(lift_tilde_powers(base, n, &powers(&e.tilde(), trunc)))
}

fn powers(tilde: &Expansion, trunc: &Truncation) -> Vec<Expansion> {
    let mut out = vec![Expansion::scalar(SymExpr::one())];
    for k in 1..=trunc.max_noises {
        let next = out[k - 1].mul(tilde, trunc);
        out.push(next);
    }
    out
}

fn lift_tilde_powers(base: FuncBase, n: u32, powers: &[Expansion]) -> Expansion {
    let mut acc = Expansion::default();
    for (k, p) in powers.iter().enumerate() {
        let c = SymExpr::func(base, n + k as u32).scale(&BigRational::new(1.into(), factorial(k as u32).into()));
        acc = acc.add(&p.scale(&c));
    }
    acc
}

/// How the lift of `F̂` is formed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FhatForm {
    /// Products of lifted functions, following the structure of the equation.
    Structural,
    /// Multi-slot Taylor expansion of `F̂` around the scalar parts.
    Taylor,
}

/// How the self-referential term `a' v_c Ũ` of the `U` equation is handled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Solver {
    /// Moved to the left and divided out by `q`.
    Exact,
    /// Plain iteration, a fixed number of times.
    Neumann { iterations: usize },
}

pub const V_SLOTS: [ParamIndex; 4] = [ParamIndex::C, ParamIndex::CC, ParamIndex::CX, ParamIndex::X];

#[derive(Clone, Debug)]
pub struct System {
    pub trunc: Truncation,
    pub u: Expansion,
    pub du: Expansion,
    pub fhat: Expansion,
    /// `V_α` for `α ∈ {c, cc, cx, x}`.
    pub v: BTreeMap<ParamIndex, Expansion>,
}

struct Lifts {
    tilde_a: Expansion,
    a: Expansion,
    a1: Expansion,
    a2: Expansion,
    f: Expansion,
    g: Expansion,
}

fn lifts(u: &Expansion, trunc: &Truncation) -> Lifts {
    let pw = powers(&u.tilde(), trunc);
    let a = lift_tilde_powers(FuncBase::A, 0, &pw);
    Lifts {
        tilde_a: a.tilde(),
        a,
        a1: lift_tilde_powers(FuncBase::A, 1, &pw),
        a2: lift_tilde_powers(FuncBase::A, 2, &pw),
        f: lift_tilde_powers(FuncBase::F, 0, &pw),
        g: lift_tilde_powers(FuncBase::G, 0, &pw),
    }
}

/// `V_β = Σ_ℓ Ã^ℓ/ℓ! (I_{β+(ℓ,0)} F̂ + v_{β+(ℓ,0)})`
fn v_from(beta: ParamIndex, tilde_a: &Expansion, fhat: &Expansion, trunc: &Truncation) -> Expansion {
    let mut acc = Expansion::default();
    let mut power = Expansion::scalar(SymExpr::one());
    for l in 0..=trunc.max_param {
        if l > 0 {
            power = power.mul(tilde_a, trunc);
            if power.trees.is_zero() {
                break;
            }
        }
        let idx = beta.raise_h(l);
        let k = Expansion { scalar: SymExpr::v(idx), trees: plant(fhat, idx, trunc) };
        let c = SymExpr::constant(BigRational::new(1.into(), factorial(l).into()));
        acc = acc.add(&power.mul(&k, trunc).scale(&c));
    }
    acc
}

fn du_from(u: &Expansion, trunc: &Truncation) -> Expansion {
    Expansion { scalar: SymExpr::ux(), trees: space_derivative(&u.trees, trunc) }
}

fn fhat_structural(l: &Lifts, du: &Expansion, v: &BTreeMap<ParamIndex, Expansion>, trunc: &Truncation) -> Expansion {
    let t = trunc;
    let du2 = du.mul(du, t);
    let q_lift = Expansion::scalar(SymExpr::one()).sub(&l.a1.mul(&v[&ParamIndex::C], t));
    let f1 = l.f.sub(&l.a1).mul(&du2, t);
    let big_f = f1.add(&l.g.times_xi(t));
    let mut out = q_lift.mul(&big_f, t);
    let a_a1 = l.a.mul(&l.a1, t);
    out = out.add(&a_a1.mul(&l.a1, t).mul(&v[&ParamIndex::CC], t).mul(&du2, t));
    out = out.add(&l.a.mul(&l.a2, t).mul(&v[&ParamIndex::C], t).mul(&du2, t));
    out = out.add(&a_a1.mul(du, t).mul(&v[&ParamIndex::CX], t).scale(&SymExpr::int(2)));
    out = out.add(&l.a1.mul(du, t).mul(&v[&ParamIndex::X], t));
    out.project_full(t)
}

/// `Σ_k ∂^k F̂ / k! Π (V_i - v_i)^{k_i}` over the slots `u, ∂_x u, v_c, v_cc, v_cx, v_x`.
fn fhat_taylor(fhat: &Nonlinearity, u: &Expansion, du: &Expansion, v: &BTreeMap<ParamIndex, Expansion>, trunc: &Truncation) -> Expansion {
    let mut slots: Vec<(Slot, Expansion)> = vec![(Slot::U, u.tilde()), (Slot::Ux, du.tilde())];
    for a in V_SLOTS {
        slots.push((Slot::V(a), v[&a].tilde()));
    }
    let pows: Vec<Vec<Expansion>> = slots.iter().map(|(_, d)| powers(d, trunc)).collect();
    let one_part = taylor_rec(&fhat.one, 0, &slots, &pows, Expansion::scalar(SymExpr::one()), 0, trunc);
    let xi_part = taylor_rec(&fhat.xi, 0, &slots, &pows, Expansion::scalar(SymExpr::one()), 0, trunc);
    one_part.add(&xi_part.times_xi(trunc)).project_full(trunc)
}

fn taylor_rec(
    deriv: &SymExpr,
    i: usize,
    slots: &[(Slot, Expansion)],
    pows: &[Vec<Expansion>],
    prod: Expansion,
    order: usize,
    trunc: &Truncation,
) -> Expansion {
    if i == slots.len() {
        return prod.scale(deriv);
    }
    let mut acc = Expansion::default();
    let mut d = deriv.clone();
    for k in 0..=(trunc.max_noises - order) {
        if k > 0 {
            d = slot_partial(slots[i].0, &d).scale(&BigRational::new(1.into(), (k as i64).into()));
            if d.is_zero() {
                break;
            }
        }
        let next = if k == 0 { prod.clone() } else { prod.mul(&pows[i][k], trunc) };
        if k > 0 && next.trees.is_zero() && next.scalar.is_zero() {
            break;
        }
        acc = acc.add(&taylor_rec(&d, i + 1, slots, pows, next, order + k, trunc));
    }
    acc
}

/// Solve the system up to the truncation.
pub fn expand_system(trunc: Truncation) -> Result<System> {
    expand_system_with(trunc, FhatForm::Structural, Solver::Exact)
}

pub fn expand_system_with(trunc: Truncation, form: FhatForm, solver: Solver) -> Result<System> {
    trunc.validate()?;
    let t = &trunc;
    let fhat_fn = hat(&Nonlinearity::reduced());
    let mut u = Expansion::scalar(SymExpr::u());
    let mut fhat = Expansion::default();
    let q_inv = SymExpr::q_inv_pow(1);
    let self_coeff = sym("a'*v_c");
    let max_iter = match solver {
        Solver::Exact => 4 * trunc.max_noises + 8,
        Solver::Neumann { iterations } => iterations,
    };
    let mut done = false;
    for _ in 0..max_iter {
        let l = lifts(&u, t);
        let du = du_from(&u, t);
        let v: BTreeMap<ParamIndex, Expansion> = V_SLOTS.iter().map(|a| (*a, v_from(*a, &l.tilde_a, &fhat, t))).collect();
        let new_fhat = match form {
            FhatForm::Structural => fhat_structural(&l, &du, &v, t),
            FhatForm::Taylor => fhat_taylor(&fhat_fn, &u, &du, &v, t),
        };
        let phi = v_from(ParamIndex::ZERO, &l.tilde_a, &fhat, t);
        let new_u = match solver {
            Solver::Exact => {
                let psi = phi.tilde().sub(&u.tilde().scale(&self_coeff));
                Expansion { scalar: SymExpr::u(), trees: psi.trees.scale(&q_inv) }
            }
            Solver::Neumann { .. } => phi,
        };
        let stable = new_u == u && new_fhat == fhat;
        u = new_u;
        fhat = new_fhat;
        if stable {
            done = true;
            break;
        }
    }
    if !done && solver == Solver::Exact {
        return Err(Error::TruncationTooSmall("fixed-point iteration did not stabilise".into()));
    }
    let l = lifts(&u, t);
    let du = du_from(&u, t);
    let v = V_SLOTS.iter().map(|a| (*a, v_from(*a, &l.tilde_a, &fhat, t))).collect();
    Ok(System { trunc, u, du, fhat, v })
}

impl System {
    /// `V_β` for any `β`, recomputed from `U` and `F̂`.
    pub fn v_series(&self, beta: ParamIndex) -> Expansion {
        if beta.is_zero() {
            return self.u.clone();
        }
        let l = lifts(&self.u, &self.trunc);
        v_from(beta, &l.tilde_a, &self.fhat, &self.trunc)
    }

    /// `(name, base symbol, expansion)` for every computed series except `F̂`.
    pub fn named_series(&self) -> Vec<(String, SymExpr, Expansion)> {
        let mut out = vec![("U".to_string(), SymExpr::u(), self.u.clone()), ("DU".to_string(), SymExpr::ux(), self.du.clone())];
        for (a, e) in &self.v {
            out.push((format!("V_{}", a.suffix()), SymExpr::v(*a), e.clone()));
        }
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CoherenceEntry {
    pub series: String,
    pub tree: Tree,
    pub noises: usize,
    pub coefficient: SymExpr,
    pub expected: SymExpr,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoherenceReport {
    pub max_noises: usize,
    pub entries: Vec<CoherenceEntry>,
}

impl CoherenceReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CoherenceEntry> {
        self.entries.iter().filter(|e| !e.pass)
    }
}

fn over_symmetry(e: SymExpr, t: &Tree) -> SymExpr {
    e.scale(&BigRational::new(1.into(), t.symmetry_factor().into()))
}

/// Compare every coefficient with `Υ/S` computed by `ups`.
///
/// Both sides are compared with `∂_x u` read as `v_x / q`, so that the
/// `v`-derivatives of `F̂` and of the `DU` base see its dependence on `v`
/// and `v_c`.
pub fn check_coherence(sys: &System, ups: &Upsilon) -> Result<CoherenceReport> {
    let ups = &ups.ux_as_v();
    let mut entries = Vec::new();
    let mut push = |series: &str, tree: Tree, coefficient: SymExpr, expected: SymExpr| {
        let coefficient = coefficient.ux_to_v();
        let pass = coefficient == expected;
        entries.push(CoherenceEntry { series: series.to_string(), noises: tree.noise_count(), tree, coefficient, expected, pass });
    };
    for (name, base, e) in sys.named_series() {
        let base = base.ux_to_v();
        push(&name, Tree::one(), e.scalar.clone(), base.clone());
        for (t, c) in e.trees.iter() {
            let expected = over_symmetry(ups.upsilon_base(&base, t)?, t);
            push(&name, t.clone(), c.clone(), expected);
        }
    }
    push("Fhat", Tree::one(), sys.fhat.scalar.clone(), ups.fhat.one.clone());
    for (t, c) in sys.fhat.trees.iter() {
        let expected = over_symmetry(ups.upsilon_fhat(t)?, t);
        push("Fhat", t.clone(), c.clone(), expected);
    }
    Ok(CoherenceReport { max_noises: sys.trunc.max_noises, entries })
}

/// Divide by the atom `a` when every monomial contains it.
fn divide_by_atom(e: &SymExpr, a: Atom) -> Option<SymExpr> {
    let mut p = Poly::zero();
    for (m, c) in &e.numerator().terms {
        let k = m.power_of(&a);
        if k == 0 {
            return None;
        }
        p.add_term(Monomial { d: m.d, factors: m.with_power(a, k - 1).factors }, c.clone());
    }
    Some(SymExpr::from_parts(p, e.q_power()))
}

/// Which series a planted coefficient is read from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlantedTarget {
    /// `D^{(0,m)} U` for `m ∈ {0, e_1}`
    DerivU(MultiIndex),
    V(ParamIndex),
}

/// Coefficient of `I_α(Ξ)` in the target divided by `⟨F̂, Ξ⟩ = q g`.
pub fn planted_coefficient(sys: &System, alpha: ParamIndex, target: PlantedTarget) -> Result<SymExpr> {
    let e = match target {
        PlantedTarget::DerivU(m) if m.is_zero() => sys.u.clone(),
        PlantedTarget::DerivU(m) if m == MultiIndex::X => sys.du.clone(),
        PlantedTarget::DerivU(m) => return Err(Error::Unsupported(format!("derivative order {m}"))),
        PlantedTarget::V(beta) => sys.v_series(beta),
    };
    let c = e.coeff(&Tree::plant(alpha, Tree::xi()));
    if c.is_zero() {
        return Ok(c);
    }
    divide_by_atom(&(&c * &SymExpr::q_inv_pow(1)), Atom::Func(FuncBase::G, 0))
        .ok_or_else(|| Error::Unsupported(format!("coefficient {c} is not a multiple of the noise coefficient")))
}

/// The values prescribed by the derivative rules.
pub fn expected_planted(alpha: ParamIndex, target: PlantedTarget) -> SymExpr {
    match target {
        PlantedTarget::DerivU(m) => {
            if alpha == ParamIndex::space_time(m) {
                SymExpr::q_inv_pow(1)
            } else {
                SymExpr::zero()
            }
        }
        PlantedTarget::V(beta) => {
            let mut r = if alpha == beta { SymExpr::one() } else { SymExpr::zero() };
            if alpha.is_zero() {
                r = r + sym("a'") * SymExpr::v(beta.raise_h(1)) * SymExpr::q_inv_pow(1);
            }
            r
        }
    }
}

/// `exact ≡ approx` as power series in `v_c` up to and including `order`,
/// for an `approx` free of `1/q`.
pub fn agree_mod_vc(exact: &SymExpr, approx: &SymExpr, order: u32) -> bool {
    if approx.q_power() > 0 {
        return false;
    }
    let vc = Atom::V(ParamIndex::C);
    let lhs = (approx * &SymExpr::q_pow(exact.q_power() as i32)).numerator().truncate_power(&vc, order);
    lhs == exact.numerator().truncate_power(&vc, order)
}

/// Trees whose `U` coefficient differs between the two solvers modulo `v_c^{order+1}`.
pub fn neumann_mismatches(exact: &System, neumann: &System, order: u32) -> Vec<Tree> {
    let mut trees: Vec<&Tree> = exact.u.trees.trees().chain(neumann.u.trees.trees()).collect();
    trees.sort();
    trees.dedup();
    trees.into_iter().filter(|t| !agree_mod_vc(&exact.u.coeff(t), &neumann.u.coeff(t), order)).cloned().collect()
}

/// Trees of the `V_α` expansions must all be products of planted trees.
pub fn all_planted_products(sys: &System) -> bool {
    sys.named_series().iter().all(|(_, _, e)| e.trees.trees().all(|t| t.noise == Noise::One && t.deco.is_zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::parse_tree;

    fn t(s: &str) -> Tree {
        parse_tree(s).unwrap()
    }

    #[test]
    fn low_order_coefficients() {
        let sys = expand_system(Truncation::new(1)).unwrap();
        assert_eq!(sys.u.coeff(&t("One[I(Xi)]")), sym("g"));
        assert_eq!(sys.fhat.coeff(&t("Xi")), sym("q*g"));
        let vc = &sys.v[&ParamIndex::C];
        assert_eq!(vc.scalar, sym("v_c"));
        assert_eq!(vc.coeff(&t("One[I(Xi)]")), sym("a'*g*v_cc"));
        assert_eq!(vc.coeff(&t("One[I{1}(Xi)]")), sym("q*g"));
    }

    #[test]
    fn lift_of_a() {
        let trunc = Truncation::new(1);
        let sys = expand_system(trunc).unwrap();
        let a = lift_compose(FuncBase::A, 0, &sys.u, &trunc).unwrap();
        assert_eq!(a.scalar, sym("a"));
        assert_eq!(a.coeff(&t("One[I(Xi)]")), sym("a'*g"));
        let g = lift_compose(FuncBase::G, 0, &Expansion::scalar(SymExpr::u()), &trunc).unwrap();
        assert_eq!(g, Expansion::scalar(sym("g")));
        assert!(lift_compose(FuncBase::A, 0, &sys.u, &trunc).unwrap().tilde().scalar.is_zero());
    }

    #[test]
    fn coherent_to_two_noises() {
        let sys = expand_system(Truncation::new(2)).unwrap();
        let report = check_coherence(&sys, &Upsilon::default()).unwrap();
        let bad: Vec<String> = report.failures().map(|e| format!("{} {}: {} vs {}", e.series, e.tree, e.coefficient, e.expected)).collect();
        assert!(bad.is_empty(), "{bad:#?}");
    }

    #[test]
    fn taylor_form_matches_structural() {
        for n in 1..=3 {
            let trunc = Truncation::new(n);
            let a = expand_system(trunc).unwrap();
            let b = expand_system_with(trunc, FhatForm::Taylor, Solver::Exact).unwrap();
            assert_eq!(a.fhat, b.fhat, "noises {n}");
            assert_eq!(a.u, b.u, "noises {n}");
        }
    }

    #[test]
    fn neumann_matches_exact_solve() {
        let trunc = Truncation::new(2);
        let exact = expand_system(trunc).unwrap();
        let order = 2;
        let neumann = expand_system_with(trunc, FhatForm::Structural, Solver::Neumann { iterations: 2 * trunc.max_noises + order as usize + 2 }).unwrap();
        assert!(neumann_mismatches(&exact, &neumann, order).is_empty());
        let short = expand_system_with(trunc, FhatForm::Structural, Solver::Neumann { iterations: 1 }).unwrap();
        assert!(!neumann_mismatches(&exact, &short, order).is_empty());
    }

    #[test]
    fn perturbed_fhat_is_detected() {
        let sys = expand_system(Truncation::new(2)).unwrap();
        let mut fhat = hat(&Nonlinearity::reduced());
        fhat.one = fhat.one + sym("a'*ux*v_x");
        let report = check_coherence(&sys, &Upsilon::with_hat(Nonlinearity::reduced(), fhat)).unwrap();
        assert!(!report.passed());
    }

    #[test]
    fn planted_coefficients() {
        let sys = expand_system(Truncation::new(2)).unwrap();
        let du = PlantedTarget::DerivU(MultiIndex::X);
        assert_eq!(planted_coefficient(&sys, ParamIndex::X, du).unwrap(), SymExpr::q_inv_pow(1));
        let u = PlantedTarget::DerivU(MultiIndex::ZERO);
        assert!(planted_coefficient(&sys, ParamIndex::CC, u).unwrap().is_zero());
        let vc = PlantedTarget::V(ParamIndex::C);
        assert_eq!(planted_coefficient(&sys, ParamIndex::C, vc).unwrap(), SymExpr::one());
        assert_eq!(planted_coefficient(&sys, ParamIndex::ZERO, vc).unwrap(), expected_planted(ParamIndex::ZERO, vc));
    }

    #[test]
    fn rejects_small_parameter_bound() {
        let trunc = Truncation { max_noises: 3, max_param: 1 };
        assert!(matches!(expand_system(trunc), Err(Error::TruncationTooSmall(_))));
    }
}
