//! Strategies shared by the property and acceptance tests.

#![allow(dead_code)]

use num_rational::BigRational;
use proptest::prelude::*;
use qgkpz::calculus::{graft, prep_map_adjoint, star, star_ext, Character};
use qgkpz::symexpr::{v_derivatives, SymExpr};
use qgkpz::trees::{parse_tree, MultiIndex, Noise, ParamIndex, Tree, TreeSum};
use qgkpz::upsilon::Upsilon;

pub const EDGES: [ParamIndex; 4] = [ParamIndex::ZERO, ParamIndex::X, ParamIndex::C, ParamIndex::CX];

pub fn edge() -> impl Strategy<Value = ParamIndex> {
    prop::sample::select(EDGES.to_vec())
}

/// Trees with zero decorations in which every node without noise has children.
pub fn tree() -> impl Strategy<Value = Tree> {
    Just(Tree::xi()).prop_recursive(3, 6, 3, |inner| {
        (any::<bool>(), prop::collection::vec((edge(), inner), 1..3)).prop_map(|(xi, children)| {
            Tree::node(if xi { Noise::Xi } else { Noise::One }, MultiIndex::ZERO, children).canonicalize()
        })
    })
}

pub fn small_tree(max_noises: usize) -> impl Strategy<Value = Tree> {
    tree().prop_filter("noise bound", move |t| t.noise_count() <= max_noises)
}

/// `X^k Π I_{α_i}(σ_i)` with one or two planted factors.
pub fn left_factor(max_noises: usize) -> impl Strategy<Value = Tree> {
    (prop::collection::vec((edge(), tree()), 1..3), prop::sample::select(vec![MultiIndex::ZERO, MultiIndex::X]))
        .prop_map(|(children, deco)| Tree::node(Noise::One, deco, children).canonicalize())
        .prop_filter("noise bound", move |t| t.noise_count() <= max_noises)
}

fn hat_of(ups: &Upsilon, s: &TreeSum) -> SymExpr {
    s.iter().fold(SymExpr::zero(), |acc, (t, c)| acc + ups.upsilon_fhat(t).unwrap().scale(c))
}

/// `Υ_F̂[σ ⋆ τ] = ∂_{v_{α_1}} ⋯ ∂_{v_{α_n}} Υ_F̂[τ] · Π Υ_F̂[σ_i]`
pub fn star_morphism_holds(ups: &Upsilon, sigma: &Tree, tau: &Tree) -> bool {
    let lhs = hat_of(ups, &star(sigma, tau).unwrap());
    let alphas: Vec<ParamIndex> = sigma.children.iter().map(|e| e.index).collect();
    let mut rhs = v_derivatives(&alphas, &ups.upsilon_fhat(tau).unwrap());
    for e in &sigma.children {
        rhs = rhs * ups.upsilon_fhat(&e.tree).unwrap();
    }
    lhs == rhs
}

/// `Υ_{V_α}[τ ⟶_β σ] = Υ_F̂[τ] · ∂_{v_β} Υ_{V_α}[σ]`
pub fn graft_morphism_holds(ups: &Upsilon, sigma: &Tree, tau: &Tree, alpha: ParamIndex, beta: ParamIndex) -> bool {
    let grafted = graft(tau, beta, sigma);
    let lhs = grafted.iter().fold(SymExpr::zero(), |acc, (t, c)| acc + ups.upsilon_v(alpha, t).unwrap().scale(c));
    let rhs = ups.upsilon_fhat(tau).unwrap() * v_derivatives(&[beta], &ups.upsilon_v(alpha, sigma).unwrap());
    lhs == rhs
}

/// `R*_ℓ(σ ⋆ τ) = σ ⋆ (R*_ℓ τ)` for a character taking the given values on
/// the three negative trees of lowest order.
pub fn preparation_identity_holds(sigma: &Tree, tau: &Tree, values: [i64; 3]) -> bool {
    let trees = ["Xi[I(Xi)]", "One[Ix(Xi), Ix(Xi)]", "Xi[I{1}(Xi)]"];
    let ell = Character::new(trees.iter().zip(values).map(|(s, v)| (parse_tree(s).unwrap(), BigRational::from_integer(v.into()))))
        .unwrap()
        .with_identity();
    let lhs = star(sigma, tau).unwrap().map_linear(|t| prep_map_adjoint(&ell, t));
    let rhs = prep_map_adjoint(&ell, tau).map_linear(|t| star_ext(sigma, t));
    lhs == rhs
}

const FIXTURE: &str = include_str!("../fixtures/saturated_trees.txt");

/// Trees listed under `## <section>` in the committed fixture.
pub fn fixture(section: &str) -> std::collections::BTreeSet<Tree> {
    let mut out = std::collections::BTreeSet::new();
    let mut active = false;
    for line in FIXTURE.lines() {
        let line = line.trim();
        if let Some(name) = line.strip_prefix("## ") {
            active = name == section;
        } else if active && !line.is_empty() && !line.starts_with('#') {
            out.insert(parse_tree(line).unwrap());
        }
    }
    out
}
