//! Operations on trees: decoration raising, grafting, the `⋆` product,
//! abstract derivatives, the projection onto unparametrised trees,
//! preparation maps and covariant derivatives.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::trees::{Edge, MultiIndex, Noise, ParamIndex, Tree, TreeSum};

fn int(n: u64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Nodes receiving a decoration increment.
#[derive(Clone, Debug)]
pub enum NodeSet {
    All,
    Paths(Vec<Vec<usize>>),
}

/// `↑^k_B τ`: every way of distributing `k` over the nodes of `B`, each with weight 1.
pub fn uparrow(tau: &Tree, k: MultiIndex, nodes: &NodeSet) -> TreeSum {
    let paths = match nodes {
        NodeSet::All => tau.node_paths(),
        NodeSet::Paths(p) => p.clone(),
    };
    let mut out = TreeSum::zero();
    if paths.is_empty() {
        return out;
    }
    let mut current = tau.clone();
    distribute(&mut current, &paths, 0, k, &mut out);
    out
}

fn distribute(t: &mut Tree, paths: &[Vec<usize>], i: usize, left: MultiIndex, out: &mut TreeSum) {
    if i + 1 == paths.len() {
        let node = t.at_mut(&paths[i]);
        let old = node.deco;
        node.deco = old + left;
        out.add_term(t.clone().canonicalize(), BigRational::one());
        t.at_mut(&paths[i]).deco = old;
        return;
    }
    for part in left.below().collect::<Vec<_>>() {
        let rest = left.checked_sub(part).expect("below yields smaller indices");
        let old = t.at(&paths[i]).deco;
        t.at_mut(&paths[i]).deco = old + part;
        distribute(t, paths, i + 1, rest, out);
        t.at_mut(&paths[i]).deco = old;
    }
}

/// Graft `σ` onto the node at `path` of a raw tree, summing over the
/// decoration-lowering index. Results are left uncanonicalized so that the
/// paths of the original nodes stay valid.
fn graft_at(sigma: &Tree, alpha: ParamIndex, tau: &Tree, path: &[usize]) -> Vec<(Tree, BigRational)> {
    let n_v = tau.at(path).deco;
    let mut out = Vec::new();
    for beta in n_v.below() {
        let Some(index) = alpha.checked_sub_st(beta) else { continue };
        let mut t = tau.clone();
        let node = t.at_mut(path);
        node.deco = n_v.checked_sub(beta).expect("beta below n_v");
        node.children.push(Edge { index, tree: sigma.clone() });
        out.push((t, int(MultiIndex::binomial(n_v, beta))));
    }
    out
}

/// `σ ⟶_α τ`: attach `σ` with edge `I_α` at every node of `τ`, rightmost.
pub fn graft(sigma: &Tree, alpha: ParamIndex, tau: &Tree) -> TreeSum {
    let mut out = TreeSum::zero();
    for path in tau.node_paths() {
        for (t, c) in graft_at(sigma, alpha, tau, &path) {
            out.add_term(t.canonicalize(), c);
        }
    }
    out
}

/// Independent grafting of the planted factors `I_{α_i}(σ_i)` onto the original nodes of `τ`.
fn multi_graft(planted: &[Edge], tau: &Tree) -> Vec<(Tree, BigRational)> {
    let paths = tau.node_paths();
    let mut acc: Vec<(Tree, BigRational)> = vec![(tau.clone(), BigRational::one())];
    for e in planted {
        let mut next = Vec::new();
        for (t, c) in &acc {
            for path in &paths {
                for (g, d) in graft_at(&e.tree, e.index, t, path) {
                    next.push((g, c * d));
                }
            }
        }
        acc = next;
    }
    acc
}

/// `σ ⋆ τ = ↑^k (Π I_{a_i}(σ_i) ⟶ τ)` for `σ = X^k Π I_{a_i}(σ_i)`.
pub fn star(sigma: &Tree, tau: &Tree) -> Result<TreeSum> {
    if sigma.noise == Noise::Xi {
        return Err(Error::StarDomain(sigma.to_string()));
    }
    let mut out = TreeSum::zero();
    for (t, c) in multi_graft(&sigma.children, tau) {
        if sigma.deco.is_zero() {
            out.add_term(t.canonicalize(), c);
        } else {
            out.add_scaled(&uparrow(&t, sigma.deco, &NodeSet::Paths(tau.node_paths())), &c);
        }
    }
    Ok(out)
}

/// `⋆` extended to a left factor with noise at the root by `(Ξ σ') ⋆ τ = Ξ (σ' ⋆ τ)`;
/// terms putting two noises on one node vanish.
pub fn star_ext(sigma: &Tree, tau: &Tree) -> TreeSum {
    if sigma.noise == Noise::One {
        return star(sigma, tau).expect("root without noise");
    }
    if tau.noise == Noise::Xi {
        return TreeSum::zero();
    }
    let inner = star(&sigma.with_noise(Noise::One), tau).expect("root without noise");
    inner.map_linear(|t| TreeSum::single(t.with_noise(Noise::Xi)))
}

/// `D_i` for `i ∈ {0, 1}` (time, space), acting on the space-time part only.
pub fn abstract_derivative(i: usize, tau: &Tree) -> TreeSum {
    let e = MultiIndex::unit(i);
    let mut out = TreeSum::zero();
    if let Some(k) = tau.deco.checked_sub(e) {
        let c = if i == 0 { tau.deco.t } else { tau.deco.x };
        let t = Tree { deco: k, ..tau.clone() };
        out.add_term(t.canonicalize(), int(c as u64));
    }
    for j in 0..tau.children.len() {
        let mut t = tau.clone();
        t.children[j].index = t.children[j].index.add_st(e);
        out.add_term(t.canonicalize(), BigRational::one());
    }
    out
}

/// `𝒫`: keeps trees without parameter derivatives, kills the rest.
pub fn project_unparam(tau: &Tree) -> TreeSum {
    if tau.is_unparametrised() {
        TreeSum::single(tau.clone())
    } else {
        TreeSum::zero()
    }
}

pub fn project_sum(s: &TreeSum) -> TreeSum {
    s.map_linear(project_unparam)
}

/// Finitely supported character on negative trees.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Character {
    values: BTreeMap<Tree, BigRational>,
    /// Whether `ℓ(1) = 1` is used, so that `τ` itself appears in `R*_ℓ τ`.
    pub with_identity: bool,
}

impl Character {
    pub fn new(values: impl IntoIterator<Item = (Tree, BigRational)>) -> Result<Character> {
        let mut map = BTreeMap::new();
        for (t, v) in values {
            if t.reference_degree() >= 0.into() {
                return Err(Error::Unsupported(format!("character supported on non-negative tree {t}")));
            }
            if !v.is_zero() {
                map.insert(t, v);
            }
        }
        Ok(Character { values: map, with_identity: false })
    }

    pub fn with_identity(mut self) -> Self {
        self.with_identity = true;
        self
    }

    pub fn value(&self, t: &Tree) -> BigRational {
        self.values.get(t).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = &Tree> {
        self.values.keys()
    }
}

/// `R*_ℓ τ = Σ_σ ℓ(σ)/S(σ) (τ ⋆ σ)`.
pub fn prep_map_adjoint(ell: &Character, tau: &Tree) -> TreeSum {
    let mut out = if ell.with_identity { TreeSum::single(tau.clone()) } else { TreeSum::zero() };
    for (sigma, v) in &ell.values {
        let w = v / int(sigma.symmetry_factor());
        out.add_scaled(&star_ext(tau, sigma), &w);
    }
    out
}

pub fn prep_map_adjoint_sum(ell: &Character, s: &TreeSum) -> TreeSum {
    s.map_linear(|t| prep_map_adjoint(ell, t))
}

/// Degree and noise-count constraint for the output of [`prep_map_adjoint`]:
/// every tree other than `τ` has degree at most `deg τ` and more noises.
pub fn check_analytical(tau: &Tree, out: &TreeSum) -> bool {
    let d = tau.reference_degree();
    out.trees().filter(|t| *t != tau).all(|t| t.reference_degree() <= d && t.noise_count() > tau.noise_count())
}

/// `∇^m_{τ2} τ1` with its two prefixed parts kept apart: `single` carries
/// the prefix `∂^m(a·)`, `cherry` the prefix `(∂^m·)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedCounterterm {
    pub m: u32,
    pub single: TreeSum,
    pub cherry: TreeSum,
}

/// The single-edge term grafts `τ1` onto `τ2` with `I_{(m,0)}`; the cherry
/// part is `½ Σ_{k+l=m} 1/(k! l!) I^{(k)}_x(τ1) I^{(l)}_x(τ2)`.
pub fn nabla(tau1: &Tree, tau2: &Tree, m: u32) -> GradedCounterterm {
    let single = graft(tau1, ParamIndex::new(m, 0, 0), tau2);
    let mut cherry = TreeSum::zero();
    for k in 0..=m {
        let l = m - k;
        let t = Tree {
            noise: Noise::One,
            deco: MultiIndex::ZERO,
            children: vec![
                Edge { index: ParamIndex::new(k, 0, 1), tree: tau1.clone() },
                Edge { index: ParamIndex::new(l, 0, 1), tree: tau2.clone() },
            ],
        };
        let w = BigRational::new(1.into(), (2 * crate::trees::factorial(k) * crate::trees::factorial(l)).into());
        cherry.add_term(t.canonicalize(), w);
    }
    GradedCounterterm { m, single, cherry }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::parse_tree;

    fn t(s: &str) -> Tree {
        parse_tree(s).unwrap()
    }

    fn sum(items: &[(&str, i64)]) -> TreeSum {
        items.iter().map(|(s, c)| (t(s), BigRational::from_integer((*c).into()))).collect()
    }

    #[test]
    fn uparrow_examples() {
        assert_eq!(uparrow(&t("Xi"), MultiIndex::X, &NodeSet::All), sum(&[("X^(0,1)Xi", 1)]));
        let s = uparrow(&t("Xi[I(Xi)]"), MultiIndex::X, &NodeSet::All);
        assert_eq!(s, sum(&[("X^(0,1)Xi[I(Xi)]", 1), ("Xi[I(X^(0,1)Xi)]", 1)]));
        assert_eq!(uparrow(&t("Xi[I(Xi)]"), MultiIndex::ZERO, &NodeSet::All), sum(&[("Xi[I(Xi)]", 1)]));
    }

    #[test]
    fn graft_examples() {
        assert_eq!(graft(&t("Xi"), ParamIndex::ZERO, &t("Xi")), sum(&[("Xi[I(Xi)]", 1)]));
        let s = graft(&t("Xi"), ParamIndex::ZERO, &t("Xi[I(Xi)]"));
        assert_eq!(s, sum(&[("Xi[I(Xi), I(Xi)]", 1), ("Xi[I(Xi[I(Xi)])]", 1)]));
        let s = graft(&t("Xi"), ParamIndex::X, &t("X^(0,1)"));
        assert_eq!(s, sum(&[("X^(0,1)[Ix(Xi)]", 1), ("One[I(Xi)]", 1)]));
    }

    #[test]
    fn graft_is_rightmost() {
        let s = graft(&t("Xi"), ParamIndex::C, &t("Xi[I(Xi)]"));
        assert!(s.trees().any(|x| *x == t("Xi[I(Xi), I{1}(Xi)]")));
    }

    #[test]
    fn star_examples() {
        assert_eq!(star(&t("One[I(Xi)]"), &t("Xi")).unwrap(), sum(&[("Xi[I(Xi)]", 1)]));
        assert_eq!(star(&t("One[I(Xi), I(Xi)]"), &t("Xi")).unwrap(), sum(&[("Xi[I(Xi), I(Xi)]", 1)]));
        assert_eq!(
            star(&t("X^(0,1)"), &t("Xi[I(Xi)]")).unwrap(),
            uparrow(&t("Xi[I(Xi)]"), MultiIndex::X, &NodeSet::All)
        );
        assert!(matches!(star(&t("Xi"), &t("Xi")), Err(Error::StarDomain(_))));
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(abstract_derivative(1, &t("One[I(Xi)]")), sum(&[("One[Ix(Xi)]", 1)]));
        assert_eq!(abstract_derivative(1, &t("One[I(Xi), I(Xi)]")), sum(&[("One[Ix(Xi), I(Xi)]", 2)]));
        assert!(abstract_derivative(1, &t("Xi")).is_zero());
        assert_eq!(abstract_derivative(0, &t("X^(2,0)")), sum(&[("X^(1,0)", 2)]));
    }

    #[test]
    fn projection() {
        assert_eq!(project_unparam(&t("Xi[I(Xi)]")), sum(&[("Xi[I(Xi)]", 1)]));
        assert!(project_unparam(&t("Xi[I{1}(Xi)]")).is_zero());
    }

    #[test]
    fn preparation_map() {
        let cherry = t("Xi[I(Xi)]");
        let ell = Character::new([(cherry.clone(), BigRational::from_integer(3.into()))]).unwrap();
        // both roots carry noise
        assert!(prep_map_adjoint(&ell, &t("Xi")).is_zero());
        let out = prep_map_adjoint(&ell, &t("One[I(Xi)]"));
        let expected = star(&t("One[I(Xi)]"), &cherry).unwrap().scale(&BigRational::from_integer(3.into()));
        assert_eq!(out, expected);
        assert!(check_analytical(&t("One[I(Xi)]"), &out));
        assert!(prep_map_adjoint(&Character::default(), &cherry).is_zero());
        assert!(Character::new([(t("One[I(Xi)]"), BigRational::one())]).is_err());
    }

    #[test]
    fn nabla_weights() {
        let xi = t("Xi");
        let n0 = nabla(&xi, &xi, 0);
        assert_eq!(n0.single, sum(&[("Xi[I(Xi)]", 1)]));
        assert_eq!(n0.cherry.coeff(&t("One[Ix(Xi), Ix(Xi)]")), BigRational::new(1.into(), 2.into()));
        let n1 = nabla(&xi, &xi, 1);
        assert_eq!(n1.single, sum(&[("Xi[I{1}(Xi)]", 1)]));
        assert_eq!(n1.cherry.len(), 2);
        assert!(n1.cherry.iter().all(|(_, c)| *c == BigRational::new(1.into(), 2.into())));
        let n2 = nabla(&t("Xi[I(Xi)]"), &xi, 2);
        let mut w: Vec<BigRational> = n2.cherry.iter().map(|(_, c)| c.clone()).collect();
        w.sort();
        let q = |a: i64, b: i64| BigRational::new(a.into(), b.into());
        assert_eq!(w, vec![q(1, 4), q(1, 4), q(1, 2)]);
    }
}
