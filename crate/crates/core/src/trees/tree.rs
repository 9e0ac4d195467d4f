use std::cmp::Ordering;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::index::{MultiIndex, ParamIndex};
use crate::error::{Error, Result};

pub type Degree = Ratio<i64>;

/// Noise type carried by a node: `One` is the constant 1, `Xi` the noise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Noise {
    One,
    Xi,
}

/// Child edge `I_α(τ)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub index: ParamIndex,
    pub tree: Tree,
}

/// Partially planar decorated tree `X^k Π I_{α_i}(τ_i) Ξ_l`.
///
/// The derived ordering is the structural one on `(noise, deco, children)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "TreeRepr", from = "TreeRepr")]
pub struct Tree {
    pub noise: Noise,
    pub deco: MultiIndex,
    pub children: Vec<Edge>,
}

/// Reference point for the degree used in canonical sorting.
pub fn reference_degree() -> (Degree, Degree) {
    (Ratio::new(-3, 2), Ratio::new(1, 100))
}

/// Sequences of child edges as (block, multiplicity) after grouping.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub k: MultiIndex,
    pub blocks: Vec<(ParamIndex, Tree, usize)>,
    pub noise: Noise,
}

impl Tree {
    /// The empty tree `1`.
    pub fn one() -> Tree {
        Tree { noise: Noise::One, deco: MultiIndex::ZERO, children: Vec::new() }
    }

    /// The noise `Ξ`.
    pub fn xi() -> Tree {
        Tree { noise: Noise::Xi, deco: MultiIndex::ZERO, children: Vec::new() }
    }

    /// The monomial `X^k`.
    pub fn monomial(k: MultiIndex) -> Tree {
        Tree { noise: Noise::One, deco: k, children: Vec::new() }
    }

    /// Raw constructor followed by canonicalization.
    pub fn node(noise: Noise, deco: MultiIndex, children: Vec<(ParamIndex, Tree)>) -> Tree {
        let children = children.into_iter().map(|(index, tree)| Edge { index, tree }).collect();
        Tree { noise, deco, children }.canonicalize()
    }

    /// `I_α(τ)`
    pub fn plant(index: ParamIndex, tree: Tree) -> Tree {
        Tree { noise: Noise::One, deco: MultiIndex::ZERO, children: vec![Edge { index, tree }] }
    }

    pub fn is_one(&self) -> bool {
        self.noise == Noise::One && self.deco.is_zero() && self.children.is_empty()
    }

    /// Sort every maximal run of consecutive `h = 0` children, recursively.
    pub fn canonicalize(mut self) -> Tree {
        for e in self.children.iter_mut() {
            let t = std::mem::replace(&mut e.tree, Tree::one());
            e.tree = t.canonicalize();
        }
        self.sort_root();
        self
    }

    /// Canonicalize the root only, assuming all subtrees are canonical.
    pub fn sort_root(&mut self) {
        let n = self.children.len();
        let mut i = 0;
        while i < n {
            if self.children[i].index.h != 0 {
                i += 1;
                continue;
            }
            let mut j = i;
            while j < n && self.children[j].index.h == 0 {
                j += 1;
            }
            self.children[i..j].sort_by(compare_planted);
            i = j;
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.clone().canonicalize() == *self
    }

    /// Planar tree product: roots identified, `self`'s edges first.
    pub fn product(&self, other: &Tree) -> Result<Tree> {
        let noise = match (self.noise, other.noise) {
            (Noise::Xi, Noise::Xi) => return Err(Error::IncompatibleNoise),
            (Noise::Xi, _) | (_, Noise::Xi) => Noise::Xi,
            _ => Noise::One,
        };
        let mut children = self.children.clone();
        children.extend(other.children.iter().cloned());
        let mut t = Tree { noise, deco: self.deco + other.deco, children };
        t.sort_root();
        Ok(t)
    }

    pub fn with_noise(&self, noise: Noise) -> Tree {
        Tree { noise, ..self.clone() }
    }

    pub fn noise_count(&self) -> usize {
        (self.noise == Noise::Xi) as usize + self.children.iter().map(|e| e.tree.noise_count()).sum::<usize>()
    }

    pub fn edge_count(&self) -> usize {
        self.children.len() + self.children.iter().map(|e| e.tree.edge_count()).sum::<usize>()
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(|e| e.tree.node_count()).sum::<usize>()
    }

    /// True when no edge carries a parameter derivative.
    pub fn is_unparametrised(&self) -> bool {
        self.children.iter().all(|e| e.index.h == 0 && e.tree.is_unparametrised())
    }

    pub fn has_zero_decorations(&self) -> bool {
        self.deco.is_zero() && self.children.iter().all(|e| e.tree.has_zero_decorations())
    }

    /// Sum of the parameter-derivative orders over all edges.
    pub fn total_h(&self) -> u32 {
        self.children.iter().map(|e| e.index.h + e.tree.total_h()).sum()
    }

    /// Degree with noise degree `alpha - kappa`.
    pub fn degree(&self, alpha: Degree, kappa: Degree) -> Degree {
        let mut d = Degree::from_integer(self.deco.weight() as i64);
        if self.noise == Noise::Xi {
            d += alpha - kappa;
        }
        for e in &self.children {
            d += Degree::from_integer(2 - e.index.st.weight() as i64) + e.tree.degree(alpha, kappa);
        }
        d
    }

    pub fn reference_degree(&self) -> Degree {
        let (a, k) = reference_degree();
        self.degree(a, k)
    }

    /// Paths of all nodes in pre-order; the root is the empty path.
    pub fn node_paths(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.collect_paths(&mut path, &mut out);
        out
    }

    fn collect_paths(&self, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(path.clone());
        for (i, e) in self.children.iter().enumerate() {
            path.push(i);
            e.tree.collect_paths(path, out);
            path.pop();
        }
    }

    pub fn at(&self, path: &[usize]) -> &Tree {
        path.iter().fold(self, |t, &i| &t.children[i].tree)
    }

    pub fn at_mut(&mut self, path: &[usize]) -> &mut Tree {
        path.iter().fold(self, |t, &i| &mut t.children[i].tree)
    }

    /// Group consecutive identical children into blocks.
    pub fn decompose(&self) -> Decomposition {
        let mut blocks: Vec<(ParamIndex, Tree, usize)> = Vec::new();
        for e in &self.children {
            match blocks.last_mut() {
                Some((idx, t, m)) if *idx == e.index && *t == e.tree => *m += 1,
                _ => blocks.push((e.index, e.tree.clone(), 1)),
            }
        }
        Decomposition { k: self.deco, blocks, noise: self.noise }
    }

    /// `S(τ) = k! Π_j S(τ_j)^{β_j} β_j!`
    pub fn symmetry_factor(&self) -> u64 {
        let d = self.decompose();
        let mut s = d.k.factorial();
        for (_, t, m) in &d.blocks {
            let st = t.symmetry_factor();
            s *= st.pow(*m as u32) * super::index::factorial(*m as u32);
        }
        s
    }

    /// Children of the root as a tree without noise or decoration.
    pub fn root_edges(&self) -> Tree {
        Tree { noise: Noise::One, deco: MultiIndex::ZERO, children: self.children.clone() }
    }
}

impl Decomposition {
    pub fn reassemble(&self) -> Tree {
        let mut children = Vec::new();
        for (idx, t, m) in &self.blocks {
            for _ in 0..*m {
                children.push(Edge { index: *idx, tree: t.clone() });
            }
        }
        Tree { noise: self.noise, deco: self.k, children }
    }
}

/// Total order on planted trees used inside commuting runs.
pub fn compare_planted(a: &Edge, b: &Edge) -> Ordering {
    let da = planted_degree(a);
    let db = planted_degree(b);
    da.cmp(&db).then_with(|| a.cmp(b))
}

fn planted_degree(e: &Edge) -> Degree {
    Degree::from_integer(2 - e.index.st.weight() as i64) + e.tree.reference_degree()
}

/// `⟨σ, τ⟩ = S(τ) δ_{σ,τ}`
pub fn inner_product(sigma: &Tree, tau: &Tree) -> u64 {
    if sigma == tau {
        tau.symmetry_factor()
    } else {
        0
    }
}

#[derive(Serialize, Deserialize)]
struct TreeRepr {
    noise: Noise,
    #[serde(rename = "nodeDecoration")]
    node_decoration: [u32; 2],
    children: Vec<EdgeRepr>,
}

#[derive(Serialize, Deserialize)]
struct EdgeRepr {
    h: u32,
    st: [u32; 2],
    tree: TreeRepr,
}

impl From<Tree> for TreeRepr {
    fn from(t: Tree) -> Self {
        TreeRepr {
            noise: t.noise,
            node_decoration: [t.deco.t, t.deco.x],
            children: t
                .children
                .into_iter()
                .map(|e| EdgeRepr { h: e.index.h, st: [e.index.st.t, e.index.st.x], tree: e.tree.into() })
                .collect(),
        }
    }
}

impl From<TreeRepr> for Tree {
    fn from(r: TreeRepr) -> Self {
        Tree {
            noise: r.noise,
            deco: MultiIndex::new(r.node_decoration[0], r.node_decoration[1]),
            children: r
                .children
                .into_iter()
                .map(|e| Edge { index: ParamIndex::new(e.h, e.st[0], e.st[1]), tree: e.tree.into() })
                .collect(),
        }
        .canonicalize()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn i(t: Tree) -> Tree {
        Tree::plant(ParamIndex::ZERO, t)
    }
    fn ix(t: Tree) -> Tree {
        Tree::plant(ParamIndex::X, t)
    }
    fn ic(t: Tree) -> Tree {
        Tree::plant(ParamIndex::C, t)
    }

    #[test]
    fn h_zero_edges_commute() {
        let a = ix(Tree::xi()).product(&i(Tree::xi())).unwrap();
        let b = i(Tree::xi()).product(&ix(Tree::xi())).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn parametrised_edges_do_not_commute() {
        let a = i(Tree::xi()).product(&ic(Tree::xi())).unwrap();
        let b = ic(Tree::xi()).product(&i(Tree::xi())).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn product_rules() {
        let cherry = Tree::xi().product(&i(Tree::xi())).unwrap();
        assert_eq!(cherry.noise, Noise::Xi);
        assert_eq!(cherry.children.len(), 1);
        assert_eq!(cherry.product(&Tree::one()).unwrap(), cherry);
        assert_eq!(Tree::xi().product(&Tree::xi()), Err(Error::IncompatibleNoise));
    }

    #[test]
    fn symmetry_factors() {
        let cherry = Tree::xi().product(&i(Tree::xi())).unwrap();
        assert_eq!(cherry.symmetry_factor(), 1);
        let thick = ix(Tree::xi()).product(&ix(Tree::xi())).unwrap();
        assert_eq!(thick.symmetry_factor(), 2);
        assert_eq!(Tree::monomial(MultiIndex::new(2, 1)).symmetry_factor(), 2);
        assert_eq!(Tree::xi().symmetry_factor(), 1);
    }

    #[test]
    fn decompose_groups_commuting_identical_children() {
        let thick = ix(Tree::xi()).product(&ix(Tree::xi())).unwrap();
        let d = thick.decompose();
        assert_eq!(d.blocks, vec![(ParamIndex::X, Tree::xi(), 2)]);
        assert_eq!(d.noise, Noise::One);
        let split = Tree::node(
            Noise::One,
            MultiIndex::ZERO,
            vec![(ParamIndex::ZERO, Tree::xi()), (ParamIndex::C, Tree::xi()), (ParamIndex::ZERO, Tree::xi())],
        );
        let d = split.decompose();
        assert_eq!(d.blocks.len(), 3);
        assert!(d.blocks.iter().all(|b| b.2 == 1));
        assert_eq!(d.reassemble(), split);
    }

    #[test]
    fn degrees() {
        let (a, k) = reference_degree();
        assert_eq!(Tree::xi().degree(a, k), a - k);
        let cherry = Tree::xi().product(&i(Tree::xi())).unwrap();
        assert_eq!(cherry.degree(a, k), Degree::from_integer(-1) - k * 2);
        let thick = ix(Tree::xi()).product(&ix(Tree::xi())).unwrap();
        assert_eq!(thick.degree(a, k), Degree::from_integer(-1) - k * 2);
        assert_eq!(ic(Tree::xi()).degree(a, k), i(Tree::xi()).degree(a, k));
    }

    #[test]
    fn inner_products() {
        let k = MultiIndex::new(1, 2);
        assert_eq!(inner_product(&Tree::monomial(k), &Tree::monomial(k)), 2);
        assert_eq!(inner_product(&Tree::xi(), &i(Tree::xi())), 0);
        let t1 = Tree::xi().product(&i(Tree::xi())).unwrap();
        assert_eq!(inner_product(&i(t1.clone()), &i(t1.clone())), inner_product(&t1, &t1));
    }

    #[test]
    fn json_round_trip() {
        let t = Tree::xi().product(&ic(ix(Tree::xi()).product(&ix(Tree::xi())).unwrap())).unwrap();
        let s = serde_json::to_string(&t).unwrap();
        let back: Tree = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
        assert!(s.contains("nodeDecoration"));
    }
}
