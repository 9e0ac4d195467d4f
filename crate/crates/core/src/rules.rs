//! Admissible node types and the enumeration of negative-degree trees.
//!
//! Thin edges are `I` (space-time index 0), thick edges are `I_x`. A node
//! with noise only has thin children; a node without noise has at most two
//! thick children (`Full`) or exactly two (`Saturated`, which also forbids
//! node decorations).

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::trees::{Degree, MultiIndex, Noise, ParamIndex, Tree};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleKind {
    Full,
    Saturated,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnumConfig {
    pub alpha: Degree,
    pub kappa: Degree,
    pub noise_counts: BTreeSet<usize>,
    pub max_param: u32,
}

impl Default for EnumConfig {
    fn default() -> Self {
        EnumConfig {
            alpha: Degree::new(-3, 2),
            kappa: Degree::new(1, 100),
            noise_counts: [2, 4].into_iter().collect(),
            max_param: 4,
        }
    }
}

impl EnumConfig {
    pub fn with_noises(noises: impl IntoIterator<Item = usize>) -> Self {
        EnumConfig { noise_counts: noises.into_iter().collect(), ..Default::default() }
    }

    pub fn noise_degree(&self) -> Degree {
        self.alpha - self.kappa
    }

    pub fn validate(&self) -> Result<()> {
        if self.kappa <= Degree::from_integer(0) {
            return Err(Error::Config(format!("kappa must be positive, got {}", self.kappa)));
        }
        if self.noise_degree() <= Degree::from_integer(-2) {
            return Err(Error::NotSubcritical(self.noise_degree().to_string()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum EdgeKind {
    Thin,
    Thick,
}

fn edge_kind(idx: &ParamIndex) -> Option<EdgeKind> {
    if idx.st.is_zero() {
        Some(EdgeKind::Thin)
    } else if idx.st == MultiIndex::X {
        Some(EdgeKind::Thick)
    } else {
        None
    }
}

/// Every node matches an admissible signature.
pub fn conforms(tree: &Tree, kind: RuleKind) -> bool {
    if kind == RuleKind::Saturated && !tree.deco.is_zero() {
        return false;
    }
    let mut thick = 0;
    for e in &tree.children {
        match edge_kind(&e.index) {
            Some(EdgeKind::Thick) => thick += 1,
            Some(EdgeKind::Thin) => {}
            None => return false,
        }
    }
    let node_ok = match (tree.noise, kind) {
        (Noise::Xi, _) => thick == 0,
        (Noise::One, RuleKind::Saturated) => thick == 2,
        (Noise::One, RuleKind::Full) => thick <= 2,
    };
    node_ok && tree.children.iter().all(|e| conforms(&e.tree, kind))
}

pub fn is_negative(tree: &Tree, cfg: &EnumConfig) -> bool {
    tree.degree(cfg.alpha, cfg.kappa) < Degree::from_integer(0)
}

/// Degree-bounded recursive generator for one target noise count.
struct Generator<'a> {
    kind: RuleKind,
    cfg: &'a EnumConfig,
    total: usize,
    memo: BTreeMap<usize, Vec<Tree>>,
}

impl<'a> Generator<'a> {
    /// A subtree with `n` of the `total` noises can only sit in a negative
    /// tree if its degree is below `(total - n) * |noise degree|`, since every
    /// edge has non-negative degree.
    fn bound(&self, n: usize) -> Degree {
        -self.cfg.noise_degree() * Degree::from_integer((self.total - n) as i64)
    }

    fn trees(&mut self, n: usize) -> Vec<Tree> {
        if let Some(v) = self.memo.get(&n) {
            return v.clone();
        }
        let bound = self.bound(n);
        let mut found: BTreeSet<Tree> = BTreeSet::new();
        let mut planted: Vec<(usize, Tree)> = Vec::new();
        for m in 1..n {
            for t in self.trees(m) {
                for idx in [ParamIndex::ZERO, ParamIndex::X] {
                    planted.push((m, Tree::plant(idx, t.clone())));
                }
            }
        }
        // noise at the node, thin children carrying n - 1 noises
        let thin: Vec<(usize, Tree)> =
            planted.iter().filter(|(_, p)| p.children[0].index == ParamIndex::ZERO).cloned().collect();
        for kids in multisets(&thin, n - 1, usize::MAX) {
            let t = assemble(Noise::Xi, &kids);
            if t.degree(self.cfg.alpha, self.cfg.kappa) < bound {
                found.insert(t);
            }
        }
        // no noise at the node
        let thick_range: Vec<usize> = match self.kind {
            RuleKind::Saturated => vec![2],
            RuleKind::Full => vec![0, 1, 2],
        };
        for kids in multisets(&planted, n, usize::MAX) {
            let thick = kids.iter().filter(|p| p.children[0].index == ParamIndex::X).count();
            if !thick_range.contains(&thick) || kids.is_empty() {
                continue;
            }
            let t = assemble(Noise::One, &kids);
            if t.degree(self.cfg.alpha, self.cfg.kappa) < bound {
                found.insert(t);
            }
        }
        // a single child carrying all n noises (only admissible for Full)
        if self.kind == RuleKind::Full {
            let mut frontier: Vec<Tree> = found.iter().cloned().collect();
            while let Some(t) = frontier.pop() {
                for idx in [ParamIndex::ZERO, ParamIndex::X] {
                    let p = Tree::plant(idx, t.clone());
                    if p.degree(self.cfg.alpha, self.cfg.kappa) < bound && found.insert(p.clone()) {
                        frontier.push(p);
                    }
                }
            }
        }
        let v: Vec<Tree> = found.into_iter().collect();
        self.memo.insert(n, v.clone());
        v
    }
}

fn assemble(noise: Noise, planted: &[Tree]) -> Tree {
    let mut t = Tree { noise, deco: MultiIndex::ZERO, children: Vec::new() };
    for p in planted {
        t.children.extend(p.children.iter().cloned());
    }
    t.canonicalize()
}

/// Multisets from `items` (with repetition) whose noise counts sum to `target`.
fn multisets(items: &[(usize, Tree)], target: usize, max_len: usize) -> Vec<Vec<Tree>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(items: &[(usize, Tree)], start: usize, left: usize, max_len: usize, cur: &mut Vec<Tree>, out: &mut Vec<Vec<Tree>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        if cur.len() >= max_len {
            return;
        }
        for i in start..items.len() {
            let (m, t) = &items[i];
            if *m <= left {
                cur.push(t.clone());
                rec(items, i, left - m, max_len, cur, out);
                cur.pop();
            }
        }
    }
    rec(items, 0, target, max_len, &mut cur, &mut out);
    out
}

/// All conformal trees with the configured noise counts, zero node
/// decorations and negative degree.
pub fn enumerate_negative(kind: RuleKind, cfg: &EnumConfig) -> Result<BTreeSet<Tree>> {
    cfg.validate()?;
    let mut out = BTreeSet::new();
    for &n in &cfg.noise_counts {
        if n == 0 {
            continue;
        }
        let mut g = Generator { kind, cfg, total: n, memo: BTreeMap::new() };
        for t in g.trees(n) {
            debug_assert!(conforms(&t, kind));
            if is_negative(&t, cfg) {
                out.insert(t);
            }
        }
    }
    Ok(out)
}

/// Every assignment of parameter-derivative orders `0..=max` to the edges.
pub fn parametrise(set: &BTreeSet<Tree>, max: u32) -> BTreeSet<Tree> {
    set.iter().flat_map(|t| variants(t, max, None)).map(|(t, _)| t.canonicalize()).collect()
}

/// Like [`parametrise`], but bounding the total order over all edges.
pub fn parametrise_total(set: &BTreeSet<Tree>, max_total: u32) -> BTreeSet<Tree> {
    set.iter()
        .flat_map(|t| variants(t, max_total, Some(max_total)))
        .map(|(t, _)| t.canonicalize())
        .collect()
}

/// Raw variants with their total order.
fn variants(t: &Tree, per_edge: u32, total: Option<u32>) -> Vec<(Tree, u32)> {
    let mut acc: Vec<(Tree, u32)> = vec![(Tree { noise: t.noise, deco: t.deco, children: Vec::new() }, 0)];
    for e in &t.children {
        let subs = variants(&e.tree, per_edge, total);
        let mut next = Vec::new();
        for (partial, used) in &acc {
            for (sub, sub_used) in &subs {
                for h in 0..=per_edge {
                    let u = used + sub_used + h;
                    if total.is_some_and(|m| u > m) {
                        continue;
                    }
                    let mut p = partial.clone();
                    p.children.push(crate::trees::Edge { index: ParamIndex { h, st: e.index.st }, tree: sub.clone() });
                    next.push((p, u));
                }
            }
        }
        acc = next;
    }
    acc
}
