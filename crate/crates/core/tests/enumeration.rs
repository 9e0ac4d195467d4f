use std::collections::BTreeSet;

use num_rational::BigRational;
use qgkpz::rules::{enumerate_negative, parametrise, parametrise_total, EnumConfig, RuleKind};
use qgkpz::trees::{parse_tree, MultiIndex, Noise, ParamIndex, Tree};

mod common;

use common::fixture;

/// Multisets of `k` elements from `items`, as index lists.
fn multisets(n_items: usize, k: usize, start: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for i in start..n_items {
        for mut rest in multisets(n_items, k - 1, i) {
            rest.insert(0, i);
            out.push(rest);
        }
    }
    out
}

/// Constructive generation: a node either carries the noise and any number
/// of thin edges, or carries no noise, exactly two thick edges and any number
/// of thin edges. Every subtree carries at least one noise.
fn build(noises: usize, memo: &mut Vec<Option<Vec<Tree>>>) -> Vec<Tree> {
    if let Some(v) = &memo[noises] {
        return v.clone();
    }
    let mut out = BTreeSet::new();
    let smaller: Vec<Tree> = (1..noises).flat_map(|m| build(m, memo)).collect();
    // (edge, tree) candidates for children
    let mut cands: Vec<(ParamIndex, Tree)> = Vec::new();
    for t in &smaller {
        cands.push((ParamIndex::ZERO, t.clone()));
        cands.push((ParamIndex::X, t.clone()));
    }
    for k in 0..=noises {
        for pick in multisets(cands.len(), k, 0) {
            let children: Vec<(ParamIndex, Tree)> = pick.iter().map(|&i| cands[i].clone()).collect();
            let below: usize = children.iter().map(|(_, t)| t.noise_count()).sum();
            let thick = children.iter().filter(|(e, _)| *e == ParamIndex::X).count();
            if below + 1 == noises && thick == 0 {
                out.insert(Tree::node(Noise::Xi, MultiIndex::ZERO, children.clone()).canonicalize());
            }
            if below == noises && thick == 2 {
                out.insert(Tree::node(Noise::One, MultiIndex::ZERO, children).canonicalize());
            }
        }
    }
    let v: Vec<Tree> = out.into_iter().collect();
    memo[noises] = Some(v.clone());
    v
}

fn oracle(noises: usize) -> BTreeSet<Tree> {
    let mut memo = vec![None; noises + 1];
    let noise_degree = BigRational::new((-3).into(), 2.into()) - BigRational::new(1.into(), 100.into());
    build(noises, &mut memo)
        .into_iter()
        .filter(|t| {
            let thick = count_thick(t) as i64;
            let deg = noise_degree.clone() * BigRational::from_integer((noises as i64).into())
                + BigRational::from_integer((2 * t.edge_count() as i64 - thick).into());
            deg < BigRational::from_integer(0.into())
        })
        .collect()
}

fn count_thick(t: &Tree) -> usize {
    t.children.iter().map(|e| usize::from(e.index.st == MultiIndex::X) + count_thick(&e.tree)).sum()
}

fn enumerate(noises: usize) -> BTreeSet<Tree> {
    enumerate_negative(RuleKind::Saturated, &EnumConfig::with_noises([noises])).unwrap()
}

#[test]
fn sector_sizes() {
    assert_eq!(enumerate(2).len(), 2);
    assert_eq!(enumerate(4).len(), 23);
}

#[test]
fn enumeration_matches_constructive_oracle() {
    for n in [2, 4] {
        assert_eq!(enumerate(n), oracle(n), "noises {n}");
    }
}

#[test]
fn enumeration_matches_fixture() {
    assert_eq!(enumerate(2), fixture("two noises"));
    assert_eq!(enumerate(4), fixture("four noises"));
}

#[test]
fn parametrisation_counts() {
    let two = enumerate(2);
    assert_eq!(parametrise_total(&two, 1).len(), 5);
    let thick: BTreeSet<Tree> = [parse_tree("One[Ix(Xi), Ix(Xi)]").unwrap()].into();
    assert_eq!(parametrise(&thick, 1).len(), 4);
}
