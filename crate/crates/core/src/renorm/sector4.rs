//! Combinations generated by nested covariant derivatives over noise leaves,
//! and their rank inside a sector.

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::calculus::{graft, nabla};
use crate::error::Result;
use crate::rules::{enumerate_negative, EnumConfig, RuleKind};
use crate::symexpr::{sym, Atom, FuncBase, SymExpr};
use crate::trees::{LinComb, ParamIndex, Tree};

type SymSum = LinComb<SymExpr>;

/// One generated combination `Σ p_τ(a) τ` restricted to the trees of the sector.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Generator {
    pub word: String,
    pub terms: Vec<(Tree, SymExpr)>,
    /// Number of generated terms that fall outside the sector.
    pub dropped: usize,
}

#[derive(Clone, Debug)]
pub struct Generated {
    pub all: Vec<Generator>,
    pub independent: Vec<Generator>,
    pub rank: usize,
    pub trees: usize,
}

fn lift(s: &crate::trees::TreeSum) -> SymSum {
    s.iter().map(|(t, c)| (t.clone(), SymExpr::constant(c.clone()))).collect()
}

/// `∇⁰_{τ2} τ1 = a (τ1 ⟶ τ2) + ½ I_x(τ1) I_x(τ2)`, linear in both arguments.
fn nabla0(w1: &SymSum, w2: &SymSum) -> SymSum {
    let a = sym("a");
    let mut out = SymSum::zero();
    for (t1, c1) in w1.iter() {
        for (t2, c2) in w2.iter() {
            let c = c1 * c2;
            let n = nabla(t1, t2, 0);
            out.add_scaled(&lift(&graft(t1, ParamIndex::ZERO, t2)), &(&c * &a));
            out.add_scaled(&lift(&n.cherry), &c);
        }
    }
    out
}

fn leaf() -> SymSum {
    SymSum::single(Tree::xi())
}

/// Left-nested words in both orientations, plus the product of two
/// two-leaf words when four leaves are used.
fn words(leaves: usize) -> Vec<(String, SymSum)> {
    let mut level: Vec<(String, SymSum)> = vec![("Xi".into(), leaf())];
    for _ in 1..leaves {
        let mut next = Vec::new();
        for (w, s) in &level {
            next.push((format!("N({w}, Xi)"), nabla0(s, &leaf())));
            if w != "Xi" {
                next.push((format!("N(Xi, {w})"), nabla0(&leaf(), s)));
            }
        }
        level = next;
    }
    if leaves == 4 {
        let pair = nabla0(&leaf(), &leaf());
        level.push(("N(N(Xi, Xi), N(Xi, Xi))".into(), nabla0(&pair, &pair)));
    }
    level
}

fn evaluate(e: &SymExpr, a: &BigRational) -> BigRational {
    let a = a.clone();
    e.substitute(&move |at| if *at == Atom::Func(FuncBase::A, 0) { Some(SymExpr::constant(a.clone())) } else { None })
        .as_constant()
        .expect("coefficients depend on a only")
}

fn rank(rows: &[Vec<BigRational>]) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows.to_vec();
    let cols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = &row[c] / &pivot_row[c];
                for (x, p) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                    *x -= &f * p;
                }
            }
        }
        r += 1;
    }
    r
}

/// Generic rank: the largest rank over a few rational sample values of `a`.
fn generic_rank(gens: &[Generator], trees: &[Tree]) -> usize {
    let samples = [BigRational::new(7.into(), 3.into()), BigRational::new(5.into(), 11.into()), BigRational::new((-13).into(), 17.into())];
    samples
        .iter()
        .map(|a| {
            let rows: Vec<Vec<BigRational>> = gens
                .iter()
                .map(|g| {
                    trees
                        .iter()
                        .map(|t| g.terms.iter().find(|(s, _)| s == t).map_or_else(BigRational::zero, |(_, e)| evaluate(e, a)))
                        .collect()
                })
                .collect();
            rank(&rows)
        })
        .max()
        .unwrap_or(0)
}

/// All words with `leaves` noise leaves restricted to the saturated negative
/// trees with that many noises.
pub fn generators(leaves: usize) -> Result<Generated> {
    let sector: BTreeSet<Tree> = enumerate_negative(RuleKind::Saturated, &EnumConfig::with_noises([leaves]))?;
    let trees: Vec<Tree> = sector.iter().cloned().collect();
    let mut all = Vec::new();
    for (word, s) in words(leaves) {
        let mut terms = Vec::new();
        let mut dropped = 0;
        for (t, c) in s.iter() {
            if sector.contains(t) {
                terms.push((t.clone(), c.clone()));
            } else {
                dropped += 1;
            }
        }
        if !terms.is_empty() {
            all.push(Generator { word, terms, dropped });
        }
    }
    let rank = generic_rank(&all, &trees);
    let mut independent: Vec<Generator> = Vec::new();
    for g in &all {
        let mut trial = independent.clone();
        trial.push(g.clone());
        if generic_rank(&trial, &trees) > independent.len() {
            independent = trial;
        }
    }
    debug_assert_eq!(independent.len(), rank);
    Ok(Generated { all, independent, rank, trees: trees.len() })
}
