//! Formal renormalisation constants, counterterm assembly and the
//! chain-rule constraints between constants.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::symexpr::{sym, SymExpr};
use crate::trees::{parse_tree, ParamIndex, Tree};
use crate::upsilon::Upsilon;

use super::sector4;

/// `C(τ)` for a parametrised tree `τ`: the constant of the underlying
/// unparametrised tree, differentiated in the parameter slot of every edge
/// that carries `h > 0`, then evaluated on the diagonal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct FormalConstant {
    pub tree: Tree,
}

fn strip_h(t: &Tree) -> Tree {
    let mut t = t.clone();
    for e in &mut t.children {
        e.index = ParamIndex { h: 0, ..e.index };
        e.tree = strip_h(&e.tree);
    }
    t
}

fn collect_h(t: &Tree, out: &mut Vec<u32>) {
    for e in &t.children {
        out.push(e.index.h);
        collect_h(&e.tree, out);
    }
}

impl FormalConstant {
    pub fn new(tree: Tree) -> Self {
        FormalConstant { tree }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(FormalConstant::new(parse_tree(text)?))
    }

    pub fn base_tree(&self) -> Tree {
        strip_h(&self.tree).canonicalize()
    }

    /// Parameter-derivative order of every integration edge, depth first.
    pub fn slot_derivatives(&self) -> Vec<u32> {
        let mut out = Vec::new();
        collect_h(&self.tree, &mut out);
        out
    }

    pub fn is_underived(&self) -> bool {
        self.tree.is_unparametrised()
    }
}

impl fmt::Display for FormalConstant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C({})", self.tree)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountertermTerm {
    pub constant: FormalConstant,
    pub coefficient: SymExpr,
    /// `1/S(τ)`
    #[serde(serialize_with = "ratio_as_string")]
    pub weight: BigRational,
}

fn ratio_as_string<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// `Σ C · coefficient · weight`
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CountertermExpr {
    pub terms: Vec<CountertermTerm>,
}

impl CountertermExpr {
    /// Combined coefficient of every constant, zeros dropped.
    pub fn collect(&self) -> BTreeMap<FormalConstant, SymExpr> {
        let mut out: BTreeMap<FormalConstant, SymExpr> = BTreeMap::new();
        for t in &self.terms {
            let c = t.coefficient.scale(&t.weight);
            let e = out.entry(t.constant.clone()).or_default();
            *e = &*e + &c;
        }
        out.retain(|_, e| !e.is_zero());
        out
    }

    pub fn is_zero(&self) -> bool {
        self.collect().is_empty()
    }

    fn from_collected(m: BTreeMap<FormalConstant, SymExpr>) -> Self {
        let one = BigRational::from_integer(1.into());
        let terms = m.into_iter().map(|(constant, coefficient)| CountertermTerm { constant, coefficient, weight: one.clone() }).collect();
        CountertermExpr { terms }
    }
}

impl fmt::Display for CountertermExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.collect();
        if m.is_empty() {
            return write!(f, "0");
        }
        for (i, (c, e)) in m.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}·({e})")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Mode {
    /// `Σ C(τ) Υ_F̂[τ] / (q S(τ))` over parametrised trees.
    FhatOverQ,
    /// `Σ C(τ) Υ_F[τ] / S(τ)` over unparametrised trees.
    FLocal,
}

pub fn assemble_counterterm(set: &BTreeSet<Tree>, mode: Mode, ups: &Upsilon) -> Result<CountertermExpr> {
    let mut terms = Vec::new();
    for t in set {
        let coefficient = match mode {
            Mode::FhatOverQ => ups.upsilon_fhat(t)? * SymExpr::q_inv_pow(1),
            Mode::FLocal => ups.upsilon_f(t)?,
        };
        let weight = BigRational::new(1.into(), t.symmetry_factor().into());
        terms.push(CountertermTerm { constant: FormalConstant::new(t.clone()), coefficient, weight });
    }
    Ok(CountertermExpr { terms })
}

/// `C(lhs) = Σ k · C(rhs)`
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Relation {
    pub lhs: FormalConstant,
    pub rhs: Vec<(FormalConstant, SymExpr)>,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} =", self.lhs)?;
        for (i, (c, k)) in self.rhs.iter().enumerate() {
            write!(f, "{} ({k})·{c}", if i > 0 { " +" } else { "" })?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstraintTable {
    pub sector: u32,
    pub relations: Vec<Relation>,
    /// Independent generating combinations of the sector.
    pub generators: Vec<sector4::Generator>,
    /// Rank of all generated combinations over rational functions of `a`.
    pub rank: usize,
    /// Number of trees of the sector.
    pub trees: usize,
}

fn fc(text: &str) -> FormalConstant {
    FormalConstant::parse(text).expect("fixed tree text")
}

/// The relations between constants imposed by the chain rule in one sector.
pub fn chain_rule_constraints(sector: u32) -> Result<ConstraintTable> {
    match sector {
        2 => {
            let thick = fc("One[Ix(Xi), Ix(Xi)]");
            let relations = vec![
                Relation { lhs: fc("Xi[I(Xi)]"), rhs: vec![(thick.clone(), sym("a"))] },
                Relation {
                    lhs: fc("Xi[I{1}(Xi)]"),
                    rhs: vec![(thick, SymExpr::one()), (fc("One[Ix{1}(Xi), Ix(Xi)]"), sym("2*a")), (fc("One[Ix(Xi), Ix{1}(Xi)]"), sym("2*a"))],
                },
            ];
            let gens = sector4::generators(2)?;
            Ok(ConstraintTable { sector, relations, rank: gens.rank, trees: gens.trees, generators: gens.independent })
        }
        4 => {
            let gens = sector4::generators(4)?;
            Ok(ConstraintTable { sector, relations: Vec::new(), rank: gens.rank, trees: gens.trees, generators: gens.independent })
        }
        _ => Err(Error::SectorUnsupported(sector)),
    }
}

/// Substitute the relations and keep only constants of unparametrised trees
/// with local coefficients.
pub fn reduce_to_local(ct: &CountertermExpr, table: &ConstraintTable) -> Result<CountertermExpr> {
    let mut m = ct.collect();
    for r in &table.relations {
        if let Some(e) = m.remove(&r.lhs) {
            for (c, k) in &r.rhs {
                let slot = m.entry(c.clone()).or_default();
                *slot = &*slot + &(&e * k);
            }
        }
    }
    m.retain(|_, e| !e.is_zero());
    for (c, e) in &m {
        if !c.is_underived() || !e.is_local() || e.has_grading() {
            return Err(Error::NonlocalResidue(format!("{c}·({e})")));
        }
    }
    Ok(CountertermExpr::from_collected(m))
}

/// `Σ_g λ_g Σ_τ p_{g,τ}(a) Υ_F[τ]` over the independent generators of the
/// table; `λ_g` is labelled by the first tree of the generator not already
/// used as a label.
pub fn local_from_generators(table: &ConstraintTable, ups: &Upsilon) -> Result<CountertermExpr> {
    let mut m = BTreeMap::new();
    for g in &table.generators {
        let Some((label, _)) = g.terms.iter().find(|(t, _)| !m.contains_key(&FormalConstant::new(t.clone()))) else {
            return Err(Error::Unsupported(format!("no free label for {}", g.word)));
        };
        let mut e = SymExpr::zero();
        for (t, p) in &g.terms {
            e = e + p * &ups.upsilon_f(t)?;
        }
        if !e.is_local() {
            return Err(Error::NonlocalResidue(format!("{}: {e}", g.word)));
        }
        m.insert(FormalConstant::new(label.clone()), e);
    }
    Ok(CountertermExpr::from_collected(m))
}
