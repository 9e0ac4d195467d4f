//! One function per subcommand. Each returns the JSON results, a human
//! summary and whether every checked identity held.

use std::fmt::Write;

use qgkpz::calculus::{graft, nabla, star};
use qgkpz::coherence::{check_coherence, expand_system, Truncation};
use qgkpz::renorm::{
    assemble_counterterm, chain_rule_constraints, check_locality, check_null, ito_constant, local_from_generators, reduce_to_local, CountertermExpr, Mode,
    Mollifier, NullKind,
};
use qgkpz::rules::{enumerate_negative, parametrise_total, RuleKind};
use qgkpz::symexpr::{parse_expr, SymExpr};
use qgkpz::trees::{parse_tree, ParamIndex, Tree, TreeSum};
use qgkpz::upsilon::{Nonlinearity, Upsilon};
use qgkpz::{Error, Result};
use serde_json::{json, Value};

use crate::config::Config;

pub struct Outcome {
    pub results: Value,
    pub text: String,
    pub verified: bool,
}

impl Outcome {
    fn ok(results: Value, text: String) -> Self {
        Outcome { results, text, verified: true }
    }
}

pub fn tree_json(t: &Tree) -> Value {
    json!({ "tree": t.to_string(), "structure": t })
}

fn sum_json(s: &TreeSum) -> Value {
    Value::Array(s.iter().map(|(t, c)| json!({ "tree": t.to_string(), "coefficient": c.to_string() })).collect())
}

fn expr_json(e: &SymExpr) -> Value {
    serde_json::to_value(e).expect("expressions serialise")
}

/// `0` or a suffix of `c`s, then `t`s, then `x`s, e.g. `cx`.
pub fn parse_index(s: &str) -> Result<ParamIndex> {
    if s == "0" {
        return Ok(ParamIndex::ZERO);
    }
    let (mut h, mut t, mut x) = (0, 0, 0);
    let mut stage = 0;
    for ch in s.chars() {
        let next = match ch {
            'c' => 0,
            't' => 1,
            'x' => 2,
            _ => stage + 3,
        };
        if next < stage || next > 2 {
            return Err(Error::Config(format!("invalid index {s:?}: expected 0 or c*t*x*")));
        }
        stage = next;
        match ch {
            'c' => h += 1,
            't' => t += 1,
            _ => x += 1,
        }
    }
    if s.is_empty() {
        return Err(Error::Config("empty index".into()));
    }
    Ok(ParamIndex::new(h, t, x))
}

pub fn parse_null_kind(s: &str) -> Result<NullKind> {
    let bad = || Error::Config(format!("invalid kind {s:?}: expected single:<k> or cherry:<k>,<l>"));
    let (name, args) = s.split_once(':').ok_or_else(bad)?;
    let nums: Vec<u32> = args.split(',').map(|n| n.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?;
    match (name, nums.as_slice()) {
        ("single", [k]) => Ok(NullKind::Single(*k)),
        ("cherry", [k, l]) => Ok(NullKind::Cherry(*k, *l)),
        _ => Err(bad()),
    }
}

fn upsilon(full: bool) -> Upsilon {
    if full {
        Upsilon::new(Nonlinearity::full())
    } else {
        Upsilon::default()
    }
}

pub fn enumerate(cfg: &Config, noises: &[usize], full_rule: bool) -> Result<Outcome> {
    let ecfg = cfg.enum_config(noises.iter().copied())?;
    let kind = if full_rule { RuleKind::Full } else { RuleKind::Saturated };
    let set = enumerate_negative(kind, &ecfg)?;
    let mut text = String::new();
    let mut records = Vec::new();
    for t in &set {
        let degree = t.degree(cfg.alpha, cfg.kappa);
        let _ = writeln!(text, "{t}\tdegree {degree}\tS = {}", t.symmetry_factor());
        let mut r = tree_json(t);
        r["noises"] = json!(t.noise_count());
        r["degree"] = json!(degree.to_string());
        r["symmetryFactor"] = json!(t.symmetry_factor());
        records.push(r);
    }
    let _ = writeln!(text, "{} trees", set.len());
    Ok(Outcome::ok(Value::Array(records), text))
}

pub fn upsilon_cmd(nonlinearity: &str, tree: &str, full: bool) -> Result<Outcome> {
    let tau = parse_tree(tree)?.canonicalize();
    let ups = upsilon(full);
    let value = match nonlinearity {
        "F" => ups.upsilon_f(&tau)?,
        "Fhat" => ups.upsilon_fhat(&tau)?,
        other => match other.strip_prefix("V:") {
            Some(a) => ups.upsilon_v(parse_index(a)?, &tau)?,
            None => return Err(Error::Config(format!("unknown nonlinearity {other:?}: expected F, Fhat or V:<index>"))),
        },
    };
    let s = tau.symmetry_factor();
    let text = format!("{value}\nS = {s}\n");
    Ok(Outcome::ok(json!({ "tree": tree_json(&tau), "nonlinearity": nonlinearity, "value": expr_json(&value), "symmetryFactor": s }), text))
}

pub fn coherence(max_noises: usize) -> Result<Outcome> {
    let sys = expand_system(Truncation::new(max_noises))?;
    let report = check_coherence(&sys, &Upsilon::default())?;
    let failures: Vec<_> = report.failures().collect();
    let mut text = format!("{} coefficients up to {max_noises} noises, {} mismatches\n", report.entries.len(), failures.len());
    for e in &failures {
        let _ = writeln!(text, "  {} {}: got {} expected {}", e.series, e.tree, e.coefficient, e.expected);
    }
    let verified = report.passed();
    let results = json!({ "maxNoises": max_noises, "passed": verified, "mismatches": failures.len(), "entries": report.entries });
    Ok(Outcome { results, text, verified })
}

pub fn locality(tau1: &str, tau2: &str) -> Result<Outcome> {
    let (t1, t2) = (parse_tree(tau1)?.canonicalize(), parse_tree(tau2)?.canonicalize());
    let r = check_locality(&t1, &t2, &Upsilon::default())?;
    let mut text = format!("expected q·Υ_F[𝒫∇] = {}\n", r.expected);
    for s in &r.slots {
        let _ = writeln!(text, "slot {}: graded part {}, free part {} [{}]", s.slot, s.graded, s.free, if s.pass { "ok" } else { "mismatch" });
    }
    Ok(Outcome { results: serde_json::to_value(&r).expect("report serialises"), text, verified: r.pass })
}

pub fn null(tau1: &str, tau2: &str, kind: &str) -> Result<Outcome> {
    let (t1, t2) = (parse_tree(tau1)?.canonicalize(), parse_tree(tau2)?.canonicalize());
    let kind = parse_null_kind(kind)?;
    let r = check_null(&t1, &t2, kind, &Upsilon::default())?;
    let text = format!("Υ_F̂ part {}, local part {}, covered {}\n", r.hat, r.local, r.in_claim);
    Ok(Outcome { results: serde_json::to_value(&r).expect("report serialises"), text, verified: r.pass })
}

fn counterterm_json(ct: &CountertermExpr) -> Value {
    Value::Array(
        ct.collect()
            .into_iter()
            .map(|(c, e)| json!({ "constant": c.to_string(), "tree": tree_json(&c.tree), "coefficient": expr_json(&e) }))
            .collect(),
    )
}

pub fn counterterm(cfg: &Config, sector: u32, mode: &str) -> Result<Outcome> {
    let ups = Upsilon::default();
    let table = chain_rule_constraints(sector)?;
    let set = enumerate_negative(RuleKind::Saturated, &cfg.enum_config([sector as usize])?)?;
    let ct = match mode {
        "raw" => assemble_counterterm(&parametrise_total(&set, 1), Mode::FhatOverQ, &ups)?,
        "local" if sector == 2 => reduce_to_local(&assemble_counterterm(&parametrise_total(&set, 1), Mode::FhatOverQ, &ups)?, &table)?,
        "local" => local_from_generators(&table, &ups)?,
        other => return Err(Error::Config(format!("unknown mode {other:?}: expected raw or local"))),
    };
    let mut text = String::new();
    for (c, e) in ct.collect() {
        let _ = writeln!(text, "{c} · ({e})");
    }
    let _ = writeln!(text, "sector {sector}: {} trees, generator rank {}", table.trees, table.rank);
    let relations: Vec<String> = table.relations.iter().map(|r| r.to_string()).collect();
    let words: Vec<&str> = table.generators.iter().map(|g| g.word.as_str()).collect();
    let results = json!({
        "sector": sector,
        "mode": mode,
        "trees": table.trees,
        "rank": table.rank,
        "relations": relations,
        "generators": words,
        "terms": counterterm_json(&ct),
    });
    Ok(Outcome::ok(results, text))
}

pub fn ito(eps: f64, mollifier: &str) -> Result<Outcome> {
    let rho = Mollifier::from_spec(mollifier)?;
    let c = ito_constant(&rho, eps)?;
    let c1 = ito_constant(&rho, 1.0)?;
    let text = format!("C_eps = {c:.15e}\neps·C_eps = {:.15e}\nC_1 = {c1:.15e}\n", eps * c);
    Ok(Outcome::ok(json!({ "eps": eps, "mollifier": mollifier, "value": c, "scaled": eps * c, "unitScale": c1 }), text))
}

pub fn parse(cfg: &Config, tree: Option<&str>, expr: Option<&str>) -> Result<Outcome> {
    match (tree, expr) {
        (Some(t), None) => {
            let tau = parse_tree(t)?;
            let canonical = tau.clone().canonicalize();
            let degree = canonical.degree(cfg.alpha, cfg.kappa);
            let text = format!("{canonical}\ndegree {degree}\nS = {}\n", canonical.symmetry_factor());
            let mut r = tree_json(&canonical);
            r["degree"] = json!(degree.to_string());
            r["symmetryFactor"] = json!(canonical.symmetry_factor());
            Ok(Outcome::ok(r, text))
        }
        (None, Some(e)) => {
            let e = parse_expr(e)?;
            Ok(Outcome::ok(expr_json(&e), format!("{e}\n")))
        }
        _ => Err(Error::Config("give exactly one of --tree or --expr".into())),
    }
}

pub fn graft_cmd(sigma: &str, index: &str, tau: &str) -> Result<Outcome> {
    let s = graft(&parse_tree(sigma)?.canonicalize(), parse_index(index)?, &parse_tree(tau)?.canonicalize());
    Ok(Outcome::ok(sum_json(&s), format!("{s}\n")))
}

pub fn star_cmd(sigma: &str, tau: &str) -> Result<Outcome> {
    let s = star(&parse_tree(sigma)?.canonicalize(), &parse_tree(tau)?.canonicalize())?;
    Ok(Outcome::ok(sum_json(&s), format!("{s}\n")))
}

pub fn nabla_cmd(tau1: &str, tau2: &str, m: u32) -> Result<Outcome> {
    let g = nabla(&parse_tree(tau1)?.canonicalize(), &parse_tree(tau2)?.canonicalize(), m);
    let text = format!("single: {}\ncherry: {}\n", g.single, g.cherry);
    Ok(Outcome::ok(json!({ "m": m, "single": sum_json(&g.single), "cherry": sum_json(&g.cherry) }), text))
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_suffixes() {
        assert_eq!(parse_index("0").unwrap(), ParamIndex::ZERO);
        assert_eq!(parse_index("cx").unwrap(), ParamIndex::CX);
        assert_eq!(parse_index("cc").unwrap(), ParamIndex::CC);
        assert_eq!(parse_index("ctx").unwrap(), ParamIndex::new(1, 1, 1));
        assert!(parse_index("xc").is_err());
        assert!(parse_index("y").is_err());
        assert!(parse_index("").is_err());
    }

    #[test]
    fn null_kinds() {
        assert_eq!(parse_null_kind("single:2").unwrap(), NullKind::Single(2));
        assert_eq!(parse_null_kind("cherry:1, 1").unwrap(), NullKind::Cherry(1, 1));
        assert!(parse_null_kind("cherry:1").is_err());
        assert!(parse_null_kind("double:1").is_err());
    }
}
