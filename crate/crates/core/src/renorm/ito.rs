//! `C_ε = ‖ρ_ε‖²_{L²}` for a mollifier `ρ`, with `ρ_ε(x) = ρ(x/ε)/ε`.

use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use quadrature::double_exponential;

use crate::error::{Error, Result};

pub const TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum Mollifier {
    /// `(15/16)(1 - x²)²` on `[-1, 1]`
    Poly,
    /// `exp(-1/(1 - x²))` on `(-1, 1)`, normalised to unit mass
    Bump { norm: f64 },
    /// Piecewise linear through tabulated `(x, ρ(x))` points
    Table { xs: Vec<f64>, ys: Vec<f64> },
}

fn bump_raw(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - x * x)).exp()
    }
}

fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64) -> Result<f64> {
    let out = double_exponential::integrate(f, a, b, TOLERANCE);
    if out.error_estimate > TOLERANCE {
        return Err(Error::QuadratureFailure { tolerance: TOLERANCE, estimate: out.error_estimate });
    }
    Ok(out.integral)
}

impl Mollifier {
    pub fn poly() -> Self {
        Mollifier::Poly
    }

    pub fn bump() -> Result<Self> {
        Ok(Mollifier::Bump { norm: integrate(bump_raw, -1.0, 1.0)? })
    }

    /// Whitespace-separated `x ρ(x)` pairs, one per line; `#` starts a comment.
    pub fn from_table(text: &str) -> Result<Self> {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let nums: Vec<f64> = line
                .split_whitespace()
                .map(|s| s.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Config(format!("line {}: {e}", n + 1)))?;
            if nums.len() != 2 {
                return Err(Error::Config(format!("line {}: expected two numbers", n + 1)));
            }
            xs.push(nums[0]);
            ys.push(nums[1]);
        }
        if xs.len() < 2 || xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("mollifier table needs at least two strictly increasing abscissae".into()));
        }
        let m = Mollifier::Table { xs, ys };
        let mass = m.mass()?;
        if (mass - 1.0).abs() > 1e-6 {
            return Err(Error::Config(format!("mollifier table has mass {mass}, expected 1")));
        }
        Ok(m)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Mollifier::from_table(&text)
    }

    /// `poly`, `bump` or `file:<path>`.
    pub fn from_spec(spec: &str) -> Result<Self> {
        match spec {
            "poly" => Ok(Mollifier::poly()),
            "bump" => Mollifier::bump(),
            _ => match spec.strip_prefix("file:") {
                Some(p) => Mollifier::from_file(Path::new(p)),
                None => Err(Error::Config(format!("unknown mollifier {spec:?}"))),
            },
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Mollifier::Poly => {
                if x.abs() >= 1.0 {
                    0.0
                } else {
                    let s = 1.0 - x * x;
                    15.0 / 16.0 * s * s
                }
            }
            Mollifier::Bump { norm } => bump_raw(x) / norm,
            Mollifier::Table { xs, ys } => {
                if x <= xs[0] || x >= xs[xs.len() - 1] {
                    return 0.0;
                }
                let i = xs.partition_point(|&p| p <= x) - 1;
                let t = (x - xs[i]) / (xs[i + 1] - xs[i]);
                ys[i] + t * (ys[i + 1] - ys[i])
            }
        }
    }

    /// Points between which `ρ` is smooth.
    fn breakpoints(&self) -> Vec<f64> {
        match self {
            Mollifier::Table { xs, .. } => xs.clone(),
            _ => vec![-1.0, 1.0],
        }
    }

    fn integrate_scaled(&self, f: impl Fn(f64) -> f64, eps: f64) -> Result<f64> {
        let pts = self.breakpoints();
        let mut total = 0.0;
        for w in pts.windows(2) {
            total += integrate(&f, w[0] * eps, w[1] * eps)?;
        }
        Ok(total)
    }

    pub fn mass(&self) -> Result<f64> {
        self.integrate_scaled(|x| self.eval(x), 1.0)
    }
}

/// `∫ ρ_ε(x)² dx`
pub fn ito_constant(rho: &Mollifier, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Config(format!("scale must be positive, got {eps}")));
    }
    rho.integrate_scaled(
        |x| {
            let r = rho.eval(x / eps) / eps;
            r * r
        },
        eps,
    )
}

/// `∫_{-1}^{1} (15/16)² (1 - x²)⁴ dx` computed exactly from the expanded polynomial.
pub fn poly_bump_exact() -> BigRational {
    // (1 - x²)⁴ = Σ_j C(4, j) (-1)^j x^{2j}; ∫_{-1}^{1} x^{2j} = 2/(2j+1)
    let mut acc = BigRational::from_integer(0.into());
    for j in 0..=4i64 {
        let binom = [1, 4, 6, 4, 1][j as usize];
        let sign = if j % 2 == 0 { 1 } else { -1 };
        acc += BigRational::new(BigInt::from(sign * binom * 2), BigInt::from(2 * j + 1));
    }
    acc * BigRational::new(225.into(), 256.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn exact_value() {
        assert_eq!(poly_bump_exact(), BigRational::new(5.into(), 7.into()));
    }

    #[test]
    fn poly_matches_exact_and_scales() {
        let rho = Mollifier::poly();
        let c1 = ito_constant(&rho, 1.0).unwrap();
        assert!((c1 - poly_bump_exact().to_f64().unwrap()).abs() < 1e-10);
        for eps in [0.1, 0.01] {
            assert!((eps * ito_constant(&rho, eps).unwrap() - c1).abs() < 1e-10);
        }
    }

    #[test]
    fn bump_has_unit_mass() {
        let rho = Mollifier::bump().unwrap();
        assert!((rho.mass().unwrap() - 1.0).abs() < 1e-10);
        let c1 = ito_constant(&rho, 1.0).unwrap();
        assert!((0.01 * ito_constant(&rho, 0.01).unwrap() - c1).abs() < 1e-10);
    }

    #[test]
    fn table_mollifier() {
        let rho = Mollifier::from_table("-1 0\n0 1 # peak\n1 0\n").unwrap();
        assert!((ito_constant(&rho, 1.0).unwrap() - 2.0 / 3.0).abs() < 1e-10);
        assert!(Mollifier::from_table("-1 0\n0 2\n1 0\n").is_err());
        assert!(ito_constant(&rho, 0.0).is_err());
    }
}
