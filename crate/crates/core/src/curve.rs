//! Plane curve germs given by branches (characteristic exponents) and
//! pairwise intersection multiplicities.

use num_integer::Integer;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{milnor_number_poly, Poly2, PolyError};
use crate::resolution::{self, ResolutionError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurveError {
    #[error("bad exponent {0:?}: expected a reduced fraction a/b")]
    BadExponent(String),
    #[error("non-characteristic exponent sequence: {0}")]
    NonCharacteristic(String),
    #[error("invalid Puiseux pair ({0},{1})")]
    BadPair(u64, u64),
    #[error("intersection matrix: {0}")]
    BadMatrix(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("json: {0}")]
    Json(String),
}

/// Characteristic exponents of an irreducible branch `y = x^{β_1} + …`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchSpec {
    exponents: Vec<Rational64>,
}

pub type PuiseuxPairs = Vec<(u64, u64)>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MonstranceData {
    pub m: u64,
    pub k: u64,
    pub order: u64,
    /// Set when `k <= m` for a singular branch.
    pub k_le_m: bool,
}

impl BranchSpec {
    pub fn smooth() -> Self {
        BranchSpec { exponents: Vec::new() }
    }

    pub fn new(exponents: Vec<Rational64>) -> Result<Self, CurveError> {
        let b = BranchSpec { exponents };
        b.check()?;
        Ok(b)
    }

    /// Parse strings like `"3/2"`; the fraction must already be reduced.
    pub fn parse<S: AsRef<str>>(items: &[S]) -> Result<Self, CurveError> {
        let mut v = Vec::new();
        for s in items {
            let s = s.as_ref().trim();
            let bad = || CurveError::BadExponent(s.to_string());
            let (n, d) = match s.split_once('/') {
                Some((n, d)) => (
                    n.trim().parse::<i64>().map_err(|_| bad())?,
                    d.trim().parse::<i64>().map_err(|_| bad())?,
                ),
                None => (s.parse::<i64>().map_err(|_| bad())?, 1),
            };
            if d <= 0 || n.gcd(&d) != 1 {
                return Err(bad());
            }
            v.push(Rational64::new_raw(n, d));
        }
        BranchSpec::new(v)
    }

    pub fn exponents(&self) -> &[Rational64] {
        &self.exponents
    }

    pub fn is_smooth(&self) -> bool {
        self.exponents.is_empty()
    }

    /// Branch multiplicity: lcm of the exponent denominators.
    pub fn multiplicity(&self) -> u64 {
        self.exponents.iter().fold(1i64, |a, e| a.lcm(e.denom())) as u64
    }

    /// Integer characteristic sequence `(β_0; β_1, …, β_g)` with `β_0 = m`.
    pub fn characteristic_integers(&self) -> (u64, Vec<u64>) {
        let m = self.multiplicity() as i64;
        let betas = self
            .exponents
            .iter()
            .map(|e| (e * m).to_integer() as u64)
            .collect();
        (m as u64, betas)
    }

    fn check(&self) -> Result<(), CurveError> {
        let mut lcm = 1i64;
        let mut prev = Rational64::from_integer(1);
        for e in &self.exponents {
            if *e <= prev {
                return Err(CurveError::NonCharacteristic(format!(
                    "exponent {e} must exceed {prev}"
                )));
            }
            let next = lcm.lcm(e.denom());
            if next == lcm {
                return Err(CurveError::NonCharacteristic(format!(
                    "exponent {e} does not refine the denominator {lcm}"
                )));
            }
            lcm = next;
            prev = *e;
        }
        Ok(())
    }
}

pub fn puiseux_pairs_from_exponents(b: &BranchSpec) -> PuiseuxPairs {
    let mut out = Vec::new();
    let mut d_prev = 1i64;
    for e in &b.exponents {
        let d = d_prev.lcm(e.denom());
        out.push(((d / d_prev) as u64, (e * d).to_integer() as u64));
        d_prev = d;
    }
    out
}

pub fn exponents_from_pairs(pairs: &[(u64, u64)]) -> Result<BranchSpec, CurveError> {
    let mut d = 1i64;
    let mut v = Vec::new();
    for &(m, n) in pairs {
        if m < 2 || n == 0 || m.gcd(&n) != 1 {
            return Err(CurveError::BadPair(m, n));
        }
        d *= m as i64;
        v.push(Rational64::new(n as i64, d));
    }
    let b = BranchSpec::new(v)?;
    if puiseux_pairs_from_exponents(&b) != pairs {
        return Err(CurveError::NonCharacteristic(format!("pairs {pairs:?}")));
    }
    Ok(b)
}

pub fn monstrance_order(b: &BranchSpec) -> MonstranceData {
    let pairs = puiseux_pairs_from_exponents(b);
    let m: u64 = pairs.iter().map(|p| p.0).product();
    let k = match pairs.first() {
        Some(&(_, n1)) => n1 * pairs[1..].iter().map(|p| p.0).product::<u64>(),
        None => 1,
    };
    MonstranceData {
        m,
        k,
        order: m * k,
        k_le_m: !pairs.is_empty() && k <= m,
    }
}

/// A reduced plane curve germ.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSpec {
    pub branches: Vec<BranchSpec>,
    /// Symmetric, zero diagonal, off-diagonal entries ≥ 1.
    pub intersections: Vec<Vec<u64>>,
    pub polynomial: Option<Poly2>,
}

#[derive(Serialize, Deserialize)]
struct BranchJson {
    exponents: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct CurveJson {
    branches: Vec<BranchJson>,
    #[serde(default)]
    intersections: Vec<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    polynomial: Option<String>,
}

impl CurveSpec {
    pub fn new(
        branches: Vec<BranchSpec>,
        intersections: Vec<Vec<u64>>,
        polynomial: Option<Poly2>,
    ) -> Result<Self, CurveError> {
        let r = branches.len();
        let intersections = if intersections.is_empty() && r == 1 {
            vec![vec![0]]
        } else {
            intersections
        };
        if r == 0 {
            return Err(CurveError::BadMatrix("no branches".into()));
        }
        if intersections.len() != r || intersections.iter().any(|row| row.len() != r) {
            return Err(CurveError::BadMatrix(format!("expected {r}×{r}")));
        }
        for i in 0..r {
            for j in 0..r {
                let v = intersections[i][j];
                if i == j {
                    continue;
                }
                if v != intersections[j][i] {
                    return Err(CurveError::BadMatrix(format!("not symmetric at ({i},{j})")));
                }
                if v == 0 {
                    return Err(CurveError::BadMatrix(format!("entry ({i},{j}) must be ≥ 1")));
                }
            }
        }
        if let Some(p) = &polynomial {
            if !p.is_reduced() {
                return Err(PolyError::NotReduced.into());
            }
        }
        Ok(CurveSpec {
            branches,
            intersections,
            polynomial,
        })
    }

    pub fn single(b: BranchSpec) -> Self {
        CurveSpec {
            branches: vec![b],
            intersections: vec![vec![0]],
            polynomial: None,
        }
    }

    pub fn r(&self) -> usize {
        self.branches.len()
    }

    pub fn from_json(text: &str) -> Result<Self, CurveError> {
        let j: CurveJson = serde_json::from_str(text).map_err(|e| CurveError::Json(e.to_string()))?;
        let branches = j
            .branches
            .iter()
            .map(|b| BranchSpec::parse(&b.exponents))
            .collect::<Result<Vec<_>, _>>()?;
        let poly = j.polynomial.as_deref().map(Poly2::parse).transpose()?;
        CurveSpec::new(branches, j.intersections, poly)
    }

    pub fn to_json(&self) -> String {
        let j = CurveJson {
            branches: self
                .branches
                .iter()
                .map(|b| BranchJson {
                    exponents: b.exponents.iter().map(|e| e.to_string()).collect(),
                })
                .collect(),
            intersections: self.intersections.clone(),
            polynomial: self.polynomial.as_ref().map(|p| p.to_string()),
        };
        serde_json::to_string(&j).expect("serializable")
    }
}

/// `μ = 2(Σδ_i + Σ_{i<j} I_ij) − r + 1`, after checking that a cluster of
/// infinitely near points realizes the contact data.
pub fn milnor_from_branch_data(c: &CurveSpec) -> Result<u64, ResolutionError> {
    resolution::build_resolution_graph(c)?;
    let delta: u64 = c.branches.iter().map(resolution::delta).sum();
    let r = c.r();
    let mut inter = 0u64;
    for i in 0..r {
        for j in i + 1..r {
            inter += c.intersections[i][j];
        }
    }
    Ok(2 * (delta + inter) + 1 - r as u64)
}

/// Milnor number of the attached polynomial, if any.
pub fn milnor_from_polynomial(c: &CurveSpec) -> Option<Result<u64, PolyError>> {
    c.polynomial.as_ref().map(milnor_number_poly)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_examples() {
        let b = BranchSpec::parse(&["3/2", "7/4"]).unwrap();
        assert_eq!(puiseux_pairs_from_exponents(&b), vec![(2, 3), (2, 7)]);
        assert_eq!(exponents_from_pairs(&[(2, 3), (2, 7)]).unwrap(), b);
        let md = monstrance_order(&b);
        assert_eq!((md.m, md.k, md.order), (4, 6, 24));
        assert_eq!(monstrance_order(&BranchSpec::smooth()).order, 1);
    }

    #[test]
    fn rejects_non_characteristic() {
        assert!(BranchSpec::parse(&["3/2", "5/2"]).is_err());
        assert!(BranchSpec::parse(&["2"]).is_err());
        assert!(BranchSpec::parse(&["6/4"]).is_err());
        assert!(BranchSpec::parse(&["1/2"]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"branches":[{"exponents":["3/2","7/4"]}],"intersections":[[0]],"polynomial":"(y^2-x^3)^2-4*x^5*y-x^7"}"#;
        let c = CurveSpec::from_json(text).unwrap();
        let again = CurveSpec::from_json(&c.to_json()).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn matrix_checks() {
        let s = BranchSpec::smooth();
        assert!(CurveSpec::new(vec![s.clone(), s.clone()], vec![vec![0, 1], vec![2, 0]], None).is_err());
        assert!(CurveSpec::new(vec![s.clone(), s.clone()], vec![vec![0, 0], vec![0, 0]], None).is_err());
    }
}
