//! Bivariate polynomials over Q in `x`, `y`: parsing, derivatives, gcd and the
//! jet-based Milnor number.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::linalg::IntEchelon;
use crate::scalar::{Alphabet, Monomial, Scalar, ScalarError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("polynomial parse error: {0}")]
    Parse(#[from] ScalarError),
    #[error("polynomial must be a polynomial in x and y with rational coefficients")]
    NotPolynomial,
    #[error("polynomial is not reduced")]
    NotReduced,
    #[error("non-isolated or cap exceeded")]
    CapExceeded,
}

/// Exponent pair `(i, j)` for `x^i y^j`.
pub type Exp = (u32, u32);

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly2 {
    terms: BTreeMap<Exp, BigRational>,
}

impl Poly2 {
    pub fn zero() -> Self {
        Poly2::default()
    }

    pub fn term(c: BigRational, i: u32, j: u32) -> Self {
        let mut p = Poly2::zero();
        p.add_term((i, j), c);
        p
    }

    pub fn parse(s: &str) -> Result<Self, PolyError> {
        let a = Alphabet::new(["x", "y"])?;
        let v = a.parse(s)?;
        Self::from_scalar(&v)
    }

    pub fn from_scalar(v: &Scalar) -> Result<Self, PolyError> {
        let mut p = Poly2::zero();
        for (mono, c) in v.terms() {
            let mut e = (0u32, 0u32);
            for (name, k) in mono.factors() {
                if *k < 0 {
                    return Err(PolyError::NotPolynomial);
                }
                match name.as_str() {
                    "x" => e.0 = *k as u32,
                    "y" => e.1 = *k as u32,
                    _ => return Err(PolyError::NotPolynomial),
                }
            }
            p.add_term(e, c.clone());
        }
        Ok(p)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<Exp, BigRational> {
        &self.terms
    }

    fn add_term(&mut self, e: Exp, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let nv = self.terms.get(&e).cloned().unwrap_or_else(BigRational::zero) + c;
        if nv.is_zero() {
            self.terms.remove(&e);
        } else {
            self.terms.insert(e, nv);
        }
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|(i, j)| i + j).max().unwrap_or(0)
    }

    /// Lowest total degree of a term (order at the origin).
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|(i, j)| i + j).min()
    }

    pub fn dx(&self) -> Self {
        let mut p = Poly2::zero();
        for (&(i, j), c) in &self.terms {
            if i > 0 {
                p.add_term((i - 1, j), c * BigRational::from_integer(i.into()));
            }
        }
        p
    }

    pub fn dy(&self) -> Self {
        let mut p = Poly2::zero();
        for (&(i, j), c) in &self.terms {
            if j > 0 {
                p.add_term((i, j - 1), c * BigRational::from_integer(j.into()));
            }
        }
        p
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut p = Poly2::zero();
        for (&(a, b), c) in &self.terms {
            for (&(e, f), d) in &o.terms {
                p.add_term((a + e, b + f), c * d);
            }
        }
        p
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut p = self.clone();
        for (&e, c) in &o.terms {
            p.add_term(e, c.clone());
        }
        p
    }

    pub fn eval(&self, x: &BigRational, y: &BigRational) -> BigRational {
        let mut s = BigRational::zero();
        for (&(i, j), c) in &self.terms {
            s += c * num_traits::pow(x.clone(), i as usize) * num_traits::pow(y.clone(), j as usize);
        }
        s
    }

    /// Coefficients as a polynomial in `y` over `Q[x]`.
    fn to_yx(&self) -> Vec<UPoly> {
        let dy = self.terms.keys().map(|e| e.1).max().unwrap_or(0) as usize;
        let mut v = vec![UPoly::zero(); if self.is_zero() { 0 } else { dy + 1 }];
        for (&(i, j), c) in &self.terms {
            let u = &mut v[j as usize];
            if u.0.len() <= i as usize {
                u.0.resize(i as usize + 1, BigRational::zero());
            }
            u.0[i as usize] += c;
        }
        for u in v.iter_mut() {
            u.trim();
        }
        v
    }

    fn from_yx(v: &[UPoly]) -> Self {
        let mut p = Poly2::zero();
        for (j, u) in v.iter().enumerate() {
            for (i, c) in u.0.iter().enumerate() {
                p.add_term((i as u32, j as u32), c.clone());
            }
        }
        p
    }

    /// Greatest common divisor up to a rational unit.
    pub fn gcd(&self, o: &Self) -> Self {
        Poly2::from_yx(&gcd_yx(self.to_yx(), o.to_yx()))
    }

    /// Square-free test: `gcd(f, f_x, f_y)` is a constant.
    pub fn is_reduced(&self) -> bool {
        if self.is_zero() {
            return false;
        }
        let g = self.gcd(&self.dx()).gcd(&self.dy());
        g.degree() == 0
    }
}

impl fmt::Display for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = Scalar::zero();
        for (&(i, j), c) in &self.terms {
            let mono = Monomial::var("x", i as i32).mul(&Monomial::var("y", j as i32));
            s += &Scalar::monomial(c.clone(), mono);
        }
        write!(f, "{s}")
    }
}

/// Dense univariate polynomial over Q, low degree first, no trailing zeros.
#[derive(Debug, Clone, PartialEq)]
struct UPoly(Vec<BigRational>);

impl UPoly {
    fn zero() -> Self {
        UPoly(Vec::new())
    }
    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
    fn trim(&mut self) {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
    }
    fn deg(&self) -> usize {
        self.0.len().saturating_sub(1)
    }
    fn lead(&self) -> &BigRational {
        self.0.last().expect("nonzero")
    }
    fn add(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        let mut v = vec![BigRational::zero(); n];
        for (i, c) in self.0.iter().enumerate() {
            v[i] += c;
        }
        for (i, c) in o.0.iter().enumerate() {
            v[i] += c;
        }
        let mut u = UPoly(v);
        u.trim();
        u
    }
    fn neg(&self) -> Self {
        UPoly(self.0.iter().map(|c| -c).collect())
    }
    fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return UPoly::zero();
        }
        let mut v = vec![BigRational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        let mut u = UPoly(v);
        u.trim();
        u
    }
    fn divrem(&self, o: &Self) -> (Self, Self) {
        let mut r = self.clone();
        let mut qv = vec![BigRational::zero(); self.0.len().saturating_sub(o.deg()).max(1)];
        let lead_inv = o.lead().recip();
        while !r.is_zero() && r.deg() >= o.deg() {
            let shift = r.deg() - o.deg();
            let c = r.lead() * &lead_inv;
            for (i, b) in o.0.iter().enumerate() {
                let t = &c * b;
                r.0[i + shift] -= t;
            }
            qv[shift] += c;
            r.trim();
        }
        let mut q = UPoly(qv);
        q.trim();
        (q, r)
    }
    fn gcd(a: &Self, b: &Self) -> Self {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        let inv = a.lead().recip();
        UPoly(a.0.iter().map(|c| c * &inv).collect())
    }
}

fn trim_yx(v: &mut Vec<UPoly>) {
    while v.last().is_some_and(|u| u.is_zero()) {
        v.pop();
    }
}

fn content(v: &[UPoly]) -> UPoly {
    v.iter().fold(UPoly::zero(), |g, u| UPoly::gcd(&g, u))
}

fn div_exact(v: &[UPoly], c: &UPoly) -> Vec<UPoly> {
    v.iter().map(|u| u.divrem(c).0).collect()
}

/// Pseudo-remainder of `a` by `b` in `Q[x][y]`.
fn prem(a: &[UPoly], b: &[UPoly]) -> Vec<UPoly> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lb = b[db].clone();
    while r.len() > db {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let shift = dr - db;
        let mut nr: Vec<UPoly> = r.iter().map(|u| u.mul(&lb)).collect();
        for (i, bi) in b.iter().enumerate() {
            nr[i + shift] = nr[i + shift].add(&bi.mul(&lr).neg());
        }
        trim_yx(&mut nr);
        r = nr;
    }
    r
}

fn gcd_yx(a: Vec<UPoly>, b: Vec<UPoly>) -> Vec<UPoly> {
    if a.is_empty() {
        return b;
    }
    if b.is_empty() {
        return a;
    }
    let ca = content(&a);
    let cb = content(&b);
    let c = UPoly::gcd(&ca, &cb);
    let mut p = div_exact(&a, &ca);
    let mut q = div_exact(&b, &cb);
    if p.len() < q.len() {
        std::mem::swap(&mut p, &mut q);
    }
    while !q.is_empty() && q.len() > 1 {
        let r = prem(&p, &q);
        p = q;
        q = if r.is_empty() {
            r
        } else {
            let cr = content(&r);
            div_exact(&r, &cr)
        };
    }
    if !q.is_empty() {
        // q is a nonzero polynomial in x alone; the primitive parts are coprime.
        p = vec![UPoly(vec![BigRational::one()])];
    }
    let cp = content(&p);
    let p = div_exact(&p, &cp);
    p.iter().map(|u| u.mul(&c)).collect()
}

fn jet_index(i: u32, j: u32) -> usize {
    let d = (i + j) as usize;
    d * (d + 1) / 2 + j as usize
}

/// Dimension of `Q[x,y] / (J + m^n)` for the Jacobian ideal `J` of `p`.
pub fn truncated_colength(p: &Poly2, n: u32) -> usize {
    let gens: Vec<Vec<(Exp, BigInt)>> = [p.dx(), p.dy()].iter().map(integral_terms).collect();
    let cols = jet_index(n, 0);
    let mut e = IntEchelon::new();
    for deg in 0..n {
        for b in 0..=deg {
            let a = deg - b;
            for g in &gens {
                let row: BTreeMap<usize, BigInt> = g
                    .iter()
                    .filter(|&&((i, j), _)| i + j + deg < n)
                    .map(|&((i, j), ref c)| (jet_index(i + a, j + b), c.clone()))
                    .collect();
                if !row.is_empty() {
                    e.insert(row);
                }
            }
        }
    }
    cols - e.rank()
}

/// Terms scaled by the common denominator.
fn integral_terms(p: &Poly2) -> Vec<(Exp, BigInt)> {
    let l = p.terms.values().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    p.terms
        .iter()
        .map(|(&e, c)| (e, (c * BigRational::from_integer(l.clone())).to_integer()))
        .collect()
}

pub const MILNOR_DEGREE_CAP: u32 = 512;

/// Milnor number of `p` at the origin via stabilised jet colengths.
pub fn milnor_number_poly(p: &Poly2) -> Result<u64, PolyError> {
    milnor_number_poly_capped(p, MILNOR_DEGREE_CAP)
}

pub fn milnor_number_poly_capped(p: &Poly2, cap: u32) -> Result<u64, PolyError> {
    if !p.is_reduced() {
        return Err(PolyError::NotReduced);
    }
    let mut n = (2 * p.degree()).max(2);
    let mut prev = truncated_colength(p, n);
    // colength below n means m^k ⊆ J + m^(k+1) for some k < n, so m^k ⊆ J
    if prev < n as usize {
        return Ok(prev as u64);
    }
    loop {
        let next_n = n * 2;
        if next_n > cap {
            return Err(PolyError::CapExceeded);
        }
        let cur = truncated_colength(p, next_n);
        if cur == prev {
            return Ok(cur as u64);
        }
        prev = cur;
        n = next_n;
    }
}

/// Newton polygon vertices (lower convex hull of the support).
pub fn newton_polygon(p: &Poly2) -> Vec<Exp> {
    let mut pts: Vec<Exp> = Vec::new();
    let mut by_x: BTreeMap<u32, u32> = BTreeMap::new();
    for &(i, j) in p.terms().keys() {
        let e = by_x.entry(i).or_insert(j);
        if j < *e {
            *e = j;
        }
    }
    for (i, j) in by_x {
        if pts.last().is_some_and(|&(_, lj)| lj <= j) {
            continue;
        }
        while pts.len() >= 2 {
            let (x1, y1) = pts[pts.len() - 2];
            let (x2, y2) = pts[pts.len() - 1];
            let cross = (x2 as i64 - x1 as i64) * (j as i64 - y1 as i64)
                - (y2 as i64 - y1 as i64) * (i as i64 - x1 as i64);
            if cross <= 0 {
                pts.pop();
            } else {
                break;
            }
        }
        pts.push((i, j));
    }
    pts
}
