//! Polynomials in `ξ` and `u = log t` with scalar coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nearby_core::Scalar;
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::DgaError;

pub const XI_CAP: u32 = 64;
pub const U_CAP: u32 = 32;

/// `Σ c_{ab} ξ^a u^b`, keyed by `(a, b)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize)]
pub struct EdgePoly {
    terms: BTreeMap<(u32, u32), Scalar>,
}

impl EdgePoly {
    pub fn zero() -> Self {
        EdgePoly::default()
    }

    pub fn constant(c: Scalar) -> Self {
        EdgePoly::term(c, 0, 0)
    }

    pub fn term(c: Scalar, a: u32, b: u32) -> Self {
        let mut p = EdgePoly::zero();
        p.add_term(a, b, c);
        p
    }

    pub fn int(n: i64) -> Self {
        EdgePoly::constant(Scalar::from_int(n))
    }

    pub fn xi() -> Self {
        EdgePoly::term(Scalar::one(), 1, 0)
    }

    pub fn u() -> Self {
        EdgePoly::term(Scalar::one(), 0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<(u32, u32), Scalar> {
        &self.terms
    }

    pub fn coeff(&self, a: u32, b: u32) -> Scalar {
        self.terms.get(&(a, b)).cloned().unwrap_or_default()
    }

    pub(crate) fn add_term(&mut self, a: u32, b: u32, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let s = &self.coeff(a, b) + &c;
        if s.is_zero() {
            self.terms.remove(&(a, b));
        } else {
            self.terms.insert((a, b), s);
        }
    }

    pub fn scale(&self, c: &Scalar) -> EdgePoly {
        let mut out = EdgePoly::zero();
        for (&(a, b), x) in &self.terms {
            out.add_term(a, b, x * c);
        }
        out
    }

    pub fn scale_q(&self, q: &BigRational) -> EdgePoly {
        let mut out = EdgePoly::zero();
        for (&(a, b), x) in &self.terms {
            out.add_term(a, b, x.scale(q));
        }
        out
    }

    pub fn d_xi(&self) -> EdgePoly {
        let mut out = EdgePoly::zero();
        for (&(a, b), x) in &self.terms {
            if a > 0 {
                out.add_term(a - 1, b, x.scale(&q(a as i64)));
            }
        }
        out
    }

    pub fn d_u(&self) -> EdgePoly {
        let mut out = EdgePoly::zero();
        for (&(a, b), x) in &self.terms {
            if b > 0 {
                out.add_term(a, b - 1, x.scale(&q(b as i64)));
            }
        }
        out
    }

    /// `∫₀^ξ p dξ`.
    pub fn integrate_xi(&self) -> EdgePoly {
        let mut out = EdgePoly::zero();
        for (&(a, b), x) in &self.terms {
            out.add_term(a + 1, b, x.scale(&BigRational::new(1.into(), BigInt::from(a + 1))));
        }
        out
    }

    /// Restriction to `ξ = 0` or `ξ = 1`, a polynomial in `u` alone.
    pub fn at_end(&self, one: bool) -> EdgePoly {
        let mut out = EdgePoly::zero();
        for (&(a, b), x) in &self.terms {
            if one || a == 0 {
                out.add_term(0, b, x.clone());
            }
        }
        out
    }

    /// The constant if the polynomial has no `ξ` or `u` dependence.
    pub fn as_constant(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => self.terms.get(&(0, 0)).cloned(),
            _ => None,
        }
    }

    pub fn xi_degree(&self) -> u32 {
        self.terms.keys().map(|k| k.0).max().unwrap_or(0)
    }

    pub fn u_degree(&self) -> u32 {
        self.terms.keys().map(|k| k.1).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|k| k.0 + k.1).max().unwrap_or(0)
    }

    pub fn check_caps(&self) -> Result<(), DgaError> {
        if self.xi_degree() > XI_CAP || self.u_degree() > U_CAP {
            return Err(DgaError::DegreeOverflow { xi: self.xi_degree(), u: self.u_degree() });
        }
        Ok(())
    }
}

pub(crate) fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl Add<&EdgePoly> for &EdgePoly {
    type Output = EdgePoly;
    fn add(self, o: &EdgePoly) -> EdgePoly {
        let mut out = self.clone();
        for (&(a, b), x) in &o.terms {
            out.add_term(a, b, x.clone());
        }
        out
    }
}

impl Sub<&EdgePoly> for &EdgePoly {
    type Output = EdgePoly;
    fn sub(self, o: &EdgePoly) -> EdgePoly {
        self + &(-o)
    }
}

impl Neg for &EdgePoly {
    type Output = EdgePoly;
    fn neg(self) -> EdgePoly {
        self.scale_q(&q(-1))
    }
}

impl Mul<&EdgePoly> for &EdgePoly {
    type Output = EdgePoly;
    fn mul(self, o: &EdgePoly) -> EdgePoly {
        let mut out = EdgePoly::zero();
        for (&(a, b), x) in &self.terms {
            for (&(c, d), y) in &o.terms {
                out.add_term(a + c, b + d, x * y);
            }
        }
        out
    }
}

impl fmt::Display for EdgePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(a, b), c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            match a {
                0 => {}
                1 => write!(f, "*xi")?,
                _ => write!(f, "*xi^{a}")?,
            }
            match b {
                0 => {}
                1 => write!(f, "*u")?,
                _ => write!(f, "*u^{b}")?,
            }
        }
        Ok(())
    }
}
