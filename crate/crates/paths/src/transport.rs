//! Parallel transport of a flat formal power series connection.

use std::collections::BTreeMap;
use std::fmt;

use nearby_dga::fpsc::{fpsc_curvature, Fpsc};
use nearby_dga::Model;

use crate::integrate::Integrator;
use crate::period::PeriodValue;
use crate::word::{check_based, PathWord};
use crate::PathError;

/// `Σ_W T_W X_W` over words in the letters `1..=letters`, truncated at
/// `length`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportSeries {
    pub letters: usize,
    pub length: usize,
    pub coeffs: BTreeMap<Vec<usize>, PeriodValue>,
}

impl TransportSeries {
    pub fn one(letters: usize, length: usize) -> Self {
        TransportSeries { letters, length, coeffs: BTreeMap::from([(Vec::new(), PeriodValue::one())]) }
    }

    pub fn coeff(&self, w: &[usize]) -> PeriodValue {
        self.coeffs.get(w).cloned().unwrap_or_default()
    }

    /// Product of truncated series.
    pub fn mul(&self, o: &TransportSeries) -> TransportSeries {
        let length = self.length.min(o.length);
        let mut coeffs: BTreeMap<Vec<usize>, PeriodValue> = BTreeMap::new();
        for (u, a) in &self.coeffs {
            for (v, b) in &o.coeffs {
                if u.len() + v.len() > length {
                    continue;
                }
                let w = [u.as_slice(), v.as_slice()].concat();
                coeffs.entry(w).or_default().add_assign(&a.mul(b));
            }
        }
        coeffs.retain(|_, v| !v.is_zero());
        TransportSeries { letters: self.letters.max(o.letters), length, coeffs }
    }
}

impl fmt::Display for TransportSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (w, v) in &self.coeffs {
            let name: Vec<String> = w.iter().map(|x| format!("X{x}")).collect();
            writeln!(f, "[{}] {v}", name.join(""))?;
        }
        Ok(())
    }
}

fn words(letters: usize, length: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..length {
        let mut next = Vec::new();
        for w in &layer {
            for x in 1..=letters {
                let mut v: Vec<usize> = w.clone();
                v.push(x);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// `T(γ) = Σ_W (∫_γ ω_W-tensor) X_W` for a connection with `κ = 0`.
pub fn transport(model: &Model, omega: &Fpsc, gamma: &PathWord) -> Result<TransportSeries, PathError> {
    if !fpsc_curvature(model, omega)?.is_empty() {
        return Err(PathError::Curvature);
    }
    let pos = check_based(model, gamma)?;
    let letters = omega.coeffs.keys().flatten().copied().max().unwrap_or(0);
    let mut integ = Integrator::new(model);
    let mut coeffs = BTreeMap::new();
    for w in words(letters, omega.length) {
        let v = if w.is_empty() {
            PeriodValue::one()
        } else {
            integ.integrate_unchecked(&omega.tensor_of_word(&w), gamma, pos[0])?
        };
        if !v.is_zero() {
            coeffs.insert(w, v);
        }
    }
    Ok(TransportSeries { letters, length: omega.length, coeffs })
}
