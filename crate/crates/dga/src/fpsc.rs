//! Formal power series connections `ω = Σ_W ω_W X_W` and their curvature
//! `κ = dω + ω∧ω`.

use std::collections::BTreeMap;

use nearby_core::Scalar;

use crate::bar::BarTensor;
use crate::element::DgaElement;
use crate::model::Model;
use crate::DgaError;

/// Coefficients indexed by nonempty words over `1..=s`, truncated at `length`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Fpsc {
    pub length: usize,
    pub coeffs: BTreeMap<Vec<usize>, DgaElement>,
}

impl Fpsc {
    pub fn new(length: usize) -> Self {
        Fpsc { length, coeffs: BTreeMap::new() }
    }

    pub fn with(mut self, word: &[usize], phi: DgaElement) -> Self {
        self.coeffs.insert(word.to_vec(), phi);
        self
    }

    /// The tensor series read off the coefficients: for the word `w`, the sum
    /// of `ω_{W₁} ⊗ ⋯ ⊗ ω_{W_k}` over factorizations `w = W₁⋯W_k`.
    pub fn tensor_of_word(&self, w: &[usize]) -> BarTensor {
        let mut out = BarTensor::zero();
        let n = w.len();
        for mask in 0u64..(1u64 << n.saturating_sub(1)) {
            let mut factors = Vec::new();
            let mut start = 0;
            let mut ok = true;
            for gap in 0..n {
                if gap == n - 1 || mask & (1 << gap) != 0 {
                    match self.coeffs.get(&w[start..=gap]) {
                        Some(c) => factors.push(c),
                        None => ok = false,
                    }
                    start = gap + 1;
                }
            }
            if ok {
                out = out.plus(&BarTensor::pure(&factors, Scalar::one()));
            }
        }
        out
    }
}

/// `κ_W = dω_W + Σ_{W = UV} ω_U ∧ ω_V` for every word up to the length.
pub fn fpsc_curvature(model: &Model, omega: &Fpsc) -> Result<BTreeMap<Vec<usize>, DgaElement>, DgaError> {
    let mut words: Vec<Vec<usize>> = omega.coeffs.keys().cloned().collect();
    // products may land on words with no coefficient of their own
    for u in omega.coeffs.keys() {
        for v in omega.coeffs.keys() {
            if u.len() + v.len() <= omega.length {
                words.push([u.as_slice(), v.as_slice()].concat());
            }
        }
    }
    words.sort();
    words.dedup();
    let mut out = BTreeMap::new();
    for w in words {
        let mut k = match omega.coeffs.get(&w) {
            Some(c) => model.d(c)?,
            None => DgaElement::zero(2),
        };
        for cut in 1..w.len() {
            if let (Some(a), Some(b)) = (omega.coeffs.get(&w[..cut]), omega.coeffs.get(&w[cut..])) {
                k = k.plus(&model.wedge(a, b)?);
            }
        }
        if !k.is_zero() {
            out.insert(w, k);
        }
    }
    Ok(out)
}
