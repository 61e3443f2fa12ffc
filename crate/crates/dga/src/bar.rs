//! Truncated tensor algebra on `A¹`, the Chen differential, bar relations and
//! normal forms, bar filtrations, and `N`, `M` acting by derivations.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use nearby_core::Scalar;
use serde::Serialize;

use crate::complement::{extend_function, Complement};
use crate::element::{Coord, DgaElement};
use crate::model::Model;
use crate::DgaError;

/// Formal sum of tensors of basis elements. Factors are expanded
/// multilinearly, so equality is exact equality of tensors.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BarTensor {
    terms: BTreeMap<Vec<Coord>, Scalar>,
}

#[derive(Serialize)]
struct TermOut<'a> {
    coeff: &'a Scalar,
    factors: &'a [Coord],
}

impl Serialize for BarTensor {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<TermOut> = self.terms.iter().map(|(f, c)| TermOut { coeff: c, factors: f }).collect();
        v.serialize(s)
    }
}

impl BarTensor {
    pub fn zero() -> Self {
        BarTensor::default()
    }

    /// Length-0 element.
    pub fn scalar(c: Scalar) -> Self {
        let mut t = BarTensor::zero();
        t.add_term(Vec::new(), c);
        t
    }

    /// `c · φ_1 ⊗ ⋯ ⊗ φ_r` without compatibility checks.
    pub fn pure(factors: &[&DgaElement], c: Scalar) -> Self {
        let mut acc: Vec<(Vec<Coord>, Scalar)> = vec![(Vec::new(), c)];
        for f in factors {
            let coords = f.coords();
            let mut next = Vec::new();
            for (w, s) in &acc {
                for (k, x) in &coords {
                    let mut w2 = w.clone();
                    w2.push(k.clone());
                    next.push((w2, s * x));
                }
            }
            acc = next;
        }
        let mut t = BarTensor::zero();
        for (w, s) in acc {
            t.add_term(w, s);
        }
        t
    }

    /// `φ_1 ⊗ ⋯ ⊗ φ_r` with each factor checked to be a compatible 1-form.
    pub fn from_factors(model: &Model, factors: &[&DgaElement]) -> Result<Self, DgaError> {
        for f in factors {
            if f.degree != 1 {
                return Err(DgaError::DegreeMismatch { expected: 1, found: f.degree });
            }
            model.check_element(f)?;
            let v = model.compat_check(f)?;
            if let Some(x) = v.first() {
                return Err(DgaError::Incompatible(format!("edge {} side {}: {}", x.edge, x.side, x.message)));
            }
        }
        Ok(BarTensor::pure(factors, Scalar::one()))
    }

    pub(crate) fn add_term(&mut self, w: Vec<Coord>, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let s = &self.terms.get(&w).cloned().unwrap_or_default() + &c;
        if s.is_zero() {
            self.terms.remove(&w);
        } else {
            self.terms.insert(w, s);
        }
    }

    /// `self += c·o` in place.
    pub(crate) fn add_scaled(&mut self, o: &BarTensor, c: &Scalar) {
        for (w, s) in &o.terms {
            self.add_term(w.clone(), s * c);
        }
    }

    pub fn terms(&self) -> &BTreeMap<Vec<Coord>, Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_length(&self) -> usize {
        self.terms.keys().map(|w| w.len()).max().unwrap_or(0)
    }

    /// Part of length exactly `r`.
    pub fn length_part(&self, r: usize) -> BarTensor {
        BarTensor { terms: self.terms.iter().filter(|(w, _)| w.len() == r).map(|(w, c)| (w.clone(), c.clone())).collect() }
    }

    pub fn scale(&self, c: &Scalar) -> BarTensor {
        let mut t = BarTensor::zero();
        for (w, s) in &self.terms {
            t.add_term(w.clone(), s * c);
        }
        t
    }

    pub fn plus(&self, o: &BarTensor) -> BarTensor {
        let mut t = self.clone();
        for (w, s) in &o.terms {
            t.add_term(w.clone(), s.clone());
        }
        t
    }

    pub fn minus(&self, o: &BarTensor) -> BarTensor {
        self.plus(&o.scale(&Scalar::from_int(-1)))
    }

    /// Concatenation product `t ⊗ o`.
    pub fn tensor(&self, o: &BarTensor) -> BarTensor {
        let mut t = BarTensor::zero();
        for (w, s) in &self.terms {
            for (v, x) in &o.terms {
                let mut wv = w.clone();
                wv.extend(v.iter().cloned());
                t.add_term(wv, s * x);
            }
        }
        t
    }

    /// Coefficient of the length-1 tensor of a single basis element.
    pub fn coefficient(&self, c: &Coord) -> Scalar {
        self.terms.get(std::slice::from_ref(c)).cloned().unwrap_or_default()
    }

    /// Replace every factor by `f(factor)` at position `i` of each term.
    fn map_factor<F>(&self, mut f: F) -> Result<BarTensor, DgaError>
    where
        F: FnMut(usize, &Coord) -> Result<BTreeMap<Coord, Scalar>, DgaError>,
    {
        let mut out = BarTensor::zero();
        for (w, s) in &self.terms {
            for i in 0..w.len() {
                for (c, x) in f(i, &w[i])? {
                    let mut w2 = w.clone();
                    w2[i] = c;
                    out.add_term(w2, s * &x);
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Display for BarTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(w, c)| {
                let fs: Vec<String> = w.iter().map(|x| x.to_string()).collect();
                format!("({c})[{}]", fs.join(" | "))
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn form_degree(model: &Model, c: &Coord) -> Result<u8, DgaError> {
    Ok(match c {
        Coord::Surface { component, name } => model.surface(*component)?.gen(name)?.degree,
        Coord::Edge { form, .. } => *form,
    })
}

fn basis(model: &Model, c: &Coord) -> Result<DgaElement, DgaError> {
    Ok(DgaElement::from_coords(form_degree(model, c)?, &BTreeMap::from([(c.clone(), Scalar::one())])))
}

/// `(d_I + d_C)(t)` before any quotient.
pub fn chen_differential(model: &Model, t: &BarTensor) -> Result<BarTensor, DgaError> {
    let mut out = t.map_factor(|_, c| Ok(model.d(&basis(model, c)?)?.coords()))?;
    for (w, s) in &t.terms {
        for i in 0..w.len().saturating_sub(1) {
            let p = model.wedge(&basis(model, &w[i])?, &basis(model, &w[i + 1])?)?;
            for (c, x) in p.coords() {
                let mut w2 = w[..i].to_vec();
                w2.push(c);
                w2.extend(w[i + 2..].iter().cloned());
                out.add_term(w2, s * &x);
            }
        }
    }
    Ok(out)
}

/// `f − ε(f)`.
fn reduced(model: &Model, f: &DgaElement) -> Result<DgaElement, DgaError> {
    Ok(f.minus(&model.constant(&model.augmentation(f)?)))
}

/// The generator `R_i(u, f)` of the relation submodule, `1 ≤ i ≤ r` with
/// `r = u.len() + 1`.
pub fn relation_element(model: &Model, u: &[DgaElement], f: &DgaElement, i: usize) -> Result<BarTensor, DgaError> {
    let r = u.len() + 1;
    if i < 1 || i > r {
        return Err(DgaError::PositionOutOfRange { position: i, length: r });
    }
    if f.degree != 0 {
        return Err(DgaError::DegreeMismatch { expected: 0, found: f.degree });
    }
    let df = model.d(f)?;
    let mut with_df: Vec<&DgaElement> = u[..i - 1].iter().collect::<Vec<_>>();
    with_df.push(&df);
    with_df.extend(u[i - 1..].iter());
    let mut out = BarTensor::pure(&with_df, Scalar::one());
    if r == 1 {
        return Ok(out);
    }
    let fr = reduced(model, f)?;
    if i == 1 {
        let p = model.wedge(&fr, &u[0])?;
        let mut v = vec![&p];
        v.extend(u[1..].iter());
        out = out.minus(&BarTensor::pure(&v, Scalar::one()));
    } else if i == r {
        let p = model.wedge(&fr, &u[r - 2])?;
        let mut v = u[..r - 2].iter().collect::<Vec<_>>();
        v.push(&p);
        out = out.plus(&BarTensor::pure(&v, Scalar::one()));
    } else {
        let left = model.wedge(f, &u[i - 2])?;
        let mut v = u[..i - 2].iter().collect::<Vec<_>>();
        v.push(&left);
        v.extend(u[i - 1..].iter());
        out = out.plus(&BarTensor::pure(&v, Scalar::one()));
        let right = model.wedge(f, &u[i - 1])?;
        let mut v = u[..i - 1].iter().collect::<Vec<_>>();
        v.push(&right);
        v.extend(u[i..].iter());
        out = out.minus(&BarTensor::pure(&v, Scalar::one()));
    }
    Ok(out)
}

/// Functions for the enumeration cross-check: every component indicator and
/// every declared function generator, extended compatibly.
pub fn default_functions(model: &Model) -> Result<Vec<DgaElement>, DgaError> {
    let mut out = Vec::new();
    for s in model.surfaces() {
        let names = s.generators().filter(|g| g.degree == 0).map(|g| g.name.clone()).collect::<Vec<_>>();
        for n in names {
            out.push(extend_function(model, s.component, &n)?);
        }
    }
    Ok(out)
}

/// Cross-check for relation membership by enumeration: whether `t` lies in
/// the span of all `R_i(u, f)` with the `u` words over `forms` and `f` in
/// `functions`, up to the length of `t`. Relation coefficients must be
/// rational; the coefficients of `t` may carry symbols.
pub fn relation_span_contains(
    model: &Model,
    t: &BarTensor,
    forms: &[DgaElement],
    functions: &[DgaElement],
) -> Result<bool, DgaError> {
    if t.is_zero() {
        return Ok(true);
    }
    let mut gens: Vec<BarTensor> = Vec::new();
    let mut words: Vec<Vec<usize>> = vec![Vec::new()];
    for r in 1..=t.max_length() {
        for w in &words {
            let u: Vec<DgaElement> = w.iter().map(|&j| forms[j].clone()).collect();
            for f in functions {
                for i in 1..=r {
                    let rel = relation_element(model, &u, f, i)?;
                    if !rel.is_zero() {
                        gens.push(rel);
                    }
                }
            }
        }
        words = words.iter().flat_map(|w| (0..forms.len()).map(move |j| [w.as_slice(), &[j]].concat())).collect();
    }
    let mut rows: BTreeMap<&Vec<Coord>, usize> = BTreeMap::new();
    for g in gens.iter().chain(std::iter::once(t)) {
        for k in g.terms.keys() {
            let n = rows.len();
            rows.entry(k).or_insert(n);
        }
    }
    let zero = num_rational::BigRational::from_integer(0.into());
    let mut a = vec![vec![zero; gens.len()]; rows.len()];
    for (j, g) in gens.iter().enumerate() {
        for (k, c) in &g.terms {
            a[rows[k]][j] = c
                .as_rational()
                .ok_or_else(|| DgaError::Inconsistent(format!("relation coefficient {c} is not rational")))?;
        }
    }
    let mut b = vec![Scalar::zero(); rows.len()];
    for (k, c) in &t.terms {
        b[rows[k]] = c.clone();
    }
    Ok(nearby_core::linalg::solve(&a, &b).is_some())
}

/// Normal-form reducer: keeps the complement and a memo of reduced words.
pub struct Reducer<'a> {
    model: &'a Model,
    comp: Complement<'a>,
    memo: HashMap<Vec<Coord>, BarTensor>,
}

impl<'a> Reducer<'a> {
    pub fn new(model: &'a Model) -> Result<Self, DgaError> {
        Ok(Reducer { model, comp: Complement::new(model)?, memo: HashMap::new() })
    }

    pub fn reduce(&mut self, t: &BarTensor) -> Result<BarTensor, DgaError> {
        let mut out = BarTensor::zero();
        for (w, s) in &t.terms {
            let nf = self.word(w)?;
            out.add_scaled(&nf, s);
        }
        Ok(out)
    }

    fn expand(&self, factors: &[BTreeMap<Coord, Scalar>]) -> BarTensor {
        let mut acc = BarTensor::scalar(Scalar::one());
        for f in factors {
            let mut t = BarTensor::zero();
            for (c, s) in f {
                t.add_term(vec![c.clone()], s.clone());
            }
            acc = acc.tensor(&t);
        }
        acc
    }

    fn product(&self, f: &DgaElement, c: &Coord) -> Result<BTreeMap<Coord, Scalar>, DgaError> {
        Ok(self.model.wedge(f, &basis(self.model, c)?)?.coords())
    }

    fn word(&mut self, w: &[Coord]) -> Result<BarTensor, DgaError> {
        if let Some(hit) = self.memo.get(w) {
            return Ok(hit.clone());
        }
        let r = w.len();
        if r == 0 {
            return Ok(BarTensor::scalar(Scalar::one()));
        }
        let mut bars = Vec::with_capacity(r);
        let mut fs = Vec::with_capacity(r);
        for c in w {
            let (b, f) = self.comp.decompose_basis(c)?;
            bars.push(b);
            fs.push(f);
        }
        let mut out = self.expand(&bars);
        let single = |c: &Coord| BTreeMap::from([(c.clone(), Scalar::one())]);
        for nu in 0..r {
            let f = &fs[nu];
            if f.is_zero() || r == 1 {
                continue;
            }
            // bars[..nu] ⊗ df ⊗ w[nu+1..] rewritten by R_{nu+1}
            let mut lower = BarTensor::zero();
            let rest: Vec<_> = w[nu + 1..].iter().map(single).collect();
            if nu == 0 {
                let fr = reduced(self.model, f)?;
                let mut fac = vec![self.product(&fr, &w[1])?];
                fac.extend(rest[1..].iter().cloned());
                lower.add_scaled(&self.expand(&fac), &Scalar::one());
            } else if nu == r - 1 {
                let fr = reduced(self.model, f)?;
                let mut fac = bars[..nu - 1].to_vec();
                let mut last = BTreeMap::new();
                for (c, s) in &bars[nu - 1] {
                    for (k, x) in self.product(&fr, c)? {
                        *last.entry(k).or_insert_with(Scalar::zero) += &(s * &x);
                    }
                }
                fac.push(last);
                lower = lower.minus(&self.expand(&fac));
            } else {
                let mut left = BTreeMap::new();
                for (c, s) in &bars[nu - 1] {
                    for (k, x) in self.product(f, c)? {
                        *left.entry(k).or_insert_with(Scalar::zero) += &(s * &x);
                    }
                }
                let mut fac = bars[..nu - 1].to_vec();
                fac.push(left);
                fac.extend(rest.iter().cloned());
                lower = lower.minus(&self.expand(&fac));
                let mut fac = bars[..nu].to_vec();
                fac.push(self.product(f, &w[nu + 1])?);
                fac.extend(rest[1..].iter().cloned());
                lower = lower.plus(&self.expand(&fac));
            }
            let nf = self.reduce(&lower)?;
            out.add_scaled(&nf, &Scalar::one());
        }
        self.memo.insert(w.to_vec(), out.clone());
        Ok(out)
    }
}

/// The normal form `Ī`: every factor in `Ā¹`, equal to `t` modulo relations.
pub fn reduce_normal_form(model: &Model, t: &BarTensor) -> Result<BarTensor, DgaError> {
    Reducer::new(model)?.reduce(t)
}

/// `d_Chen [t] = 0`, decided as `(d_I + d_C)(Ī) = 0`.
pub fn is_chen_closed(model: &Model, t: &BarTensor) -> Result<bool, DgaError> {
    let n = reduce_normal_form(model, t)?;
    Ok(chen_differential(model, &n)?.is_zero())
}

fn levels(model: &Model, t: &BarTensor) -> Result<(Option<i32>, Option<i32>), DgaError> {
    let mut w: Option<i32> = None;
    let mut f: Option<i32> = None;
    for word in t.terms.keys() {
        let mut lw = word.len() as i32;
        let mut lf = 0;
        for c in word {
            lw += model.coord_weight(c)?;
            lf += model.coord_hodge(c)?;
        }
        w = Some(w.map_or(lw, |x| x.max(lw)));
        f = Some(f.map_or(lf, |x| x.min(lf)));
    }
    Ok((w, f))
}

/// `(W-level, F-level)` by `l_1+⋯+l_r + r` and `p_1+⋯+p_r`, the better of the
/// given representative and its normal form. `None` for zero.
pub fn bar_filtrations(model: &Model, t: &BarTensor) -> Result<(Option<i32>, Option<i32>), DgaError> {
    let (w1, f1) = levels(model, t)?;
    let (w2, f2) = levels(model, &reduce_normal_form(model, t)?)?;
    let w = match (w1, w2) {
        (Some(a), Some(b)) => Some(a.min(b)),
        _ => None,
    };
    let f = match (f1, f2) {
        (Some(a), Some(b)) => Some(a.max(b)),
        _ => None,
    };
    Ok((w, f))
}

/// `N` extended to tensors as a derivation.
pub fn apply_n_bar(model: &Model, t: &BarTensor) -> Result<BarTensor, DgaError> {
    t.map_factor(|_, c| Ok(basis(model, c)?.apply_n().coords()))
}

/// `M_i` extended to tensors as a derivation.
pub fn apply_m_bar(model: &Model, t: &BarTensor, branch: usize) -> Result<BarTensor, DgaError> {
    model.graph.disk_edge(branch).ok_or(DgaError::NoDiskEdge(branch))?;
    t.map_factor(|_, c| Ok(model.apply_m(&basis(model, c)?, branch)?.coords()))
}

/// `λ^N = exp(log λ · N)` on tensors.
pub fn lambda_n_bar(model: &Model, t: &BarTensor, log_lambda: &Scalar) -> Result<BarTensor, DgaError> {
    let mut out = t.clone();
    let mut term = t.clone();
    let mut k = 1i64;
    loop {
        term = apply_n_bar(model, &term)?.scale(log_lambda).scale(&Scalar::frac(1, k));
        if term.is_zero() {
            return Ok(out);
        }
        out = out.plus(&term);
        k += 1;
    }
}

/// Declared primitives: pairs `(β, ψ)` with `dψ = β`.
#[derive(Debug, Clone, Default)]
pub struct Primitives {
    pairs: Vec<(DgaElement, DgaElement)>,
}

impl Primitives {
    pub fn new() -> Self {
        Primitives::default()
    }

    /// Declare `ψ` as a primitive of `dψ`.
    pub fn declare(&mut self, model: &Model, psi: DgaElement) -> Result<(), DgaError> {
        let beta = model.d(&psi)?;
        self.pairs.push((beta, psi));
        Ok(())
    }

    /// A `ψ` with `dψ = β`, up to scalar multiples of declared pairs.
    pub fn find(&self, beta: &DgaElement) -> Option<DgaElement> {
        if beta.is_zero() {
            return Some(DgaElement::zero(1));
        }
        let bc = beta.coords();
        for (b, psi) in &self.pairs {
            let Some((k, x)) = b.coords().into_iter().next() else { continue };
            let Some(y) = bc.get(&k) else { continue };
            let Ok(c) = y.checked_div(&x) else { continue };
            if b.scale(&c) == *beta {
                return Some(psi.scale(&c));
            }
        }
        None
    }
}

/// Chen-closed tensor with top part `φ_1⊗⋯⊗φ_s`: for every block `I` of
/// consecutive indices of length ≥ 2, `dφ_I = −Σ φ_{I₁}∧φ_{I₂}` over the
/// splittings `I = I₁I₂`, and the result sums `φ_{B₁}⊗⋯⊗φ_{B_k}` over all
/// decompositions of `1..s` into consecutive blocks.
pub fn extend_closed_family(model: &Model, phis: &[DgaElement], prims: &Primitives) -> Result<BarTensor, DgaError> {
    let s = phis.len();
    for (i, p) in phis.iter().enumerate() {
        if p.degree != 1 || !model.d(p)?.is_zero() {
            return Err(DgaError::Inconsistent(format!("φ{} is not a closed 1-form", i + 1)));
        }
    }
    // block[(i, j)] = φ_{i..=j}
    let mut block: BTreeMap<(usize, usize), DgaElement> = BTreeMap::new();
    for (i, p) in phis.iter().enumerate() {
        block.insert((i, i), p.clone());
    }
    for len in 2..=s {
        for i in 0..=s - len {
            let j = i + len - 1;
            let mut beta = DgaElement::zero(2);
            for m in i..j {
                beta = beta.minus(&model.wedge(&block[&(i, m)], &block[&(m + 1, j)])?);
            }
            let psi = prims.find(&beta).ok_or_else(|| DgaError::PrimitiveUnavailable {
                wedge: (i..j)
                    .map(|m| format!("φ{}∧φ{}", label(i, m), label(m + 1, j)))
                    .collect::<Vec<_>>()
                    .join(" + "),
            })?;
            block.insert((i, j), psi);
        }
    }
    let mut out = BarTensor::zero();
    // compositions of s: cut points as a bitmask over the s−1 gaps
    for mask in 0u64..(1u64 << (s.saturating_sub(1))) {
        let mut factors = Vec::new();
        let mut start = 0;
        for gap in 0..s {
            if gap == s - 1 || mask & (1 << gap) != 0 {
                factors.push(&block[&(start, gap)]);
                start = gap + 1;
            }
        }
        out = out.plus(&BarTensor::pure(&factors, Scalar::one()));
    }
    Ok(out)
}

fn label(i: usize, j: usize) -> String {
    if i == j {
        format!("{}", i + 1)
    } else {
        format!("{{{}..{}}}", i + 1, j + 1)
    }
}
