//! Exact line and iterated integrals along path words.
//!
//! A path word is cut into atomic segments, every segment is integrated in
//! closed form, and the pieces are glued with the composition law
//! `∫_{α⋆β} φ₁⋯φ_r = Σ_m ∫_α φ₁⋯φ_m · ∫_β φ_{m+1}⋯φ_r`.
//!
//! - A crossing of edge `e` integrates the `dξ` coefficients at `u = u₀`
//!   (`u₀ = 0` in adapted coordinates) over `0 < ξ₁ < ⋯ < ξ_r < 1`.
//! - `n` turns around a puncture see only residues:
//!   `∏ (2πi·n·Res φ_j) / r!`.
//! - An arc from `p` to `q` on a component is `(b→p)⁻¹ ⋆ (b→q)` for the fixed
//!   arcs from the base puncture `b` (the smallest incident edge id); these and
//!   the fixed homology loops give period symbols.
//!
//! Surface generators are turned into letters after splitting off exact
//! parts `d g` of declared function generators; a length-one `d g` on an arc
//! evaluates to the difference of the declared puncture values and vanishes on
//! loops.

use std::collections::{BTreeMap, HashMap};

use nearby_core::Scalar;
use nearby_dga::bar::{is_chen_closed, lambda_n_bar};
use nearby_dga::model::ONE;
use nearby_dga::{BarTensor, Coord, DgaElement, Model};
use num_rational::BigRational;

use crate::period::{PathKey, PeriodValue};
use crate::word::{check_based, trace, PathWord, Position};
use crate::PathError;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Segment {
    Cross { edge: usize, dir: i8 },
    Wind { comp: usize, puncture: usize, n: i64 },
    FromBase { comp: usize, to: usize, inverse: bool },
    Loop { comp: usize, index: usize, inverse: bool },
}

type Letters = BTreeMap<String, Vec<(String, Scalar)>>;

pub struct Integrator<'a> {
    model: &'a Model,
    /// Value of `u` on crossings.
    u0: Scalar,
    letters: HashMap<usize, Letters>,
    rules: HashMap<PathKey, BTreeMap<String, Scalar>>,
    memo: HashMap<(Segment, Vec<Coord>), PeriodValue>,
}

fn exact_letter(g: &str) -> String {
    format!("d({g})")
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

impl<'a> Integrator<'a> {
    pub fn new(model: &'a Model) -> Self {
        Integrator { model, u0: Scalar::zero(), letters: HashMap::new(), rules: HashMap::new(), memo: HashMap::new() }
    }

    /// Crossings evaluated at `u = u₀`; `u₀ = −log λ` gives paths over `λ·v⃗`.
    pub fn with_u(model: &'a Model, u0: Scalar) -> Self {
        Integrator { model, u0, letters: HashMap::new(), rules: HashMap::new(), memo: HashMap::new() }
    }

    pub fn model(&self) -> &Model {
        self.model
    }

    fn base_puncture(&self, comp: usize) -> Result<usize, PathError> {
        self.model
            .graph
            .incident(comp)
            .iter()
            .map(|e| e.id)
            .min()
            .ok_or_else(|| PathError::Invalid { index: 0, reason: format!("D{comp} has no punctures") })
    }

    /// Reduced row echelon form of the exact surface 1-forms of a component.
    fn letters_of(&mut self, comp: usize) -> Result<&Letters, PathError> {
        if !self.letters.contains_key(&comp) {
            let s = self.model.surface(comp)?;
            let mut rows: Vec<(BTreeMap<String, BigRational>, BTreeMap<String, BigRational>)> = Vec::new();
            for g in s.generators().filter(|g| g.degree == 0 && g.name != ONE) {
                let mut vec = BTreeMap::new();
                let mut rational = true;
                for (n, c) in &g.differential {
                    match c.as_rational() {
                        Some(x) => {
                            vec.insert(n.clone(), x);
                        }
                        None => rational = false,
                    }
                }
                if rational && !vec.is_empty() {
                    rows.push((vec, BTreeMap::from([(g.name.clone(), q(1))])));
                }
            }
            // Gauss-Jordan
            let mut done: Vec<(String, BTreeMap<String, BigRational>, BTreeMap<String, BigRational>)> = Vec::new();
            for (mut vec, mut comb) in rows {
                for (p, pv, pc) in &done {
                    if let Some(a) = vec.get(p).cloned() {
                        axpy(&mut vec, &-a.clone(), pv);
                        axpy(&mut comb, &-a, pc);
                    }
                }
                let Some((pivot, lead)) = vec.iter().next().map(|(k, v)| (k.clone(), v.clone())) else { continue };
                let inv = q(1) / lead;
                vec.values_mut().for_each(|v| *v = &*v * &inv);
                comb.values_mut().for_each(|v| *v = &*v * &inv);
                for (_, ov, oc) in done.iter_mut() {
                    if let Some(a) = ov.get(&pivot).cloned() {
                        axpy(ov, &-a.clone(), &vec);
                        axpy(oc, &-a, &comb);
                    }
                }
                done.push((pivot, vec, comb));
            }
            let mut map = Letters::new();
            for (pivot, vec, comb) in done {
                let mut out: Vec<(String, Scalar)> =
                    comb.iter().map(|(g, c)| (exact_letter(g), Scalar::from_ratio(c.clone()))).collect();
                for (n, c) in &vec {
                    if *n != pivot {
                        out.push((n.clone(), Scalar::from_ratio(-c.clone())));
                    }
                }
                map.insert(pivot, out);
            }
            self.letters.insert(comp, map);
        }
        Ok(&self.letters[&comp])
    }

    fn letter_expansion(&mut self, comp: usize, name: &str) -> Result<Vec<(String, Scalar)>, PathError> {
        Ok(self.letters_of(comp)?.get(name).cloned().unwrap_or_else(|| vec![(name.to_string(), Scalar::one())]))
    }

    fn segments(&self, word: &PathWord, start: Position) -> Result<Vec<Segment>, PathError> {
        let pos = trace(self.model, word, start)?;
        let mut out = Vec::new();
        for (i, ev) in word.events.iter().enumerate() {
            let at = pos[i];
            match *ev {
                crate::word::Event::Cross { edge, dir } => out.push(Segment::Cross { edge, dir }),
                crate::word::Event::Wind { comp, edge, n } => {
                    if n != 0 {
                        out.push(Segment::Wind { comp, puncture: edge, n });
                    }
                }
                crate::word::Event::Arc { comp, from, to } => {
                    if from != to {
                        let b = self.base_puncture(comp)?;
                        if from != b {
                            out.push(Segment::FromBase { comp, to: from, inverse: true });
                        }
                        if to != b {
                            out.push(Segment::FromBase { comp, to, inverse: false });
                        }
                    }
                }
                crate::word::Event::Loop { comp, gen, n } => {
                    if n != 0 {
                        let b = self.base_puncture(comp)?;
                        if at.puncture != b {
                            out.push(Segment::FromBase { comp, to: at.puncture, inverse: true });
                        }
                        for _ in 0..n.unsigned_abs() {
                            out.push(Segment::Loop { comp, index: gen, inverse: n < 0 });
                        }
                        if at.puncture != b {
                            out.push(Segment::FromBase { comp, to: at.puncture, inverse: false });
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Iterated integral of the coordinates `w` over one segment.
    fn segment_value(&mut self, w: &[Coord], seg: &Segment) -> Result<PeriodValue, PathError> {
        if w.is_empty() {
            return Ok(PeriodValue::one());
        }
        let r = w.len();
        match seg {
            Segment::Cross { edge, dir } => {
                let mut exps = Vec::with_capacity(r);
                let mut coeff = Scalar::one();
                for c in w {
                    match c {
                        Coord::Edge { form: 1, edge: e, slot: 2, xi, u, .. } if e == edge => {
                            exps.push(*xi);
                            if *u > 0 {
                                coeff = &coeff * &self.u0.pow(*u as i32)?;
                            }
                        }
                        _ => return Ok(PeriodValue::zero()),
                    }
                }
                if coeff.is_zero() {
                    return Ok(PeriodValue::zero());
                }
                if *dir < 0 {
                    exps.reverse();
                    if r % 2 == 1 {
                        coeff = -&coeff;
                    }
                }
                // ∫_{0<ξ₁<⋯<ξ_r<1} ∏ ξ_j^{a_j} = ∏_k 1/(a₁+⋯+a_k+k)
                let mut acc = q(1);
                let mut s = 0i64;
                for (k, a) in exps.iter().enumerate() {
                    s += *a as i64 + 1;
                    debug_assert!(s >= k as i64 + 1);
                    acc /= q(s);
                }
                Ok(PeriodValue::scalar(coeff.scale(&acc)))
            }
            Segment::Wind { comp, puncture, n } => {
                let s = self.model.surface(*comp)?;
                let mut coeff = Scalar::one();
                for c in w {
                    match c {
                        Coord::Surface { component, name } if component == comp => {
                            let res = s.generator(name).and_then(|g| g.residues.get(puncture)).cloned().unwrap_or_default();
                            coeff = &coeff * &res;
                        }
                        _ => return Ok(PeriodValue::zero()),
                    }
                }
                let mut fact = q(1);
                for k in 1..=r as i64 {
                    fact *= q(k);
                }
                let turns = Scalar::from_int(*n).pow(r as i32)?;
                Ok(PeriodValue::scalar(
                    (&(&coeff * &turns) * &Scalar::tau_pow(r as i32)).scale(&(q(1) / fact)),
                ))
            }
            Segment::FromBase { comp, to, inverse } => {
                let key = PathKey::Arc { component: *comp, to: *to };
                self.symbolic(w, *comp, key, *inverse)
            }
            Segment::Loop { comp, index, inverse } => {
                let key = PathKey::Loop { component: *comp, index: *index };
                self.symbolic(w, *comp, key, *inverse)
            }
        }
    }

    fn symbolic(
        &mut self,
        w: &[Coord],
        comp: usize,
        key: PathKey,
        inverse: bool,
    ) -> Result<PeriodValue, PathError> {
        let mut expanded: Vec<Vec<(String, Scalar)>> = Vec::with_capacity(w.len());
        for c in w {
            match c {
                Coord::Surface { component, name } if *component == comp => {
                    expanded.push(self.letter_expansion(comp, name)?);
                }
                _ => return Ok(PeriodValue::zero()),
            }
        }
        if inverse {
            expanded.reverse();
        }
        let sign = if inverse && w.len() % 2 == 1 { Scalar::from_int(-1) } else { Scalar::one() };
        let mut words: Vec<(Vec<String>, Scalar)> = vec![(Vec::new(), sign)];
        for choices in &expanded {
            let mut next = Vec::new();
            for (wd, c) in &words {
                for (l, x) in choices {
                    let mut v = wd.clone();
                    v.push(l.clone());
                    next.push((v, c * x));
                }
            }
            words = next;
        }
        let mut out = PeriodValue::zero();
        for (wd, c) in words {
            out.add_assign(&PeriodValue::symbol(key.clone(), wd).scale(&c));
        }
        Ok(out)
    }

    /// Values of the exact letters along a path key: `g(q) − g(b)` on arcs and
    /// `0` on loops.
    fn rules_for(&mut self, key: &PathKey) -> Result<(), PathError> {
        if self.rules.contains_key(key) {
            return Ok(());
        }
        let (comp, to) = match key {
            PathKey::Arc { component, to } => (*component, Some(*to)),
            PathKey::Loop { component, .. } => (*component, None),
            PathKey::Named(_) => {
                self.rules.insert(key.clone(), BTreeMap::new());
                return Ok(());
            }
        };
        let b = self.base_puncture(comp)?;
        let names: Vec<String> = self
            .letters_of(comp)?
            .values()
            .flatten()
            .filter(|(l, _)| l.starts_with("d("))
            .map(|(l, _)| l[2..l.len() - 1].to_string())
            .collect();
        let s = self.model.surface(comp)?;
        let mut map = BTreeMap::new();
        for g in names {
            let c = match (to, s.generator(&g)) {
                (Some(q), Some(gen)) => {
                    let at = |p: usize| gen.values.get(&p).cloned().unwrap_or_default();
                    &at(q) - &at(b)
                }
                _ => Scalar::zero(),
            };
            map.insert(exact_letter(&g), c);
        }
        self.rules.insert(key.clone(), map);
        Ok(())
    }

    /// Canonical form of a value produced by this integrator: exact letters
    /// are replaced by endpoint differences where the shuffle relations allow.
    pub fn normalize(&mut self, v: &PeriodValue) -> Result<PeriodValue, PathError> {
        for m in v.terms().keys() {
            for k in m.keys() {
                self.rules_for(k)?;
            }
        }
        let rules = &self.rules;
        Ok(v.normalize_with(|k| rules.get(k).filter(|r| !r.is_empty())))
    }

    /// The segment calculus applied to `t` without any closedness check.
    pub fn integrate_unchecked(&mut self, t: &BarTensor, word: &PathWord, start: Position) -> Result<PeriodValue, PathError> {
        let segs = self.segments(word, start)?;
        let mut out = PeriodValue::zero();
        for (w, c) in t.terms() {
            if !w.iter().all(|x| segs.iter().any(|seg| fits(x, seg))) {
                continue;
            }
            let r = w.len();
            let mut dp: Vec<PeriodValue> = (0..=r).map(|m| if m == 0 { PeriodValue::one() } else { PeriodValue::zero() }).collect();
            for seg in &segs {
                let fits: Vec<bool> = w.iter().map(|x| fits(x, seg)).collect();
                if !fits.contains(&true) {
                    continue;
                }
                let mut next = dp.clone();
                for lo in 0..r {
                    if dp[lo].is_zero() {
                        continue;
                    }
                    for hi in lo + 1..=r {
                        if !fits[hi - 1] {
                            break;
                        }
                        let key = (seg.clone(), w[lo..hi].to_vec());
                        let v = match self.memo.get(&key) {
                            Some(v) => v.clone(),
                            None => {
                                let v = self.segment_value(&w[lo..hi], seg)?;
                                self.memo.insert(key, v.clone());
                                v
                            }
                        };
                        if !v.is_zero() {
                            next[hi].add_assign(&dp[lo].mul(&v));
                        }
                    }
                }
                dp = next;
            }
            out.add_assign(&dp[r].scale(c));
        }
        self.normalize(&out)
    }
}

/// Whether a coordinate can contribute on a segment at all.
fn fits(c: &Coord, seg: &Segment) -> bool {
    match (c, seg) {
        (Coord::Edge { form: 1, edge, slot: 2, .. }, Segment::Cross { edge: e, .. }) => edge == e,
        (Coord::Surface { component, .. }, Segment::Wind { comp, .. })
        | (Coord::Surface { component, .. }, Segment::FromBase { comp, .. })
        | (Coord::Surface { component, .. }, Segment::Loop { comp, .. }) => component == comp,
        _ => false,
    }
}

fn axpy(t: &mut BTreeMap<String, BigRational>, a: &BigRational, x: &BTreeMap<String, BigRational>) {
    for (k, v) in x {
        let s = t.get(k).cloned().unwrap_or_else(|| q(0)) + a * v;
        if s == q(0) {
            t.remove(k);
        } else {
            t.insert(k.clone(), s);
        }
    }
}

/// `∫_γ φ` for a closed compatible `φ` along a based path.
pub fn integrate_closed(model: &Model, phi: &DgaElement, gamma: &PathWord) -> Result<PeriodValue, PathError> {
    if phi.degree != 1 || !model.d(phi)?.is_zero() || !model.is_compatible(phi)? {
        return Err(PathError::NotClosed);
    }
    let pos = check_based(model, gamma)?;
    Integrator::new(model).integrate_unchecked(&BarTensor::pure(&[phi], Scalar::one()), gamma, pos[0])
}

/// `∫_γ φ` along an open path word starting at `start`.
pub fn integrate_closed_open(
    model: &Model,
    phi: &DgaElement,
    gamma: &PathWord,
    start: Position,
) -> Result<PeriodValue, PathError> {
    if phi.degree != 1 || !model.d(phi)?.is_zero() || !model.is_compatible(phi)? {
        return Err(PathError::NotClosed);
    }
    Integrator::new(model).integrate_unchecked(&BarTensor::pure(&[phi], Scalar::one()), gamma, start)
}

/// Iterated integral of a Chen-closed tensor along a based path.
pub fn iterated_integral(model: &Model, t: &BarTensor, gamma: &PathWord) -> Result<PeriodValue, PathError> {
    if !is_chen_closed(model, t)? {
        return Err(PathError::NotChenClosed);
    }
    let pos = check_based(model, gamma)?;
    Integrator::new(model).integrate_unchecked(t, gamma, pos[0])
}

/// The integral of `t` along the path over `λ·v⃗` corresponding to `γ`,
/// computed as `∫_γ λ^N t`.
pub fn vary_tangent(model: &Model, t: &BarTensor, gamma: &PathWord, log_lambda: &Scalar) -> Result<PeriodValue, PathError> {
    let moved = lambda_n_bar(model, t, log_lambda)?;
    iterated_integral(model, &moved, gamma)
}

/// The same integral evaluated directly: crossings at `u = −log λ`.
pub fn integrate_over_scaled_vector(
    model: &Model,
    t: &BarTensor,
    gamma: &PathWord,
    log_lambda: &Scalar,
) -> Result<PeriodValue, PathError> {
    if !is_chen_closed(model, t)? {
        return Err(PathError::NotChenClosed);
    }
    let pos = check_based(model, gamma)?;
    Integrator::with_u(model, -log_lambda).integrate_unchecked(t, gamma, pos[0])
}

/// An integer combination of products `(γ₁−1)⋯(γ_s−1)` in the group ring.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GroupRingCombo {
    pub terms: Vec<(i64, Vec<PathWord>)>,
}

impl GroupRingCombo {
    pub fn single(loops: Vec<PathWord>) -> Self {
        GroupRingCombo { terms: vec![(1, loops)] }
    }
}

/// `⟨t, Σ c·(γ₁−1)⋯(γ_s−1)⟩`, extended multilinearly from iterated integrals.
pub fn groupring_pairing(model: &Model, t: &BarTensor, combo: &GroupRingCombo) -> Result<PeriodValue, PathError> {
    if !is_chen_closed(model, t)? {
        return Err(PathError::NotChenClosed);
    }
    pairing_unchecked(model, t, combo)
}

/// The pairing without the closedness check.
pub fn pairing_unchecked(model: &Model, t: &BarTensor, combo: &GroupRingCombo) -> Result<PeriodValue, PathError> {
    let base = crate::word::base_position(model)?;
    let mut integ = Integrator::new(model);
    let mut out = PeriodValue::zero();
    for (c, loops) in &combo.terms {
        for l in loops {
            check_based(model, l)?;
        }
        let s = loops.len();
        for mask in 0u64..(1u64 << s) {
            let mut path = PathWord::default();
            for (j, l) in loops.iter().enumerate() {
                if mask & (1 << j) != 0 {
                    path = path.compose(l);
                }
            }
            let sign = if (s - mask.count_ones() as usize) % 2 == 0 { *c } else { -*c };
            let v = integ.integrate_unchecked(t, &path, base)?;
            out.add_assign(&v.scale(&Scalar::from_int(sign)));
        }
    }
    Ok(out)
}
