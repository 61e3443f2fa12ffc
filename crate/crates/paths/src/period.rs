//! The period algebra: polynomials over [`Scalar`] in iterated-period symbols
//! `P[g₁,…,g_r; path]`, kept in shuffle normal form.
//!
//! A monomial holds at most one word per path key; products of symbols on the
//! same path are rewritten with the shuffle product, so two values are equal
//! exactly when their normal forms agree.

use std::collections::BTreeMap;
use std::fmt;

use nearby_core::Scalar;
use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Serialize, Serializer};

/// The path an iterated-period symbol is taken along.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PathKey {
    /// The fixed arc on a component from its base puncture to puncture `to`.
    Arc { component: usize, to: usize },
    /// The `index`-th fixed homology loop of a component, based at its base
    /// puncture.
    Loop { component: usize, index: usize },
    /// A symbol supplied from outside, e.g. a chart leg of a numeric scenario.
    Named(String),
}

impl fmt::Display for PathKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathKey::Arc { component, to } => write!(f, "D{component}:b→e{to}"),
            PathKey::Loop { component, index } => write!(f, "D{component}:loop{index}"),
            PathKey::Named(n) => write!(f, "{n}"),
        }
    }
}

pub type Word = Vec<String>;

/// Product of symbols, one word per path.
pub type PMonomial = BTreeMap<PathKey, Word>;

/// Shuffle product of two words with multiplicities.
pub fn shuffle(a: &[String], b: &[String]) -> BTreeMap<Word, i64> {
    let mut memo: BTreeMap<(usize, usize), BTreeMap<Word, i64>> = BTreeMap::new();
    shuffle_rec(a, b, 0, 0, &mut memo)
}

fn shuffle_rec(
    a: &[String],
    b: &[String],
    i: usize,
    j: usize,
    memo: &mut BTreeMap<(usize, usize), BTreeMap<Word, i64>>,
) -> BTreeMap<Word, i64> {
    if let Some(hit) = memo.get(&(i, j)) {
        return hit.clone();
    }
    let mut out = BTreeMap::new();
    if i == a.len() || j == b.len() {
        let rest: Word = a[i..].iter().chain(b[j..].iter()).cloned().collect();
        out.insert(rest, 1);
    } else {
        for (head, sub) in [(&a[i], shuffle_rec(a, b, i + 1, j, memo)), (&b[j], shuffle_rec(a, b, i, j + 1, memo))] {
            for (w, c) in sub {
                let mut v = Vec::with_capacity(w.len() + 1);
                v.push(head.clone());
                v.extend(w);
                *out.entry(v).or_insert(0) += c;
            }
        }
    }
    memo.insert((i, j), out.clone());
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PeriodValue {
    terms: BTreeMap<PMonomial, Scalar>,
}

impl PeriodValue {
    pub fn zero() -> Self {
        PeriodValue::default()
    }

    pub fn one() -> Self {
        PeriodValue::scalar(Scalar::one())
    }

    pub fn scalar(c: Scalar) -> Self {
        let mut v = PeriodValue::zero();
        v.add_term(PMonomial::new(), c);
        v
    }

    /// `P[word; key]`; the empty word is `1`.
    pub fn symbol(key: PathKey, word: Word) -> Self {
        if word.is_empty() {
            return PeriodValue::one();
        }
        let mut v = PeriodValue::zero();
        v.add_term(PMonomial::from([(key, word)]), Scalar::one());
        v
    }

    fn add_term(&mut self, m: PMonomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let s = &self.terms.get(&m).cloned().unwrap_or_default() + &c;
        if s.is_zero() {
            self.terms.remove(&m);
        } else {
            self.terms.insert(m, s);
        }
    }

    pub fn terms(&self) -> &BTreeMap<PMonomial, Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value as a scalar when no period symbol occurs.
    pub fn as_scalar(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => self.terms.get(&PMonomial::new()).cloned(),
            _ => None,
        }
    }

    pub fn add_assign(&mut self, o: &PeriodValue) {
        for (m, c) in &o.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn plus(&self, o: &PeriodValue) -> PeriodValue {
        let mut v = self.clone();
        v.add_assign(o);
        v
    }

    pub fn minus(&self, o: &PeriodValue) -> PeriodValue {
        self.plus(&o.scale(&Scalar::from_int(-1)))
    }

    pub fn scale(&self, c: &Scalar) -> PeriodValue {
        let mut v = PeriodValue::zero();
        for (m, s) in &self.terms {
            v.add_term(m.clone(), s * c);
        }
        v
    }

    pub fn mul(&self, o: &PeriodValue) -> PeriodValue {
        let mut v = PeriodValue::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                let c = c1 * c2;
                for (m, k) in mul_monomials(m1, m2) {
                    v.add_term(m, c.scale(&BigRational::from_integer(k.into())));
                }
            }
        }
        v
    }

    /// Applies `P[e; key] = c` for the letter rules of each path key, leaving
    /// the remaining symbols in normal form.
    pub fn normalize_with<'r, F>(&self, mut rules_of: F) -> PeriodValue
    where
        F: FnMut(&PathKey) -> Option<&'r BTreeMap<String, Scalar>>,
    {
        let mut memos: BTreeMap<PathKey, BTreeMap<Word, BTreeMap<Word, Scalar>>> = BTreeMap::new();
        let mut v = PeriodValue::zero();
        for (m, c) in &self.terms {
            let mut parts: Vec<(PMonomial, Scalar)> = vec![(PMonomial::new(), c.clone())];
            for (k, w) in m {
                let combo = match rules_of(k) {
                    Some(r) => reduce_word(w, r, memos.entry(k.clone()).or_default()),
                    None => BTreeMap::from([(w.clone(), Scalar::one())]),
                };
                let mut next = Vec::new();
                for (pm, pc) in &parts {
                    for (word, x) in &combo {
                        let mut pm = pm.clone();
                        if !word.is_empty() {
                            pm.insert(k.clone(), word.clone());
                        }
                        next.push((pm, pc * x));
                    }
                }
                parts = next;
            }
            for (pm, pc) in parts {
                v.add_term(pm, pc);
            }
        }
        v
    }

    /// Numeric value given complex values for the scalar symbols (`tau` is
    /// fixed to `2πi`) and for the period symbols.
    pub fn eval<S, P>(&self, mut scalar_value: S, mut symbol_value: P) -> Complex64
    where
        S: FnMut(&str) -> Complex64,
        P: FnMut(&PathKey, &[String]) -> Complex64,
    {
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let (re, im) = c.eval_complex(|n| {
                let z = if n == nearby_core::TAU {
                    Complex64::new(0.0, 2.0 * std::f64::consts::PI)
                } else {
                    scalar_value(n)
                };
                (z.re, z.im)
            });
            let mut z = Complex64::new(re, im);
            for (k, w) in m {
                z *= symbol_value(k, w);
            }
            acc += z;
        }
        acc
    }
}

/// Lyndon factorization `w = l₁l₂⋯l_k` with `l₁ ≥ l₂ ≥ ⋯ ≥ l_k` (Duval).
pub fn lyndon_factors(w: &[String]) -> Vec<Word> {
    let mut out = Vec::new();
    let n = w.len();
    let mut i = 0;
    while i < n {
        let (mut j, mut k) = (i + 1, i);
        while j < n && w[k] <= w[j] {
            k = if w[k] < w[j] { i } else { k + 1 };
            j += 1;
        }
        while i <= k {
            out.push(w[i..i + j - k].to_vec());
            i += j - k;
        }
    }
    out
}

fn shuffle_all(factors: &[Word]) -> BTreeMap<Word, i64> {
    let mut acc = BTreeMap::from([(Word::new(), 1i64)]);
    for f in factors {
        let mut next = BTreeMap::new();
        for (w, c) in &acc {
            for (v, k) in shuffle(w, f) {
                *next.entry(v).or_insert(0) += c * k;
            }
        }
        acc = next;
    }
    acc
}

/// Normal form of `P[w]` modulo `P[e] = c_e` for the letters in `rules`.
///
/// The shuffle algebra is free on Lyndon words; the quotient keeps the words
/// whose Lyndon factorization has no single-letter factor from `rules`, and
/// the product of the factors of `w` is `w` plus lexicographically smaller
/// words, which gives the recursion.
pub fn reduce_word(
    w: &[String],
    rules: &BTreeMap<String, Scalar>,
    memo: &mut BTreeMap<Word, BTreeMap<Word, Scalar>>,
) -> BTreeMap<Word, Scalar> {
    if let Some(hit) = memo.get(w) {
        return hit.clone();
    }
    let factors = lyndon_factors(w);
    let is_rule = |f: &Word| f.len() == 1 && rules.contains_key(&f[0]);
    let out = if !factors.iter().any(is_rule) {
        BTreeMap::from([(w.to_vec(), Scalar::one())])
    } else {
        let full = shuffle_all(&factors);
        let lead = full[w];
        let mut acc: BTreeMap<Word, Scalar> = BTreeMap::new();
        let add = |acc: &mut BTreeMap<Word, Scalar>, v: Word, c: Scalar| {
            let s = &acc.remove(&v).unwrap_or_default() + &c;
            if !s.is_zero() {
                acc.insert(v, s);
            }
        };
        let mut c = Scalar::one();
        let mut rest = Vec::new();
        for f in &factors {
            if is_rule(f) {
                c = &c * &rules[&f[0]];
            } else {
                rest.push(f.clone());
            }
        }
        if !c.is_zero() {
            for (u, k) in shuffle_all(&rest) {
                for (v, x) in reduce_word(&u, rules, memo) {
                    add(&mut acc, v, &x * &c.scale(&BigRational::from_integer(k.into())));
                }
            }
        }
        for (u, k) in full {
            if u.as_slice() == w || k == 0 {
                continue;
            }
            debug_assert!(u.as_slice() < w);
            for (v, x) in reduce_word(&u, rules, memo) {
                add(&mut acc, v, x.scale(&BigRational::from_integer((-k).into())));
            }
        }
        let inv = BigRational::new(1.into(), lead.into());
        acc.into_iter().map(|(v, x)| (v, x.scale(&inv))).collect()
    };
    memo.insert(w.to_vec(), out.clone());
    out
}

fn mul_monomials(a: &PMonomial, b: &PMonomial) -> Vec<(PMonomial, i64)> {
    let mut out: Vec<(PMonomial, i64)> = vec![(a.clone(), 1)];
    for (k, w) in b {
        let mut next = Vec::new();
        for (m, c) in out {
            match m.get(k) {
                None => {
                    let mut m = m;
                    m.insert(k.clone(), w.clone());
                    next.push((m, c));
                }
                Some(v) => {
                    for (s, n) in shuffle(v, w) {
                        let mut m2 = m.clone();
                        m2.insert(k.clone(), s);
                        next.push((m2, c * n));
                    }
                }
            }
        }
        out = next;
    }
    out
}

impl fmt::Display for PeriodValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if m.is_empty() {
                write!(f, "{c}")?;
                continue;
            }
            if !c.is_one() {
                write!(f, "({c})·")?;
            }
            let parts: Vec<String> = m.iter().map(|(k, w)| format!("P[{}; {k}]", w.join(","))).collect();
            write!(f, "{}", parts.join("·"))?;
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct TermOut<'a> {
    coeff: &'a Scalar,
    symbols: Vec<SymbolOut<'a>>,
}

#[derive(Serialize)]
struct SymbolOut<'a> {
    path: &'a PathKey,
    word: &'a Word,
}

impl Serialize for PeriodValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let out: Vec<TermOut> = self
            .terms
            .iter()
            .map(|(m, c)| TermOut { coeff: c, symbols: m.iter().map(|(k, w)| SymbolOut { path: k, word: w }).collect() })
            .collect();
        out.serialize(s)
    }
}
