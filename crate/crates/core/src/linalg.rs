//! Exact linear algebra over Q, with right-hand sides allowed in `Scalar`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::scalar::Scalar;

/// A sparse rational row: column index to nonzero value.
pub type SparseRow = BTreeMap<usize, BigRational>;

/// Incremental row echelon form keyed by leading column.
#[derive(Debug, Default, Clone)]
pub struct Echelon {
    pivots: BTreeMap<usize, SparseRow>,
}

impl Echelon {
    pub fn new() -> Self {
        Echelon::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduce `row` against the current pivots; returns the remainder.
    pub fn reduce(&self, mut row: SparseRow) -> SparseRow {
        let mut floor = 0usize;
        loop {
            let lead = match row.range(floor..).next() {
                Some((&c, _)) => c,
                None => return row,
            };
            match self.pivots.get(&lead) {
                Some(p) => {
                    let f = row[&lead].clone();
                    for (c, v) in p {
                        let nv = row.get(c).cloned().unwrap_or_else(BigRational::zero) - &f * v;
                        if nv.is_zero() {
                            row.remove(c);
                        } else {
                            row.insert(*c, nv);
                        }
                    }
                }
                None => floor = lead + 1,
            }
        }
    }

    /// Insert a row; returns true if it increased the rank.
    pub fn insert(&mut self, row: SparseRow) -> bool {
        let mut r = self.reduce_leading(row);
        let lead = match r.keys().next() {
            Some(&c) => c,
            None => return false,
        };
        let inv = r[&lead].recip();
        for v in r.values_mut() {
            *v *= &inv;
        }
        self.pivots.insert(lead, r);
        true
    }

    fn reduce_leading(&self, mut row: SparseRow) -> SparseRow {
        loop {
            let lead = match row.keys().next() {
                Some(&c) => c,
                None => return row,
            };
            let p = match self.pivots.get(&lead) {
                Some(p) => p,
                None => return row,
            };
            let f = row[&lead].clone();
            for (c, v) in p {
                let nv = row.get(c).cloned().unwrap_or_else(BigRational::zero) - &f * v;
                if nv.is_zero() {
                    row.remove(c);
                } else {
                    row.insert(*c, nv);
                }
            }
        }
    }
}

/// Row echelon form over Z with primitive rows, for rank computations where
/// rational arithmetic would spend its time on gcds.
#[derive(Debug, Default, Clone)]
pub struct IntEchelon {
    pivots: BTreeMap<usize, BTreeMap<usize, BigInt>>,
}

impl IntEchelon {
    pub fn new() -> Self {
        IntEchelon::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn insert(&mut self, mut row: BTreeMap<usize, BigInt>) -> bool {
        loop {
            let (lead, a) = match row.iter().next() {
                Some((&c, v)) => (c, v.clone()),
                None => return false,
            };
            let Some(p) = self.pivots.get(&lead) else { break };
            let b = &p[&lead];
            let g = a.gcd(b);
            let (fa, fb) = (b / &g, &a / &g);
            for v in row.values_mut() {
                *v *= &fa;
            }
            for (c, v) in p {
                let e = row.entry(*c).or_insert_with(BigInt::zero);
                *e -= &fb * v;
                if e.is_zero() {
                    row.remove(c);
                }
            }
            make_primitive(&mut row);
        }
        make_primitive(&mut row);
        let lead = *row.keys().next().expect("nonempty row");
        self.pivots.insert(lead, row);
        true
    }
}

fn make_primitive(row: &mut BTreeMap<usize, BigInt>) {
    let g = row.values().fold(BigInt::zero(), |g, v| g.gcd(v));
    if !g.is_zero() && !g.is_one() {
        for v in row.values_mut() {
            *v /= &g;
        }
    }
}

/// Solve `A x = b` for a rational matrix `A` (rows × cols) and scalar right
/// hand side. Returns `None` when the system is inconsistent. Free variables
/// are set to zero.
pub fn solve(a: &[Vec<BigRational>], b: &[Scalar]) -> Option<Vec<Scalar>> {
    let rows = a.len();
    let cols = a.first().map(|r| r.len()).unwrap_or(0);
    let mut m: Vec<Vec<BigRational>> = a.to_vec();
    let mut rhs: Vec<Scalar> = b.to_vec();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        rhs.swap(r, p);
        let inv = m[r][c].recip();
        for v in m[r].iter_mut() {
            *v *= &inv;
        }
        rhs[r] = rhs[r].scale(&inv);
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let t = &f * &m[r][j];
                    m[i][j] -= t;
                }
                let t = rhs[r].scale(&f);
                rhs[i] -= &t;
            }
        }
        pivot_cols.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if rhs[r..].iter().any(|s| !s.is_zero()) {
        return None;
    }
    let mut x = vec![Scalar::zero(); cols];
    for (i, &c) in pivot_cols.iter().enumerate() {
        x[c] = rhs[i].clone();
    }
    Some(x)
}

/// Rank of a dense rational matrix.
pub fn rank(a: &[Vec<BigRational>]) -> usize {
    let mut e = Echelon::new();
    for row in a {
        let sparse: SparseRow = row
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, v)| (i, v.clone()))
            .collect();
        e.insert(sparse);
    }
    e.rank()
}

pub fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

pub fn q_one() -> BigRational {
    BigRational::one()
}
