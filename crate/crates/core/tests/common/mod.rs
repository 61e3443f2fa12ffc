#![allow(dead_code)]

pub mod blowup;

use nearby_core::curve::{BranchSpec, CurveSpec};
use nearby_core::poly::Poly2;
use rand::seq::SliceRandom;
use rand::Rng;

/// Multiplicity sequence by repeated division, written independently of the
/// library for the corpus generator.
pub fn euclid_mults(pairs: &[(u64, u64)]) -> Vec<u64> {
    let m: u64 = pairs.iter().map(|p| p.0).product();
    let mut betas = Vec::new();
    let mut d = 1;
    for &(mi, ni) in pairs {
        d *= mi;
        betas.push(ni * (m / d));
    }
    let mut out = Vec::new();
    let mut e = m;
    let mut prev = 0;
    for b in betas {
        let (mut num, mut den) = (b - prev, e);
        while den != 0 {
            out.extend(std::iter::repeat(den).take((num / den) as usize));
            let r = num % den;
            num = den;
            den = r;
        }
        e = gcd(e, b);
        prev = b;
    }
    out
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn random_pairs<R: Rng>(rng: &mut R) -> Vec<(u64, u64)> {
    let g = *[0usize, 0, 1, 1, 1, 2].choose(rng).unwrap();
    let mut pairs = Vec::new();
    let mut d = 1u64;
    let mut prev_beta_num = 1u64; // previous exponent as a fraction over d
    let mut prev_d = 1u64;
    for _ in 0..g {
        let m = *[2u64, 3].choose(rng).unwrap();
        let nd = d * m;
        loop {
            let n = rng.gen_range(1..=4 * nd);
            // exponent n/nd must exceed the previous one and be coprime to m
            if gcd(n, m) == 1 && n * prev_d > prev_beta_num * nd {
                pairs.push((m, n));
                prev_beta_num = n;
                prev_d = nd;
                break;
            }
        }
        d = nd;
    }
    pairs
}

fn padded(pairs: &[(u64, u64)], len: usize) -> Vec<u64> {
    let mut v = euclid_mults(pairs);
    v.resize(len.max(v.len()), 1);
    v
}

/// Random combinatorial curve: branches with random Puiseux pairs glued along
/// a random contact tree. Intersection numbers come from Noether's formula.
/// Some outputs are infeasible; callers filter with the library.
pub fn random_curve<R: Rng>(rng: &mut R, max_branches: usize) -> CurveSpec {
    let r = rng.gen_range(1..=max_branches);
    let pairs: Vec<Vec<(u64, u64)>> = (0..r).map(|_| random_pairs(rng)).collect();
    let mut depth = vec![vec![0usize; r]; r];
    for j in 1..r {
        let i = rng.gen_range(0..j);
        let c = rng.gen_range(1..=4);
        depth[i][j] = c;
        depth[j][i] = c;
        for k in 0..j {
            if k != i {
                let v = c.min(depth[i][k]);
                depth[j][k] = v;
                depth[k][j] = v;
            }
        }
    }
    let mut inter = vec![vec![0u64; r]; r];
    for i in 0..r {
        for j in 0..r {
            if i != j {
                let c = depth[i][j];
                let a = padded(&pairs[i], c);
                let b = padded(&pairs[j], c);
                inter[i][j] = (0..c).map(|t| a[t] * b[t]).sum();
            }
        }
    }
    let branches = pairs
        .iter()
        .map(|p| nearby_core::curve::exponents_from_pairs(p).unwrap())
        .collect();
    CurveSpec::new(branches, inter, None).unwrap()
}

/// A factor of a polynomial-mode curve and its branch data.
#[derive(Clone, Debug)]
pub enum Factor {
    /// `y − p(x)`
    Smooth(Vec<i64>),
    /// `(y − p(x))² − c·x³`
    Cusp(Vec<i64>, i64),
}

fn upoly_text(p: &[i64]) -> String {
    let mut s = String::from("0");
    for (i, c) in p.iter().enumerate() {
        if *c != 0 {
            s.push_str(&format!("+({c})*x^{}", i + 1));
        }
    }
    s
}

fn ord_diff(p: &[i64], q: &[i64]) -> Option<u64> {
    let n = p.len().max(q.len());
    (0..n)
        .find(|&i| p.get(i).copied().unwrap_or(0) != q.get(i).copied().unwrap_or(0))
        .map(|i| i as u64 + 1)
}

impl Factor {
    pub fn text(&self) -> String {
        match self {
            Factor::Smooth(p) => format!("(y-({}))", upoly_text(p)),
            Factor::Cusp(p, c) => format!("((y-({}))^2-({c})*x^3)", upoly_text(p)),
        }
    }

    pub fn branch(&self) -> BranchSpec {
        match self {
            Factor::Smooth(_) => BranchSpec::smooth(),
            Factor::Cusp(..) => BranchSpec::parse(&["3/2"]).unwrap(),
        }
    }

    /// Intersection multiplicity by substituting a parametrization.
    pub fn intersection(&self, o: &Factor) -> Option<u64> {
        match (self, o) {
            (Factor::Smooth(p), Factor::Smooth(q)) => ord_diff(p, q),
            (Factor::Smooth(p), Factor::Cusp(q, _)) | (Factor::Cusp(q, _), Factor::Smooth(p)) => {
                Some(ord_diff(p, q).map_or(3, |k| (2 * k).min(3)))
            }
            (Factor::Cusp(p, a), Factor::Cusp(q, b)) => match ord_diff(p, q) {
                None if a != b => Some(6),
                None => None,
                Some(k) if a == b => Some(2 * k + (2 * k).min(3)),
                Some(k) => Some((4 * k).min(2 * k + 3).min(6)),
            },
        }
    }
}

/// Random product of distinct smooth and cuspidal factors through the origin.
pub fn random_factors<R: Rng>(rng: &mut R) -> Option<(CurveSpec, Vec<Factor>)> {
    let r = rng.gen_range(1..=3);
    let mut fs: Vec<Factor> = Vec::new();
    for _ in 0..r {
        let len = rng.gen_range(1..=3);
        let p: Vec<i64> = (0..len).map(|_| rng.gen_range(-2..=2)).collect();
        let f = if rng.gen_bool(0.3) {
            Factor::Cusp(p, *[1, 2, 4].choose(rng).unwrap())
        } else {
            Factor::Smooth(p)
        };
        fs.push(f);
    }
    let mut inter = vec![vec![0u64; r]; r];
    for i in 0..r {
        for j in 0..r {
            if i != j {
                inter[i][j] = fs[i].intersection(&fs[j])?;
            }
        }
    }
    let text = fs.iter().map(|f| f.text()).collect::<Vec<_>>().join("*");
    let poly = Poly2::parse(&text).ok()?;
    let branches = fs.iter().map(|f| f.branch()).collect();
    let c = CurveSpec::new(branches, inter, Some(poly)).ok()?;
    Some((c, fs))
}

/// Random connected simple graph with `r` disks attached to distinct or
/// shared compact vertices.
pub fn random_graph<R: Rng>(rng: &mut R) -> nearby_core::graph::MarkedGraph {
    use nearby_core::graph::{build, MarkedGraph};
    let nc = rng.gen_range(1..=6);
    let r = rng.gen_range(1..=3);
    let mut vertices = Vec::new();
    for b in 0..r {
        vertices.push(build::disk(b, b));
    }
    for i in 0..nc {
        vertices.push(build::compact(r + i, rng.gen_range(0..=2)));
    }
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for i in 1..nc {
        let j = rng.gen_range(0..i);
        pairs.push((r + j, r + i));
    }
    for _ in 0..rng.gen_range(0..=3) {
        let a = rng.gen_range(0..nc);
        let b = rng.gen_range(0..nc);
        let (a, b) = (r + a.min(b), r + a.max(b));
        if a != b && !pairs.contains(&(a, b)) {
            pairs.push((a, b));
        }
    }
    for b in 0..r {
        pairs.push((b, r + rng.gen_range(0..nc)));
    }
    MarkedGraph { vertices, edges: build::edges(&pairs) }
}
