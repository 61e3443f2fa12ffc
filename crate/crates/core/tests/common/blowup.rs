//! Chart-level blow-up oracle. Works directly on polynomials: at each point
//! the total transform is `x^a y^b f` with the exceptional curves along the
//! axes; blow up while the configuration is not normal crossings.

use std::collections::BTreeMap;

use nearby_core::poly::Poly2;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Default, Clone, PartialEq)]
pub struct BlowupTrace {
    /// Multiplicity of the total transform along each exceptional curve.
    pub exceptional: Vec<u64>,
    /// Multiplicity of the strict transform at each blown-up point.
    pub point_mults: Vec<u64>,
}

fn lowest_form(f: &Poly2) -> (u32, BTreeMap<u32, BigRational>) {
    let m = f.order().unwrap_or(0);
    let form = f
        .terms()
        .iter()
        .filter(|((i, j), _)| i + j == m)
        .map(|(&(_, j), c)| (j, c.clone()))
        .collect();
    (m, form)
}

fn binom(n: u32, k: u32) -> BigInt {
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

/// `f(x, x(t + t0)) / x^m` in coordinates `(x, t)`.
fn chart_y(f: &Poly2, m: u32, t0: &BigRational) -> Poly2 {
    let mut out = Poly2::zero();
    for (&(i, j), c) in f.terms() {
        for k in 0..=j {
            let coeff = c
                * BigRational::from_integer(binom(j, k))
                * num_traits::pow(t0.clone(), (j - k) as usize);
            if !coeff.is_zero() {
                out = out.add(&Poly2::term(coeff, i + j - m, k));
            }
        }
    }
    out
}

/// `f(y s, y) / y^m` in coordinates `(s, y)`.
fn chart_x(f: &Poly2, m: u32) -> Poly2 {
    let mut out = Poly2::zero();
    for (&(i, j), c) in f.terms() {
        out = out.add(&Poly2::term(c.clone(), i, i + j - m));
    }
    out
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut v = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            v.push(d.clone());
            v.push(&n / &d);
        }
        d += 1;
    }
    v
}

fn divide_linear(p: &[BigRational], t: &BigRational) -> Vec<BigRational> {
    // synthetic division by (z − t); remainder assumed zero
    let n = p.len() - 1;
    let mut q = vec![BigRational::zero(); n];
    let mut acc = BigRational::zero();
    for j in (1..=n).rev() {
        acc = &acc * t + &p[j];
        q[j - 1] = acc.clone();
    }
    q
}

/// Rational roots of `Σ c_j t^j`; panics unless it splits over Q.
fn rational_roots(form: &BTreeMap<u32, BigRational>) -> Vec<BigRational> {
    let deg = *form.keys().last().unwrap_or(&0) as usize;
    let mut p = vec![BigRational::zero(); deg + 1];
    for (&j, c) in form {
        p[j as usize] = c.clone();
    }
    let mut roots: Vec<BigRational> = Vec::new();
    let eval = |p: &[BigRational], t: &BigRational| {
        p.iter().rev().fold(BigRational::zero(), |s, c| s * t + c)
    };
    while p.len() > 1 {
        let lcm = p.iter().fold(BigInt::one(), |a, c| a.lcm(c.denom()));
        let ints: Vec<BigInt> = p
            .iter()
            .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
            .collect();
        let mut found = None;
        if ints[0].is_zero() {
            found = Some(BigRational::zero());
        } else {
            'search: for a in divisors(&ints[0]) {
                for b in divisors(ints.last().unwrap()) {
                    for sign in [1, -1] {
                        let t = BigRational::new(BigInt::from(sign) * &a, b.clone());
                        if eval(&p, &t).is_zero() {
                            found = Some(t);
                            break 'search;
                        }
                    }
                }
            }
        }
        let t = found.expect("oracle needs tangent directions defined over Q");
        p = divide_linear(&p, &t);
        if !roots.contains(&t) {
            roots.push(t);
        }
    }
    roots
}

fn visit(f: &Poly2, a: u64, b: u64, trace: &mut BlowupTrace) {
    let (m, form) = lowest_form(f);
    if m == 0 {
        return;
    }
    let normal_crossing = m == 1 && {
        let lin_x = f.terms().get(&(1, 0)).is_some();
        let lin_y = f.terms().get(&(0, 1)).is_some();
        !(a > 0 && b > 0) && (a == 0 || lin_y) && (b == 0 || lin_x)
    };
    if normal_crossing {
        return;
    }
    let e = a + b + m as u64;
    trace.exceptional.push(e);
    trace.point_mults.push(m as u64);
    let roots = rational_roots(&form);
    for t0 in roots {
        let g = chart_y(f, m, &t0);
        let b_new = if t0.is_zero() { b } else { 0 };
        visit(&g, e, b_new, trace);
    }
    if !form.contains_key(&m) {
        let g = chart_x(f, m);
        visit(&g, a, e, trace);
    }
}

pub fn blow_up(f: &Poly2) -> BlowupTrace {
    let mut t = BlowupTrace::default();
    visit(f, 0, 0, &mut t);
    t
}
