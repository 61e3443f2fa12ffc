#![allow(dead_code)]

use nearby_core::graph::{build, MarkedGraph};
use nearby_core::Scalar;
use nearby_dga::model::ONE;
use nearby_dga::{DgaElement, EdgePoly, Model};
use rand::Rng;

/// Random connected simple graph: a random tree of compact components with a
/// few extra edges and 1..=3 disks.
pub fn random_graph<R: Rng>(rng: &mut R) -> MarkedGraph {
    let nc = rng.gen_range(1..=4);
    let r = rng.gen_range(1..=3);
    let mut vertices: Vec<_> = (0..r).map(|b| build::disk(b, b)).collect();
    vertices.extend((0..nc).map(|i| build::compact(r + i, rng.gen_range(0..=2))));
    let mut pairs: Vec<(usize, usize)> = (1..nc).map(|i| (r + rng.gen_range(0..i), r + i)).collect();
    for _ in 0..rng.gen_range(0..=2) {
        let (a, b) = (rng.gen_range(0..nc), rng.gen_range(0..nc));
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

pub fn small_scalar<R: Rng>(rng: &mut R) -> Scalar {
    Scalar::frac(rng.gen_range(-3..=3), rng.gen_range(1..=2))
}

pub fn random_poly<R: Rng>(rng: &mut R, deg: u32) -> EdgePoly {
    let mut p = EdgePoly::zero();
    for _ in 0..rng.gen_range(0..=3) {
        let a = rng.gen_range(0..=deg);
        let b = rng.gen_range(0..=deg - a);
        p = &p + &EdgePoly::term(small_scalar(rng), a, b);
    }
    p
}

fn bubble() -> EdgePoly {
    &EdgePoly::xi() - &(&EdgePoly::xi() * &EdgePoly::xi())
}

/// Random element of `B^deg` (no compatibility imposed).
pub fn random_b<R: Rng>(rng: &mut R, m: &Model, deg: u8) -> DgaElement {
    let mut el = DgaElement::zero(deg);
    for s in m.surfaces() {
        let gens: Vec<String> = s.generators().filter(|g| g.degree == deg).map(|g| g.name.clone()).collect();
        for n in gens {
            if rng.gen_bool(0.5) {
                el = el.plus(&DgaElement::generator(m, s.component, &n, small_scalar(rng)).unwrap());
            }
        }
    }
    let slots = match deg {
        0 | 3 => 1,
        _ => 3,
    };
    for e in &m.graph.edges {
        let v = (0..slots).map(|_| random_poly(rng, 3)).collect();
        el = el.plus(&DgaElement::edge(deg, e.id, v));
    }
    el
}

/// Random compatible element of `A^deg`, `deg ≤ 2`. With `wedgeable`, 1-form
/// surface parts use only forms whose products are declared.
pub fn random_a<R: Rng>(rng: &mut R, m: &Model, deg: u8, wedgeable: bool) -> DgaElement {
    let mut el = DgaElement::zero(deg);
    for s in m.surfaces() {
        let gens: Vec<String> = s
            .generators()
            .filter(|g| g.degree == deg && (g.name != ONE || deg == 0))
            .filter(|g| !wedgeable || deg != 1 || s.disk || g.name.starts_with("omega"))
            .map(|g| g.name.clone())
            .collect();
        for n in gens {
            if rng.gen_bool(0.6) {
                el = el.plus(&DgaElement::generator(m, s.component, &n, small_scalar(rng)).unwrap());
            }
        }
        if deg == 0 {
            el = el.plus(&DgaElement::generator(m, s.component, ONE, small_scalar(rng)).unwrap());
        }
    }
    for e in &m.graph.edges {
        let side = |v: usize| {
            let s = m.surface(v).unwrap();
            let c = el.surface_part(v).cloned().unwrap_or_default();
            if deg == 0 {
                s.value(&c, e.id).unwrap()
            } else {
                s.residue(&c, e.id).unwrap()
            }
        };
        let (a, b) = (side(e.k), side(e.l));
        let one_minus = &EdgePoly::int(1) - &EdgePoly::xi();
        let bub = |rng: &mut R| &bubble() * &random_poly(rng, 2);
        let v = match deg {
            0 => vec![&(&one_minus.scale(&a) + &EdgePoly::xi().scale(&b)) + &bub(rng)],
            1 => vec![
                &one_minus.scale(&a) + &bub(rng),
                &EdgePoly::xi().scale(&b) + &bub(rng),
                random_poly(rng, 3),
            ],
            _ => vec![random_poly(rng, 3), random_poly(rng, 3), bub(rng)],
        };
        el = el.plus(&DgaElement::edge(deg, e.id, v));
    }
    el
}
