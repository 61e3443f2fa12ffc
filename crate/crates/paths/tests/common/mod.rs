#![allow(dead_code)]

use std::collections::BTreeMap;

use nearby_core::graph::build;
use nearby_core::{MarkedGraph, Scalar};
use nearby_dga::bar::is_chen_closed;
use nearby_dga::element::make_theta;
use nearby_dga::model::{comb, Generator, SurfaceModel, DLOG, ONE};
use nearby_dga::{BarTensor, Coord, DgaElement, EdgePoly, Model};
use nearby_paths::{Event, PathWord};
use rand::Rng;

/// `D₀ – D₁ – D₂ – D₃`: disks at both ends, a genus-1 `D₁` with an extra
/// closed form `α` and a primitive of `−ω∧ω̄`, a rational `D₂`.
pub struct Rich {
    pub m: Model,
    pub omega: DgaElement,
    pub omegabar: DgaElement,
    pub alpha: DgaElement,
    /// `Θ₀ + Θ₁ + Θ₂` with its residue forms.
    pub chain: DgaElement,
    /// `μ − Θ₀ − dp/p`, with `dψ = −ω∧ω̄`.
    pub psi: DgaElement,
}

pub fn rich() -> Rich {
    let graph = MarkedGraph {
        vertices: vec![build::disk(0, 0), build::compact(1, 1), build::compact(2, 0), build::disk(3, 1)],
        edges: build::edges(&[(0, 1), (1, 2), (2, 3)]),
    };
    let mut s = SurfaceModel::compact(1, &[0, 1]);
    s.declare(Generator::two_form("vol", 0, 1)).unwrap();
    s.declare(Generator::form("omega", 0, 1, BTreeMap::new())).unwrap();
    s.declare(Generator::form("omegabar", 0, 0, BTreeMap::new())).unwrap();
    s.declare(Generator::form("alpha", 0, 1, BTreeMap::new())).unwrap();
    s.declare(Generator::form("nu", 1, 1, BTreeMap::from([(1, Scalar::one()), (0, Scalar::from_int(-1))]))).unwrap();
    s.declare(
        Generator::form("mu", 1, 1, BTreeMap::from([(0, Scalar::one())]))
            .with_differential(comb(&[("vol", Scalar::from_int(-1))])),
    )
    .unwrap();
    s.declare_wedge("omega", "omegabar", comb(&[("vol", Scalar::one())])).unwrap();
    for (a, b) in [
        ("omega", "mu"),
        ("omegabar", "mu"),
        ("alpha", "omega"),
        ("alpha", "omegabar"),
        ("alpha", "mu"),
        ("alpha", "nu"),
        ("omega", "nu"),
        ("omegabar", "nu"),
        ("mu", "nu"),
        ("omega", "omega"),
        ("omegabar", "omegabar"),
        ("alpha", "alpha"),
        ("nu", "nu"),
        ("mu", "mu"),
    ] {
        s.declare_wedge(a, b, comb(&[])).unwrap();
    }
    let mut s2 = SurfaceModel::compact(2, &[1, 2]);
    s2.declare(Generator::form("nu", 1, 1, BTreeMap::from([(2, Scalar::one()), (1, Scalar::from_int(-1))]))).unwrap();
    s2.declare_wedge("nu", "nu", comb(&[])).unwrap();
    let m = Model::new(graph, vec![SurfaceModel::disk(0, 0, Scalar::one()), s, s2, SurfaceModel::disk(3, 2, Scalar::one())])
        .unwrap();
    let g = |c: usize, n: &str, x: i64| DgaElement::generator(&m, c, n, Scalar::from_int(x)).unwrap();
    let chain = make_theta(0)
        .plus(&make_theta(1))
        .plus(&make_theta(2))
        .plus(&g(0, DLOG, 1))
        .plus(&g(1, "nu", 1))
        .plus(&g(2, "nu", 1))
        .plus(&g(3, DLOG, -1));
    let psi = g(1, "mu", 1).minus(&make_theta(0)).minus(&g(0, DLOG, 1));
    Rich { omega: g(1, "omega", 1), omegabar: g(1, "omegabar", 1), alpha: g(1, "alpha", 1), chain, psi, m }
}

/// `D₀ – D₁ – D₂` with a genus-1 `D₁` carrying a function `g` (`0` at `e₀`,
/// `3` at `e₁`) and `α = dg`; products with `g` are declared zero.
pub struct Exact {
    pub m: Model,
    pub omega: DgaElement,
    pub omegabar: DgaElement,
    pub alpha: DgaElement,
}

pub fn exact() -> Exact {
    let graph = MarkedGraph {
        vertices: vec![build::disk(0, 0), build::compact(1, 1), build::disk(2, 1)],
        edges: build::edges(&[(0, 1), (1, 2)]),
    };
    let mut s = SurfaceModel::compact(1, &[0, 1]);
    s.declare(Generator::two_form("vol", 0, 1)).unwrap();
    s.declare(Generator::form("omega", 0, 1, BTreeMap::new())).unwrap();
    s.declare(Generator::form("omegabar", 0, 0, BTreeMap::new())).unwrap();
    s.declare(Generator::form("alpha", 0, 1, BTreeMap::new())).unwrap();
    let values = BTreeMap::from([(0, Scalar::zero()), (1, Scalar::from_int(3))]);
    s.declare(Generator::function("g", values, comb(&[("alpha", Scalar::one())]))).unwrap();
    s.declare_wedge("omega", "omegabar", comb(&[("vol", Scalar::one())])).unwrap();
    for (a, b) in [
        ("alpha", "omega"),
        ("alpha", "omegabar"),
        ("omega", "omega"),
        ("omegabar", "omegabar"),
        ("alpha", "alpha"),
        ("g", "omega"),
        ("g", "omegabar"),
        ("g", "alpha"),
        ("g", "vol"),
        ("g", "g"),
    ] {
        s.declare_wedge(a, b, comb(&[])).unwrap();
    }
    let m = Model::new(graph, vec![SurfaceModel::disk(0, 0, Scalar::one()), s, SurfaceModel::disk(2, 1, Scalar::one())])
        .unwrap();
    let g = |n: &str| DgaElement::generator(&m, 1, n, Scalar::one()).unwrap();
    Exact { omega: g("omega"), omegabar: g("omegabar"), alpha: g("alpha"), m }
}

impl Exact {
    pub fn closed_tensors(&self) -> Vec<BarTensor> {
        let forms = [self.omega.clone(), self.omegabar.clone(), self.alpha.clone(), self.alpha.plus(&dxi(1, 1))];
        let mut out: Vec<BarTensor> = forms.iter().map(|f| pure(&[f])).collect();
        for a in &forms {
            for b in &forms {
                out.push(pure(&[a, b]));
            }
        }
        out.push(pure(&[&self.alpha, &self.alpha, &self.omega]));
        out.push(pure(&[&self.alpha, &self.omega, &self.alpha]));
        out.retain(|t| is_chen_closed(&self.m, t).unwrap_or(false));
        out
    }
}

/// The standard model on a disk attached to a triangle of rational
/// components, so `N ≠ 0`.
pub fn cycle() -> Model {
    Model::standard(build::cycle_with_disk(&[0, 0, 0])).unwrap()
}

/// Once around the cycle of [`cycle`].
pub fn around_cycle() -> PathWord {
    PathWord::new(vec![
        Event::Cross { edge: 0, dir: 1 },
        Event::Arc { comp: 1, from: 0, to: 1 },
        Event::Cross { edge: 1, dir: 1 },
        Event::Arc { comp: 2, from: 1, to: 2 },
        Event::Cross { edge: 2, dir: 1 },
        Event::Arc { comp: 3, from: 2, to: 3 },
        Event::Cross { edge: 3, dir: -1 },
        Event::Arc { comp: 1, from: 3, to: 0 },
        Event::Cross { edge: 0, dir: -1 },
    ])
}

/// `c·dξ` on edge `e`.
pub fn dxi(e: usize, c: i64) -> DgaElement {
    DgaElement::edge(1, e, vec![EdgePoly::zero(), EdgePoly::zero(), EdgePoly::int(c)])
}

pub fn pure(f: &[&DgaElement]) -> BarTensor {
    BarTensor::pure(f, Scalar::one())
}

impl Rich {
    /// Closed 1-forms of the rich model.
    pub fn closed_forms(&self) -> Vec<DgaElement> {
        vec![
            self.omega.clone(),
            self.omegabar.clone(),
            self.alpha.clone(),
            self.chain.clone(),
            dxi(1, 2).plus(&self.alpha),
            self.chain.scale(&Scalar::frac(1, 2)).plus(&self.omega),
        ]
    }

    /// Chen-closed tensors of lengths 1 to 3.
    pub fn closed_tensors(&self) -> Vec<BarTensor> {
        let forms = self.closed_forms();
        let mut out: Vec<BarTensor> = forms.iter().map(|f| pure(&[f])).collect();
        for a in &forms {
            for b in &forms {
                let t = pure(&[a, b]);
                if is_chen_closed(&self.m, &t).unwrap_or(false) {
                    out.push(t);
                }
            }
        }
        out.push(pure(&[&self.omega, &self.omegabar]).plus(&pure(&[&self.psi])));
        out.push(pure(&[&self.alpha, &self.omega, &self.chain]));
        out.push(pure(&[&self.chain, &self.chain, &self.alpha]));
        out.retain(|t| is_chen_closed(&self.m, t).unwrap_or(false));
        out
    }
}

/// A random based loop: nested excursions through crossings with windings,
/// arcs and homology loops along the way.
pub fn random_loop<R: Rng>(rng: &mut R, m: &Model, depth: usize) -> PathWord {
    let base = nearby_paths::base_position(m).unwrap();
    PathWord::new(excursion(rng, m, base.comp, base.puncture, depth))
}

fn excursion<R: Rng>(rng: &mut R, m: &Model, comp: usize, from: usize, depth: usize) -> Vec<Event> {
    let g = &m.graph;
    let punct: Vec<usize> = g.incident(comp).iter().map(|e| e.id).collect();
    let genus = g.vertex(comp).map(|v| v.genus).unwrap_or(0) as usize;
    let mut out = Vec::new();
    let mut at = from;
    for _ in 0..rng.gen_range(1..=3) {
        match rng.gen_range(0..4) {
            0 => out.push(Event::Wind { comp, edge: at, n: [-2, -1, 1, 2][rng.gen_range(0..4)] }),
            1 if genus > 0 => out.push(Event::Loop { comp, gen: rng.gen_range(0..2 * genus), n: [-1, 1][rng.gen_range(0..2)] }),
            2 => {
                let q = punct[rng.gen_range(0..punct.len())];
                if q != at {
                    out.push(Event::Arc { comp, from: at, to: q });
                    at = q;
                }
            }
            _ if depth > 0 => {
                let e = punct[rng.gen_range(0..punct.len())];
                if e != at {
                    out.push(Event::Arc { comp, from: at, to: e });
                    at = e;
                }
                let edge = g.edge(e).unwrap();
                let (dir, other) = if edge.k == comp { (1, edge.l) } else { (-1, edge.k) };
                out.push(Event::Cross { edge: e, dir });
                out.extend(excursion(rng, m, other, e, depth - 1));
                out.push(Event::Cross { edge: e, dir: -dir });
            }
            _ => {}
        }
    }
    if at != from {
        out.push(Event::Arc { comp, from: at, to: from });
    }
    out
}

/// Random connected simple graph: a tree of compact components with a few
/// extra edges and 1..=3 disks.
pub fn random_graph<R: Rng>(rng: &mut R) -> MarkedGraph {
    let nc = rng.gen_range(1..=4);
    let r = rng.gen_range(1..=3);
    let mut vertices: Vec<_> = (0..r).map(|b| build::disk(b, b)).collect();
    vertices.extend((0..nc).map(|i| build::compact(r + i, rng.gen_range(0..=1))));
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

/// Random compatible element of `A⁰` or `A¹` of a model whose only surface
/// functions are constants.
pub fn random_a<R: Rng>(rng: &mut R, m: &Model, deg: u8) -> DgaElement {
    let mut el = DgaElement::zero(deg);
    for s in m.surfaces() {
        let gens: Vec<String> =
            s.generators().filter(|g| g.degree == deg && g.name != ONE).map(|g| g.name.clone()).collect();
        for n in gens {
            if rng.gen_bool(0.5) {
                el = el.plus(&DgaElement::generator(m, s.component, &n, small_scalar(rng)).unwrap());
            }
        }
        if deg == 0 {
            el = el.plus(&DgaElement::generator(m, s.component, ONE, small_scalar(rng)).unwrap());
        }
    }
    let bubble = &EdgePoly::xi() - &(&EdgePoly::xi() * &EdgePoly::xi());
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
        let v = if deg == 0 {
            vec![&(&one_minus.scale(&a) + &EdgePoly::xi().scale(&b)) + &(&bubble * &random_poly(rng, 2))]
        } else {
            vec![
                &one_minus.scale(&a) + &(&bubble * &random_poly(rng, 2)),
                &EdgePoly::xi().scale(&b) + &(&bubble * &random_poly(rng, 2)),
                random_poly(rng, 3),
            ]
        };
        el = el.plus(&DgaElement::edge(deg, e.id, v));
    }
    el
}

/// The tensor of a single word of coordinates.
pub fn word_tensor(m: &Model, w: &[Coord], c: &Scalar) -> BarTensor {
    let els: Vec<DgaElement> = w
        .iter()
        .map(|x| {
            let deg = match x {
                Coord::Edge { form, .. } => *form,
                Coord::Surface { component, name } => m.surface(*component).unwrap().generator(name).unwrap().degree,
            };
            DgaElement::from_coords(deg, &BTreeMap::from([(x.clone(), Scalar::one())]))
        })
        .collect();
    let refs: Vec<&DgaElement> = els.iter().collect();
    BarTensor::pure(&refs, c.clone())
}
