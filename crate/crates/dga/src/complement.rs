//! A fixed complement `Ā¹` with `A¹ = dA⁰ ⊕ Ā¹`.
//!
//! Exact 1-forms `d(g)` for `g` in a finite box of degree-0 generators are put
//! in echelon form with the highest coordinate as pivot. The complement is the
//! set of forms vanishing at every pivot coordinate. Edge coordinates are
//! ordered by total degree first, so once the box holds every primitive of
//! degree ≤ D + 1 the decomposition of a form of degree ≤ D no longer depends
//! on the box.

use std::collections::{BTreeMap, HashMap};

use nearby_core::Scalar;

use crate::element::{Coord, DgaElement};
use crate::model::{Model, ONE};
use crate::poly::EdgePoly;
use crate::DgaError;

struct Row {
    vec: BTreeMap<Coord, Scalar>,
    prim: BTreeMap<usize, Scalar>,
}

pub struct Complement<'a> {
    model: &'a Model,
    gens: Vec<DgaElement>,
    rows: BTreeMap<Coord, Row>,
    box_deg: Option<u32>,
    cache: HashMap<Coord, (BTreeMap<Coord, Scalar>, DgaElement)>,
}

fn axpy(target: &mut BTreeMap<Coord, Scalar>, a: &Scalar, x: &BTreeMap<Coord, Scalar>) {
    for (k, v) in x {
        let s = &target.get(k).cloned().unwrap_or_default() + &(a * v);
        if s.is_zero() {
            target.remove(k);
        } else {
            target.insert(k.clone(), s);
        }
    }
}

fn axpy_idx(target: &mut BTreeMap<usize, Scalar>, a: &Scalar, x: &BTreeMap<usize, Scalar>) {
    for (k, v) in x {
        let s = &target.get(k).cloned().unwrap_or_default() + &(a * v);
        if s.is_zero() {
            target.remove(k);
        } else {
            target.insert(*k, s);
        }
    }
}

impl<'a> Complement<'a> {
    pub fn new(model: &'a Model) -> Result<Self, DgaError> {
        let mut c = Complement { model, gens: Vec::new(), rows: BTreeMap::new(), box_deg: None, cache: HashMap::new() };
        // functions: each degree-0 generator, interpolated linearly on edges
        for s in model.surfaces() {
            for g in s.generators().filter(|g| g.degree == 0) {
                let mut f = DgaElement::generator(model, s.component, &g.name, Scalar::one())?;
                for e in model.graph.incident(s.component) {
                    let v = g.values.get(&e.id).cloned().unwrap_or_default();
                    let shape = if e.k == s.component { &EdgePoly::int(1) - &EdgePoly::xi() } else { EdgePoly::xi() };
                    f = f.plus(&DgaElement::edge(0, e.id, vec![shape.scale(&v)]));
                }
                c.push(f)?;
            }
        }
        Ok(c)
    }

    fn push(&mut self, f: DgaElement) -> Result<(), DgaError> {
        let idx = self.gens.len();
        let vec = self.model.d(&f)?.coords();
        self.gens.push(f);
        let mut row = Row { vec, prim: BTreeMap::from([(idx, Scalar::one())]) };
        while let Some(lead) = row.vec.keys().next_back().cloned() {
            match self.rows.get(&lead) {
                Some(p) => {
                    let a = -&row.vec[&lead];
                    axpy(&mut row.vec, &a, &p.vec);
                    axpy_idx(&mut row.prim, &a, &p.prim);
                }
                None => {
                    let inv = row.vec[&lead]
                        .inv()
                        .map_err(|_| DgaError::Inconsistent(format!("pivot {} is not invertible", row.vec[&lead])))?;
                    row.vec = row.vec.iter().map(|(k, v)| (k.clone(), v * &inv)).collect();
                    row.prim = row.prim.iter().map(|(k, v)| (*k, v * &inv)).collect();
                    self.rows.insert(lead, row);
                    return Ok(());
                }
            }
        }
        Ok(())
    }

    fn ensure_box(&mut self, deg: u32) -> Result<(), DgaError> {
        let want = deg + 2;
        let start = match self.box_deg {
            Some(b) if b >= want => return Ok(()),
            Some(b) => b + 1,
            None => 0,
        };
        let bubble = &EdgePoly::xi() - &(&EdgePoly::xi() * &EdgePoly::xi());
        for n in start..=want {
            for e in self.model.graph.edges.clone() {
                for a in 0..=n {
                    let p = &bubble * &EdgePoly::term(Scalar::one(), a, n - a);
                    self.push(DgaElement::edge(0, e.id, vec![p]))?;
                }
            }
        }
        self.box_deg = Some(want);
        Ok(())
    }

    /// `c = c̄ + d f` for a single basis element of `B¹`.
    fn decompose_coord(&mut self, c: &Coord) -> Result<(BTreeMap<Coord, Scalar>, DgaElement), DgaError> {
        if let Some(hit) = self.cache.get(c) {
            return Ok(hit.clone());
        }
        if let Coord::Edge { degree, .. } = c {
            self.ensure_box(*degree)?;
        } else {
            self.ensure_box(0)?;
        }
        let mut target = BTreeMap::from([(c.clone(), Scalar::one())]);
        let mut prim: BTreeMap<usize, Scalar> = BTreeMap::new();
        let mut cursor: Option<Coord> = None;
        loop {
            let next = match &cursor {
                None => target.keys().next_back().cloned(),
                Some(b) => target.range(..b.clone()).next_back().map(|(k, _)| k.clone()),
            };
            let Some(k) = next else { break };
            if let Some(row) = self.rows.get(&k) {
                let a = -&target[&k];
                axpy(&mut target, &a, &row.vec);
                axpy_idx(&mut prim, &a, &row.prim);
            }
            cursor = Some(k);
        }
        let mut f = DgaElement::zero(0);
        for (i, s) in prim {
            f = f.plus(&self.gens[i].scale(&-&s));
        }
        let out = (target, f);
        self.cache.insert(c.clone(), out.clone());
        Ok(out)
    }

    /// `φ = φ̄ + d f` with `φ̄ ∈ Ā¹`.
    pub fn decompose(&mut self, phi: &DgaElement) -> Result<(DgaElement, DgaElement), DgaError> {
        if phi.degree != 1 {
            return Err(DgaError::DegreeMismatch { expected: 1, found: phi.degree });
        }
        let mut bar = BTreeMap::new();
        let mut f = DgaElement::zero(0);
        for (c, s) in phi.coords() {
            let (b, g) = self.decompose_coord(&c)?;
            axpy(&mut bar, &s, &b);
            f = f.plus(&g.scale(&s));
        }
        Ok((DgaElement::from_coords(1, &bar), f))
    }

    /// Decomposition of a basis element, in coordinates.
    pub fn decompose_basis(&mut self, c: &Coord) -> Result<(BTreeMap<Coord, Scalar>, DgaElement), DgaError> {
        self.decompose_coord(c)
    }

    pub fn model(&self) -> &Model {
        self.model
    }
}

/// The constant 1 of a component, extended by `1−ξ` or `ξ` on its edges.
pub fn component_indicator(model: &Model, component: usize) -> Result<DgaElement, DgaError> {
    extend_function(model, component, ONE)
}

/// A function generator of a component, extended to a compatible element of
/// `A⁰` by its puncture values times `1−ξ` or `ξ`.
pub fn extend_function(model: &Model, component: usize, name: &str) -> Result<DgaElement, DgaError> {
    let mut f = DgaElement::generator(model, component, name, Scalar::one())?;
    let s = model.surface(component)?;
    let part = f.surface_part(component).cloned().unwrap_or_default();
    for e in model.graph.incident(component) {
        let shape = if e.k == component { &EdgePoly::int(1) - &EdgePoly::xi() } else { EdgePoly::xi() };
        f = f.plus(&DgaElement::edge(0, e.id, vec![shape.scale(&s.value(&part, e.id)?)]));
    }
    Ok(f)
}
