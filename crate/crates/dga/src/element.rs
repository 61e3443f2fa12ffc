//! Elements of `B^•` (surface parts plus edge polynomials) and the operations
//! of `A^•`: differential, wedge, compatibility, `N`, `M`, filtration levels
//! and augmentation.

use std::collections::BTreeMap;
use std::fmt;

use nearby_core::Scalar;
use serde::Serialize;

use crate::model::{add_to, Comb, Model, ONE};
use crate::poly::EdgePoly;
use crate::DgaError;

/// Number of edge slots in each degree.
pub fn slot_count(degree: u8) -> usize {
    match degree {
        0 | 3 => 1,
        1 | 2 => 3,
        _ => 0,
    }
}

/// `(number of dx/x, dy/y factors, number of dξ factors)` of a slot.
fn slot_shape(degree: u8, slot: usize) -> (i32, i32) {
    match (degree, slot) {
        (0, _) => (0, 0),
        (1, 0) | (1, 1) => (1, 0),
        (1, _) => (0, 1),
        (2, 0) | (2, 1) => (1, 1),
        (2, _) => (2, 0),
        _ => (2, 1),
    }
}

/// A basis element of `B^•`. The derived order puts every surface generator
/// below every edge monomial, and edge monomials by total degree first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Coord {
    Surface { component: usize, name: String },
    Edge { form: u8, degree: u32, edge: usize, slot: u8, xi: u32, u: u32 },
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coord::Surface { component, name } => write!(f, "{name}@D{component}"),
            Coord::Edge { form, edge, slot, xi, u, .. } => {
                let names: &[&str] = match form {
                    0 => &["1"],
                    1 => &["dx/x", "dy/y", "dξ"],
                    2 => &["dξ∧dx/x", "dξ∧dy/y", "dx/x∧dy/y"],
                    _ => &["dξ∧dx/x∧dy/y"],
                };
                write!(f, "ξ^{xi}u^{u}·{}@e{edge}", names[*slot as usize])
            }
        }
    }
}

/// Homogeneous element of `B^•`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize)]
pub struct DgaElement {
    pub degree: u8,
    surface: BTreeMap<usize, Comb>,
    edges: BTreeMap<usize, Vec<EdgePoly>>,
}

/// One violated boundary condition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompatViolation {
    pub edge: usize,
    /// 0 for `ξ = 0`, 1 for `ξ = 1`.
    pub side: u8,
    pub message: String,
}

impl DgaElement {
    pub fn zero(degree: u8) -> Self {
        DgaElement { degree, ..Default::default() }
    }

    /// `c · name` on one component; the degree is the declared one.
    pub fn generator(model: &Model, component: usize, name: &str, c: Scalar) -> Result<Self, DgaError> {
        let g = model.surface(component)?.gen(name)?;
        let mut el = DgaElement::zero(g.degree);
        el.add_surface(component, name, &c);
        Ok(el)
    }

    /// Edge part given slot by slot.
    pub fn edge(degree: u8, edge: usize, slots: Vec<EdgePoly>) -> Self {
        assert_eq!(slots.len(), slot_count(degree), "slot count for degree {degree}");
        let mut el = DgaElement::zero(degree);
        el.edges.insert(edge, slots);
        el.prune();
        el
    }

    pub fn from_coords(degree: u8, coords: &BTreeMap<Coord, Scalar>) -> Self {
        let mut el = DgaElement::zero(degree);
        for (c, s) in coords {
            el.add_coord(c, s);
        }
        el
    }

    pub(crate) fn add_coord(&mut self, c: &Coord, s: &Scalar) {
        match c {
            Coord::Surface { component, name } => self.add_surface(*component, name, s),
            Coord::Edge { form, edge, slot, xi, u, .. } => {
                debug_assert_eq!(*form, self.degree);
                let slots = self.edges.entry(*edge).or_insert_with(|| vec![EdgePoly::zero(); slot_count(*form)]);
                slots[*slot as usize].add_term(*xi, *u, s.clone());
                if slots.iter().all(|p| p.is_zero()) {
                    self.edges.remove(edge);
                }
            }
        }
    }

    fn add_surface(&mut self, component: usize, name: &str, s: &Scalar) {
        let c = self.surface.entry(component).or_default();
        add_to(c, name, s);
        if c.is_empty() {
            self.surface.remove(&component);
        }
    }

    fn prune(&mut self) {
        self.surface.retain(|_, c| !c.is_empty());
        self.edges.retain(|_, s| s.iter().any(|p| !p.is_zero()));
    }

    pub fn coords(&self) -> BTreeMap<Coord, Scalar> {
        let mut out = BTreeMap::new();
        for (&component, c) in &self.surface {
            for (name, s) in c {
                out.insert(Coord::Surface { component, name: name.clone() }, s.clone());
            }
        }
        for (&edge, slots) in &self.edges {
            for (slot, p) in slots.iter().enumerate() {
                for (&(xi, u), s) in p.terms() {
                    let c = Coord::Edge { form: self.degree, degree: xi + u, edge, slot: slot as u8, xi, u };
                    out.insert(c, s.clone());
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.surface.is_empty() && self.edges.is_empty()
    }

    pub fn surface_part(&self, component: usize) -> Option<&Comb> {
        self.surface.get(&component)
    }

    pub fn surface_parts(&self) -> &BTreeMap<usize, Comb> {
        &self.surface
    }

    pub fn edge_parts(&self) -> &BTreeMap<usize, Vec<EdgePoly>> {
        &self.edges
    }

    pub fn slot(&self, edge: usize, slot: usize) -> EdgePoly {
        self.edges.get(&edge).map(|s| s[slot].clone()).unwrap_or_default()
    }

    pub fn coefficient(&self, component: usize, name: &str) -> Scalar {
        self.surface.get(&component).and_then(|c| c.get(name)).cloned().unwrap_or_default()
    }

    pub fn scale(&self, s: &Scalar) -> DgaElement {
        let mut out = DgaElement::zero(self.degree);
        for (c, x) in self.coords() {
            out.add_coord(&c, &(&x * s));
        }
        out
    }

    pub fn plus(&self, o: &DgaElement) -> DgaElement {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        assert_eq!(self.degree, o.degree, "adding elements of different degree");
        let mut out = self.clone();
        for (c, x) in o.coords() {
            out.add_coord(&c, &x);
        }
        out
    }

    pub fn minus(&self, o: &DgaElement) -> DgaElement {
        self.plus(&o.scale(&Scalar::from_int(-1)))
    }

    fn map_edges<F: Fn(&EdgePoly) -> EdgePoly>(&self, f: F, only: Option<usize>) -> DgaElement {
        let mut out = DgaElement::zero(self.degree);
        for (&e, slots) in &self.edges {
            if only.is_none_or(|x| x == e) {
                out.edges.insert(e, slots.iter().map(&f).collect());
            }
        }
        out.prune();
        out
    }

    /// `N = −∂/∂u` on every edge, zero on surfaces.
    pub fn apply_n(&self) -> DgaElement {
        self.map_edges(|p| -&p.d_u(), None)
    }

    /// `exp(log λ · N)`; terminates because `N` lowers the `u`-degree.
    pub fn lambda_n(&self, log_lambda: &Scalar) -> DgaElement {
        let mut out = self.clone();
        let mut term = self.clone();
        let mut k = 1i64;
        loop {
            term = term.apply_n().scale(log_lambda).scale(&Scalar::frac(1, k));
            if term.is_zero() {
                return out;
            }
            out = out.plus(&term);
            k += 1;
        }
    }

    pub fn check_caps(&self) -> Result<(), DgaError> {
        self.edges.values().flatten().try_for_each(|p| p.check_caps())
    }
}

impl fmt::Display for DgaElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coords = self.coords();
        if coords.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = coords.iter().map(|(c, s)| format!("({s})·{c}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `Θ = (1−ξ) dx/x − ξ dy/y − log t dξ` on one edge, with no surface part.
pub fn make_theta(edge: usize) -> DgaElement {
    let k = &EdgePoly::int(1) - &EdgePoly::xi();
    let l = -&EdgePoly::xi();
    let h = -&EdgePoly::u();
    DgaElement::edge(1, edge, vec![k, l, h])
}

fn edge_d(degree: u8, s: &[EdgePoly]) -> Vec<EdgePoly> {
    match degree {
        0 => vec![s[0].d_u(), s[0].d_u(), s[0].d_xi()],
        1 => {
            let hu = s[2].d_u();
            vec![&s[0].d_xi() - &hu, &s[1].d_xi() - &hu, &s[1].d_u() - &s[0].d_u()]
        }
        2 => vec![&(&s[0].d_u() - &s[1].d_u()) + &s[2].d_xi()],
        _ => Vec::new(),
    }
}

fn edge_wedge(da: u8, a: &[EdgePoly], db: u8, b: &[EdgePoly]) -> Vec<EdgePoly> {
    match (da, db) {
        (0, _) => b.iter().map(|p| &a[0] * p).collect(),
        (_, 0) => a.iter().map(|p| p * &b[0]).collect(),
        (1, 1) => {
            let (k, l, h) = (&a[0], &a[1], &a[2]);
            let (k2, l2, h2) = (&b[0], &b[1], &b[2]);
            vec![&(h * k2) - &(k * h2), &(h * l2) - &(l * h2), &(k * l2) - &(l * k2)]
        }
        (1, 2) | (2, 1) => {
            let (one, two) = if da == 1 { (a, b) } else { (b, a) };
            let (k, l, h) = (&one[0], &one[1], &one[2]);
            let (r, s, t) = (&two[0], &two[1], &two[2]);
            vec![&(&(l * r) - &(k * s)) + &(h * t)]
        }
        _ => Vec::new(),
    }
}

impl Model {
    /// Checks that every surface name exists with the element's degree and
    /// that edges exist.
    pub fn check_element(&self, el: &DgaElement) -> Result<(), DgaError> {
        for (&c, comb) in &el.surface {
            let s = self.surface(c)?;
            for n in comb.keys() {
                let g = s.gen(n)?;
                if g.degree != el.degree {
                    return Err(DgaError::DegreeMismatch { expected: el.degree, found: g.degree });
                }
            }
        }
        for &e in el.edges.keys() {
            self.edge(e)?;
        }
        Ok(())
    }

    pub fn d(&self, el: &DgaElement) -> Result<DgaElement, DgaError> {
        let mut out = DgaElement::zero(el.degree + 1);
        if el.degree >= 3 {
            return Ok(out);
        }
        for (&c, comb) in &el.surface {
            let dc = self.surface(c)?.d_comb(comb)?;
            if !dc.is_empty() {
                out.surface.insert(c, dc);
            }
        }
        for (&e, slots) in &el.edges {
            out.edges.insert(e, edge_d(el.degree, slots));
        }
        out.prune();
        Ok(out)
    }

    pub fn wedge(&self, a: &DgaElement, b: &DgaElement) -> Result<DgaElement, DgaError> {
        let deg = a.degree + b.degree;
        let mut out = DgaElement::zero(deg);
        if deg > 3 {
            return Ok(out);
        }
        for (&c, x) in &a.surface {
            if let Some(y) = b.surface.get(&c) {
                let p = self.surface(c)?.wedge_comb(x, y)?;
                if !p.is_empty() {
                    out.surface.insert(c, p);
                }
            }
        }
        for (&e, x) in &a.edges {
            if let Some(y) = b.edges.get(&e) {
                out.edges.insert(e, edge_wedge(a.degree, x, b.degree, y));
            }
        }
        out.prune();
        out.check_caps()?;
        Ok(out)
    }

    /// The constant function `c` on every component.
    pub fn constant(&self, c: &Scalar) -> DgaElement {
        let mut out = DgaElement::zero(0);
        for v in &self.graph.vertices {
            out.add_surface(v.id, ONE, c);
        }
        for e in &self.graph.edges {
            out.edges.insert(e.id, vec![EdgePoly::constant(c.clone())]);
        }
        out.prune();
        out
    }

    /// Every violated boundary condition of `A^•`.
    pub fn compat_check(&self, el: &DgaElement) -> Result<Vec<CompatViolation>, DgaError> {
        let mut out = Vec::new();
        let empty = Comb::new();
        for e in &self.graph.edges {
            let side = |v: usize| -> Result<Scalar, DgaError> {
                let s = self.surface(v)?;
                let c = el.surface.get(&v).unwrap_or(&empty);
                match el.degree {
                    0 => s.value(c, e.id),
                    _ => s.residue(c, e.id),
                }
            };
            let mut push = |side: u8, msg: &str| {
                out.push(CompatViolation { edge: e.id, side, message: msg.to_string() });
            };
            let slot = |i: usize, one: bool| el.slot(e.id, i).at_end(one);
            match el.degree {
                0 => {
                    if slot(0, false) != EdgePoly::constant(side(e.k)?) {
                        push(0, "A⁰ mismatch at ξ=0");
                    }
                    if slot(0, true) != EdgePoly::constant(side(e.l)?) {
                        push(1, "A⁰ mismatch at ξ=1");
                    }
                }
                1 => {
                    if slot(0, false) != EdgePoly::constant(side(e.k)?) {
                        push(0, "A¹ K(0,u) ≠ residue at ξ=0");
                    }
                    if !slot(1, false).is_zero() {
                        push(0, "A¹ L(0,u) ≠ 0 at ξ=0");
                    }
                    if !slot(0, true).is_zero() {
                        push(1, "A¹ K(1,u) ≠ 0 at ξ=1");
                    }
                    if slot(1, true) != EdgePoly::constant(side(e.l)?) {
                        push(1, "A¹ L(1,u) ≠ residue at ξ=1");
                    }
                }
                2 => {
                    if !slot(2, false).is_zero() {
                        push(0, "A² T(0,u) ≠ 0 at ξ=0");
                    }
                    if !slot(2, true).is_zero() {
                        push(1, "A² T(1,u) ≠ 0 at ξ=1");
                    }
                }
                _ => {}
            }
        }
        Ok(out)
    }

    pub fn is_compatible(&self, el: &DgaElement) -> Result<bool, DgaError> {
        Ok(self.compat_check(el)?.is_empty())
    }

    pub fn apply_n(&self, el: &DgaElement) -> DgaElement {
        el.apply_n()
    }

    /// `N` restricted to the edge at the disk of `branch`.
    pub fn apply_m(&self, el: &DgaElement, branch: usize) -> Result<DgaElement, DgaError> {
        let e = self.graph.disk_edge(branch).ok_or(DgaError::NoDiskEdge(branch))?;
        Ok(el.map_edges(|p| -&p.d_u(), Some(e.id)))
    }

    /// Weight level of a basis element.
    pub fn coord_weight(&self, c: &Coord) -> Result<i32, DgaError> {
        Ok(match c {
            Coord::Surface { component, name } => self.surface(*component)?.gen(name)?.w,
            Coord::Edge { form, slot, u, .. } => {
                let (n, dxi) = slot_shape(*form, *slot as usize);
                n + 2 * *u as i32 - dxi
            }
        })
    }

    /// Hodge level of a basis element.
    pub fn coord_hodge(&self, c: &Coord) -> Result<i32, DgaError> {
        Ok(match c {
            Coord::Surface { component, name } => self.surface(*component)?.gen(name)?.f,
            Coord::Edge { form, slot, u, .. } => slot_shape(*form, *slot as usize).0 + *u as i32,
        })
    }

    /// Least `l` with `el ∈ W_l`; `None` for zero.
    pub fn weight_level(&self, el: &DgaElement) -> Result<Option<i32>, DgaError> {
        let mut best = None;
        for c in el.coords().keys() {
            let w = self.coord_weight(c)?;
            best = Some(best.map_or(w, |b: i32| b.max(w)));
        }
        Ok(best)
    }

    /// Greatest `p` with `el ∈ F^p`; `None` for zero.
    pub fn hodge_level(&self, el: &DgaElement) -> Result<Option<i32>, DgaError> {
        let mut best = None;
        for c in el.coords().keys() {
            let f = self.coord_hodge(c)?;
            best = Some(best.map_or(f, |b: i32| b.min(f)));
        }
        Ok(best)
    }

    /// Value of a degree-0 element on disk 0.
    pub fn augmentation(&self, f: &DgaElement) -> Result<Scalar, DgaError> {
        if f.degree != 0 {
            return Err(DgaError::DegreeMismatch { expected: 0, found: f.degree });
        }
        let d0 = self.disk_component(0).ok_or(DgaError::NoDisk0)?;
        Ok(f.coefficient(d0, ONE))
    }

    /// `Θ` plus unit residue slots: +1 on the `ξ = 0` component and −1 on the
    /// `ξ = 1` component, so the result is compatible.
    pub fn make_theta_balanced(&self, edge: usize) -> Result<DgaElement, DgaError> {
        let e = self.edge(edge)?;
        let sk = self.residue_slot(e.k, edge)?;
        let sl = self.residue_slot(e.l, edge)?;
        let mut t = make_theta(edge);
        t.add_surface(e.k, &sk, &Scalar::one());
        t.add_surface(e.l, &sl, &Scalar::from_int(-1));
        Ok(t)
    }
}
