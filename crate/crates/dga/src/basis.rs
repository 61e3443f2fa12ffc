//! Closed representatives of `H¹(A^•)` by weight, and primitives of exact
//! closed 1-forms.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use nearby_core::hodge::hodge_basis;
use nearby_core::linalg::solve;
use nearby_core::Scalar;
use num_rational::BigRational;
use serde::Serialize;

use crate::element::{make_theta, DgaElement};
use crate::model::{Model, ONE};
use crate::poly::EdgePoly;
use crate::DgaError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasisClass {
    /// Weight of the class in `H¹` (0, 1 or 2).
    pub weight: u8,
    pub label: String,
    pub element: DgaElement,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct H1Basis {
    pub classes: Vec<BasisClass>,
}

impl H1Basis {
    /// `(w0, w1, w2)`.
    pub fn counts(&self) -> (u64, u64, u64) {
        let n = |w| self.classes.iter().filter(|c| c.weight == w).count() as u64;
        (n(0), n(1), n(2))
    }
}

fn rational(s: &Scalar) -> Option<BigRational> {
    s.as_rational()
}

/// Closed 1-form on `component` with the prescribed residues, as a
/// combination of the declared closed generators.
fn closed_with_residues(
    model: &Model,
    component: usize,
    target: &BTreeMap<usize, Scalar>,
) -> Result<DgaElement, DgaError> {
    let s = model.surface(component)?;
    let gens: Vec<_> = s
        .generators()
        .filter(|g| g.degree == 1 && g.is_closed() && g.residues.values().all(|r| rational(r).is_some()))
        .collect();
    let a: Vec<Vec<BigRational>> = s
        .punctures
        .iter()
        .map(|e| {
            gens.iter()
                .map(|g| g.residues.get(e).and_then(rational).unwrap_or_else(|| BigRational::from_integer(0.into())))
                .collect()
        })
        .collect();
    let b: Vec<Scalar> = s.punctures.iter().map(|e| target.get(e).cloned().unwrap_or_default()).collect();
    let x = if gens.is_empty() {
        b.iter().all(|v| v.is_zero()).then(Vec::new)
    } else {
        solve(&a, &b)
    };
    let x = x.ok_or_else(|| DgaError::Scenario(format!("component {component} has no closed form with the needed residues")))?;
    let mut el = DgaElement::zero(1);
    for (g, c) in gens.iter().zip(x) {
        el = el.plus(&DgaElement::generator(model, component, &g.name, c)?);
    }
    Ok(el)
}

/// A basis of `H¹(A^•)` organized by weight: `τ⁻¹`-normalized `Θ` flows with
/// matching log forms (weight 2), the closed residue-free forms of the compact
/// components (weight 1), and `dξ` cycle classes (weight 0). The flows and
/// cycles are those of the weight-graded basis of the graph.
pub fn h1_basis(model: &Model) -> Result<H1Basis, DgaError> {
    let g = &model.graph;
    let hb = hodge_basis(g);
    let tau_inv = Scalar::tau_pow(-1);
    let mut classes = Vec::new();
    for (i, flow) in hb.flows().iter().enumerate() {
        let mut el = DgaElement::zero(1);
        let mut residues: BTreeMap<usize, BTreeMap<usize, Scalar>> = BTreeMap::new();
        for e in &g.edges {
            let rho = Scalar::from_ratio(flow[e.id].clone());
            if rho.is_zero() {
                continue;
            }
            let c = &tau_inv * &rho;
            el = el.plus(&make_theta(e.id).scale(&c));
            residues.entry(e.k).or_default().insert(e.id, c.clone());
            residues.entry(e.l).or_default().insert(e.id, -&c);
        }
        for (v, target) in &residues {
            el = el.plus(&closed_with_residues(model, *v, target)?);
        }
        classes.push(BasisClass { weight: 2, label: format!("{:?}", hb.vectors[i]), element: el });
    }
    for v in g.compact() {
        let s = model.surface(v.id)?;
        let mut found = 0;
        for gen in s.generators() {
            if gen.degree == 1 && gen.is_closed() && gen.residues.values().all(|r| r.is_zero()) {
                let el = DgaElement::generator(model, v.id, &gen.name, Scalar::one())?;
                classes.push(BasisClass { weight: 1, label: format!("{}@D{}", gen.name, v.id), element: el });
                found += 1;
            }
        }
        if found != 2 * v.genus {
            return Err(DgaError::Scenario(format!(
                "component {} declares {found} closed residue-free forms for genus {}",
                v.id, v.genus
            )));
        }
    }
    for c in hb.cycles() {
        let mut el = DgaElement::zero(1);
        for &(e, s) in c {
            el = el.plus(&DgaElement::edge(1, e, vec![EdgePoly::zero(), EdgePoly::zero(), EdgePoly::int(s as i64)]));
        }
        classes.push(BasisClass { weight: 0, label: format!("cycle {c:?}"), element: el });
    }
    Ok(H1Basis { classes })
}

/// For closed `φ` with zero residues and exact surface parts, the primitive
/// `f = Σ g_i + Σ (g_k(p_kl) + ∫₀^ξ H dξ)` normalized by `ε(f) = 0` at the
/// root component. `None` when `φ` is not exact.
pub fn exact_primitive(model: &Model, phi: &DgaElement) -> Result<Option<DgaElement>, DgaError> {
    if phi.degree != 1 {
        return Err(DgaError::DegreeMismatch { expected: 1, found: phi.degree });
    }
    if !model.d(phi)?.is_zero() || !model.is_compatible(phi)? {
        return Ok(None);
    }
    let g = &model.graph;
    // surface primitives from declared function generators
    let mut local: BTreeMap<usize, DgaElement> = BTreeMap::new();
    for s in model.surfaces() {
        let part = phi.surface_part(s.component).cloned().unwrap_or_default();
        let funcs: Vec<_> = s.generators().filter(|x| x.degree == 0 && x.name != ONE).collect();
        let names: BTreeSet<String> = part
            .keys()
            .cloned()
            .chain(funcs.iter().flat_map(|f| f.differential.keys().cloned()))
            .collect();
        let mut a = Vec::new();
        for n in &names {
            let mut row = Vec::new();
            for f in &funcs {
                match f.differential.get(n).map(rational) {
                    Some(Some(q)) => row.push(q),
                    Some(None) => return Ok(None),
                    None => row.push(BigRational::from_integer(0.into())),
                }
            }
            a.push(row);
        }
        let b: Vec<Scalar> = names.iter().map(|n| part.get(n).cloned().unwrap_or_default()).collect();
        let x = if funcs.is_empty() || names.is_empty() {
            b.iter().all(|v| v.is_zero()).then(|| vec![Scalar::zero(); funcs.len()])
        } else {
            solve(&a, &b)
        };
        let Some(x) = x else { return Ok(None) };
        let mut f = DgaElement::zero(0);
        for (gen, c) in funcs.iter().zip(x) {
            f = f.plus(&DgaElement::generator(model, s.component, &gen.name, c)?);
        }
        local.insert(s.component, f);
    }
    let value = |v: usize, e: usize| -> Result<Scalar, DgaError> {
        let s = model.surface(v)?;
        Ok(local[&v].surface_part(v).map(|c| s.value(c, e)).transpose()?.unwrap_or_default())
    };
    // constants by propagation from the root
    let root = g.root();
    let mut constant: BTreeMap<usize, Scalar> = BTreeMap::from([(root, Scalar::zero())]);
    let mut queue = VecDeque::from([root]);
    let adj = g.adjacency();
    let mut edge_parts = BTreeMap::new();
    while let Some(v) = queue.pop_front() {
        for e in adj.get(&v).into_iter().flatten() {
            let integral = phi.slot(e.id, 2).integrate_xi();
            let Some(jump) = integral.at_end(true).as_constant() else { return Ok(None) };
            let w = e.other(v);
            // c_l + g_l(p) = c_k + g_k(p) + ∫₀¹ H
            let (k, l) = (e.k, e.l);
            let known_k = constant.get(&k).cloned();
            let known_l = constant.get(&l).cloned();
            let implied_l = known_k.as_ref().map(|ck| -> Result<Scalar, DgaError> {
                Ok(&(&(ck + &value(k, e.id)?) + &jump) - &value(l, e.id)?)
            });
            let implied_k = known_l.as_ref().map(|cl| -> Result<Scalar, DgaError> {
                Ok(&(&(cl + &value(l, e.id)?) - &jump) - &value(k, e.id)?)
            });
            match (known_k, known_l) {
                (Some(_), Some(cl)) => {
                    if implied_l.unwrap()? != cl {
                        return Ok(None);
                    }
                }
                (Some(_), None) => {
                    constant.insert(l, implied_l.unwrap()?);
                    queue.push_back(w);
                }
                (None, Some(_)) => {
                    constant.insert(k, implied_k.unwrap()?);
                    queue.push_back(w);
                }
                (None, None) => unreachable!("v is known"),
            }
            let start = &constant[&k] + &value(k, e.id)?;
            edge_parts.insert(e.id, &EdgePoly::constant(start) + &integral);
        }
    }
    let mut f = DgaElement::zero(0);
    for (v, loc) in &local {
        f = f.plus(loc);
        f = f.plus(&DgaElement::generator(model, *v, ONE, constant[v].clone())?);
    }
    for (e, p) in edge_parts {
        f = f.plus(&DgaElement::edge(0, e, vec![p]));
    }
    if model.d(&f)? != *phi || !model.is_compatible(&f)? {
        return Ok(None);
    }
    Ok(Some(f))
}
