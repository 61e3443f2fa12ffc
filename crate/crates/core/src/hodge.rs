//! Weight-graded dimensions, the operators `N`, `M_i`, `T`, `L` on `H¹`, and
//! the assembled invariant.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::curve::{CurveSpec, MonstranceData};
use crate::graph::{MarkedGraph, VertexKind};
use crate::linalg::solve;
use crate::matrix::Matrix;
use crate::pipeline::{run_pipeline, PipelineError};
use crate::scalar::Scalar;
use crate::semistable::CentralFiberGraph;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HodgeError {
    #[error("branch count mismatch: graph has {graph} disks, {given} monstrance entries given")]
    BranchCount { graph: usize, given: usize },
    #[error("orbit size must be at least 1")]
    EmptyOrbit,
    #[error("monodromy not integral")]
    NotIntegral,
}

pub type SignedEdges = Vec<(usize, i32)>;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BasisVector {
    /// Weight 2: flow around a fundamental cycle.
    CycleFlow { edges: SignedEdges },
    /// Weight 2: harmonic flow from disk `branch` to the other disks.
    DiskGradient { branch: usize, flow: Vec<(usize, i64)> },
    /// Weight 1: genus generator of a compact component.
    Genus { component: usize, index: u32, conjugate: bool },
    /// Weight 0: class of the edge cochain dual to a fundamental cycle.
    CycleClass { edges: SignedEdges },
}

/// Ordered basis `w2 ⊕ w1 ⊕ w0` of `H¹`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HodgeBasis {
    pub vectors: Vec<BasisVector>,
    pub w2: usize,
    pub w1: usize,
    pub w0: usize,
    #[serde(skip)]
    flows: Vec<Vec<BigRational>>,
    #[serde(skip)]
    cycles: Vec<SignedEdges>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MhsSummary {
    /// `(w0, w1, w2)`.
    pub gr_dims: (u64, u64, u64),
    pub gr2_alt: i64,
    pub hodge_split: (u64, u64),
    pub basis: HodgeBasis,
}

fn primitive_integer(v: &[BigRational]) -> Vec<i64> {
    let l = v.iter().fold(num_bigint::BigInt::one(), |a, q| a.lcm(q.denom()));
    let ints: Vec<num_bigint::BigInt> = v.iter().map(|q| (q * BigRational::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(num_bigint::BigInt::zero(), |a, b| a.gcd(b));
    ints.iter()
        .map(|x| {
            let y = if g.is_zero() { x.clone() } else { x / &g };
            i64::try_from(y).expect("flow entry fits in i64")
        })
        .collect()
}

/// Maximal paths through rational degree-2 components, between "key"
/// vertices (disks and all other compact vertices).
struct Chain {
    start: usize,
    end: usize,
    /// (edge id, +1 if traversed from k to l)
    edges: Vec<(usize, i32)>,
}

fn series_chains(g: &MarkedGraph) -> (Vec<usize>, Vec<Chain>) {
    let adj = g.adjacency();
    let is_key = |v: usize| {
        let x = g.vertex(v).unwrap();
        x.kind == VertexKind::Disk || x.genus > 0 || adj[&v].len() != 2
    };
    let keys: Vec<usize> = g.vertices.iter().map(|v| v.id).filter(|&v| is_key(v)).collect();
    let mut used = vec![false; g.edges.iter().map(|e| e.id + 1).max().unwrap_or(0)];
    let mut chains = Vec::new();
    for &k in &keys {
        for &e0 in &adj[&k] {
            if used[e0.id] {
                continue;
            }
            let mut edges = Vec::new();
            let mut cur = k;
            let mut e = e0;
            loop {
                used[e.id] = true;
                edges.push((e.id, if e.k == cur { 1 } else { -1 }));
                cur = e.other(cur);
                if is_key(cur) {
                    break;
                }
                e = *adj[&cur].iter().find(|x| !used[x.id]).expect("chain continues");
            }
            chains.push(Chain { start: k, end: cur, edges });
        }
    }
    (keys, chains)
}

/// Harmonic potential with value 1 on disk `branch` and 0 on the other disks;
/// returns the gradient `φ(l) − φ(k)` per edge.
fn harmonic_flow(g: &MarkedGraph, branch: usize) -> Vec<BigRational> {
    let (keys, chains) = series_chains(g);
    let inner: Vec<usize> = keys
        .iter()
        .copied()
        .filter(|&v| g.vertex(v).unwrap().kind == VertexKind::Compact)
        .collect();
    let pos: BTreeMap<usize, usize> = inner.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let boundary = |v: usize| -> BigRational {
        if g.vertex(v).and_then(|x| x.branch) == Some(branch) {
            BigRational::one()
        } else {
            BigRational::zero()
        }
    };
    let n = inner.len();
    let mut a = vec![vec![BigRational::zero(); n]; n];
    let mut b = vec![Scalar::zero(); n];
    for ch in &chains {
        let w = BigRational::new(1.into(), (ch.edges.len() as i64).into());
        for (v, u) in [(ch.start, ch.end), (ch.end, ch.start)] {
            let Some(&i) = pos.get(&v) else { continue };
            a[i][i] += &w;
            match pos.get(&u) {
                Some(&j) => a[i][j] -= &w,
                None => b[i] += &Scalar::from_ratio(&w * boundary(u)),
            }
        }
    }
    let phi_c = solve(&a, &b).expect("Dirichlet problem on a connected graph is solvable");
    let phi = |v: usize| -> BigRational {
        match pos.get(&v) {
            Some(&i) => phi_c[i].as_rational().expect("rational"),
            None => boundary(v),
        }
    };
    let mut flow = vec![BigRational::zero(); g.edges.len()];
    for ch in &chains {
        let current = (phi(ch.end) - phi(ch.start)) / BigRational::from_integer((ch.edges.len() as i64).into());
        for &(e, dir) in &ch.edges {
            flow[e] = if dir > 0 { current.clone() } else { -current.clone() };
        }
    }
    flow
}

pub fn hodge_basis(g: &MarkedGraph) -> HodgeBasis {
    let ne = g.edges.len();
    let cycles: Vec<SignedEdges> = g.fundamental_cycles().into_iter().map(|(_, c)| c).collect();
    let mut vectors = Vec::new();
    let mut flows = Vec::new();
    for c in &cycles {
        let mut f = vec![BigRational::zero(); ne];
        for &(e, s) in c {
            f[e] += BigRational::from_integer(s.into());
        }
        flows.push(f);
        vectors.push(BasisVector::CycleFlow { edges: c.clone() });
    }
    let mut branches: Vec<usize> = g.disks().iter().filter_map(|v| v.branch).collect();
    branches.sort();
    for &b in branches.iter().skip(1) {
        let f = harmonic_flow(g, b);
        let ints = primitive_integer(&f);
        flows.push(ints.iter().map(|&x| BigRational::from_integer(x.into())).collect());
        vectors.push(BasisVector::DiskGradient {
            branch: b,
            flow: ints.iter().enumerate().filter(|(_, &x)| x != 0).map(|(e, &x)| (e, x)).collect(),
        });
    }
    let w2 = vectors.len();
    let mut compact: Vec<_> = g.vertices.iter().filter(|v| v.kind == VertexKind::Compact).collect();
    compact.sort_by_key(|v| v.id);
    for v in &compact {
        for conjugate in [false, true] {
            for index in 0..v.genus {
                vectors.push(BasisVector::Genus {
                    component: v.id,
                    index,
                    conjugate,
                });
            }
        }
    }
    let w1 = vectors.len() - w2;
    for c in &cycles {
        vectors.push(BasisVector::CycleClass { edges: c.clone() });
    }
    HodgeBasis {
        vectors,
        w2,
        w1,
        w0: cycles.len(),
        flows,
        cycles,
    }
}

impl HodgeBasis {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Edge flows of the weight-2 vectors, indexed by edge id.
    pub fn flows(&self) -> &[Vec<BigRational>] {
        &self.flows
    }

    /// Fundamental cycles behind the weight-0 vectors.
    pub fn cycles(&self) -> &[SignedEdges] {
        &self.cycles
    }

    fn w0_offset(&self) -> usize {
        self.w2 + self.w1
    }

    /// Coordinates in the weight-0 block of the class of an edge cochain,
    /// read off from its periods on the fundamental cycles.
    pub fn cochain_class(&self, cochain: &[Scalar]) -> Vec<Scalar> {
        let period = |c: &SignedEdges, f: &dyn Fn(usize) -> Scalar| -> Scalar {
            let mut s = Scalar::zero();
            for &(e, sign) in c {
                s += &(&f(e) * &Scalar::from_int(sign as i64));
            }
            s
        };
        let k = self.cycles.len();
        if k == 0 {
            return Vec::new();
        }
        // gram[j][i] = <z_i, C_j>
        let mut gram = vec![vec![BigRational::zero(); k]; k];
        for (i, ci) in self.cycles.iter().enumerate() {
            let mut z = BTreeMap::new();
            for &(e, s) in ci {
                *z.entry(e).or_insert(0i64) += s as i64;
            }
            for (j, cj) in self.cycles.iter().enumerate() {
                let p = period(cj, &|e| Scalar::from_int(*z.get(&e).unwrap_or(&0)));
                gram[j][i] = p.as_rational().unwrap();
            }
        }
        let periods: Vec<Scalar> = self
            .cycles
            .iter()
            .map(|c| period(c, &|e| cochain[e].clone()))
            .collect();
        solve(&gram, &periods).expect("cycle classes form a basis")
    }
}

pub fn weight_graded_dims(cf: &CentralFiberGraph) -> MhsSummary {
    let g = &cf.graph;
    let compact = g.compact().len() as i64;
    let genus = g.total_genus();
    let w0 = g.betti1().max(0) as u64;
    let w2 = (g.edges.len() as i64 - compact).max(0) as u64;
    MhsSummary {
        gr_dims: (w0, 2 * genus, w2),
        gr2_alt: g.betti1(),
        hodge_split: (genus, genus),
        basis: hodge_basis(g),
    }
}

/// A tree exactly when `T` is the identity.
pub fn tree_test(g: &MarkedGraph) -> bool {
    g.edges.len() + 1 == g.vertices.len()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NilpotentOps {
    pub basis: HodgeBasis,
    pub n: Matrix,
    pub m: Vec<Matrix>,
    pub t: Vec<Vec<i64>>,
    pub l: Matrix,
}

pub fn nilpotent_matrices(
    cf: &CentralFiberGraph,
    mono: &[MonstranceData],
) -> Result<NilpotentOps, HodgeError> {
    let g = &cf.graph;
    let r = g.r();
    if mono.len() != r {
        return Err(HodgeError::BranchCount { graph: r, given: mono.len() });
    }
    let basis = hodge_basis(g);
    let dim = basis.len();
    let off = basis.w0_offset();
    let tau_inv = Scalar::tau_pow(-1);
    let mut n = Matrix::zero(dim, dim);
    for (row, flow) in basis.flows.iter().enumerate() {
        let cochain: Vec<Scalar> = flow.iter().map(|q| &Scalar::from_ratio(q.clone()) * &tau_inv).collect();
        for (j, v) in basis.cochain_class(&cochain).into_iter().enumerate() {
            n.set(row, off + j, v);
        }
    }
    let mut ms = Vec::with_capacity(r);
    for branch in 0..r {
        let mut m = Matrix::zero(dim, dim);
        if let Some(e) = g.disk_edge(branch) {
            for (row, flow) in basis.flows.iter().enumerate() {
                let mut cochain = vec![Scalar::zero(); g.edges.len()];
                cochain[e.id] = &Scalar::from_ratio(flow[e.id].clone()) * &tau_inv;
                for (j, v) in basis.cochain_class(&cochain).into_iter().enumerate() {
                    m.set(row, off + j, v);
                }
            }
        }
        ms.push(m);
    }
    let t = (&Matrix::identity(dim) - &n.scale(&Scalar::tau()))
        .to_ints()
        .ok_or(HodgeError::NotIntegral)?;
    let mut l = n.scale(&Scalar::frac(1, cf.d as i64));
    for (m, md) in ms.iter().zip(mono) {
        l = &l - &m.scale(&Scalar::frac(1, md.order as i64));
    }
    Ok(NilpotentOps { basis, n, m: ms, t, l })
}

/// `λ^{−N} μ^{M} = (I − log λ·N)(I + log μ·ΣM_i)`.
pub fn lattice_transport(ops: &NilpotentOps, log_lambda: &Scalar, log_mu: &Scalar) -> Matrix {
    let dim = ops.n.rows();
    let id = Matrix::identity(dim);
    let m_total = ops.m.iter().fold(Matrix::zero(dim, dim), |a, m| &a + m);
    let a = &id - &ops.n.scale(log_lambda);
    let b = &id + &m_total.scale(log_mu);
    &a * &b
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitDescriptor {
    pub size: u64,
    /// The generator acts on tangent vectors by `w ↦ ζ·w` with `ζ = e^{τ/size}`.
    pub generator: String,
    pub action: String,
}

pub fn inverse_star(mult: u64) -> Result<OrbitDescriptor, HodgeError> {
    if mult == 0 {
        return Err(HodgeError::EmptyOrbit);
    }
    Ok(OrbitDescriptor {
        size: mult,
        generator: format!("exp(tau/{mult})"),
        action: if mult == 1 { "trivial".into() } else { format!("cyclic of order {mult}") },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Constancy {
    /// `N` or some `M_i` is already nonzero on `H¹`.
    H1Operators,
    /// All weights of the dual quotient lie in a window narrower than 2.
    WeightWindow { min: u32, max: u32 },
    /// A Chen-closed element on which `L` has nonzero class.
    BarWitness { branch: usize, component: usize, distance: u64, coefficient: String },
    /// No obstruction found.
    NoWitness,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradedDims {
    pub s: u32,
    /// weight → dimension
    pub dims: BTreeMap<u32, u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantSummary {
    pub d: u64,
    pub monstrance_orbits: Vec<u64>,
    pub summand_count: u64,
    pub graded_dims: Vec<GradedDims>,
    pub l: Matrix,
    pub tree: bool,
    pub constant: bool,
    pub certified: bool,
    pub reason: Constancy,
}

/// Weight-graded dimensions of `(J/J^{s+1})*`: `Σ_{k≤s} (w0 + w1 t + w2 t²)^k`.
pub fn graded_dims(gr: (u64, u64, u64), s: u32) -> BTreeMap<u32, u64> {
    let base = [gr.0, gr.1, gr.2];
    let mut power: BTreeMap<u32, u64> = BTreeMap::from([(0, 1)]);
    let mut total: BTreeMap<u32, u64> = BTreeMap::new();
    for _ in 0..s {
        let mut next = BTreeMap::new();
        for (&w, &c) in &power {
            for (dw, &b) in base.iter().enumerate() {
                if b > 0 {
                    *next.entry(w + dw as u32).or_insert(0) += c * b;
                }
            }
        }
        power = next;
        for (&w, &c) in &power {
            *total.entry(w).or_insert(0) += c;
        }
    }
    total
}

/// Search for a closed bar element of length 3 supported on the chain from
/// a disk to a positive-genus component, on which `L` acts by
/// `(n/d − 1/(m k))` times a nonzero class, `n` the chain length.
pub fn bar_witness(cf: &CentralFiberGraph, mono: &[MonstranceData]) -> Option<Constancy> {
    let g = &cf.graph;
    let all: std::collections::BTreeSet<usize> = g.edges.iter().map(|e| e.id).collect();
    for (branch, md) in mono.iter().enumerate() {
        let Some(disk) = g.disk_vertex(branch) else { continue };
        let mut targets: Vec<_> = g.compact().iter().filter(|v| v.genus >= 1).map(|v| v.id).collect();
        targets.sort();
        for c in targets {
            let Some(path) = g.path_in(&all, disk.id, c) else { continue };
            let n = path.len() as i64;
            let coeff = Scalar::frac(n, cf.d as i64) - Scalar::frac(1, md.order as i64);
            if !coeff.is_zero() {
                return Some(Constancy::BarWitness {
                    branch,
                    component: c,
                    distance: n as u64,
                    coefficient: coeff.to_string(),
                });
            }
        }
    }
    None
}

pub fn assemble_invariant(c: &CurveSpec, s: u32) -> Result<InvariantSummary, PipelineError> {
    let p = run_pipeline(c)?;
    let ops = &p.ops;
    let mono = &p.monstrance;
    let gr = p.mhs.gr_dims;
    let dims: Vec<GradedDims> = (1..=s)
        .map(|k| GradedDims { s: k, dims: graded_dims(gr, k) })
        .collect();
    let h1_nonzero = !ops.n.is_zero() || ops.m.iter().any(|m| !m.is_zero());
    let window = dims.last().map(|gd| {
        let min = gd.dims.keys().next().copied().unwrap_or(0);
        let max = gd.dims.keys().last().copied().unwrap_or(0);
        (min, max)
    });
    let (constant, certified, reason) = if h1_nonzero {
        (false, true, Constancy::H1Operators)
    } else if let Some((min, max)) = window.filter(|(a, b)| b - a < 2) {
        (true, true, Constancy::WeightWindow { min, max })
    } else if s >= 3 {
        match bar_witness(&p.central_fiber, mono) {
            Some(w) => (false, true, w),
            None => (true, false, Constancy::NoWitness),
        }
    } else {
        (true, false, Constancy::NoWitness)
    };
    let orders: Vec<u64> = mono.iter().map(|m| m.order).collect();
    Ok(InvariantSummary {
        d: p.central_fiber.d,
        summand_count: p.central_fiber.d * orders.iter().sum::<u64>(),
        monstrance_orbits: orders,
        graded_dims: dims,
        l: ops.l.clone(),
        tree: tree_test(&p.central_fiber.graph),
        constant,
        certified,
        reason,
    })
}
