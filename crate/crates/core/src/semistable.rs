//! Base change of degree `d`, normalization and resolution of the cyclic
//! quotient points: the reduced central fiber and its dual graph.

use std::collections::BTreeMap;

use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{validate_graph, Edge, MarkedGraph, Vertex, VertexKind, Violation};
use crate::resolution::{lcm_d, ResKind, ResolutionGraph};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SemistableError {
    #[error("d not a common multiple: {e} does not divide {d}")]
    NotCommonMultiple { e: u64, d: u64 },
    #[error("internal consistency: Euler characteristic {chi} not divisible by 2·{c}")]
    EulerParity { chi: i64, c: u64 },
    #[error("paper assumption violated: vertices {k} and {l} joined by more than one edge")]
    MultipleEdge { k: usize, l: usize },
    #[error("central fiber too large: {0} components (limit {MAX_COMPONENTS})")]
    TooLarge(u64),
    #[error("invalid central fiber: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EdgeLocalData {
    pub point_count: u64,
    pub n_p: u64,
    pub chain_length: u64,
}

pub fn edge_chain_data(e_k: u64, e_l: u64, d: u64) -> Result<EdgeLocalData, SemistableError> {
    for e in [e_k, e_l] {
        if e == 0 || d % e != 0 {
            return Err(SemistableError::NotCommonMultiple { e, d });
        }
    }
    let n_p = d / e_k.lcm(&e_l);
    Ok(EdgeLocalData {
        point_count: e_k.gcd(&e_l),
        n_p,
        chain_length: n_p - 1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CoverData {
    pub component_count: u64,
    pub genus: u64,
    pub sheets: u64,
}

/// Normalized cyclic cover over a rational component of multiplicity `e`
/// punctured where it meets components of the given multiplicities.
pub fn cover_components(e: u64, neighbors: &[u64], d: u64) -> Result<CoverData, SemistableError> {
    for &m in neighbors.iter().chain([&e]) {
        if m == 0 || d % m != 0 {
            return Err(SemistableError::NotCommonMultiple { e: m, d });
        }
    }
    let c = neighbors.iter().fold(e, |a, &n| a.gcd(&n));
    let chi = e as i64 * (2 - neighbors.len() as i64)
        + neighbors.iter().map(|&n| e.gcd(&n) as i64).sum::<i64>();
    let two_c = 2 * c as i64;
    if chi % two_c != 0 || chi > two_c {
        return Err(SemistableError::EulerParity { chi, c });
    }
    Ok(CoverData {
        component_count: c,
        genus: (1 - chi / two_c) as u64,
        sheets: e,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Provenance {
    Strict { branch: usize },
    Cover { exceptional: usize, sheet: u64 },
    Chain { res_edge: usize, point: u64, position: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EdgeLocal {
    pub edge: usize,
    pub points: u64,
    pub n_p: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CentralFiberGraph {
    #[serde(flatten)]
    pub graph: MarkedGraph,
    pub d: u64,
    pub provenance: Vec<Provenance>,
    pub edge_local: Vec<EdgeLocal>,
}

/// Upper bound on the number of central fiber components we build.
pub const MAX_COMPONENTS: u64 = 1_000_000;

pub fn semistable_reduce(g: &ResolutionGraph) -> Result<CentralFiberGraph, SemistableError> {
    semistable_reduce_with(g, lcm_d(g))
}

/// Same construction with an explicit base-change degree.
pub fn semistable_reduce_with(g: &ResolutionGraph, d: u64) -> Result<CentralFiberGraph, SemistableError> {
    let mult = |v: usize| g.vertices[v].multiplicity;
    let mut size = g.r as u64;
    for v in &g.vertices {
        if v.kind == ResKind::Exceptional {
            size += g.neighbors(v.id).iter().fold(v.multiplicity, |a, &w| a.gcd(&mult(w)));
        }
    }
    for e in &g.edges {
        let data = edge_chain_data(mult(e.k), mult(e.l), d)?;
        size = size.saturating_add(data.point_count.saturating_mul(data.chain_length));
    }
    if size > MAX_COMPONENTS {
        return Err(SemistableError::TooLarge(size));
    }
    let mut vertices: Vec<Vertex> = Vec::new();
    let mut provenance: Vec<Provenance> = Vec::new();

    // Disks first, one per branch.
    let mut strict_id = BTreeMap::new();
    for v in &g.vertices {
        if v.kind == ResKind::Strict {
            let branch = v.branch.unwrap_or(0);
            strict_id.insert(v.id, vertices.len());
            vertices.push(Vertex {
                id: vertices.len(),
                genus: 0,
                kind: VertexKind::Disk,
                branch: Some(branch),
            });
            provenance.push(Provenance::Strict { branch });
        }
    }
    // Covers of the exceptional components.
    let mut cover_base: BTreeMap<usize, (usize, u64)> = BTreeMap::new();
    for v in &g.vertices {
        if v.kind != ResKind::Exceptional {
            continue;
        }
        let nb: Vec<u64> = g.neighbors(v.id).iter().map(|&w| mult(w)).collect();
        let cd = cover_components(v.multiplicity, &nb, d)?;
        cover_base.insert(v.id, (vertices.len(), cd.component_count));
        for sheet in 0..cd.component_count {
            vertices.push(Vertex {
                id: vertices.len(),
                genus: cd.genus as u32,
                kind: VertexKind::Compact,
                branch: None,
            });
            provenance.push(Provenance::Cover {
                exceptional: v.id,
                sheet,
            });
        }
    }
    let component = |v: usize, a: u64| -> usize {
        match strict_id.get(&v) {
            Some(&id) => id,
            None => {
                let (base, c) = cover_base[&v];
                base + (a % c) as usize
            }
        }
    };

    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut edge_local = Vec::new();
    for e in &g.edges {
        let data = edge_chain_data(mult(e.k), mult(e.l), d)?;
        edge_local.push(EdgeLocal {
            edge: e.id,
            points: data.point_count,
            n_p: data.n_p,
        });
        for a in 0..data.point_count {
            let mut prev = component(e.k, a);
            for position in 0..data.chain_length {
                let id = vertices.len();
                vertices.push(Vertex {
                    id,
                    genus: 0,
                    kind: VertexKind::Compact,
                    branch: None,
                });
                provenance.push(Provenance::Chain {
                    res_edge: e.id,
                    point: a,
                    position,
                });
                pairs.push((prev, id));
                prev = id;
            }
            pairs.push((prev, component(e.l, a)));
        }
    }
    let edges: Vec<Edge> = pairs
        .iter()
        .enumerate()
        .map(|(id, &(a, b))| Edge {
            id,
            k: a.min(b),
            l: a.max(b),
        })
        .collect();
    let graph = MarkedGraph { vertices, edges };
    // A smooth germ gives a lone disk, which is allowed here.
    let lone_disk = graph.vertices.len() == 1 && graph.edges.is_empty();
    let violations = if lone_disk { Vec::new() } else { validate_graph(&graph) };
    if let Some(Violation::MultipleEdge { k, l, .. }) = violations
        .iter()
        .find(|v| matches!(v, Violation::MultipleEdge { .. }))
    {
        return Err(SemistableError::MultipleEdge { k: *k, l: *l });
    }
    if let Some(v) = violations.first() {
        return Err(SemistableError::Invalid(v.to_string()));
    }
    Ok(CentralFiberGraph {
        graph,
        d,
        provenance,
        edge_local,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct H1Report {
    pub dim: i64,
    pub mu: u64,
    pub r: usize,
    pub pass: bool,
}

/// `dim H¹ = r + 1 + Σ(2g − 2) + 2·#edges`.
pub fn h1_dimension(g: &MarkedGraph) -> i64 {
    g.r() as i64
        + 1
        + g.vertices.iter().map(|v| 2 * v.genus as i64 - 2).sum::<i64>()
        + 2 * g.edges.len() as i64
}

pub fn verify_h1_dimension(g: &CentralFiberGraph, mu: u64, r: usize) -> H1Report {
    let dim = h1_dimension(&g.graph);
    H1Report {
        dim,
        mu,
        r,
        pass: dim == mu as i64 && g.graph.r() == r,
    }
}
