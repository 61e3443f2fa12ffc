//! Minimal embedded resolution by cluster calculus on infinitely near points.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

use crate::curve::{BranchSpec, CurveSpec};
use crate::graph::Edge;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ResolutionError {
    #[error("incompatible contact data between branches {i} and {j}: {reason}")]
    IncompatibleContact { i: usize, j: usize, reason: String },
}

/// Multiplicities at successive infinitely near points, trailing 1s dropped
/// (a smooth branch keeps its single leading 1).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultiplicitySeq(pub Vec<u64>);

/// Euclidean algorithm on the characteristic sequence.
fn euclid_sequence(b: &BranchSpec) -> Vec<u64> {
    let (n, betas) = b.characteristic_integers();
    let mut out = Vec::new();
    let mut e = n;
    let mut prev = 0u64;
    for beta in betas {
        let (mut a, mut d) = (beta - prev, e);
        while d > 0 {
            for _ in 0..a / d {
                out.push(d);
            }
            let r = a % d;
            a = d;
            d = r;
        }
        e = e.gcd(&beta);
        prev = beta;
    }
    out
}

pub fn multiplicity_sequence(b: &BranchSpec) -> MultiplicitySeq {
    let mut v = euclid_sequence(b);
    while v.len() > 1 && v.last() == Some(&1) {
        v.pop();
    }
    if v.is_empty() {
        v.push(1);
    }
    MultiplicitySeq(v)
}

/// `δ = Σ m(m−1)/2` over the multiplicity sequence.
pub fn delta(b: &BranchSpec) -> u64 {
    euclid_sequence(b).iter().map(|m| m * (m - 1) / 2).sum()
}

/// Infinitely near points of one branch, depths 1-based (index `t − 1`).
#[derive(Debug, Clone)]
struct BranchCluster {
    mult: Vec<u64>,
    /// Depths each point is proximate to, ascending.
    prox: Vec<Vec<usize>>,
    /// Last depth that must be blown up for the branch alone.
    needed: usize,
}

impl BranchCluster {
    fn new(b: &BranchSpec, len: usize) -> Self {
        let mut mult = euclid_sequence(b);
        let base = mult.len();
        let len = len.max(base + mult.first().copied().unwrap_or(1) as usize + 2);
        mult.resize(len, 1);
        let mut prox = vec![Vec::new(); len];
        for j in 0..len {
            let mut acc = 0;
            let mut t = j + 1;
            while acc < mult[j] && t < len {
                acc += mult[t];
                prox[t].push(j + 1);
                t += 1;
            }
        }
        let last_mult = mult.iter().rposition(|&m| m > 1).map_or(0, |p| p + 1);
        let last_sat = prox[..base.max(1)]
            .iter()
            .rposition(|p| p.len() >= 2)
            .map_or(0, |p| p + 1);
        BranchCluster {
            mult,
            prox,
            needed: last_mult.max(last_sat),
        }
    }

    fn m(&self, t: usize) -> u64 {
        self.mult[t - 1]
    }

    fn prox(&self, t: usize) -> &[usize] {
        &self.prox[t - 1]
    }

    fn satellite(&self, t: usize) -> bool {
        self.prox[t - 1].len() >= 2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ResKind {
    Exceptional,
    Strict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResVertex {
    pub id: usize,
    pub multiplicity: u64,
    pub kind: ResKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub branch: Option<usize>,
    /// Informational only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub self_intersection: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResolutionGraph {
    pub vertices: Vec<ResVertex>,
    pub edges: Vec<Edge>,
    /// `proximity[p][q] = 1` iff the center of `E_p` is proximate to that of `E_q`.
    pub proximity: Vec<Vec<u8>>,
    /// Multiplicity of the (total) strict transform at each blown-up point.
    pub point_multiplicities: Vec<u64>,
    /// Shared cluster depth per branch pair.
    pub contact_depths: Vec<Vec<usize>>,
    /// Always false: the Noether sum is strictly increasing in the depth.
    pub contact_ambiguous: bool,
    pub r: usize,
}

fn contact_depth(
    a: &BranchCluster,
    b: &BranchCluster,
    target: u64,
    i: usize,
    j: usize,
) -> Result<usize, ResolutionError> {
    let err = |reason: String| ResolutionError::IncompatibleContact { i, j, reason };
    let mut sum = 0u64;
    let mut t = 0usize;
    while sum < target {
        t += 1;
        if t > a.mult.len().min(b.mult.len()) {
            return Err(err("contact exceeds cluster length".into()));
        }
        if a.prox(t) != b.prox(t) {
            return Err(err(format!("proximity differs at shared depth {t}")));
        }
        sum += a.m(t) * b.m(t);
    }
    if sum != target {
        return Err(err(format!(
            "no shared cluster has Σ m·m' = {target} (jumps to {sum})"
        )));
    }
    if a.satellite(t + 1) && b.satellite(t + 1) && a.prox(t + 1) == b.prox(t + 1) {
        return Err(err(format!(
            "branches cannot separate after depth {t}: next points coincide"
        )));
    }
    Ok(t)
}

pub fn build_resolution_graph(c: &CurveSpec) -> Result<ResolutionGraph, ResolutionError> {
    let r = c.r();
    let max_i = c
        .intersections
        .iter()
        .flat_map(|row| row.iter().copied())
        .max()
        .unwrap_or(0) as usize;
    let clusters: Vec<BranchCluster> = c
        .branches
        .iter()
        .map(|b| BranchCluster::new(b, euclid_sequence(b).len() + max_i + 2))
        .collect();

    let mut depth = vec![vec![usize::MAX; r]; r];
    for i in 0..r {
        for j in i + 1..r {
            let t = contact_depth(&clusters[i], &clusters[j], c.intersections[i][j], i, j)?;
            depth[i][j] = t;
            depth[j][i] = t;
        }
    }
    for i in 0..r {
        for j in 0..r {
            for k in 0..r {
                if i != j && j != k && i != k && depth[i][j] < depth[i][k].min(depth[j][k]) {
                    return Err(ResolutionError::IncompatibleContact {
                        i,
                        j,
                        reason: format!("contact depths violate the tree condition via branch {k}"),
                    });
                }
            }
        }
    }

    let n: Vec<usize> = (0..r)
        .map(|i| {
            (0..r)
                .filter(|&j| j != i)
                .map(|j| depth[i][j])
                .fold(clusters[i].needed, usize::max)
        })
        .collect();
    let rep = |i: usize, t: usize| (0..r).find(|&j| j == i || depth[i][j] >= t).unwrap();

    // Blown-up points keyed by (depth, representative branch).
    let max_n = n.iter().copied().max().unwrap_or(0);
    let mut nodes: Vec<(usize, usize)> = Vec::new();
    for t in 1..=max_n {
        for i in 0..r {
            if n[i] >= t && rep(i, t) == i {
                nodes.push((t, i));
            }
        }
    }
    let index: BTreeMap<(usize, usize), usize> =
        nodes.iter().enumerate().map(|(p, &k)| (k, p)).collect();
    let np = nodes.len();

    let mut proximity = vec![vec![0u8; np]; np];
    let mut point_mult = vec![0u64; np];
    for (p, &(t, b)) in nodes.iter().enumerate() {
        for &s in clusters[b].prox(t) {
            proximity[p][index[&(s, rep(b, s))]] = 1;
        }
        point_mult[p] = (0..r)
            .filter(|&j| n[j] >= t && rep(j, t) == b)
            .map(|j| clusters[j].m(t))
            .sum();
    }

    let mut e = vec![0u64; np];
    for p in 0..np {
        e[p] = point_mult[p] + (0..p).filter(|&q| proximity[p][q] == 1).map(|q| e[q]).sum::<u64>();
    }

    let mut vertices: Vec<ResVertex> = (0..np)
        .map(|p| ResVertex {
            id: p,
            multiplicity: e[p],
            kind: ResKind::Exceptional,
            branch: None,
            self_intersection: Some(
                -1 - (0..np).filter(|&s| proximity[s][p] == 1).count() as i64,
            ),
        })
        .collect();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for p in 0..np {
        for q in 0..p {
            if proximity[p][q] == 1
                && !(0..np).any(|s| proximity[s][p] == 1 && proximity[s][q] == 1)
            {
                pairs.push((q, p));
            }
        }
    }
    for i in 0..r {
        let id = vertices.len();
        vertices.push(ResVertex {
            id,
            multiplicity: 1,
            kind: ResKind::Strict,
            branch: Some(i),
            self_intersection: None,
        });
        if n[i] >= 1 {
            pairs.push((index[&(n[i], rep(i, n[i]))], id));
        }
    }
    pairs.sort();
    let edges = pairs
        .into_iter()
        .enumerate()
        .map(|(id, (k, l))| Edge { id, k, l })
        .collect();

    Ok(ResolutionGraph {
        vertices,
        edges,
        proximity,
        point_multiplicities: point_mult,
        contact_depths: depth
            .iter()
            .map(|row| row.iter().map(|&d| if d == usize::MAX { 0 } else { d }).collect())
            .collect(),
        contact_ambiguous: false,
        r,
    })
}

impl ResolutionGraph {
    pub fn exceptional_count(&self) -> usize {
        self.proximity.len()
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|e| {
                if e.k == v {
                    Some(e.l)
                } else if e.l == v {
                    Some(e.k)
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn strict_vertex(&self, branch: usize) -> usize {
        self.exceptional_count() + branch
    }

    /// Structural audit; returns a list of violated properties.
    pub fn check(&self) -> Vec<String> {
        let mut out = Vec::new();
        let nv = self.vertices.len();
        if self.edges.len() + 1 != nv {
            out.push(format!("not a tree: {} vertices, {} edges", nv, self.edges.len()));
        }
        let mut seen = vec![false; nv];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for w in self.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            out.push("not connected".into());
        }
        for v in &self.vertices {
            let deg = self.neighbors(v.id).len();
            match v.kind {
                ResKind::Strict => {
                    if deg != 1 && nv > 1 {
                        out.push(format!("strict vertex {} has degree {deg}", v.id));
                    }
                }
                ResKind::Exceptional => {
                    let s = v.self_intersection.unwrap_or(-1);
                    let lhs = -(v.multiplicity as i64) * s;
                    let rhs: i64 = self
                        .neighbors(v.id)
                        .iter()
                        .map(|&w| self.vertices[w].multiplicity as i64)
                        .sum();
                    if lhs != rhs {
                        out.push(format!("total transform inconsistent at E{}: {lhs} ≠ {rhs}", v.id));
                    }
                }
            }
        }
        out
    }

    /// No (−1)-curve can be contracted keeping normal crossings and keeping
    /// the strict transforms pairwise disjoint.
    pub fn is_minimal(&self) -> bool {
        self.vertices.iter().all(|v| {
            if v.kind != ResKind::Exceptional || v.self_intersection != Some(-1) {
                return true;
            }
            let nb = self.neighbors(v.id);
            let strict = nb
                .iter()
                .filter(|&&w| self.vertices[w].kind == ResKind::Strict)
                .count();
            nb.len() > 2 || strict >= 2
        })
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph resolution {\n");
        for v in &self.vertices {
            match v.kind {
                ResKind::Exceptional => {
                    let _ = writeln!(s, "  v{} [label=\"E_{} (e={})\"];", v.id, v.id, v.multiplicity);
                }
                ResKind::Strict => {
                    let _ = writeln!(
                        s,
                        "  v{} [shape=box,label=\"C_{} (e=1)\"];",
                        v.id,
                        v.branch.unwrap_or(0)
                    );
                }
            }
        }
        for e in &self.edges {
            let _ = writeln!(s, "  v{} -- v{};", e.k, e.l);
        }
        s.push_str("}\n");
        s
    }
}

/// Saturates at `u64::MAX` when the lcm does not fit.
pub fn lcm_d(g: &ResolutionGraph) -> u64 {
    g.vertices
        .iter()
        .try_fold(1u64, |a, v| (a / a.gcd(&v.multiplicity)).checked_mul(v.multiplicity))
        .unwrap_or(u64::MAX)
}

/// `μ = Σ_p m_p(m_p − 1) − r + 1` over all blown-up points.
pub fn mu_from_resolution(g: &ResolutionGraph, r: usize) -> u64 {
    let s: u64 = g.point_multiplicities.iter().map(|m| m * (m - 1)).sum();
    s + 1 - r as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(ex: &[&str]) -> Vec<u64> {
        euclid_sequence(&BranchSpec::parse(ex).unwrap())
    }

    #[test]
    fn sequences() {
        assert_eq!(seq(&["3/2"]), vec![2, 1, 1]);
        assert_eq!(seq(&["3/2", "7/4"]), vec![4, 2, 2, 1, 1]);
        assert_eq!(multiplicity_sequence(&BranchSpec::smooth()).0, vec![1]);
        assert_eq!(multiplicity_sequence(&BranchSpec::parse(&["3/2"]).unwrap()).0, vec![2]);
        assert_eq!(delta(&BranchSpec::parse(&["3/2", "7/4"]).unwrap()), 8);
    }

    #[test]
    fn f_lambda_graph() {
        let c = CurveSpec::single(BranchSpec::parse(&["3/2", "7/4"]).unwrap());
        let g = build_resolution_graph(&c).unwrap();
        let e: Vec<u64> = g.vertices.iter().map(|v| v.multiplicity).collect();
        assert_eq!(e, vec![4, 6, 12, 13, 26, 1]);
        let pairs: Vec<(usize, usize)> = g.edges.iter().map(|e| (e.k, e.l)).collect();
        assert_eq!(pairs, vec![(0, 2), (1, 2), (2, 4), (3, 4), (4, 5)]);
        assert_eq!(lcm_d(&g), 156);
        assert!(g.check().is_empty());
        assert!(g.is_minimal());
        assert_eq!(mu_from_resolution(&g, 1), 16);
    }
}
