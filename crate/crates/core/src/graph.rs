//! Marked dual graphs: compact components and disks joined by double points.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexKind {
    Disk,
    Compact,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: usize,
    pub genus: u32,
    pub kind: VertexKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch: Option<usize>,
}

/// An edge joins vertices `k < l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub id: usize,
    pub k: usize,
    pub l: usize,
}

impl Edge {
    pub fn other(&self, v: usize) -> usize {
        if v == self.k {
            self.l
        } else {
            self.k
        }
    }

    pub fn touches(&self, v: usize) -> bool {
        self.k == v || self.l == v
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MarkedGraph {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Violation {
    DuplicateVertexId { vertex: usize },
    DuplicateEdgeId { edge: usize },
    UnknownVertex { edge: usize, vertex: usize },
    EdgeOrientation { edge: usize },
    SelfLoop { edge: usize },
    MultipleEdge { k: usize, l: usize, edges: Vec<usize> },
    Disconnected { components: usize },
    DiskDegree { vertex: usize, degree: usize },
    DiskGenus { vertex: usize, genus: u32 },
    MissingBranch { vertex: usize },
    CompactWithBranch { vertex: usize },
    BranchIndices { found: Vec<usize> },
    Empty,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateVertexId { vertex } => write!(f, "duplicate vertex id {vertex}"),
            Violation::DuplicateEdgeId { edge } => write!(f, "duplicate edge id {edge}"),
            Violation::UnknownVertex { edge, vertex } => {
                write!(f, "edge {edge} refers to unknown vertex {vertex}")
            }
            Violation::EdgeOrientation { edge } => write!(f, "edge {edge} not stored with k < l"),
            Violation::SelfLoop { edge } => write!(f, "self-loop at edge {edge}"),
            Violation::MultipleEdge { k, l, edges } => {
                write!(f, "multiple edge between {k} and {l}: {edges:?}")
            }
            Violation::Disconnected { components } => {
                write!(f, "graph disconnected ({components} components)")
            }
            Violation::DiskDegree { vertex, degree } => {
                write!(f, "disk degree ≠ 1 at vertex {vertex} (degree {degree})")
            }
            Violation::DiskGenus { vertex, genus } => {
                write!(f, "disk genus ≠ 0 at vertex {vertex} (genus {genus})")
            }
            Violation::MissingBranch { vertex } => write!(f, "disk {vertex} has no branch index"),
            Violation::CompactWithBranch { vertex } => {
                write!(f, "compact vertex {vertex} carries a branch index")
            }
            Violation::BranchIndices { found } => {
                write!(f, "disk branch indices {found:?} are not 0..r-1")
            }
            Violation::Empty => write!(f, "graph has no vertices"),
        }
    }
}

/// Check every structural invariant; the result is sorted and empty iff the
/// graph is valid.
pub fn validate_graph(g: &MarkedGraph) -> Vec<Violation> {
    let mut out = BTreeSet::new();
    if g.vertices.is_empty() {
        out.insert(Violation::Empty);
        return out.into_iter().collect();
    }
    let mut ids = BTreeSet::new();
    for v in &g.vertices {
        if !ids.insert(v.id) {
            out.insert(Violation::DuplicateVertexId { vertex: v.id });
        }
    }
    let mut eids = BTreeSet::new();
    let mut pairs: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    let mut degree: BTreeMap<usize, usize> = ids.iter().map(|&i| (i, 0)).collect();
    for e in &g.edges {
        if !eids.insert(e.id) {
            out.insert(Violation::DuplicateEdgeId { edge: e.id });
        }
        let mut ok = true;
        for x in [e.k, e.l] {
            if !ids.contains(&x) {
                out.insert(Violation::UnknownVertex { edge: e.id, vertex: x });
                ok = false;
            }
        }
        if e.k == e.l {
            out.insert(Violation::SelfLoop { edge: e.id });
        } else if e.k > e.l {
            out.insert(Violation::EdgeOrientation { edge: e.id });
        }
        if ok {
            *degree.get_mut(&e.k).unwrap() += 1;
            if e.l != e.k {
                *degree.get_mut(&e.l).unwrap() += 1;
            }
            let key = (e.k.min(e.l), e.k.max(e.l));
            if key.0 != key.1 {
                pairs.entry(key).or_default().push(e.id);
            }
        }
    }
    for ((k, l), mut es) in pairs {
        if es.len() > 1 {
            es.sort_unstable();
            out.insert(Violation::MultipleEdge { k, l, edges: es });
        }
    }
    let comps = component_count(g);
    if comps > 1 {
        out.insert(Violation::Disconnected { components: comps });
    }
    let mut branches = Vec::new();
    for v in &g.vertices {
        match v.kind {
            VertexKind::Disk => {
                let deg = degree.get(&v.id).copied().unwrap_or(0);
                if deg != 1 {
                    out.insert(Violation::DiskDegree { vertex: v.id, degree: deg });
                }
                if v.genus != 0 {
                    out.insert(Violation::DiskGenus { vertex: v.id, genus: v.genus });
                }
                match v.branch {
                    Some(b) => branches.push(b),
                    None => {
                        out.insert(Violation::MissingBranch { vertex: v.id });
                    }
                }
            }
            VertexKind::Compact => {
                if v.branch.is_some() {
                    out.insert(Violation::CompactWithBranch { vertex: v.id });
                }
            }
        }
    }
    let mut sorted = branches.clone();
    sorted.sort_unstable();
    if sorted.iter().enumerate().any(|(i, &b)| i != b) {
        out.insert(Violation::BranchIndices { found: sorted });
    }
    out.into_iter().collect()
}

fn component_count(g: &MarkedGraph) -> usize {
    let ids: Vec<usize> = g.vertices.iter().map(|v| v.id).collect();
    let mut adj: BTreeMap<usize, Vec<usize>> = ids.iter().map(|&i| (i, Vec::new())).collect();
    for e in &g.edges {
        if adj.contains_key(&e.k) && adj.contains_key(&e.l) {
            adj.get_mut(&e.k).unwrap().push(e.l);
            adj.get_mut(&e.l).unwrap().push(e.k);
        }
    }
    let mut seen = BTreeSet::new();
    let mut count = 0;
    for &s in &ids {
        if seen.insert(s) {
            count += 1;
            let mut q = VecDeque::from([s]);
            while let Some(v) = q.pop_front() {
                for &w in &adj[&v] {
                    if seen.insert(w) {
                        q.push_back(w);
                    }
                }
            }
        }
    }
    count
}

impl MarkedGraph {
    pub fn vertex(&self, id: usize) -> Option<&Vertex> {
        match self.vertices.get(id) {
            Some(v) if v.id == id => Some(v),
            _ => self.vertices.iter().find(|v| v.id == id),
        }
    }

    pub fn edge(&self, id: usize) -> Option<&Edge> {
        match self.edges.get(id) {
            Some(e) if e.id == id => Some(e),
            _ => self.edges.iter().find(|e| e.id == id),
        }
    }

    /// Incident edges of every vertex, each list sorted by edge id.
    pub fn adjacency(&self) -> BTreeMap<usize, Vec<Edge>> {
        let mut adj: BTreeMap<usize, Vec<Edge>> = self.vertices.iter().map(|v| (v.id, Vec::new())).collect();
        for e in &self.edges {
            adj.entry(e.k).or_default().push(*e);
            if e.l != e.k {
                adj.entry(e.l).or_default().push(*e);
            }
        }
        for es in adj.values_mut() {
            es.sort_by_key(|e| e.id);
        }
        adj
    }

    /// Edges incident to `v`, sorted by edge id.
    pub fn incident(&self, v: usize) -> Vec<Edge> {
        let mut es: Vec<Edge> = self.edges.iter().filter(|e| e.touches(v)).copied().collect();
        es.sort_by_key(|e| e.id);
        es
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.touches(v)).count()
    }

    pub fn disks(&self) -> Vec<&Vertex> {
        let mut d: Vec<&Vertex> = self.vertices.iter().filter(|v| v.kind == VertexKind::Disk).collect();
        d.sort_by_key(|v| v.branch);
        d
    }

    pub fn compact(&self) -> Vec<&Vertex> {
        self.vertices.iter().filter(|v| v.kind == VertexKind::Compact).collect()
    }

    /// Number of disks, i.e. of branches.
    pub fn r(&self) -> usize {
        self.disks().len()
    }

    pub fn disk_vertex(&self, branch: usize) -> Option<&Vertex> {
        self.vertices
            .iter()
            .find(|v| v.kind == VertexKind::Disk && v.branch == Some(branch))
    }

    /// The unique edge at the disk of `branch`.
    pub fn disk_edge(&self, branch: usize) -> Option<Edge> {
        let v = self.disk_vertex(branch)?;
        self.edges.iter().find(|e| e.touches(v.id)).copied()
    }

    pub fn total_genus(&self) -> u64 {
        self.vertices.iter().map(|v| v.genus as u64).sum()
    }

    /// First Betti number #E − #V + 1 of a connected graph.
    pub fn betti1(&self) -> i64 {
        self.edges.len() as i64 - self.vertices.len() as i64 + 1
    }

    /// Breadth-first spanning tree from `root`, visiting neighbours in
    /// increasing edge id. Returns the set of tree edge ids.
    pub fn spanning_tree(&self, root: usize) -> BTreeSet<usize> {
        let adj = self.adjacency();
        let mut tree = BTreeSet::new();
        let mut seen = BTreeSet::from([root]);
        let mut q = VecDeque::from([root]);
        while let Some(v) = q.pop_front() {
            for e in adj.get(&v).into_iter().flatten() {
                let w = e.other(v);
                if seen.insert(w) {
                    tree.insert(e.id);
                    q.push_back(w);
                }
            }
        }
        tree
    }

    /// Default root: disk 0 if present, otherwise the lowest vertex id.
    pub fn root(&self) -> usize {
        self.disk_vertex(0)
            .map(|v| v.id)
            .unwrap_or_else(|| self.vertices.iter().map(|v| v.id).min().unwrap_or(0))
    }

    /// Vertex path between `a` and `b` inside the given edge set, as a list of
    /// `(edge id, direction)` with direction +1 when traversed from k to l.
    pub fn path_in(&self, edges: &BTreeSet<usize>, a: usize, b: usize) -> Option<Vec<(usize, i32)>> {
        let adj = self.adjacency();
        let mut prev: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
        let mut seen = BTreeSet::from([a]);
        let mut q = VecDeque::from([a]);
        while let Some(v) = q.pop_front() {
            if v == b {
                break;
            }
            for e in adj.get(&v).into_iter().flatten() {
                if !edges.contains(&e.id) {
                    continue;
                }
                let w = e.other(v);
                if seen.insert(w) {
                    prev.insert(w, (v, e.id));
                    q.push_back(w);
                }
            }
        }
        if !seen.contains(&b) {
            return None;
        }
        let mut out = Vec::new();
        let mut cur = b;
        while cur != a {
            let (p, eid) = prev[&cur];
            let e = self.edge(eid).unwrap();
            out.push((eid, if e.k == p { 1 } else { -1 }));
            cur = p;
        }
        out.reverse();
        Some(out)
    }

    /// Fundamental cycles of the default spanning tree, one per non-tree edge
    /// in increasing id order. Each cycle is a signed edge list oriented so the
    /// non-tree edge is traversed from k to l.
    pub fn fundamental_cycles(&self) -> Vec<(usize, Vec<(usize, i32)>)> {
        let tree = self.spanning_tree(self.root());
        let mut non_tree: Vec<&Edge> = self.edges.iter().filter(|e| !tree.contains(&e.id)).collect();
        non_tree.sort_by_key(|e| e.id);
        non_tree
            .into_iter()
            .map(|e| {
                let mut cyc = vec![(e.id, 1)];
                cyc.extend(self.path_in(&tree, e.l, e.k).expect("tree spans graph"));
                (e.id, cyc)
            })
            .collect()
    }

    /// Graphviz rendering: disks as boxes, compact vertices as circles.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph central_fiber {\n");
        let mut vs: Vec<&Vertex> = self.vertices.iter().collect();
        vs.sort_by_key(|v| v.id);
        for v in vs {
            match v.kind {
                VertexKind::Disk => s.push_str(&format!(
                    "  v{} [shape=box, label=\"D{} (branch {})\"];\n",
                    v.id,
                    v.id,
                    v.branch.map(|b| b.to_string()).unwrap_or_else(|| "?".into())
                )),
                VertexKind::Compact => s.push_str(&format!(
                    "  v{} [shape=circle, label=\"g={}\"];\n",
                    v.id, v.genus
                )),
            }
        }
        let mut es = self.edges.clone();
        es.sort_by_key(|e| e.id);
        for e in es {
            s.push_str(&format!("  v{} -- v{} [label=\"p{}\"];\n", e.k, e.l, e.id));
        }
        s.push_str("}\n");
        s
    }
}

/// Convenience constructors for fixtures and tests.
pub mod build {
    use super::*;

    pub fn compact(id: usize, genus: u32) -> Vertex {
        Vertex { id, genus, kind: VertexKind::Compact, branch: None }
    }

    pub fn disk(id: usize, branch: usize) -> Vertex {
        Vertex { id, genus: 0, kind: VertexKind::Disk, branch: Some(branch) }
    }

    /// Edges numbered in the given order, each stored with k < l.
    pub fn edges(pairs: &[(usize, usize)]) -> Vec<Edge> {
        pairs
            .iter()
            .enumerate()
            .map(|(id, &(a, b))| Edge { id, k: a.min(b), l: a.max(b) })
            .collect()
    }

    /// Disk 0 attached to a square of four rational components.
    pub fn square_with_disk() -> MarkedGraph {
        MarkedGraph {
            vertices: vec![disk(0, 0), compact(1, 0), compact(2, 0), compact(3, 0), compact(4, 0)],
            edges: edges(&[(0, 1), (1, 2), (2, 3), (3, 4), (1, 4)]),
        }
    }

    /// A cycle of `n ≥ 3` compact components of the given genera with one disk
    /// on the first.
    pub fn cycle_with_disk(genera: &[u32]) -> MarkedGraph {
        let n = genera.len();
        let mut vertices = vec![disk(0, 0)];
        vertices.extend(genera.iter().enumerate().map(|(i, &g)| compact(i + 1, g)));
        let mut pairs = vec![(0, 1)];
        for i in 0..n {
            pairs.push((i + 1, (i + 1) % n + 1));
        }
        MarkedGraph { vertices, edges: edges(&pairs) }
    }
}
