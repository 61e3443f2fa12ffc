//! Finite formal models of the surface pieces: named generators with declared
//! residues, puncture values, differentials and wedge structure constants.

use std::collections::{BTreeMap, BTreeSet};

use nearby_core::graph::VertexKind;
use nearby_core::{validate_graph, Alphabet, MarkedGraph, Scalar};
use serde::{Deserialize, Serialize};

use crate::DgaError;

/// Linear combination of generators of one component.
pub type Comb = BTreeMap<String, Scalar>;

/// Name of the constant function present on every component.
pub const ONE: &str = "1";
/// Name of the logarithmic generator on a disk.
pub const DLOG: &str = "dp/p";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Generator {
    pub name: String,
    pub degree: u8,
    /// Weight level.
    pub w: i32,
    /// Hodge level.
    pub f: i32,
    pub differential: Comb,
    /// Residue per incident edge (1-forms).
    pub residues: BTreeMap<usize, Scalar>,
    /// Value at the puncture of each incident edge (functions).
    pub values: BTreeMap<usize, Scalar>,
}

impl Generator {
    pub fn function(name: &str, values: BTreeMap<usize, Scalar>, differential: Comb) -> Self {
        Generator { name: name.into(), degree: 0, w: 0, f: 0, differential, residues: BTreeMap::new(), values }
    }

    /// A 1-form; closed unless a differential is attached.
    pub fn form(name: &str, w: i32, f: i32, residues: BTreeMap<usize, Scalar>) -> Self {
        Generator { name: name.into(), degree: 1, w, f, differential: Comb::new(), residues, values: BTreeMap::new() }
    }

    pub fn two_form(name: &str, w: i32, f: i32) -> Self {
        Generator {
            name: name.into(),
            degree: 2,
            w,
            f,
            differential: Comb::new(),
            residues: BTreeMap::new(),
            values: BTreeMap::new(),
        }
    }

    pub fn with_differential(mut self, d: Comb) -> Self {
        self.differential = d;
        self
    }

    pub fn is_closed(&self) -> bool {
        self.differential.values().all(|c| c.is_zero())
    }
}

pub fn comb(items: &[(&str, Scalar)]) -> Comb {
    let mut c = Comb::new();
    for (n, s) in items {
        add_to(&mut c, n, s);
    }
    c
}

pub(crate) fn add_to(c: &mut Comb, name: &str, s: &Scalar) {
    let v = &c.get(name).cloned().unwrap_or_default() + s;
    if v.is_zero() {
        c.remove(name);
    } else {
        c.insert(name.to_string(), v);
    }
}

fn scale_comb(c: &Comb, s: &Scalar) -> Comb {
    let mut out = Comb::new();
    for (n, x) in c {
        add_to(&mut out, n, &(x * s));
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceModel {
    pub component: usize,
    pub disk: bool,
    /// Incident edge ids.
    pub punctures: Vec<usize>,
    generators: BTreeMap<String, Generator>,
    wedge: BTreeMap<(String, String), Comb>,
}

impl SurfaceModel {
    /// A compact component carrying only the constant function.
    pub fn compact(component: usize, punctures: &[usize]) -> Self {
        let mut m = SurfaceModel {
            component,
            disk: false,
            punctures: punctures.to_vec(),
            generators: BTreeMap::new(),
            wedge: BTreeMap::new(),
        };
        m.insert_one();
        m
    }

    /// A disk: constants and `dp/p` with the given residue at its edge.
    pub fn disk(component: usize, edge: usize, residue: Scalar) -> Self {
        let mut m = SurfaceModel {
            component,
            disk: true,
            punctures: vec![edge],
            generators: BTreeMap::new(),
            wedge: BTreeMap::new(),
        };
        m.insert_one();
        let g = Generator::form(DLOG, 1, 1, BTreeMap::from([(edge, residue)]));
        m.generators.insert(DLOG.into(), g);
        m
    }

    fn insert_one(&mut self) {
        let values = self.punctures.iter().map(|&e| (e, Scalar::one())).collect();
        self.generators.insert(ONE.into(), Generator::function(ONE, values, Comb::new()));
    }

    fn max_degree(&self) -> u8 {
        if self.disk {
            1
        } else {
            2
        }
    }

    pub fn declare(&mut self, g: Generator) -> Result<(), DgaError> {
        let c = self.component;
        if self.generators.contains_key(&g.name) {
            return Err(DgaError::BadDeclaration(format!("generator {} declared twice on component {c}", g.name)));
        }
        if g.degree > self.max_degree() {
            return Err(DgaError::BadDeclaration(format!("degree {} generator {} on component {c}", g.degree, g.name)));
        }
        if self.disk && g.degree == 0 {
            return Err(DgaError::BadDeclaration(format!("disk component {c} only carries constants")));
        }
        for e in g.residues.keys().chain(g.values.keys()) {
            if !self.punctures.contains(e) {
                return Err(DgaError::BadDeclaration(format!("edge {e} is not a puncture of component {c}")));
            }
        }
        if g.degree == 1 && g.is_closed() && !self.disk {
            let sum = g.residues.values().fold(Scalar::zero(), |a, b| &a + b);
            if !sum.is_zero() {
                return Err(DgaError::ResidueTheorem { component: c, generator: g.name.clone(), sum: sum.to_string() });
            }
        }
        self.generators.insert(g.name.clone(), g);
        Ok(())
    }

    /// Declare `a ∧ b`; the reversed product follows by graded commutativity.
    pub fn declare_wedge(&mut self, a: &str, b: &str, result: Comb) -> Result<(), DgaError> {
        for n in [a, b] {
            self.gen(n)?;
        }
        self.wedge.insert((a.to_string(), b.to_string()), result);
        Ok(())
    }

    pub fn generator(&self, name: &str) -> Option<&Generator> {
        self.generators.get(name)
    }

    pub fn generators(&self) -> impl Iterator<Item = &Generator> {
        self.generators.values()
    }

    pub fn wedge_table(&self) -> &BTreeMap<(String, String), Comb> {
        &self.wedge
    }

    pub(crate) fn gen(&self, name: &str) -> Result<&Generator, DgaError> {
        self.generators
            .get(name)
            .ok_or_else(|| DgaError::UnknownGenerator { component: self.component, name: name.to_string() })
    }

    pub fn d_comb(&self, c: &Comb) -> Result<Comb, DgaError> {
        let mut out = Comb::new();
        for (n, s) in c {
            for (m, t) in &self.gen(n)?.differential {
                add_to(&mut out, m, &(s * t));
            }
        }
        Ok(out)
    }

    pub fn residue(&self, c: &Comb, edge: usize) -> Result<Scalar, DgaError> {
        let mut r = Scalar::zero();
        for (n, s) in c {
            let g = self.gen(n)?;
            if g.degree == 1 {
                if let Some(x) = g.residues.get(&edge) {
                    r += &(s * x);
                }
            }
        }
        Ok(r)
    }

    pub fn value(&self, c: &Comb, edge: usize) -> Result<Scalar, DgaError> {
        let mut r = Scalar::zero();
        for (n, s) in c {
            let g = self.gen(n)?;
            if g.degree == 0 {
                if let Some(x) = g.values.get(&edge) {
                    r += &(s * x);
                }
            }
        }
        Ok(r)
    }

    /// Product of two generators.
    pub fn wedge_gen(&self, a: &str, b: &str) -> Result<Comb, DgaError> {
        let (ga, gb) = (self.gen(a)?, self.gen(b)?);
        if a == ONE {
            return Ok(comb(&[(b, Scalar::one())]));
        }
        if b == ONE {
            return Ok(comb(&[(a, Scalar::one())]));
        }
        if ga.degree + gb.degree > self.max_degree() || (a == b && ga.degree % 2 == 1) {
            return Ok(Comb::new());
        }
        if let Some(c) = self.wedge.get(&(a.to_string(), b.to_string())) {
            return Ok(c.clone());
        }
        if let Some(c) = self.wedge.get(&(b.to_string(), a.to_string())) {
            let sign = if ga.degree * gb.degree % 2 == 1 { -1 } else { 1 };
            return Ok(scale_comb(c, &Scalar::from_int(sign)));
        }
        Err(DgaError::MissingWedge { component: self.component, left: a.to_string(), right: b.to_string() })
    }

    pub fn wedge_comb(&self, a: &Comb, b: &Comb) -> Result<Comb, DgaError> {
        let mut out = Comb::new();
        for (n, s) in a {
            for (m, t) in b {
                let st = s * t;
                for (k, c) in self.wedge_gen(n, m)? {
                    add_to(&mut out, &k, &(&st * &c));
                }
            }
        }
        Ok(out)
    }

    pub fn degree_of(&self, c: &Comb) -> Result<Option<u8>, DgaError> {
        let mut deg = None;
        for n in c.keys() {
            let d = self.gen(n)?.degree;
            if deg.is_some_and(|x| x != d) {
                return Err(DgaError::BadDeclaration(format!("inhomogeneous combination on component {}", self.component)));
            }
            deg = Some(d);
        }
        Ok(deg)
    }

    /// Structural checks: differentials raise degree by one, `d² = 0`, exact
    /// forms carry no residues, closed forms obey the residue theorem, and the
    /// declared products of functions with forms satisfy the Leibniz rule and
    /// the residue product rule.
    pub fn validate(&self) -> Result<(), DgaError> {
        let c = self.component;
        for g in self.generators.values() {
            if let Some(d) = self.degree_of(&g.differential)? {
                if d != g.degree + 1 {
                    return Err(DgaError::BadDeclaration(format!("d({}) has degree {d} on component {c}", g.name)));
                }
            }
            let dd = self.d_comb(&g.differential)?;
            if !dd.is_empty() {
                return Err(DgaError::BadDeclaration(format!("d² ≠ 0 on {} (component {c})", g.name)));
            }
            if g.degree == 0 {
                for &e in &self.punctures {
                    if !self.residue(&g.differential, e)?.is_zero() {
                        return Err(DgaError::BadDeclaration(format!("d({}) has a residue at edge {e}", g.name)));
                    }
                }
            }
            if g.degree == 1 && g.is_closed() && !self.disk {
                let sum = g.residues.values().fold(Scalar::zero(), |a, b| &a + b);
                if !sum.is_zero() {
                    return Err(DgaError::ResidueTheorem { component: c, generator: g.name.clone(), sum: sum.to_string() });
                }
            }
        }
        for ((a, b), result) in &self.wedge {
            let (ga, gb) = (self.gen(a)?, self.gen(b)?);
            if let Some(d) = self.degree_of(result)? {
                if d != ga.degree + gb.degree {
                    return Err(DgaError::BadDeclaration(format!("{a}∧{b} has degree {d} on component {c}")));
                }
            }
            let (f, form, fname) = match (ga.degree, gb.degree) {
                (0, _) => (ga, gb, b),
                (_, 0) => (gb, ga, a),
                _ => continue,
            };
            if form.degree == 1 {
                for &e in &self.punctures {
                    let lhs = self.residue(result, e)?;
                    let rhs = &f.values.get(&e).cloned().unwrap_or_default()
                        * &form.residues.get(&e).cloned().unwrap_or_default();
                    if lhs != rhs {
                        return Err(DgaError::BadDeclaration(format!(
                            "residue of {}·{fname} at edge {e} on component {c}",
                            f.name
                        )));
                    }
                }
            }
            // d(f·φ) = df∧φ + f·dφ when every needed product is declared
            let lhs = self.d_comb(result)?;
            let one = |n: &str| comb(&[(n, Scalar::one())]);
            let rhs = self.wedge_comb(&f.differential, &one(fname)).and_then(|x| {
                let y = self.wedge_comb(&one(&f.name), &form.differential)?;
                let mut s = x;
                for (k, v) in y {
                    add_to(&mut s, &k, &v);
                }
                Ok(s)
            });
            if let Ok(rhs) = rhs {
                if lhs != rhs {
                    return Err(DgaError::BadDeclaration(format!("Leibniz rule fails for {a}∧{b} on component {c}")));
                }
            }
        }
        Ok(())
    }
}

/// The graph together with one surface model per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub graph: MarkedGraph,
    surfaces: BTreeMap<usize, SurfaceModel>,
}

impl Model {
    pub fn new(graph: MarkedGraph, surfaces: Vec<SurfaceModel>) -> Result<Model, DgaError> {
        let v = validate_graph(&graph);
        if !v.is_empty() {
            return Err(DgaError::Scenario(format!("invalid graph: {v:?}")));
        }
        let mut map = BTreeMap::new();
        for s in surfaces {
            let vx = graph
                .vertex(s.component)
                .ok_or_else(|| DgaError::Scenario(format!("no vertex {}", s.component)))?;
            if (vx.kind == VertexKind::Disk) != s.disk {
                return Err(DgaError::Scenario(format!("component {} has the wrong kind", s.component)));
            }
            let mut want: Vec<usize> = graph.incident(s.component).iter().map(|e| e.id).collect();
            let mut have = s.punctures.clone();
            want.sort();
            have.sort();
            if want != have {
                return Err(DgaError::Scenario(format!("punctures of component {} do not match its edges", s.component)));
            }
            s.validate()?;
            if map.insert(s.component, s).is_some() {
                return Err(DgaError::Scenario("component declared twice".into()));
            }
        }
        for v in &graph.vertices {
            if !map.contains_key(&v.id) {
                return Err(DgaError::Scenario(format!("component {} has no surface model", v.id)));
            }
        }
        Ok(Model { graph, surfaces: map })
    }

    /// Default model: on a compact component of genus g the closed forms
    /// `omega{j}`, `omegabar{j}` (j = 1..g) with `omega{j}∧omegabar{j} = vol`,
    /// third-kind forms `nu{e}` with residue +1 at `e` and −1 at the first
    /// puncture, and residue slots `res{e}` with residue 1 at `e` alone and
    /// differential `dres{e}`. Disks carry `dp/p` with residue 1.
    pub fn standard(graph: MarkedGraph) -> Result<Model, DgaError> {
        let mut surfaces = Vec::new();
        for v in &graph.vertices {
            let mut punct: Vec<usize> = graph.incident(v.id).iter().map(|e| e.id).collect();
            punct.sort();
            if v.kind == VertexKind::Disk {
                let e = *punct.first().ok_or_else(|| DgaError::Scenario(format!("disk {} has no edge", v.id)))?;
                surfaces.push(SurfaceModel::disk(v.id, e, Scalar::one()));
                continue;
            }
            let mut s = SurfaceModel::compact(v.id, &punct);
            if v.genus > 0 {
                s.declare(Generator::two_form("vol", 0, 1))?;
            }
            for j in 1..=v.genus {
                s.declare(Generator::form(&format!("omega{j}"), 0, 1, BTreeMap::new()))?;
                s.declare(Generator::form(&format!("omegabar{j}"), 0, 0, BTreeMap::new()))?;
            }
            for j in 1..=v.genus {
                for k in 1..=v.genus {
                    let r = if j == k { comb(&[("vol", Scalar::one())]) } else { Comb::new() };
                    s.declare_wedge(&format!("omega{j}"), &format!("omegabar{k}"), r)?;
                    if j < k {
                        s.declare_wedge(&format!("omega{j}"), &format!("omega{k}"), Comb::new())?;
                        s.declare_wedge(&format!("omegabar{j}"), &format!("omegabar{k}"), Comb::new())?;
                    }
                }
            }
            if let Some((&e0, rest)) = punct.split_first() {
                for &e in rest {
                    let res = BTreeMap::from([(e, Scalar::one()), (e0, Scalar::from_int(-1))]);
                    s.declare(Generator::form(&format!("nu{e}"), 1, 1, res))?;
                }
            }
            for &e in &punct {
                let dname = format!("dres{e}");
                s.declare(Generator::two_form(&dname, 0, 0))?;
                let g = Generator::form(&format!("res{e}"), 1, 0, BTreeMap::from([(e, Scalar::one())]))
                    .with_differential(comb(&[(&dname, Scalar::one())]));
                s.declare(g)?;
            }
            surfaces.push(s);
        }
        Model::new(graph, surfaces)
    }

    pub fn surface(&self, component: usize) -> Result<&SurfaceModel, DgaError> {
        self.surfaces.get(&component).ok_or(DgaError::UnknownComponent(component))
    }

    pub fn surfaces(&self) -> impl Iterator<Item = &SurfaceModel> {
        self.surfaces.values()
    }

    pub fn edge(&self, id: usize) -> Result<nearby_core::Edge, DgaError> {
        self.graph.edge(id).copied().ok_or(DgaError::UnknownEdge(id))
    }

    /// A generator with residue exactly 1 at `edge` and 0 elsewhere.
    pub fn residue_slot(&self, component: usize, edge: usize) -> Result<String, DgaError> {
        let s = self.surface(component)?;
        s.generators()
            .find(|g| {
                g.degree == 1
                    && g.residues.iter().filter(|(_, r)| !r.is_zero()).count() == 1
                    && g.residues.get(&edge).is_some_and(|r| r.is_one())
            })
            .map(|g| g.name.clone())
            .ok_or(DgaError::NoResidueSlot { component, edge })
    }

    /// Component of the disk with the given branch label.
    pub fn disk_component(&self, branch: usize) -> Option<usize> {
        self.graph.disk_vertex(branch).map(|v| v.id)
    }

    pub fn from_json(text: &str) -> Result<Model, DgaError> {
        let file: ScenarioFile = serde_json::from_str(text).map_err(|e| DgaError::Scenario(e.to_string()))?;
        file.into_model()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ScenarioFile::from_model(self)).expect("scenario serializes")
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct ScenarioFile {
    #[serde(default)]
    symbols: Vec<String>,
    graph: MarkedGraph,
    components: Vec<ComponentFile>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ComponentFile {
    component: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    disk_residue: Option<String>,
    #[serde(default)]
    generators: Vec<GeneratorFile>,
    #[serde(default)]
    wedge: Vec<WedgeFile>,
}

#[derive(Debug, Serialize, Deserialize)]
struct GeneratorFile {
    name: String,
    degree: u8,
    #[serde(default)]
    w: i32,
    #[serde(default)]
    f: i32,
    #[serde(default)]
    differential: BTreeMap<String, String>,
    #[serde(default)]
    residues: BTreeMap<usize, String>,
    #[serde(default)]
    values: BTreeMap<usize, String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct WedgeFile {
    left: String,
    right: String,
    result: BTreeMap<String, String>,
}

fn strings<K: Clone + Ord>(m: &BTreeMap<K, Scalar>) -> BTreeMap<K, String> {
    m.iter().map(|(k, v)| (k.clone(), v.to_string())).collect()
}

impl ScenarioFile {
    fn from_model(m: &Model) -> ScenarioFile {
        let mut symbols = BTreeSet::new();
        let mut note = |s: &Scalar| symbols.extend(s.symbols());
        let mut components = Vec::new();
        for s in m.surfaces() {
            let mut generators = Vec::new();
            let mut disk_residue = None;
            for g in s.generators() {
                g.differential.values().chain(g.residues.values()).chain(g.values.values()).for_each(&mut note);
                if g.name == ONE {
                    continue;
                }
                if s.disk && g.name == DLOG {
                    disk_residue = g.residues.values().next().map(|r| r.to_string());
                    continue;
                }
                generators.push(GeneratorFile {
                    name: g.name.clone(),
                    degree: g.degree,
                    w: g.w,
                    f: g.f,
                    differential: strings(&g.differential),
                    residues: strings(&g.residues),
                    values: strings(&g.values),
                });
            }
            let wedge = s
                .wedge_table()
                .iter()
                .map(|((a, b), r)| {
                    r.values().for_each(&mut note);
                    WedgeFile { left: a.clone(), right: b.clone(), result: strings(r) }
                })
                .collect();
            components.push(ComponentFile { component: s.component, disk_residue, generators, wedge });
        }
        symbols.remove(nearby_core::TAU);
        ScenarioFile { symbols: symbols.into_iter().collect(), graph: m.graph.clone(), components }
    }

    fn into_model(self) -> Result<Model, DgaError> {
        let alpha = Alphabet::new(self.symbols.iter()).map_err(|e| DgaError::Scenario(e.to_string()))?;
        let parse = |t: &str| alpha.parse(t).map_err(|e| DgaError::Scenario(format!("{t}: {e}")));
        let parse_map = |m: &BTreeMap<usize, String>| -> Result<BTreeMap<usize, Scalar>, DgaError> {
            m.iter().map(|(k, v)| Ok((*k, parse(v)?))).collect()
        };
        let parse_comb = |m: &BTreeMap<String, String>| -> Result<Comb, DgaError> {
            m.iter().map(|(k, v)| Ok((k.clone(), parse(v)?))).collect()
        };
        let mut surfaces = Vec::new();
        for c in self.components {
            let v = self
                .graph
                .vertex(c.component)
                .ok_or_else(|| DgaError::Scenario(format!("no vertex {}", c.component)))?;
            let mut punct: Vec<usize> = self.graph.incident(v.id).iter().map(|e| e.id).collect();
            punct.sort();
            let mut s = if v.kind == VertexKind::Disk {
                let e = *punct.first().ok_or_else(|| DgaError::Scenario(format!("disk {} has no edge", v.id)))?;
                let r = c.disk_residue.as_deref().map(parse).transpose()?.unwrap_or_else(Scalar::one);
                SurfaceModel::disk(v.id, e, r)
            } else {
                SurfaceModel::compact(v.id, &punct)
            };
            for g in &c.generators {
                s.declare(Generator {
                    name: g.name.clone(),
                    degree: g.degree,
                    w: g.w,
                    f: g.f,
                    differential: parse_comb(&g.differential)?,
                    residues: parse_map(&g.residues)?,
                    values: parse_map(&g.values)?,
                })?;
            }
            for w in &c.wedge {
                s.declare_wedge(&w.left, &w.right, parse_comb(&w.result)?)?;
            }
            surfaces.push(s);
        }
        Model::new(self.graph, surfaces)
    }
}
