use std::collections::BTreeMap;

use nearby_core::graph::build;
use nearby_core::hodge::{hodge_basis, weight_graded_dims};
use nearby_core::poly::Poly2;
use nearby_core::{run_pipeline, BranchSpec, CurveSpec, MarkedGraph, Scalar};
use nearby_dga::bar::{
    apply_n_bar, bar_filtrations, chen_differential, default_functions, extend_closed_family, is_chen_closed,
    reduce_normal_form, relation_element, relation_span_contains, Primitives,
};
use nearby_dga::basis::{exact_primitive, h1_basis};
use nearby_dga::complement::component_indicator;
use nearby_dga::fpsc::{fpsc_curvature, Fpsc};
use nearby_dga::model::{comb, Generator, SurfaceModel, DLOG};
use nearby_dga::omega::OmegaScenario;
use nearby_dga::{make_theta, BarTensor, DgaElement, DgaError, EdgePoly, Model};

/// Disk `D₀` glued to a genus-1 component `D₁` carrying `ω`, `ω̄`, `vol`
/// and `μ` with `dμ = −vol`, `Res μ = 1`.
struct Torus {
    m: Model,
    omega: DgaElement,
    omegabar: DgaElement,
    vol: DgaElement,
    /// Compatible primitive of `−ω∧ω̄`.
    psi: DgaElement,
}

fn torus() -> Torus {
    let graph = MarkedGraph { vertices: vec![build::disk(0, 0), build::compact(1, 1)], edges: build::edges(&[(0, 1)]) };
    let mut s = SurfaceModel::compact(1, &[0]);
    s.declare(Generator::two_form("vol", 0, 1)).unwrap();
    s.declare(Generator::form("omega", 0, 1, BTreeMap::new())).unwrap();
    s.declare(Generator::form("omegabar", 0, 0, BTreeMap::new())).unwrap();
    s.declare(
        Generator::form("mu", 1, 1, BTreeMap::from([(0, Scalar::one())]))
            .with_differential(comb(&[("vol", Scalar::from_int(-1))])),
    )
    .unwrap();
    s.declare_wedge("omega", "omegabar", comb(&[("vol", Scalar::one())])).unwrap();
    s.declare_wedge("omega", "mu", comb(&[])).unwrap();
    s.declare_wedge("omegabar", "mu", comb(&[])).unwrap();
    let m = Model::new(graph, vec![SurfaceModel::disk(0, 0, Scalar::one()), s]).unwrap();
    let g = |c, n| DgaElement::generator(&m, c, n, Scalar::one()).unwrap();
    let (omega, omegabar, vol) = (g(1, "omega"), g(1, "omegabar"), g(1, "vol"));
    let psi = g(1, "mu").minus(&g(0, DLOG)).minus(&make_theta(0));
    Torus { omega, omegabar, vol, psi, m }
}

fn bubble_fn(e: usize) -> DgaElement {
    let p = &(&EdgePoly::xi() - &(&EdgePoly::xi() * &EdgePoly::xi())) * &(&EdgePoly::int(1) + &EdgePoly::u());
    DgaElement::edge(0, e, vec![p])
}

fn pure(f: &[&DgaElement]) -> BarTensor {
    BarTensor::pure(f, Scalar::one())
}

#[test]
fn psi_is_a_compatible_primitive() {
    let t = torus();
    assert!(t.m.is_compatible(&t.psi).unwrap());
    assert_eq!(t.m.d(&t.psi).unwrap(), t.m.wedge(&t.omega, &t.omegabar).unwrap().scale(&Scalar::from_int(-1)));
}

#[test]
fn chen_differential_examples() {
    let t = torus();
    assert!(chen_differential(&t.m, &pure(&[&t.omega])).unwrap().is_zero());
    let dc = chen_differential(&t.m, &pure(&[&t.omega, &t.omegabar])).unwrap();
    assert_eq!(dc, pure(&[&t.vol]));
}

#[test]
fn closedness_examples() {
    let t = torus();
    let f = bubble_fn(0);
    let df = t.m.d(&f).unwrap();
    assert!(is_chen_closed(&t.m, &pure(&[&df])).unwrap());
    let top = pure(&[&t.omega, &t.omegabar]);
    assert!(!is_chen_closed(&t.m, &top).unwrap());
    assert!(is_chen_closed(&t.m, &top.plus(&pure(&[&t.psi]))).unwrap());
}

#[test]
fn relation_element_examples() {
    let t = torus();
    let h = component_indicator(&t.m, 1).unwrap().scale(&Scalar::from_int(5));
    let a = t.m.augmentation(&h).unwrap();
    assert!(a.is_zero());
    let dh = t.m.d(&h).unwrap();
    let shifted = h.minus(&t.m.constant(&a));
    let r1 = relation_element(&t.m, &[t.omega.clone()], &h, 1).unwrap();
    let want = pure(&[&dh, &t.omega]).minus(&pure(&[&t.m.wedge(&shifted, &t.omega).unwrap()]));
    assert_eq!(r1, want);
    let r2 = relation_element(&t.m, &[t.omega.clone()], &h, 2).unwrap();
    let want = pure(&[&t.omega, &dh]).plus(&pure(&[&t.m.wedge(&shifted, &t.omega).unwrap()]));
    assert_eq!(r2, want);
    let c = t.m.constant(&Scalar::from_int(3));
    for i in 1..=3 {
        assert!(relation_element(&t.m, &[t.omega.clone(), t.omegabar.clone()], &c, i).unwrap().is_zero());
    }
    assert!(matches!(
        relation_element(&t.m, &[t.omega.clone()], &h, 3),
        Err(DgaError::PositionOutOfRange { position: 3, length: 2 })
    ));
}

#[test]
fn normal_form_examples() {
    let t = torus();
    let dh = t.m.d(&bubble_fn(0)).unwrap();
    assert!(reduce_normal_form(&t.m, &pure(&[&dh])).unwrap().is_zero());
    let h = component_indicator(&t.m, 1).unwrap().scale(&Scalar::from_int(5));
    let dh = t.m.d(&h).unwrap();
    let nf = reduce_normal_form(&t.m, &pure(&[&t.omega, &dh])).unwrap();
    assert_eq!(nf, BarTensor::pure(&[&t.omega], Scalar::from_int(-5)));
    let top = pure(&[&t.omega, &t.omegabar]);
    assert_eq!(reduce_normal_form(&t.m, &top).unwrap(), top);
}

#[test]
fn extend_closed_family_examples() {
    let t = torus();
    let mut prims = Primitives::new();
    assert_eq!(extend_closed_family(&t.m, &[t.omega.clone()], &prims).unwrap(), pure(&[&t.omega]));
    let fam = [t.omega.clone(), t.omegabar.clone()];
    assert!(matches!(extend_closed_family(&t.m, &fam, &prims), Err(DgaError::PrimitiveUnavailable { .. })));
    prims.declare(&t.m, t.psi.clone()).unwrap();
    let out = extend_closed_family(&t.m, &fam, &prims).unwrap();
    assert_eq!(out, pure(&[&t.omega, &t.omegabar]).plus(&pure(&[&t.psi])));
    assert!(is_chen_closed(&t.m, &out).unwrap());
}

#[test]
fn curvature_examples() {
    let t = torus();
    assert!(fpsc_curvature(&t.m, &Fpsc::new(1).with(&[1], t.omega.clone())).unwrap().is_empty());
    let series = Fpsc::new(2)
        .with(&[1], t.omega.clone())
        .with(&[2], t.omegabar.clone())
        .with(&[1, 2], t.psi.clone());
    // ω̄∧ω = −vol still needs its own correction on the word X₂X₁
    let k = fpsc_curvature(&t.m, &series).unwrap();
    assert_eq!(k.keys().collect::<Vec<_>>(), vec![&vec![2, 1]]);
    let series = series.with(&[2, 1], t.psi.scale(&Scalar::from_int(-1)));
    assert!(fpsc_curvature(&t.m, &series).unwrap().is_empty());
    assert!(is_chen_closed(&t.m, &series.tensor_of_word(&[1, 2])).unwrap());
    let k = fpsc_curvature(&t.m, &Fpsc::new(1).with(&[1], t.psi.clone())).unwrap();
    assert_eq!(k.get(&vec![1]), Some(&t.m.d(&t.psi).unwrap()));
}

#[test]
fn filtration_examples() {
    let t = torus();
    // ω sits in W₀ on its component, so ω⊗ω̄ has weight 0 + 0 + 2
    assert_eq!(bar_filtrations(&t.m, &pure(&[&t.omega, &t.omegabar])).unwrap(), (Some(2), Some(1)));
    let theta = t.m.make_theta_balanced(0).unwrap();
    assert_eq!(bar_filtrations(&t.m, &pure(&[&make_theta(0)])).unwrap().0, Some(2));
    assert!(t.m.is_compatible(&theta).unwrap());
    let sc = OmegaScenario::chain("rho").unwrap();
    let omega = sc.omega_element().unwrap();
    assert!(bar_filtrations(&sc.model, &omega).unwrap().1 >= Some(2));
}

#[test]
fn n_kills_u_free_tensors() {
    let t = torus();
    assert!(apply_n_bar(&t.m, &pure(&[&t.omega, &t.omegabar])).unwrap().is_zero());
    let n = apply_n_bar(&t.m, &pure(&[&t.omega, &make_theta(0)])).unwrap();
    let dxi = DgaElement::edge(1, 0, vec![EdgePoly::zero(), EdgePoly::zero(), EdgePoly::int(1)]);
    assert_eq!(n, pure(&[&t.omega, &dxi]));
}

fn pipeline_model(c: &CurveSpec) -> (Model, (u64, u64, u64), i64) {
    let p = run_pipeline(c).unwrap();
    let mhs = weight_graded_dims(&p.central_fiber);
    (Model::standard(p.central_fiber.graph).unwrap(), mhs.gr_dims, mhs.gr2_alt)
}

fn check_basis(m: &Model) -> (u64, u64, u64) {
    let b = h1_basis(m).unwrap();
    for c in &b.classes {
        assert!(m.d(&c.element).unwrap().is_zero(), "{} not closed", c.label);
        assert!(m.is_compatible(&c.element).unwrap(), "{} not compatible", c.label);
    }
    b.counts()
}

#[test]
fn h1_basis_node() {
    let node = CurveSpec::new(
        vec![BranchSpec::smooth(), BranchSpec::smooth()],
        vec![vec![0, 1], vec![1, 0]],
        Some(Poly2::parse("x*y").unwrap()),
    )
    .unwrap();
    let (m, dims, alt) = pipeline_model(&node);
    assert_eq!(check_basis(&m), (0, 0, 1));
    assert_eq!(dims, (0, 0, 1));
    assert_eq!(alt, 0);
}

#[test]
fn h1_basis_cusp() {
    let cusp = CurveSpec::single(BranchSpec::parse(&["3/2"]).unwrap());
    let (m, dims, _) = pipeline_model(&cusp);
    assert_eq!(check_basis(&m), (0, 2, 0));
    assert_eq!(dims, (0, 2, 0));
}

#[test]
fn h1_basis_cycle() {
    let vertices = vec![build::disk(0, 0), build::compact(1, 0), build::compact(2, 0), build::compact(3, 0)];
    let g = MarkedGraph { vertices, edges: build::edges(&[(0, 1), (1, 2), (2, 3), (1, 3)]) };
    let hb = hodge_basis(&g);
    let m = Model::standard(g).unwrap();
    let counts = check_basis(&m);
    assert_eq!(counts, (1, 0, 1));
    assert_eq!(counts, (hb.w0 as u64, hb.w1 as u64, hb.w2 as u64));
}

#[test]
fn exact_primitive_examples() {
    let t = torus();
    let h = component_indicator(&t.m, 1).unwrap().scale(&Scalar::from_int(5)).plus(&bubble_fn(0));
    let g = exact_primitive(&t.m, &t.m.d(&h).unwrap()).unwrap().unwrap();
    assert_eq!(g, h);
    assert!(exact_primitive(&t.m, &t.omega).unwrap().is_none());
    // the function h of the chain scenario: Σ ρ_kl ξ on edges, h = 0 at the disk
    let sc = OmegaScenario::chain("rho").unwrap();
    let rho_kl = -&sc.rho;
    let mut phi = DgaElement::zero(1);
    for e in 0..sc.end {
        phi = phi.plus(&DgaElement::edge(1, e, vec![EdgePoly::zero(), EdgePoly::zero(), EdgePoly::constant(rho_kl.clone())]));
    }
    let h = exact_primitive(&sc.model, &phi).unwrap().unwrap();
    assert!(sc.model.augmentation(&h).unwrap().is_zero());
    assert_eq!(h.coefficient(sc.end, "1"), rho_kl.scale(&num_rational::BigRational::from_integer(7.into())));
}

#[test]
fn json_round_trip() {
    let t = torus();
    let back = Model::from_json(&t.m.to_json()).unwrap();
    assert_eq!(back.to_json(), t.m.to_json());
    assert!(is_chen_closed(&back, &pure(&[&t.omega, &t.omegabar]).plus(&pure(&[&t.psi]))).unwrap());
}

#[test]
fn residue_theorem_rejection() {
    let mut s = SurfaceModel::compact(1, &[0, 1]);
    let r = s.declare(Generator::form("eta", 1, 1, BTreeMap::from([(0, Scalar::one()), (1, Scalar::one())])));
    assert!(matches!(r, Err(DgaError::ResidueTheorem { .. })));
    // disks carry no residue-sum constraint
    SurfaceModel::disk(0, 0, Scalar::from_int(3));
}

#[test]
fn undeclared_wedge() {
    let t = torus();
    let mu = DgaElement::generator(&t.m, 1, "mu", Scalar::one()).unwrap();
    assert!(t.m.wedge(&mu, &mu.scale(&Scalar::from_int(2))).unwrap().is_zero());
    let s = t.m.surface(1).unwrap();
    assert!(s.wedge_gen("omegabar", "omegabar").unwrap().is_empty());
    assert!(s.wedge_gen("mu", "vol").unwrap().is_empty());
    let mut s = SurfaceModel::compact(1, &[0]);
    s.declare(Generator::form("a", 0, 1, BTreeMap::new())).unwrap();
    s.declare(Generator::form("b", 0, 0, BTreeMap::new())).unwrap();
    let e = s.wedge_gen("a", "b").unwrap_err();
    assert!(e.to_string().contains("missing wedge declaration"));
}

#[test]
fn enumeration_agrees_with_reduction() {
    let t = torus();
    let forms = [t.omega.clone(), t.omegabar.clone(), make_theta(0)];
    let mut fs = default_functions(&t.m).unwrap();
    assert_eq!(fs.len(), 2);
    fs.push(bubble_fn(0));
    let rel = relation_element(&t.m, &[t.omega.clone()], &fs[1], 1)
        .unwrap()
        .plus(&relation_element(&t.m, &[make_theta(0), t.omegabar.clone()], &fs[2], 2).unwrap().scale(&Scalar::frac(-3, 2)))
        .plus(&relation_element(&t.m, &[], &fs[2], 1).unwrap());
    assert!(reduce_normal_form(&t.m, &rel).unwrap().is_zero());
    assert!(relation_span_contains(&t.m, &rel, &forms, &fs).unwrap());
    let closed = pure(&[&t.omega, &t.omegabar]).plus(&pure(&[&t.psi]));
    assert!(!reduce_normal_form(&t.m, &closed).unwrap().is_zero());
    assert!(!relation_span_contains(&t.m, &closed, &forms, &fs).unwrap());
    let shifted = closed.plus(&rel);
    assert!(!relation_span_contains(&t.m, &shifted, &forms, &fs).unwrap());
    assert_eq!(reduce_normal_form(&t.m, &shifted).unwrap(), reduce_normal_form(&t.m, &closed).unwrap());
}

#[test]
fn length_reduction() {
    // what extend_closed_family adds below the top has length < s and a
    // Chen differential cancelling that of the top part
    let t = torus();
    let mut prims = Primitives::new();
    prims.declare(&t.m, t.psi.clone()).unwrap();
    let fam = [t.omega.clone(), t.omegabar.clone()];
    let sc = OmegaScenario::chain("rho").unwrap();
    let cases = [
        (&t.m, extend_closed_family(&t.m, &fam, &prims).unwrap(), 2),
        (&sc.model, sc.omega_element().unwrap(), 3),
    ];
    for (m, e, s) in cases {
        let top = e.length_part(s);
        let rest = e.minus(&top);
        assert_eq!(e.max_length(), s);
        assert!(rest.max_length() < s && !rest.is_zero());
        let dt = chen_differential(m, &reduce_normal_form(m, &top).unwrap()).unwrap();
        let dr = chen_differential(m, &reduce_normal_form(m, &rest).unwrap()).unwrap();
        assert!(!dt.is_zero());
        assert_eq!(dt.plus(&dr), BarTensor::zero());
    }
}
