mod common;

use std::collections::BTreeMap;

use nearby_core::curve::{
    exponents_from_pairs, milnor_from_branch_data, monstrance_order, puiseux_pairs_from_exponents, CurveSpec,
};
use nearby_core::graph::{MarkedGraph, Vertex};
use nearby_core::hodge::{nilpotent_matrices, tree_test, weight_graded_dims};
use nearby_core::matrix::Matrix;
use nearby_core::resolution::{build_resolution_graph, lcm_d, mu_from_resolution, ResKind, ResolutionGraph};
use nearby_core::semistable::{
    semistable_reduce, semistable_reduce_with, verify_h1_dimension, CentralFiberGraph, Provenance,
    SemistableError,
};
use nearby_core::{validate_graph, MonstranceData, Monomial, Scalar};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn scalar_strategy() -> impl Strategy<Value = Scalar> {
    let term = (-6i64..=6, 1i64..=4, 0i32..=2, 0i32..=1, -2i32..=2);
    prop::collection::vec(term, 0..4).prop_map(|terms| {
        terms.into_iter().fold(Scalar::zero(), |acc, (n, d, a, b, t)| {
            let m = Monomial::var("rho", a).mul(&Monomial::var("omega", b)).mul(&Monomial::var("tau", t));
            &acc + &Scalar::monomial(BigRational::new(BigInt::from(n), BigInt::from(d)), m)
        })
    })
}

/// First feasible random curve drawn from `seed` with moderate base change.
fn feasible_curve(seed: u64) -> Option<(CurveSpec, ResolutionGraph)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..200).find_map(|_| {
        let c = common::random_curve(&mut rng, 3);
        let g = build_resolution_graph(&c).ok()?;
        (lcm_d(&g) <= 2000 && g.vertices.len() > 1).then_some((c, g))
    })
}

/// Label-preserving isomorphism search for small resolution graphs.
fn isomorphic(a: &ResolutionGraph, b: &ResolutionGraph, branch_map: &[usize]) -> bool {
    if a.vertices.len() != b.vertices.len() || a.edges.len() != b.edges.len() {
        return false;
    }
    let label = |g: &ResolutionGraph, v: usize, map: Option<&[usize]>| {
        let x = &g.vertices[v];
        let branch = x.branch.map(|i| map.map_or(i, |m| m[i]));
        (x.kind == ResKind::Strict, x.multiplicity, branch)
    };
    let adj = |g: &ResolutionGraph| {
        let mut m = vec![vec![false; g.vertices.len()]; g.vertices.len()];
        for e in &g.edges {
            m[e.k][e.l] = true;
            m[e.l][e.k] = true;
        }
        m
    };
    let (aa, ab) = (adj(a), adj(b));
    fn extend(
        i: usize,
        img: &mut Vec<usize>,
        used: &mut Vec<bool>,
        ok: &dyn Fn(usize, usize) -> bool,
        aa: &[Vec<bool>],
        ab: &[Vec<bool>],
    ) -> bool {
        if i == aa.len() {
            return true;
        }
        for j in 0..ab.len() {
            if used[j] || !ok(i, j) || (0..i).any(|p| aa[i][p] != ab[j][img[p]]) {
                continue;
            }
            used[j] = true;
            img.push(j);
            if extend(i + 1, img, used, ok, aa, ab) {
                return true;
            }
            img.pop();
            used[j] = false;
        }
        false
    }
    let ok = |i: usize, j: usize| label(a, i, Some(branch_map)) == label(b, j, None);
    extend(0, &mut Vec::new(), &mut vec![false; b.vertices.len()], &ok, &aa, &ab)
}

fn relabel(g: &MarkedGraph, perm: &[usize]) -> MarkedGraph {
    let pos: BTreeMap<usize, usize> = g.vertices.iter().map(|v| v.id).zip(perm.iter().copied()).collect();
    let vertices = g.vertices.iter().map(|v| Vertex { id: pos[&v.id], ..v.clone() }).collect();
    let pairs: Vec<(usize, usize)> = g
        .edges
        .iter()
        .map(|e| {
            let (k, l) = (pos[&e.k], pos[&e.l]);
            (k.min(l), k.max(l))
        })
        .collect();
    MarkedGraph { vertices, edges: nearby_core::graph::build::edges(&pairs) }
}

fn violation_kinds(g: &MarkedGraph) -> Vec<String> {
    let mut v: Vec<String> = validate_graph(g)
        .iter()
        .map(|x| format!("{x:?}").split([' ', '{']).next().unwrap().to_string())
        .collect();
    v.sort();
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scalar_ring_axioms(a in scalar_strategy(), b in scalar_strategy(), c in scalar_strategy()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &Scalar::one(), a.clone());
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn scalar_normal_form_is_idempotent(a in scalar_strategy()) {
        let n = nearby_core::scalar_normalize(&a);
        prop_assert_eq!(nearby_core::scalar_normalize(&n), n.clone());
        prop_assert_eq!(n.to_string(), a.to_string());
    }

    #[test]
    fn validation_ignores_vertex_order(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = common::random_graph(&mut rng);
        if seed % 3 == 0 {
            // break something on purpose
            let e = g.edges[0];
            g.edges.push(nearby_core::graph::Edge { id: g.edges.len(), ..e });
        }
        let mut perm: Vec<usize> = (0..g.vertices.len()).collect();
        perm.shuffle(&mut rng);
        prop_assert_eq!(violation_kinds(&g), violation_kinds(&relabel(&g, &perm)));
    }

    #[test]
    fn pairs_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pairs = common::random_pairs(&mut rng);
        let b = exponents_from_pairs(&pairs).unwrap();
        prop_assert_eq!(puiseux_pairs_from_exponents(&b), pairs);
    }

    #[test]
    fn monstrance_m_is_denominator_lcm(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = exponents_from_pairs(&common::random_pairs(&mut rng)).unwrap();
        let lcm = b.exponents().iter().fold(1i64, |l, q| l.lcm(q.denom()));
        prop_assert_eq!(monstrance_order(&b).m as i64, lcm);
    }

    #[test]
    fn resolution_mu_and_minimality(seed in any::<u64>()) {
        let Some((c, g)) = feasible_curve(seed) else { return Ok(()) };
        prop_assert_eq!(mu_from_resolution(&g, c.r()), milnor_from_branch_data(&c).unwrap());
        prop_assert!(g.is_minimal());
        prop_assert!(g.check().is_empty());
    }

    #[test]
    fn permuted_branches_give_isomorphic_graph(seed in any::<u64>()) {
        let Some((c, g)) = feasible_curve(seed) else { return Ok(()) };
        let r = c.r();
        let mut perm: Vec<usize> = (0..r).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed ^ 1));
        // new branch i is old branch perm[i]
        let branches = perm.iter().map(|&i| c.branches[i].clone()).collect();
        let inter = perm.iter().map(|&i| perm.iter().map(|&j| c.intersections[i][j]).collect()).collect();
        let h = build_resolution_graph(&CurveSpec::new(branches, inter, None).unwrap()).unwrap();
        let mut old_to_new = vec![0; r];
        for (new, &old) in perm.iter().enumerate() {
            old_to_new[old] = new;
        }
        prop_assert!(g.vertices.len() > 14 || isomorphic(&g, &h, &old_to_new));
        prop_assert_eq!(g.vertices.len(), h.vertices.len());
    }

    #[test]
    fn dimension_identity(seed in any::<u64>()) {
        let Some((c, g)) = feasible_curve(seed) else { return Ok(()) };
        let cf = match semistable_reduce(&g) {
            Err(SemistableError::MultipleEdge { .. }) => return Ok(()),
            r => r.unwrap(),
        };
        let mu = mu_from_resolution(&g, c.r());
        prop_assert!(verify_h1_dimension(&cf, mu, c.r()).pass);
    }

    #[test]
    fn chains_have_length_n_minus_one(seed in any::<u64>()) {
        let Some((_, g)) = feasible_curve(seed) else { return Ok(()) };
        let Ok(cf) = semistable_reduce(&g) else { return Ok(()) };
        let origin = |v: usize| match cf.provenance[v] {
            Provenance::Strict { branch } => Some(g.strict_vertex(branch)),
            Provenance::Cover { exceptional, .. } => Some(exceptional),
            Provenance::Chain { .. } => None,
        };
        for el in &cf.edge_local {
            let e = g.edges.iter().find(|e| e.id == el.edge).unwrap();
            let sides = [e.k.min(e.l), e.k.max(e.l)];
            for point in 0..el.points {
                let chain: Vec<usize> = (0..cf.provenance.len())
                    .filter(|&v| matches!(cf.provenance[v], Provenance::Chain { res_edge, point: p, .. } if res_edge == el.edge && p == point))
                    .collect();
                prop_assert_eq!(chain.len() as u64, el.n_p - 1);
                let mut ends: Vec<usize> = cf
                    .graph
                    .edges
                    .iter()
                    .filter_map(|x| {
                        let (a, b) = (x.k, x.l);
                        match (chain.contains(&a), chain.contains(&b)) {
                            (true, false) => origin(b),
                            (false, true) => origin(a),
                            _ => None,
                        }
                    })
                    .collect();
                ends.sort();
                if !chain.is_empty() {
                    prop_assert_eq!(ends, sides.to_vec());
                }
            }
        }
    }

    #[test]
    fn proper_divisor_of_d_is_refused(seed in any::<u64>()) {
        let Some((_, g)) = feasible_curve(seed) else { return Ok(()) };
        let d = lcm_d(&g);
        for q in (1..d).filter(|q| d % q == 0) {
            let refused = matches!(semistable_reduce_with(&g, q), Err(SemistableError::NotCommonMultiple { .. }));
            prop_assert!(refused);
        }
    }

    #[test]
    fn monodromy_unipotent_on_graphs(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = common::random_graph(&mut rng);
        prop_assume!(validate_graph(&g).is_empty());
        let r = g.r();
        let cf = CentralFiberGraph { graph: g, d: 1 + seed % 5, provenance: Vec::new(), edge_local: Vec::new() };
        let mono = vec![MonstranceData { m: 1, k: 1, order: 1, k_le_m: false }; r];
        let ops = nilpotent_matrices(&cf, &mono).unwrap();
        let id = Matrix::identity(ops.n.rows());
        let t = Matrix::from_ints(&ops.t);
        let tm = &t - &id;
        prop_assert!((&tm * &tm).is_zero());
        prop_assert_eq!(tree_test(&cf.graph), t == id);
        let (w0, w1, w2) = weight_graded_dims(&cf).gr_dims;
        prop_assert_eq!((w0 + w1 + w2) as usize, ops.n.rows());
    }
}
