use std::sync::Arc;

use proptest::prelude::*;
use qact_core::action::isotypic::{isotypical, right_inner};
use qact_core::action::Coaction;
use qact_core::fdlin::linalg::{Mat, MaxAbs, Vector, C64};
use qact_core::fdlin::FdCStarAlgebra;
use qact_core::galois::{
    crossed_product, ellwood_check, freeness_verdicts, galois_map, projectivity_witness, range_projection_check,
    saturation_check, theorem_freeness_equivalence, verify_witness, ProjectivityWitness,
};
use qact_core::pbw::suq2::suq2;
use qact_core::qg::examples::{c_s3, c_zn, dual_s3};
use qact_core::qg::QuantumGroup;
use qact_core::Error;

const TOL: f64 = 1e-9;

fn group(g: qact_core::qg::finite::FiniteQuantumGroup) -> Arc<QuantumGroup> {
    Arc::new(g.build(7, TOL).unwrap())
}

fn z2() -> Arc<QuantumGroup> {
    group(c_zn(2).unwrap())
}

fn s3_translation() -> Coaction {
    Coaction::translation(group(c_s3().unwrap())).unwrap()
}

fn swap2() -> Coaction {
    Coaction::function_action("swap", z2(), &[vec![0, 1], vec![1, 0]]).unwrap()
}

fn trivial2() -> Coaction {
    Coaction::trivial("trivial", z2(), FdCStarAlgebra::commutative(2).unwrap()).unwrap()
}

fn trivial_point() -> Coaction {
    Coaction::trivial("point", z2(), FdCStarAlgebra::commutative(1).unwrap()).unwrap()
}

/// Translation on `C(Z/2)` plus a fixed point.
fn mixed() -> Coaction {
    let g = z2();
    let free = Coaction::translation(g.clone()).unwrap();
    let fixed = Coaction::trivial("point", g, FdCStarAlgebra::commutative(1).unwrap()).unwrap();
    Coaction::direct_sum("mixed", &free, &fixed).unwrap()
}

fn suq2_translation() -> Coaction {
    Coaction::translation(Arc::new(suq2(0.5, 6).unwrap().quantum_group(2, 7, TOL).unwrap())).unwrap()
}

fn all_finite() -> Vec<Coaction> {
    vec![
        s3_translation(),
        Coaction::translation(group(dual_s3().unwrap())).unwrap(),
        Coaction::translation(group(c_zn(3).unwrap())).unwrap(),
        Coaction::translation(z2()).unwrap(),
        swap2(),
        trivial2(),
        trivial_point(),
        mixed(),
    ]
}

/// `(ι⊗φ)(X* X)` by the double sum over the Haar Gram matrix.
fn slice_oracle(c: &Coaction, x: &Mat) -> Vector {
    let m = c.qg.m;
    let mut out = Vector::zeros(c.dim());
    for s in 0..m {
        let xs = c.star(&x.column(s).into_owned());
        for t in 0..m {
            let g = c.qg.gram[(s, t)];
            if g.norm() > 0.0 {
                out += c.mul(&xs, &x.column(t).into_owned()).unwrap() * g;
            }
        }
    }
    out
}

#[test]
fn trivial_galois_map_is_multiplication() {
    for c in all_finite().iter().chain([suq2_translation()].iter()) {
        let g = galois_map(c, 0, TOL).unwrap();
        assert!(g.report.injective && g.report.surjective, "{}: {:?}", c.name, g.report);
    }
}

#[test]
fn translation_galois_maps_are_bijective() {
    for c in [s3_translation(), Coaction::translation(group(dual_s3().unwrap())).unwrap(), suq2_translation()] {
        for pi in 0..c.qg.irreps.len() {
            let r = galois_map(&c, pi, TOL).unwrap().report;
            assert!(r.injective && r.surjective, "{} {}: {r:?}", c.name, r.label);
            assert_eq!(r.balancing_rank, 0);
        }
    }
}

#[test]
fn galois_map_with_empty_domain() {
    let c = trivial_point();
    let pi = c.qg.irrep_index("chi1").unwrap();
    let r = galois_map(&c, pi, TOL).unwrap().report;
    assert_eq!((r.domain_dim, r.codomain_dim, r.rank, r.codim), (0, 1, 0, 1));
    assert!(!r.surjective);
}

#[test]
fn galois_maps_are_isometric() {
    for c in all_finite().iter().chain([suq2_translation()].iter()) {
        for pi in 0..c.qg.irreps.len() {
            let r = galois_map(c, pi, TOL).unwrap().report;
            assert!(r.isometry < 1e-8 && r.well_defined < 1e-8, "{} {}: {r:?}", c.name, r.label);
        }
    }
}

#[test]
fn balancing_over_a_large_fixed_point_algebra() {
    // B = C² for the trivial action: A_π ⊗_B A collapses to B ⊗_B A = A
    let c = trivial2();
    let r = galois_map(&c, 0, TOL).unwrap().report;
    assert_eq!(r.domain_dim, 4);
    assert_eq!(r.quotient_dim, 2);
    assert_eq!(r.rank, 2);
}

#[test]
fn ellwood_verdicts() {
    let r = ellwood_check(&s3_translation(), TOL).unwrap();
    assert!(r.free && r.defect == 0 && r.agree);
    let r = ellwood_check(&trivial2(), TOL).unwrap();
    assert!(!r.free && r.agree);
    assert_eq!(r.defect, 2);
    assert_eq!(r.global_rank, Some(2));
    let r = ellwood_check(&swap2(), TOL).unwrap();
    assert!(r.free && r.agree);
    let r = ellwood_check(&suq2_translation(), TOL).unwrap();
    assert!(r.free && r.galois_unitary && r.global_rank.is_none());
}

#[test]
fn crossed_product_structure() {
    let cp = crossed_product(&Coaction::translation(z2()).unwrap(), TOL).unwrap();
    assert_eq!(cp.report.dim, 4);
    assert_eq!(cp.report.block_dims, vec![2]);

    let cp = crossed_product(&trivial_point(), TOL).unwrap();
    assert_eq!(cp.report.dim, 2);
    assert_eq!(cp.report.block_dims, vec![1, 1]);

    let cp = crossed_product(&s3_translation(), TOL).unwrap();
    assert_eq!(cp.report.dim, 36);
    assert_eq!(cp.report.block_dims, vec![6]);
    let std = cp.report.corners.iter().find(|k| k.label == "std").unwrap();
    assert_eq!(std.left_dim, 24);
    assert_eq!(std.corner_dim, 16);
}

#[test]
fn crossed_product_identities() {
    for c in all_finite() {
        let cp = crossed_product(&c, TOL).unwrap();
        let r = &cp.report;
        assert!(r.product_closure < 1e-8 && r.adjoint_closure < 1e-8, "{}: {r:?}", c.name);
        assert!(r.reduced_identity < 1e-8 && r.invariance < 1e-8, "{}: {r:?}", c.name);
        let x = &cp.basis[1];
        assert!((cp.adjoint(&cp.adjoint(x)) - x).max_abs() < 1e-8);
    }
}

#[test]
fn crossed_product_needs_finite_data() {
    assert!(matches!(crossed_product(&suq2_translation(), TOL), Err(Error::Unsupported(_))));
}

#[test]
fn saturation_verdicts() {
    let c = Coaction::translation(z2()).unwrap();
    let s = saturation_check(&c, &crossed_product(&c, TOL).unwrap(), TOL).unwrap();
    assert!(s.saturated);

    let c = trivial_point();
    let s = saturation_check(&c, &crossed_product(&c, TOL).unwrap(), TOL).unwrap();
    assert!(!s.saturated);
    assert_eq!(s.defect, 1);

    let c = swap2();
    let s = saturation_check(&c, &crossed_product(&c, TOL).unwrap(), TOL).unwrap();
    assert!(s.saturated);

    let c = trivial2();
    let s = saturation_check(&c, &crossed_product(&c, TOL).unwrap(), TOL).unwrap();
    assert_eq!((s.defect, s.ideal_dim, s.crossed_dim), (2, 2, 4));
}

#[test]
fn freeness_equivalence_on_every_example() {
    for c in all_finite().iter().chain([suq2_translation()].iter()) {
        let v = theorem_freeness_equivalence(c, TOL).unwrap();
        assert!(v.agree, "{}", c.name);
        if c.is_graded() {
            assert!(v.saturation.is_none());
        } else {
            assert_eq!(v.defects_agree, Some(true), "{}", c.name);
        }
    }
    let v = freeness_verdicts(&s3_translation(), TOL).unwrap();
    assert!(v.free && v.saturated == Some(true));
    let v = freeness_verdicts(&trivial2(), TOL).unwrap();
    assert!(!v.free && v.saturated == Some(false));
    let v = freeness_verdicts(&mixed(), TOL).unwrap();
    assert!(!v.free && v.saturated == Some(false));
}

#[test]
fn range_projection_of_free_action_is_identity() {
    let c = s3_translation();
    let cp = crossed_product(&c, TOL).unwrap();
    for pi in 0..c.qg.irreps.len() {
        let r = range_projection_check(&c, &cp, pi, TOL).unwrap();
        assert_eq!(r.rank, r.codomain_dim);
        assert!(r.identity_distance < 1e-8 && r.centrality < 1e-8, "{r:?}");
        assert!(r.right_a_vs_b < 1e-8 && r.right_vs_left < 1e-8, "{r:?}");
    }
}

#[test]
fn range_projection_of_trivial_action_vanishes() {
    let c = trivial2();
    let cp = crossed_product(&c, TOL).unwrap();
    let r = range_projection_check(&c, &cp, c.qg.irrep_index("chi1").unwrap(), TOL).unwrap();
    assert_eq!(r.rank, 0);
    assert!(r.size < 1e-12);
}

#[test]
fn range_projection_of_partially_free_action() {
    let c = mixed();
    let cp = crossed_product(&c, TOL).unwrap();
    let r = range_projection_check(&c, &cp, c.qg.irrep_index("chi1").unwrap(), TOL).unwrap();
    assert!(r.proper, "{r:?}");
    assert_eq!((r.rank, r.codomain_dim), (2, 3));
    assert!(r.idempotence < 1e-8 && r.self_adjointness < 1e-8, "{r:?}");
    assert!(r.centrality < 1e-8, "{r:?}");
    assert!(r.right_a_vs_b < 1e-8 && r.right_vs_left < 1e-8, "{r:?}");
}

#[test]
fn witness_for_trivial_component() {
    for c in [swap2(), trivial2(), s3_translation()] {
        let w = projectivity_witness(&c, 0, TOL).unwrap();
        assert_eq!(w.n(), 1, "{}", c.name);
        assert!((&w.projection[0][0] - c.unit()).max_abs() < 1e-9);
        assert!(w.report.passes(1e-8), "{}: {:?}", c.name, w.report);
    }
}

#[test]
fn witness_for_standard_representation() {
    let c = s3_translation();
    let w = projectivity_witness(&c, c.qg.irrep_index("std").unwrap(), TOL).unwrap();
    assert_eq!(w.n(), 4);
    assert_eq!(w.report.rank, Some(4));
    assert_eq!(w.report.module_dim, 4);
    assert!(w.report.passes(1e-8), "{:?}", w.report);
    assert!(w.report.gap > 0.49);
}

#[test]
fn witness_for_swap_sign() {
    let c = swap2();
    let w = projectivity_witness(&c, c.qg.irrep_index("chi1").unwrap(), TOL).unwrap();
    assert_eq!(w.n(), 1);
    assert_eq!(w.report.rank, Some(1));
    let x = &w.frame[0];
    assert!((x[0] + x[1]).norm() < 1e-9, "frame {x:?} is not a multiple of (1, -1)");
    assert!(w.report.passes(1e-8));
}

#[test]
fn witness_over_noncommutative_fixed_points() {
    let c = trivial2();
    let w = projectivity_witness(&c, 0, TOL).unwrap();
    assert!(w.report.passes(1e-8), "{:?}", w.report);
    let c = mixed();
    for pi in 0..2 {
        let w = projectivity_witness(&c, pi, TOL).unwrap();
        assert!(w.report.passes(1e-8), "{:?}", w.report);
        assert_eq!(w.report.module_dim, w.report.component_dim);
    }
}

#[test]
fn witness_on_truncated_core() {
    let c = suq2_translation();
    let pi = c.qg.irrep_index("spin1/2").unwrap();
    let w = projectivity_witness(&c, pi, TOL).unwrap();
    assert_eq!((w.n(), w.report.rank), (4, Some(4)));
    assert!(w.report.passes(1e-8), "{:?}", w.report);
}

#[test]
fn witness_json_round_trip() {
    let c = s3_translation();
    let w = projectivity_witness(&c, c.qg.irrep_index("std").unwrap(), TOL).unwrap();
    let text = serde_json::to_string(&w.to_json()).unwrap();
    let back = ProjectivityWitness::from_json(&c, &serde_json::from_str(&text).unwrap(), TOL).unwrap();
    assert!(back.report.passes(1e-8), "{:?}", back.report);

    let mut bad = back.clone();
    bad.projection[0][1][0] += C64::new(0.1, 0.0);
    let r = verify_witness(&c, &bad, TOL).unwrap();
    assert!(!r.passes(1e-8));
    assert!(r.projection_match > 0.05);
}

#[test]
fn witness_inner_products_match_the_module() {
    // independent check of ⟨Φa, Φb⟩ = ⟨a, b⟩_B on random elements
    let c = swap2();
    let pi = c.qg.irrep_index("chi1").unwrap();
    let w = projectivity_witness(&c, pi, TOL).unwrap();
    let iso = isotypical(&c, pi, TOL).unwrap();
    let a = iso.combine(&Vector::from_element(1, C64::new(0.3, -1.2)));
    let phi: Vec<Vector> = w.frame.iter().map(|z| right_inner(&c, z, &a).unwrap()).collect();
    let lhs: Vector = phi.iter().map(|v| c.mul(&c.star(v), v).unwrap()).fold(Vector::zeros(c.dim()), |s, v| s + v);
    assert!((lhs - right_inner(&c, &a, &a).unwrap()).max_abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn galois_isometry_on_random_tensors(pi in 0usize..3, coeffs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 24)) {
        let c = s3_translation();
        let g = galois_map(&c, pi, TOL).unwrap();
        let dom = g.matrix.ncols();
        let t = Vector::from_iterator(dom, coeffs.iter().cycle().take(dom).map(|&(re, im)| C64::new(re, im)));
        let img = &g.matrix * &t;
        let x = Mat::from_fn(c.dim(), c.qg.m, |r, s| img[r * c.qg.m + s]);
        let mut source = Vector::zeros(c.dim());
        for k in 0..g.x.ncols() {
            for l in 0..g.x.ncols() {
                let e = right_inner(&c, &g.x.column(k).into_owned(), &g.x.column(l).into_owned()).unwrap();
                let wk = Vector::from_fn(c.dim(), |j, _| if j < g.y_dim { t[k * g.y_dim + j] } else { C64::new(0.0, 0.0) });
                let wl = Vector::from_fn(c.dim(), |j, _| if j < g.y_dim { t[l * g.y_dim + j] } else { C64::new(0.0, 0.0) });
                source += c.mul(&c.mul(&c.star(&wk), &e).unwrap(), &wl).unwrap();
            }
        }
        prop_assert!((slice_oracle(&c, &x) - source).max_abs() < 1e-8);
    }
}

/// `S_3` permuting three points; stabilizers are `Z/2`, so not free.
fn s3_on_points() -> Coaction {
    use qact_core::action::verify::verify_coaction;
    use qact_core::qg::examples::s3_elements;
    let g = group(c_s3().unwrap());
    let perms = s3_elements();
    let direct: Vec<Vec<usize>> = perms.iter().map(|p| p.to_vec()).collect();
    let inverse: Vec<Vec<usize>> = perms
        .iter()
        .map(|p| {
            let mut q = vec![0; 3];
            for (i, &j) in p.iter().enumerate() {
                q[j] = i;
            }
            q
        })
        .collect();
    [direct, inverse]
        .into_iter()
        .map(|act| Coaction::function_action("s3_points", g.clone(), &act).unwrap())
        .find(|c| verify_coaction(c, TOL).unwrap().passes(1e-9))
        .expect("one of the two conventions is a right action")
}

#[test]
fn range_projections_agree_with_stabilizers() {
    let c = s3_on_points();
    let v = theorem_freeness_equivalence(&c, TOL).unwrap();
    assert!(!v.free && v.saturated == Some(false) && v.defects_agree == Some(true));
    let cp = crossed_product(&c, TOL).unwrap();
    let mut proper = 0;
    for pi in 0..c.qg.irreps.len() {
        let r = range_projection_check(&c, &cp, pi, TOL).unwrap();
        assert!(r.idempotence < 1e-8 && r.self_adjointness < 1e-8, "{r:?}");
        assert!(r.right_a_vs_b < 1e-8 && r.right_vs_left < 1e-8, "{r:?}");
        assert!(r.centrality < 1e-8, "{r:?}");
        proper += r.proper as usize;
    }
    assert!(proper > 0);
}
