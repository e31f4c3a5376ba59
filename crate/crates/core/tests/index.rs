use std::sync::Arc;

use proptest::prelude::*;
use qact_core::action::Coaction;
use qact_core::fdlin::linalg::{Mat, MaxAbs, C64};
use qact_core::fdlin::FdCStarAlgebra;
use qact_core::index::structure::{left_inner, right_inner};
use qact_core::index::*;
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

fn z2_translation() -> Coaction {
    Coaction::translation(z2()).unwrap()
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

/// Window degree 3 keeps every product of the spin-1/2 pipeline inside the
/// degree-6 ambient core.
fn suq2_translation() -> Coaction {
    Coaction::translation(Arc::new(suq2(0.5, 6).unwrap().quantum_group(3, 7, TOL).unwrap())).unwrap()
}

fn free_finite() -> Vec<Coaction> {
    vec![
        z2_translation(),
        Coaction::translation(group(c_zn(3).unwrap())).unwrap(),
        s3_translation(),
        Coaction::translation(group(dual_s3().unwrap())).unwrap(),
        swap2(),
    ]
}

fn irrep(c: &Coaction, label: &str) -> Rep {
    Rep::parse(&c.qg, label).unwrap()
}

fn is_scalar(x: &AmpElement, c: &Coaction, lambda: f64) -> f64 {
    x.sub(&AmpElement::diagonal(x.n, &(c.unit() * C64::new(lambda, 0.0)))).max_abs()
}

#[test]
fn trivial_rep_gives_c_equal_b() {
    for c in free_finite() {
        let inc = build_inclusion(&c, &irrep(&c, &c.qg.irreps[0].label), TOL).unwrap();
        assert!(c.qg.irreps[0].is_trivial);
        assert_eq!(inc.report.dim_c, inc.report.dim_b, "{}", c.name);
        for x in &inc.basis {
            let e = inc.expectation(x);
            assert!(AmpElement::diagonal(1, &e).sub(x).max_abs() < 1e-10);
        }
        let qb = quasi_basis(&c, &inc, 1, TOL).unwrap();
        assert_eq!(qb.report.size, 1);
        assert!((qb.report.index_scalar.unwrap() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn descriptions_of_c_agree() {
    for c in free_finite().into_iter().chain([trivial2()]) {
        for p in &c.qg.irreps {
            let inc = build_inclusion(&c, &irrep(&c, &p.label), TOL).unwrap();
            let r = &inc.report;
            assert!(r.descriptions < 1e-8, "{} {}: {:e}", c.name, p.label, r.descriptions);
            assert!(r.b_in_c < 1e-8);
            assert!(r.theta_unique);
            let e = &r.expectation;
            assert!(e.into_b.max(e.idempotence).max(e.bimodularity).max(e.unital) < 1e-8, "{e:?}");
            assert!(e.positivity.unwrap() > -1e-9);
        }
    }
}

#[test]
fn kac_theta_is_normalized_trace() {
    let c = s3_translation();
    let inc = build_inclusion(&c, &irrep(&c, "std"), TOL).unwrap();
    assert_eq!(inc.report.dim_c, 4);
    assert_eq!(inc.report.dim_b, 1);
    let tr = Mat::identity(2, 2) * C64::new(0.5, 0.0);
    assert!((&inc.theta - tr).max_abs() < 1e-9);
    assert!(inc.report.inverse_q_form < 1e-9 && inc.report.q_form < 1e-9);
}

#[test]
fn z2_sign_is_one_dimensional() {
    let c = z2_translation();
    let inc = build_inclusion(&c, &irrep(&c, "chi1"), TOL).unwrap();
    let st = two_sided_structure(&c, &inc, 5, TOL).unwrap();
    assert_eq!(st.report.module_dim, 1);
    assert_eq!(inc.report.dim_b, 1);
    // z = e_0 - e_1 is the unique direction up to scale
    let z = &st.module[0][0];
    assert!((z[0] + z[1]).norm() < 1e-10 && z[0].norm() > 0.1);
    let r = right_inner(&c, &st.module[0], &st.module[0]).unwrap();
    let l = left_inner(&c, &inc, &st.module[0], &st.module[0]).unwrap();
    assert!((&r - &l).max_abs() < 1e-10 && (r[0] - r[1]).norm() < 1e-10);
}

#[test]
fn swap_sign_reduces_to_averaging() {
    // with n = 1 the twist by a commuting character is invisible, so C = B
    let c = swap2();
    let inc = build_inclusion(&c, &irrep(&c, "chi1"), TOL).unwrap();
    assert_eq!(inc.report.dim_c, 1);
    assert_eq!(inc.report.dim_b, 1);
    let b = inc.basis[0].entry(0, 0);
    assert!((b[0] - b[1]).norm() < 1e-10 && b[0].norm() > 0.1);
    assert!(AmpElement::diagonal(1, &inc.expectation(&inc.basis[0])).sub(&inc.basis[0]).max_abs() < 1e-10);
    let eig = eigenmatrix_check(&c, &inc, TOL).unwrap();
    assert_eq!(eig.defect, 0);
    let qb = quasi_basis(&c, &inc, 2, TOL).unwrap();
    assert!((qb.report.index_scalar.unwrap() - 1.0).abs() < 1e-10);
}

#[test]
fn structures_are_positive_and_reconstruct() {
    for c in free_finite().into_iter().chain([suq2_translation()]) {
        for pi in 0..c.qg.irreps.len() {
            let rep = Rep::irreducible(&c.qg, pi);
            if 2 * rep.degree(&c) > c.window() as usize && c.is_graded() {
                continue;
            }
            let inc = build_inclusion(&c, &rep, TOL).unwrap();
            let r = two_sided_structure(&c, &inc, 11, TOL).unwrap().report;
            assert!(r.right_reconstruction.max(r.left_reconstruction) < 1e-8, "{} {}: {r:?}", c.name, rep.label);
            assert!(r.right_balance.max(r.left_balance) < 1e-10);
            assert!(r.positivity.unwrap() > -1e-9);
            assert!(r.right_gram_min.unwrap() > -1e-9 && r.left_gram_min.unwrap() > -1e-9);
            assert_eq!(r.right_generators, r.left_generators);
        }
    }
}

#[test]
fn quasi_basis_identities_and_index() {
    for c in free_finite() {
        for pi in 0..c.qg.irreps.len() {
            let rep = Rep::irreducible(&c.qg, pi);
            let inc = build_inclusion(&c, &rep, TOL).unwrap();
            let st = two_sided_structure(&c, &inc, 3, TOL).unwrap();
            let f = faithfulness(&c, &inc, &st, TOL).unwrap();
            assert!(f.faithful && f.containment < 1e-8, "{f:?}");
            let qb = quasi_basis(&c, &inc, 3, TOL).unwrap();
            let r = &qb.report;
            assert!(r.left_identity.max(r.right_identity) < 1e-8, "{r:?}");
            assert!(r.centrality < 1e-8);
            assert!(r.generates);
            assert_eq!(r.size, st.report.right_generators * st.report.left_generators);
            assert!(is_scalar(&qb.index, &c, rep.qdim * rep.qdim) < 1e-7, "{} {}", c.name, rep.label);
        }
    }
}

#[test]
fn s3_index_is_four_and_seed_independent() {
    let c = s3_translation();
    let inc = build_inclusion(&c, &irrep(&c, "std"), TOL).unwrap();
    let a = quasi_basis(&c, &inc, 1, TOL).unwrap();
    let b = quasi_basis(&c, &inc, 99, TOL).unwrap();
    assert!(is_scalar(&a.index, &c, 4.0) < 1e-7);
    assert!(a.index.sub(&b.index).max_abs() < 1e-8);
    assert_eq!(a.report.size, 4);
}

#[test]
fn theorem_on_free_finite_actions() {
    for c in free_finite() {
        for pi in 0..c.qg.irreps.len() {
            let t = index_theorem_check(&c, pi, TOL).unwrap();
            assert!(t.residual < 1e-7, "{} {}: {t:?}", c.name, t.label);
            assert!(t.independence < 1e-8 && t.centrality < 1e-8);
            assert!((t.index_scalar.unwrap() - t.qdim_sq).abs() < 1e-7);
            let k = &t.construction;
            assert!(k.h_residual.max(k.g_residual).max(k.decomposition_h).max(k.decomposition_g) < 1e-8, "{k:?}");
            assert!(k.conjugate_unitarity.max(k.membership) < 1e-8);
            assert!(k.right_reconstruction.max(k.left_reconstruction) < 1e-8);
            assert!(k.left_identity.max(k.right_identity) < 1e-8);
            assert!((k.f_sum - t.qdim_sq).abs() < 1e-9);
            assert!(k.middle_deviation < 1e-8 && (k.middle.unwrap() - t.qdim_sq).abs() < 1e-8);
            assert!(k.index_residual.max(k.second_solution_residual).max(k.solution_independence) < 1e-7);
        }
    }
}

#[test]
fn suq2_fundamental_index() {
    let c = suq2_translation();
    let q: f64 = 0.5;
    let pi = c.qg.irrep_index("spin1/2").unwrap();
    let inc = build_inclusion(&c, &Rep::irreducible(&c.qg, pi), TOL).unwrap();
    // non-Kac: only the inverse-Q form is invariant
    assert!(inc.report.inverse_q_form < 1e-9 && inc.report.q_form > 0.1);
    let t = index_theorem_check(&c, pi, TOL).unwrap();
    assert!(t.residual < 1e-6, "{t:?}");
    assert!((t.qdim_sq - (q + 1.0 / q).powi(2)).abs() < 1e-8);
    assert!(t.independence < 1e-8);
    assert!(t.construction.index_residual < 1e-6 && t.construction.solution_independence < 1e-8);
    assert!((t.construction.f_sum - t.qdim_sq).abs() < 1e-8);
    let eig = eigenmatrix_check(&c, &inc, TOL).unwrap();
    assert_eq!(eig.defect, 0);
}

#[test]
fn suq2_budget_is_enforced() {
    let c = suq2_translation();
    let pi = c.qg.irrep_index("spin1").unwrap();
    assert!(matches!(build_inclusion(&c, &Rep::irreducible(&c.qg, pi), TOL), Err(Error::DegreeOverflow { .. })));
}

#[test]
fn eigenmatrices_span_c_under_freeness() {
    for c in free_finite() {
        for p in &c.qg.irreps {
            let inc = build_inclusion(&c, &irrep(&c, &p.label), TOL).unwrap();
            let r = eigenmatrix_check(&c, &inc, TOL).unwrap();
            assert_eq!(r.defect, 0, "{} {}", c.name, p.label);
            assert!(r.containment < 1e-8);
        }
    }
}

#[test]
fn trivial_action_is_reported_not_free() {
    let c = trivial2();
    let inc = build_inclusion(&c, &irrep(&c, "chi1"), TOL).unwrap();
    assert_eq!(inc.report.dim_c, 2);
    let eig = eigenmatrix_check(&c, &inc, TOL).unwrap();
    assert_eq!(eig.eigen_dim, 0);
    assert!(eig.defect > 0);
    assert!(matches!(quasi_basis(&c, &inc, 1, TOL), Err(Error::SpanDeficiency(_))));
    let triv = c.qg.irrep_index("chi0").unwrap();
    assert!(matches!(index_theorem_check(&c, triv, TOL), Err(Error::Unsolvable { .. })));
}

#[test]
fn reducible_rep_index_is_central() {
    let c = s3_translation();
    let rep = irrep(&c, "triv+std");
    assert_eq!(rep.n, 3);
    assert!(!rep.is_irreducible());
    let inc = build_inclusion(&c, &rep, TOL).unwrap();
    assert!(!inc.report.theta_unique);
    assert_eq!(inc.report.dim_c, 9);
    let qb = quasi_basis(&c, &inc, 4, TOL).unwrap();
    assert!(qb.report.left_identity.max(qb.report.right_identity) < 1e-8);
    assert!(qb.report.centrality < 1e-8);
    // the inverse-Q weighting makes Index(E) the square of the total dimension
    assert!(is_scalar(&qb.index, &c, 9.0) < 1e-7);
}

#[test]
fn quasi_basis_round_trips_through_json() {
    let c = s3_translation();
    let inc = build_inclusion(&c, &irrep(&c, "std"), TOL).unwrap();
    let qb = quasi_basis(&c, &inc, 8, TOL).unwrap();
    let text = serde_json::to_string(&qb.to_json(&c.name)).unwrap();
    let back = QuasiBasis::from_json(&c, &inc, &serde_json::from_str(&text).unwrap(), TOL).unwrap();
    assert!(back.index.sub(&qb.index).max_abs() < 1e-12);
    assert!(back.report.left_identity < 1e-8);

    let mut tampered: serde_json::Value = serde_json::from_str(&text).unwrap();
    tampered["pairs"].as_array_mut().unwrap().pop();
    let bad = QuasiBasis::from_json(&c, &inc, &tampered, TOL).unwrap();
    assert!(bad.report.left_identity > 1e-3);

    let other = build_inclusion(&c, &irrep(&c, "sign"), TOL).unwrap();
    assert!(QuasiBasis::from_json(&c, &other, &serde_json::from_str(&text).unwrap(), TOL).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn index_does_not_depend_on_generators(seed in 0u64..10_000) {
        let c = s3_translation();
        let inc = build_inclusion(&c, &irrep(&c, "std"), TOL).unwrap();
        let qb = quasi_basis(&c, &inc, seed, TOL).unwrap();
        prop_assert!(is_scalar(&qb.index, &c, 4.0) < 1e-7);
        prop_assert!(qb.structure.positivity.unwrap() > -1e-9);
    }
}
