use std::sync::Arc;

use proptest::prelude::*;
use qact_core::action::bounds::{norm_comparison, pimsner_popa_check, pimsner_popa_slack};
use qact_core::action::equivariant::{equivariant_vectors, multiplication_report};
use qact_core::action::isotypic::{
    conjugation_distance, fixed_points, isotypical, isotypical_by_label, left_inner, matrix_min_eigenvalue,
    product_inclusion, right_inner, tensor_constituents,
};
use qact_core::action::verify::verify_coaction;
use qact_core::action::Coaction;
use qact_core::fdlin::linalg::{columns, containment_residual, rank, Mat, MaxAbs, Vector, C64};
use qact_core::fdlin::FdCStarAlgebra;
use qact_core::pbw::suq2::suq2;
use qact_core::qg::examples::{c_s3, c_zn, dual_s3};
use qact_core::qg::QuantumGroup;

const TOL: f64 = 1e-9;

fn group(g: qact_core::qg::finite::FiniteQuantumGroup) -> Arc<QuantumGroup> {
    Arc::new(g.build(7, TOL).unwrap())
}

fn s3_translation() -> Coaction {
    Coaction::translation(group(c_s3().unwrap())).unwrap()
}

fn swap2() -> Coaction {
    Coaction::function_action("swap", group(c_zn(2).unwrap()), &[vec![0, 1], vec![1, 0]]).unwrap()
}

fn trivial2() -> Coaction {
    Coaction::trivial("trivial", group(c_zn(2).unwrap()), FdCStarAlgebra::commutative(2).unwrap()).unwrap()
}

fn suq2_translation() -> Coaction {
    Coaction::translation(Arc::new(suq2(0.5, 6).unwrap().quantum_group(2, 7, TOL).unwrap())).unwrap()
}

fn all_finite() -> Vec<Coaction> {
    vec![
        s3_translation(),
        Coaction::translation(group(dual_s3().unwrap())).unwrap(),
        Coaction::translation(group(c_zn(3).unwrap())).unwrap(),
        swap2(),
        trivial2(),
    ]
}

#[test]
fn coaction_axioms_hold() {
    for c in all_finite().iter().chain([suq2_translation()].iter()) {
        let r = verify_coaction(c, TOL).unwrap();
        assert!(r.passes(1e-9), "{}: {r:?}", c.name);
    }
}

#[test]
fn corrupted_alpha_is_rejected() {
    let c = swap2();
    let mut alpha = c.alpha_matrix();
    alpha[(0, 0)] += C64::new(0.3, 0.0);
    let bad = Coaction::finite("bad", c.qg.clone(), FdCStarAlgebra::commutative(2).unwrap(), &alpha).unwrap();
    let r = verify_coaction(&bad, TOL).unwrap();
    assert!(r.homomorphism > 0.01 && r.coaction_identity > 0.01, "{r:?}");
}

#[test]
fn fixed_point_algebras() {
    let unit = |c: &Coaction| Mat::from_column_slice(c.dim(), 1, c.unit().as_slice());
    let t = s3_translation();
    let b = fixed_points(&t, TOL).unwrap();
    assert_eq!(b.dim(), 1);
    assert!(b.unit_in_b);

    let b = fixed_points(&trivial2(), TOL).unwrap();
    assert_eq!(b.dim(), 2);

    let s = swap2();
    let b = fixed_points(&s, TOL).unwrap();
    assert_eq!(b.dim(), 1);
    assert!(containment_residual(&b.basis, &unit(&s), TOL) < 1e-12);

    for c in all_finite() {
        let b = fixed_points(&c, TOL).unwrap();
        let r = &b.report;
        assert!(r.idempotence < 1e-12 && r.image < 1e-9 && r.unital < 1e-12 && r.bimodularity < 1e-12, "{}: {r:?}", c.name);
        assert!(r.min_positivity.unwrap() >= -1e-12);
    }
    let b = fixed_points(&suq2_translation(), TOL).unwrap();
    assert_eq!(b.dim(), 1);
    assert!(b.report.idempotence < 1e-12 && b.report.image < 1e-9);
}

#[test]
fn isotypical_dimensions() {
    let t = s3_translation();
    assert_eq!(isotypical_by_label(&t, "std", TOL).unwrap().dim(), 4);
    assert_eq!(isotypical_by_label(&t, "sign", TOL).unwrap().dim(), 1);
    let triv = isotypical_by_label(&t, "triv", TOL).unwrap();
    let b = fixed_points(&t, TOL).unwrap();
    assert!((&triv.e_pi - &b.e_b).max_abs() < 1e-12);

    let tr = trivial2();
    assert_eq!(isotypical_by_label(&tr, "chi1", TOL).unwrap().dim(), 0);
    assert_eq!(isotypical_by_label(&tr, "chi0", TOL).unwrap().dim(), 2);

    let q = suq2_translation();
    assert_eq!(isotypical_by_label(&q, "spin1/2", TOL).unwrap().dim(), 4);
    assert_eq!(isotypical_by_label(&q, "spin1", TOL).unwrap().dim(), 9);
}

#[test]
fn projections_are_orthogonal_and_complete() {
    for c in all_finite().into_iter().chain([suq2_translation()]) {
        let comps: Vec<_> = (0..c.qg.irreps.len()).map(|p| isotypical(&c, p, TOL).unwrap()).collect();
        let n = c.n;
        let mut sum = Mat::zeros(n, n);
        for (i, a) in comps.iter().enumerate() {
            assert!(a.idempotence < 1e-12, "{} {}", c.name, a.label);
            let ea = a.e_pi.rows(0, n).into_owned();
            sum += &ea;
            for b in comps.iter().skip(i + 1) {
                let eb = b.e_pi.rows(0, n).into_owned();
                assert!((&ea * &eb).max_abs() < 1e-12 && (&eb * &ea).max_abs() < 1e-12);
            }
        }
        if !c.is_graded() {
            // Peter–Weyl for actions: the components exhaust A
            assert!((sum - Mat::identity(n, n)).max_abs() < 1e-12, "{}", c.name);
        }
        let total: usize = comps.iter().map(|a| a.dim()).sum();
        assert_eq!(total, if c.is_graded() { 14 } else { c.dim() });
    }
}

#[test]
fn conjugate_components_are_adjoints() {
    for c in all_finite().into_iter().chain([suq2_translation()]) {
        for p in 0..c.qg.irreps.len() {
            let a = isotypical(&c, p, TOL).unwrap();
            let b = isotypical(&c, c.qg.conjugate_index(p), TOL).unwrap();
            assert!(conjugation_distance(&c, &a, &b, TOL) < 1e-9, "{} {}", c.name, a.label);
        }
    }
}

#[test]
fn products_of_components() {
    let t = s3_translation();
    let std = t.qg.irrep_index("std").unwrap();
    let sign = t.qg.irrep_index("sign").unwrap();
    assert_eq!(tensor_constituents(&t.qg, sign, std).unwrap(), vec![std]);
    assert_eq!(tensor_constituents(&t.qg, std, std).unwrap().len(), 3);
    for p1 in 0..3 {
        for p2 in 0..3 {
            let a = isotypical(&t, p1, TOL).unwrap();
            let b = isotypical(&t, p2, TOL).unwrap();
            assert!(product_inclusion(&t, &a, &b, TOL).unwrap() < 1e-12);
        }
    }
    let q = suq2_translation();
    let f = q.qg.irrep_index("spin1/2").unwrap();
    assert_eq!(tensor_constituents(&q.qg, f, f).unwrap(), vec![0, 2]);
    let a = isotypical(&q, f, TOL).unwrap();
    assert!(product_inclusion(&q, &a, &a, TOL).unwrap() < 1e-10);
    assert!(product_inclusion(&q, &isotypical(&q, 0, TOL).unwrap(), &a, TOL).unwrap() < 1e-10);
}

#[test]
fn equivariant_vectors_and_multiplication_map() {
    let z3 = Coaction::translation(group(c_zn(3).unwrap())).unwrap();
    for p in 1..3 {
        assert_eq!(equivariant_vectors(&z3, p, TOL).unwrap().dim(), 1);
    }
    let tr = trivial2();
    let ev = equivariant_vectors(&tr, 0, TOL).unwrap();
    assert_eq!(ev.dim(), 2);

    for c in all_finite().into_iter().chain([suq2_translation()]) {
        for p in 0..c.qg.irreps.len() {
            let iso = isotypical(&c, p, TOL).unwrap();
            let ev = equivariant_vectors(&c, p, TOL).unwrap();
            let r = multiplication_report(&c, &ev, &iso, TOL).unwrap();
            assert_eq!(r.dim_defect, 0, "{} {}", c.name, iso.label);
            assert!(r.image_distance < 1e-9);
            if let Some(fit) = &r.averaged {
                // scale fixed empirically: s = 1/sqrt(dim H_π) with the averaged product
                assert!((fit.s - 1.0 / (r.n as f64).sqrt()).abs() < 1e-9, "{} {}: {fit:?}", c.name, iso.label);
                assert!(fit.residual < 1e-9);
            }
        }
    }
}

#[test]
fn the_standard_product_fails_off_kac() {
    let q = suq2_translation();
    let p = q.qg.irrep_index("spin1/2").unwrap();
    let iso = isotypical(&q, p, TOL).unwrap();
    let ev = equivariant_vectors(&q, p, TOL).unwrap();
    let r = multiplication_report(&q, &ev, &iso, TOL).unwrap();
    assert!(r.standard.unwrap().residual > 0.1);
}

#[test]
fn equivariant_inner_products_land_in_b() {
    for c in all_finite() {
        let b = fixed_points(&c, TOL).unwrap();
        for p in 0..c.qg.irreps.len() {
            let ev = equivariant_vectors(&c, p, TOL).unwrap();
            let mut g = vec![vec![Vector::zeros(c.dim()); ev.dim()]; ev.dim()];
            for (i, w) in ev.basis.iter().enumerate() {
                for (j, z) in ev.basis.iter().enumerate() {
                    let x = ev.inner(&c, w, z).unwrap();
                    assert!(containment_residual(&b.basis, &Mat::from_column_slice(c.dim(), 1, x.as_slice()), TOL) < 1e-10);
                    g[i][j] = x;
                }
            }
            if ev.dim() > 0 {
                assert!(matrix_min_eigenvalue(&c, &g, &b).unwrap() >= -1e-12);
            }
        }
    }
}

#[test]
fn pimsner_popa_bound_on_s3_translation() {
    let t = s3_translation();
    for p in 0..3 {
        let iso = isotypical(&t, p, TOL).unwrap();
        let r = pimsner_popa_check(&t, &iso, 200, 13 + p as u64).unwrap();
        assert!(r.worst_slack >= -1e-9, "{r:?}");
    }
}

#[test]
fn pimsner_popa_degenerate_cases() {
    let t = s3_translation();
    let std = isotypical_by_label(&t, "std", TOL).unwrap();
    // a fixed point: E_π(a) = 0
    let one = vec![vec![t.unit()]];
    assert!(pimsner_popa_slack(&t, &std, &one).unwrap() >= 0.9 * std.c_pi.unwrap().powi(2));
    // a ∈ A_π
    let a = vec![vec![std.element(0)]];
    assert!(pimsner_popa_slack(&t, &std, &a).unwrap() >= -1e-12);
    for c in [Coaction::translation(group(dual_s3().unwrap())).unwrap(), swap2()] {
        for p in 0..c.qg.irreps.len() {
            let iso = isotypical(&c, p, TOL).unwrap();
            assert!(pimsner_popa_check(&c, &iso, 50, 3).unwrap().worst_slack >= -1e-9);
        }
    }
}

#[test]
fn norm_comparison_on_components() {
    for c in all_finite() {
        for p in 0..c.qg.irreps.len() {
            let iso = isotypical(&c, p, TOL).unwrap();
            let r = norm_comparison(&c, &iso, 40, 5).unwrap();
            assert!(r.lower_excess <= 1e-9 && r.upper_excess <= 1e-9, "{} {}: {r:?}", c.name, iso.label);
        }
    }
}

#[test]
fn gram_matrices_are_positive() {
    for c in all_finite() {
        let b = fixed_points(&c, TOL).unwrap();
        for p in 0..c.qg.irreps.len() {
            let iso = isotypical(&c, p, TOL).unwrap();
            let k = iso.dim();
            let xs: Vec<Vector> = (0..k).map(|i| iso.element(i)).collect();
            let right: Vec<Vec<Vector>> = xs.iter().map(|x| xs.iter().map(|y| right_inner(&c, x, y).unwrap()).collect()).collect();
            let left: Vec<Vec<Vector>> = xs.iter().map(|x| xs.iter().map(|y| left_inner(&c, x, y).unwrap()).collect()).collect();
            if k > 0 {
                assert!(matrix_min_eigenvalue(&c, &right, &b).unwrap() >= -1e-12);
                assert!(matrix_min_eigenvalue(&c, &left, &b).unwrap() >= -1e-12);
            }
        }
    }
}

#[test]
fn components_are_b_modules_spanning_themselves() {
    for c in all_finite() {
        let b = fixed_points(&c, TOL).unwrap();
        for p in 0..c.qg.irreps.len() {
            let iso = isotypical(&c, p, TOL).unwrap();
            let mut prods = Vec::new();
            for i in 0..iso.dim() {
                for k in 0..b.dim() {
                    prods.push(c.mul(&iso.element(i), &b.basis.column(k).into_owned()).unwrap());
                }
            }
            let m = columns(&prods, c.dim());
            assert_eq!(rank(&m, TOL), iso.dim());
            assert!(containment_residual(&iso.basis, &m, TOL) < 1e-10);
        }
    }
}

#[test]
fn direct_sum_adds_fixed_points() {
    let g = group(c_zn(2).unwrap());
    let s = Coaction::function_action("swap", g.clone(), &[vec![0, 1], vec![1, 0]]).unwrap();
    let t = Coaction::trivial("trivial", g, FdCStarAlgebra::new(vec![2]).unwrap()).unwrap();
    let d = Coaction::direct_sum("sum", &s, &t).unwrap();
    assert!(verify_coaction(&d, TOL).unwrap().passes(1e-9));
    assert_eq!(fixed_points(&d, TOL).unwrap().dim(), 1 + 4);
}

#[test]
fn json_round_trip() {
    let c = swap2();
    let v = c.to_json().unwrap();
    let back = Coaction::from_json(&v, c.qg.clone()).unwrap();
    assert!((back.alpha_matrix() - c.alpha_matrix()).max_abs() == 0.0);
    assert!(suq2_translation().to_json().is_err());
}

#[test]
fn products_leaving_the_window_are_refused() {
    let q = suq2_translation();
    let mut x = Vector::zeros(q.dim());
    x[q.n] = C64::new(1.0, 0.0);
    assert!(q.alpha(&x).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn conditional_expectation_is_bimodular(seed in 0u64..1000) {
        use rand::SeedableRng;
        let c = Coaction::translation(group(dual_s3().unwrap())).unwrap();
        let b = fixed_points(&c, TOL).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let x = qact_core::fdlin::linalg::random_complex_vector(&mut rng, c.dim());
        let y = qact_core::fdlin::linalg::random_complex_vector(&mut rng, c.dim());
        let p = c.mul(&c.star(&x), &x).unwrap();
        let fd = c.fd.clone().unwrap();
        prop_assert!(fd.element(&c.e_b(&p).unwrap()).min_eigenvalue() >= -1e-12);
        let bb = &b.basis * qact_core::fdlin::linalg::random_complex_vector(&mut rng, b.dim());
        let lhs = c.e_b(&c.mul(&bb, &y).unwrap()).unwrap();
        let rhs = c.mul(&bb, &c.e_b(&y).unwrap()).unwrap();
        prop_assert!((lhs - rhs).max_abs() < 1e-10);
    }
}
