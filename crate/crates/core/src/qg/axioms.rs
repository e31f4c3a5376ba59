//! Residuals of the Hopf *-algebra axioms for raw structure data.
//!
//! Products are only formed inside the window, where they are guaranteed to
//! fit in the ambient algebra; identities that need no products (coassociativity,
//! counit, compatibility with `*`) are checked on the whole ambient basis.

use std::collections::HashMap;

use serde::Serialize;

use super::QgData;
use crate::fdlin::linalg::MaxAbs;
use crate::error::Result;
use crate::fdlin::linalg::{containment_residual, Mat, Vector, C64};
use crate::fdlin::star::{tensor_mul, tensor_star, StarAlgebra};

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub homomorphism: f64,
    pub unital: f64,
    pub star_compatibility: f64,
    pub coassociativity: f64,
    pub counit: f64,
    pub counit_multiplicative: f64,
    pub antipode: f64,
    /// Distance of `e_a ⊗ e_b` (low degree) from `[Δ(A)(1⊗A)]`, and the mirror.
    pub cancellation_left: f64,
    pub cancellation_right: f64,
}

impl AxiomReport {
    pub fn residuals(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("homomorphism", self.homomorphism),
            ("unital", self.unital),
            ("star_compatibility", self.star_compatibility),
            ("coassociativity", self.coassociativity),
            ("counit", self.counit),
            ("counit_multiplicative", self.counit_multiplicative),
            ("antipode", self.antipode),
            ("cancellation_left", self.cancellation_left),
            ("cancellation_right", self.cancellation_right),
        ]
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals().iter().map(|r| r.1).fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_residual() <= tol
    }
}

fn basis(n: usize, i: usize) -> Vector {
    let mut v = Vector::zeros(n);
    v[i] = C64::new(1.0, 0.0);
    v
}

/// Number of leading coordinates whose pairwise cancellation witnesses stay in
/// the window: half the window degree.
fn cancellation_prefix(alg: &dyn StarAlgebra, m: usize) -> usize {
    if alg.prefix_len(0) == alg.dim() {
        return m;
    }
    let w = (0..64).take_while(|&d| alg.prefix_len(d) <= m).last().unwrap_or(0);
    alg.prefix_len(w / 2)
}

pub fn verify_axioms(data: &QgData) -> Result<AxiomReport> {
    let alg = data.alg.as_ref();
    let n = alg.dim();
    let m = data.window;
    let delta = &data.delta;
    let unit = alg.unit();
    let d: Vec<Mat> = (0..n).map(|c| delta.apply(&basis(n, c))).collect();

    let mut homomorphism: f64 = 0.0;
    let mut counit_mult: f64 = 0.0;
    for a in 0..m {
        for b in 0..m {
            let p = alg.mul(&basis(n, a), &basis(n, b))?;
            let lhs = delta.apply(&p);
            let rhs = tensor_mul(alg, alg, &d[a], &d[b])?;
            homomorphism = homomorphism.max((lhs - rhs).max_abs());
            let e = p.dot(&data.counit) - data.counit[a] * data.counit[b];
            counit_mult = counit_mult.max(e.norm());
        }
    }

    let unital = {
        let du = delta.apply(&unit);
        let uu = &unit * unit.transpose();
        (du - uu).max_abs().max((unit.dot(&data.counit) - C64::new(1.0, 0.0)).norm())
    };

    let mut star_compat: f64 = 0.0;
    for c in 0..n {
        let lhs = delta.apply(&alg.star(&basis(n, c)));
        let rhs = tensor_star(alg, alg, &d[c]);
        star_compat = star_compat.max((lhs - rhs).max_abs());
    }

    let mut coassoc: f64 = 0.0;
    let mut counit_res: f64 = 0.0;
    for c in 0..n {
        let mut left: HashMap<(usize, usize, usize), C64> = HashMap::new();
        let mut right: HashMap<(usize, usize, usize), C64> = HashMap::new();
        let mut el = Vector::zeros(n);
        let mut er = Vector::zeros(n);
        for &(a, b, v) in &delta.cols[c] {
            for &(x, y, w) in &delta.cols[a] {
                *left.entry((x, y, b)).or_default() += v * w;
            }
            for &(x, y, w) in &delta.cols[b] {
                *right.entry((a, x, y)).or_default() += v * w;
            }
            el[b] += v * data.counit[a];
            er[a] += v * data.counit[b];
        }
        for (k, v) in &left {
            let r = right.get(k).cloned().unwrap_or_default();
            coassoc = coassoc.max((v - r).norm());
        }
        for (k, v) in &right {
            if !left.contains_key(k) {
                coassoc = coassoc.max(v.norm());
            }
        }
        let e = basis(n, c);
        counit_res = counit_res.max((el - &e).max_abs()).max((er - &e).max_abs());
    }

    let mut antipode: f64 = 0.0;
    for c in 0..m {
        let mut l = Vector::zeros(n);
        let mut r = Vector::zeros(n);
        for &(a, b, v) in &delta.cols[c] {
            let sa = data.antipode.column(a).into_owned();
            let sb = data.antipode.column(b).into_owned();
            l += alg.mul(&sa, &basis(n, b))? * v;
            r += alg.mul(&basis(n, a), &sb)? * v;
        }
        let target = &unit * data.counit[c];
        antipode = antipode.max((l - &target).max_abs()).max((r - &target).max_abs());
    }

    let k = cancellation_prefix(alg, m);
    let mut left_span = Vec::with_capacity(m * m);
    let mut right_span = Vec::with_capacity(m * m);
    for c in 0..m {
        for e in 0..m {
            let mut ue = Mat::zeros(n, n);
            let mut eu = Mat::zeros(n, n);
            for (i, u) in unit.iter().enumerate() {
                ue[(i, e)] = *u;
                eu[(e, i)] = *u;
            }
            left_span.push(tensor_mul(alg, alg, &d[c], &ue)?);
            right_span.push(tensor_mul(alg, alg, &eu, &d[c])?);
        }
    }
    let flatten = |ms: &[Mat]| {
        let mut out = Mat::zeros(n * n, ms.len());
        for (j, x) in ms.iter().enumerate() {
            for r in 0..n {
                for s in 0..n {
                    out[(r * n + s, j)] = x[(r, s)];
                }
            }
        }
        out
    };
    let mut targets = Mat::zeros(n * n, k * k);
    for a in 0..k {
        for b in 0..k {
            targets[(a * n + b, a * k + b)] = C64::new(1.0, 0.0);
        }
    }
    let cancellation_left = containment_residual(&flatten(&left_span), &targets, 1e-10);
    let cancellation_right = containment_residual(&flatten(&right_span), &targets, 1e-10);

    Ok(AxiomReport {
        homomorphism,
        unital,
        star_compatibility: star_compat,
        coassociativity: coassoc,
        counit: counit_res,
        counit_multiplicative: counit_mult,
        antipode,
        cancellation_left,
        cancellation_right,
    })
}
