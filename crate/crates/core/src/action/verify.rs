//! Coaction axioms as residuals.

use serde::Serialize;

use super::Coaction;
use crate::error::Result;
use crate::fdlin::linalg::{containment_residual, rank, vec_of, Mat, MaxAbs, C64};
use crate::fdlin::star::{tensor_mul, tensor_star};

#[derive(Clone, Debug, Serialize)]
pub struct CoactionReport {
    pub homomorphism: f64,
    pub star: f64,
    pub unital: f64,
    pub coaction_identity: f64,
    /// `n - rank α`; zero for an injective coaction.
    pub injectivity_defect: usize,
    /// Distance of low-degree elementary tensors from `[α(A)(1⊗C(G))]`.
    pub density_residual: f64,
    pub density_rank: usize,
    pub density_expected: usize,
}

impl CoactionReport {
    pub fn residuals(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("homomorphism", self.homomorphism),
            ("star", self.star),
            ("unital", self.unital),
            ("coaction_identity", self.coaction_identity),
            ("injectivity_defect", self.injectivity_defect as f64),
            ("density", self.density_residual),
        ]
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals().iter().map(|r| r.1).fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_residual() <= tol && self.density_rank >= self.density_expected
    }
}

/// Pads an `A.dim × m` coefficient matrix to the ambient second leg.
fn pad(c: &Coaction, x: &Mat) -> Mat {
    let mut out = Mat::zeros(c.alg.dim(), c.qg.ambient_dim());
    out.view_mut((0, 0), x.shape()).copy_from(x);
    out
}

pub fn verify_coaction(c: &Coaction, tol: f64) -> Result<CoactionReport> {
    let a = c.alg.as_ref();
    let g = c.qg.alg.as_ref();
    let (n, m) = (c.n, c.qg.m);
    let half = c.prefix(c.window() / 2);

    let mut homomorphism: f64 = 0.0;
    for i in 0..half {
        for j in 0..half {
            let prod = tensor_mul(a, g, c.alpha_basis(i), c.alpha_basis(j))?;
            let lhs = pad(c, &c.alpha(&c.mul(&c.basis(i), &c.basis(j))?)?);
            homomorphism = homomorphism.max((prod - lhs).max_abs());
        }
    }

    let mut star: f64 = 0.0;
    for i in 0..n {
        let s = tensor_star(a, g, c.alpha_basis(i));
        let lhs = pad(c, &c.alpha(&c.star(&c.basis(i)))?);
        star = star.max((s - lhs).max_abs());
    }

    let mut one = Mat::zeros(a.dim(), m);
    let gu = c.qg.unit();
    for r in 0..a.dim() {
        for s in 0..m {
            one[(r, s)] = a.unit()[r] * gu[s];
        }
    }
    let unital = (c.alpha(&c.unit())? - one).max_abs();

    // (α⊗ι)α and (ι⊗Δ)α as A.dim × (m·m) arrays, the last two legs row-major
    let mut coaction_identity: f64 = 0.0;
    for i in 0..n {
        let x = c.alpha_basis(i);
        let mut lhs = Mat::zeros(a.dim(), m * m);
        let mut rhs = Mat::zeros(a.dim(), m * m);
        for r in 0..a.dim() {
            for s in 0..m {
                let v = x[(r, s)];
                if v.norm() == 0.0 {
                    continue;
                }
                let ar = c.alpha(&c.basis(r))?;
                for p in 0..a.dim() {
                    for t in 0..m {
                        lhs[(p, t * m + s)] += v * ar[(p, t)];
                    }
                }
                for (row, d) in c.qg.delta.column(s).iter().enumerate() {
                    rhs[(r, row)] += v * d;
                }
            }
        }
        coaction_identity = coaction_identity.max((lhs - rhs).max_abs());
    }

    let injectivity_defect = n - rank(&c.alpha_matrix(), tol);

    let gens: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..m).map(move |s| (i, s))).collect();
    let mut span = Mat::zeros(a.dim() * g.dim(), gens.len());
    for (k, &(i, s)) in gens.iter().enumerate() {
        let mut right = Mat::zeros(a.dim(), m);
        let u = a.unit();
        for r in 0..a.dim() {
            right[(r, s)] = u[r];
        }
        let p = tensor_mul(a, g, c.alpha_basis(i), &right)?;
        span.set_column(k, &vec_of(&p.transpose()));
    }
    let tgt_a = half;
    let tgt_g = if c.is_graded() { c.qg.alg.prefix_len(c.window_degree.unwrap_or(0) / 2) } else { m };
    let mut targets = Mat::zeros(a.dim() * g.dim(), tgt_a * tgt_g);
    for r in 0..tgt_a {
        for s in 0..tgt_g {
            // vec of the transpose: entry (r, s) sits at r * dim G + s
            targets[(r * g.dim() + s, r * tgt_g + s)] = C64::new(1.0, 0.0);
        }
    }
    let density_residual = containment_residual(&span, &targets, tol);
    let density_rank = rank(&span, tol);
    let density_expected = if c.is_graded() { tgt_a * tgt_g } else { a.dim() * m };

    Ok(CoactionReport {
        homomorphism,
        star,
        unital,
        coaction_identity,
        injectivity_defect,
        density_residual,
        density_rank,
        density_expected,
    })
}
