//! Range projection `P_π = G_π G_π*` of a localized Galois isometry.
//!
//! The range is a right `A`-module, a `B`-bimodule and a right
//! `K(𝒜)`-module, so its orthogonal complement for each module-valued
//! inner product is the complement for the scalar form obtained by a
//! faithful positive functional. Three such forms are compared:
//!
//! * `(τ ⊗ φ)(X*Y)` for the `A`-valued product,
//! * `(τE_B ⊗ φ)(X*Y)` for the `B`-valued one,
//! * `Tr θ_{x*, y*} · φ(g* h)` for the `K(𝒜)`-valued one, where
//!   `θ_{x*, y*}(z) = x* E_B(y z)` comes from the left `B`-structure.

use serde::Serialize;

use super::crossed::{gram_of, require_finite, CrossedProduct};
use super::map::galois_map;
use crate::action::Coaction;
use crate::error::Result;
use crate::fdlin::linalg::{column_space, hermitian_fn, max_abs, Mat, C64};

#[derive(Clone, Debug, Serialize)]
pub struct RangeProjectionReport {
    pub label: String,
    pub rank: usize,
    /// `dim A ⊗ C(G)_π`.
    pub codomain_dim: usize,
    /// `0 < P_π < 1 ⊗ p_π`.
    pub proper: bool,
    pub idempotence: f64,
    pub self_adjointness: f64,
    /// `‖P_A − P_B‖`, right `A`- against right `B`-structure.
    pub right_a_vs_b: f64,
    /// `‖P_B − P_K‖`, right against left `B`-structure.
    pub right_vs_left: f64,
    /// Largest `‖[P_π, x]‖` over a spanning set of the corner `(1⊗p_π)(A⋊G)(1⊗p_π)`.
    pub centrality: f64,
    /// `‖P_π − 1 ⊗ p_π‖`.
    pub identity_distance: f64,
    /// `‖P_π‖` entrywise.
    pub size: f64,
}

/// Orthogonal projection onto `span(r)` for the form with Gram matrix `k`.
fn projection(r: &Mat, k: &Mat) -> Mat {
    let d = k.nrows();
    if r.ncols() == 0 {
        return Mat::zeros(d, d);
    }
    let inner = r.adjoint() * k * r;
    let inv = hermitian_fn(&inner, |x| 1.0 / x);
    r * inv * r.adjoint() * k
}

/// `T[a, b] = Tr(z ↦ e_a* E_B(e_b z))`.
fn compact_gram(c: &Coaction) -> Result<Mat> {
    let n = c.dim();
    let mut t = Mat::zeros(n, n);
    for a in 0..n {
        let sa = c.star(&c.basis(a));
        for b in 0..n {
            let mut tr = C64::new(0.0, 0.0);
            for z in 0..n {
                let e = c.e_b(&c.mul(&c.basis(b), &c.basis(z))?)?;
                tr += c.mul(&sa, &e)?[z];
            }
            t[(a, b)] = tr;
        }
    }
    Ok(t)
}

pub fn range_projection_check(c: &Coaction, cp: &CrossedProduct, pi: usize, tol: f64) -> Result<RangeProjectionReport> {
    require_finite(c)?;
    let g = galois_map(c, pi, tol)?;
    let range = column_space(&g.matrix, tol);
    let gphi = &c.qg.gram;
    let k_a = gram_of(c, |x| Ok(x.clone()))?.kronecker(gphi);
    let k_b = gram_of(c, |x| c.e_b(x))?.kronecker(gphi);
    let k_t = compact_gram(c)?.kronecker(gphi);
    let p_a = projection(&range, &k_a);
    let p_b = projection(&range, &k_b);
    let p_t = projection(&range, &k_t);

    let q = &cp.projections[pi];
    let mut centrality: f64 = 0.0;
    for x in &cp.basis {
        let y = q * x * q;
        centrality = centrality.max(max_abs(&(&p_a * &y - &y * &p_a)));
    }
    let self_adjointness = max_abs(&(p_a.adjoint() * &k_a - &k_a * &p_a)) / max_abs(&k_a).max(1e-300);
    let codomain_dim = c.dim() * c.qg.irreps[pi].u.len();
    Ok(RangeProjectionReport {
        label: g.label,
        rank: range.ncols(),
        codomain_dim,
        proper: range.ncols() > 0 && range.ncols() < codomain_dim,
        idempotence: max_abs(&(&p_a * &p_a - &p_a)),
        self_adjointness,
        right_a_vs_b: max_abs(&(&p_a - &p_b)),
        right_vs_left: max_abs(&(&p_b - &p_t)),
        centrality,
        identity_distance: max_abs(&(&p_a - q)),
        size: max_abs(&p_a),
    })
}
