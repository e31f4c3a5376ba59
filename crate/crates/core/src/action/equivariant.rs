//! Equivariant vectors `A ⊡ H_π = {z : α(z_j) = Σ_i z_i ⊗ u_ij}` and the
//! multiplication map `(A ⊡ H_π) ⊗ H_π* → A_π`.

use serde::Serialize;

use super::isotypic::{right_inner, IsotypicalComponent};
use super::Coaction;
use crate::error::Result;
use crate::fdlin::linalg::{column_space, null_space, rank, Mat, MaxAbs, Vector, C64};
use crate::fdlin::star::resize;

#[derive(Clone, Debug)]
pub struct EquivariantVectors {
    pub pi: usize,
    pub n: usize,
    /// Each element is `[z_0, …, z_{n-1}]` in coordinates of `A`.
    pub basis: Vec<Vec<Vector>>,
}

impl EquivariantVectors {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `⟨w, z⟩_B = Σ_j w_j* z_j`.
    pub fn inner(&self, c: &Coaction, w: &[Vector], z: &[Vector]) -> Result<Vector> {
        let mut out = Vector::zeros(c.dim());
        for (a, b) in w.iter().zip(z) {
            out += c.mul(&c.star(a), b)?;
        }
        Ok(out)
    }

    /// Kronecker layout `z_j = x[j * A.dim .. ]` for a flat vector.
    pub fn unflatten(&self, c: &Coaction, x: &Vector) -> Vec<Vector> {
        let d = c.dim();
        (0..self.n).map(|j| x.rows(j * d, d).into_owned()).collect()
    }
}

pub fn equivariant_vectors(c: &Coaction, pi: usize, tol: f64) -> Result<EquivariantVectors> {
    let rep = &c.qg.irreps[pi];
    let (n, na, d, m) = (rep.n, c.n, c.dim(), c.qg.m);
    // unknowns (j, a): coordinate a of z_j; equations (j, r, s): entry (r, s) of
    // α(z_j) - Σ_i z_i ⊗ u_ij
    let mut sys = Mat::zeros(n * d * m, n * na);
    for j in 0..n {
        for a in 0..na {
            let al = c.alpha_basis(a);
            for r in 0..d {
                for s in 0..m {
                    sys[(j * d * m + r * m + s, j * na + a)] += al[(r, s)];
                }
            }
            for i in 0..n {
                let u = rep.entry(i, j);
                for s in 0..m {
                    sys[(j * d * m + a * m + s, i * na + a)] -= u[s];
                }
            }
        }
    }
    let ker = null_space(&sys, tol);
    let basis = (0..ker.ncols())
        .map(|k| (0..n).map(|j| resize(&ker.column(k).rows(j * na, na).into_owned(), d)).collect())
        .collect();
    Ok(EquivariantVectors { pi, n, basis })
}

/// Fit of the scale `s` in `y = s (ι ⊗ ω Q⁻¹) z` making the multiplication map
/// preserve inner products, for one choice of inner product on `H_π*`.
#[derive(Clone, Debug, Serialize)]
pub struct ScaleFit {
    pub s: f64,
    /// Worst deviation after scaling.
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MultiplicationReport {
    pub equivariant_dim: usize,
    pub isotypic_dim: usize,
    /// `dim(A ⊡ H_π) · n - dim A_π`.
    pub dim_defect: i64,
    /// Distance of the span of the images from `A_π`.
    pub image_distance: f64,
    /// Standard inner product `⟨e_k*, e_l*⟩ = δ_kl`.
    pub standard: Option<ScaleFit>,
    /// Averaged inner product `⟨⟨e_k*, e_l*⟩⟩ = Σ_m φ(u_km u_lm*)`.
    pub averaged: Option<ScaleFit>,
    pub n: usize,
    pub qdim: f64,
}

/// `y_{z,k} = Σ_j (Q⁻¹)_kj z_j`, the image of `z ⊗ e_k*` with unit scale.
fn images(c: &Coaction, ev: &EquivariantVectors) -> Vec<Vec<Vector>> {
    let qi = c.qg.irreps[ev.pi].q_inverse();
    ev.basis
        .iter()
        .map(|z| {
            (0..ev.n)
                .map(|k| {
                    let mut y = Vector::zeros(c.dim());
                    for j in 0..ev.n {
                        y += &z[j] * qi[(k, j)];
                    }
                    y
                })
                .collect()
        })
        .collect()
}

/// Least-squares `t` with `actual ≈ t · target`, and the residual.
fn fit(actual: &[Vector], target: &[Vector]) -> Option<ScaleFit> {
    let mut num = C64::new(0.0, 0.0);
    let mut den = 0.0;
    for (a, t) in actual.iter().zip(target) {
        num += t.dotc(a);
        den += t.norm_squared();
    }
    if den < 1e-24 {
        return None;
    }
    let t2 = num.re / den;
    if t2 <= 0.0 {
        return None;
    }
    let residual = actual.iter().zip(target).map(|(a, t)| (a - t * C64::new(t2, 0.0)).max_abs()).fold(0.0, f64::max);
    // E_B(y* y) scales with s², so s = sqrt(t²)
    Some(ScaleFit { s: t2.sqrt(), residual })
}

pub fn multiplication_report(
    c: &Coaction,
    ev: &EquivariantVectors,
    iso: &IsotypicalComponent,
    tol: f64,
) -> Result<MultiplicationReport> {
    let rep = &c.qg.irreps[ev.pi];
    let n = ev.n;
    let ys = images(c, ev);
    let flat: Vec<Vector> = ys.iter().flatten().cloned().collect();
    let image_distance = if flat.is_empty() {
        if iso.dim() == 0 { 0.0 } else { 1.0 }
    } else {
        let span = column_space(&crate::fdlin::linalg::columns(&flat, c.dim()), tol);
        crate::fdlin::linalg::subspace_distance(&span, &iso.basis, tol)
    };
    let image_rank = if flat.is_empty() { 0 } else { rank(&crate::fdlin::linalg::columns(&flat, c.dim()), tol) };

    let mut averaged_form = Mat::zeros(n, n);
    for k in 0..n {
        for l in 0..n {
            let mut s = C64::new(0.0, 0.0);
            for mm in 0..n {
                s += c.qg.phi(&c.qg.mul(rep.entry(k, mm), &c.qg.star(rep.entry(l, mm)))?);
            }
            averaged_form[(k, l)] = s;
        }
    }

    // actual[(a,k),(b,l)] = E_B(y_ak* y_bl); target = ⟨z_a, z_b⟩_B · form(k, l)
    let mut actual = Vec::new();
    let mut standard = Vec::new();
    let mut averaged = Vec::new();
    for (a, za) in ev.basis.iter().enumerate() {
        for (b, zb) in ev.basis.iter().enumerate() {
            let g = ev.inner(c, za, zb)?;
            for k in 0..n {
                for l in 0..n {
                    actual.push(right_inner(c, &ys[a][k], &ys[b][l])?);
                    standard.push(if k == l { g.clone() } else { Vector::zeros(c.dim()) });
                    averaged.push(&g * averaged_form[(k, l)]);
                }
            }
        }
    }
    Ok(MultiplicationReport {
        equivariant_dim: ev.dim(),
        isotypic_dim: iso.dim(),
        dim_defect: (ev.dim() * n) as i64 - iso.dim() as i64,
        image_distance: image_distance.max(if image_rank == iso.dim() { 0.0 } else { 1.0 }),
        standard: fit(&actual, &standard),
        averaged: fit(&actual, &averaged),
        n,
        qdim: rep.qdim,
    })
}
