//! Haar state as the kernel of the stacked invariance equations
//! `(ι⊗φ)Δ(x) = φ(x)1 = (φ⊗ι)Δ(x)`.

use std::collections::BTreeMap;

use super::coproduct::SparseCoproduct;
use crate::fdlin::linalg::MaxAbs;
use crate::error::{Error, Result};
use crate::fdlin::linalg::{hermitian_eigen, Mat, Vector, C64};

/// Relative eigenvalue threshold for the Gram matrix of the invariance
/// operator. Gram eigenvalues are squared singular values, so this sits at the
/// square of a 1e-5 relative singular-value cut.
const GRAM_CUT: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct HaarSolution {
    pub functional: Vector,
    pub nullity: usize,
    /// Largest residual of the invariance equations at the solution.
    pub residual: f64,
    /// Smallest nonzero singular value of the invariance operator relative to
    /// the largest; measures how well separated the solution is.
    pub gap: f64,
}

fn accumulate(gram: &mut Mat, rows: &BTreeMap<usize, Vec<(usize, C64)>>) {
    for row in rows.values() {
        for &(i, vi) in row {
            for &(j, vj) in row {
                gram[(i, j)] += vi.conj() * vj;
            }
        }
    }
}

fn invariance_rows(delta: &SparseCoproduct, unit: &Vector, c: usize, left: bool) -> BTreeMap<usize, Vec<(usize, C64)>> {
    let mut rows: BTreeMap<usize, Vec<(usize, C64)>> = BTreeMap::new();
    for &(a, b, v) in &delta.cols[c] {
        let (row, col) = if left { (a, b) } else { (b, a) };
        rows.entry(row).or_default().push((col, v));
    }
    for (r, u) in unit.iter().enumerate() {
        if u.norm() != 0.0 {
            rows.entry(r).or_default().push((c, -u));
        }
    }
    rows
}

/// Residual of both invariance identities for a candidate functional.
pub fn invariance_residual(delta: &SparseCoproduct, unit: &Vector, phi: &Vector) -> f64 {
    let mut worst: f64 = 0.0;
    for c in 0..delta.dim {
        let mut e = Vector::zeros(delta.dim);
        e[c] = C64::new(1.0, 0.0);
        let l = delta.contract_right(&e, phi) - unit * phi[c];
        let r = delta.contract_left(&e, phi) - unit * phi[c];
        worst = worst.max(l.max_abs()).max(r.max_abs());
    }
    worst
}

pub fn solve_haar(delta: &SparseCoproduct, unit: &Vector) -> Result<HaarSolution> {
    let m = delta.dim;
    let mut gram = Mat::zeros(m, m);
    for c in 0..m {
        accumulate(&mut gram, &invariance_rows(delta, unit, c, true));
        accumulate(&mut gram, &invariance_rows(delta, unit, c, false));
    }
    let (vals, vecs) = hermitian_eigen(&gram);
    let top = vals.last().cloned().unwrap_or(0.0).max(1.0);
    let nullity = vals.iter().filter(|&&l| l <= GRAM_CUT * top).count();
    if nullity != 1 {
        return Err(Error::NonUnique { what: "Haar state (invariance kernel)".into(), dim: nullity });
    }
    let gap = (vals.get(1).cloned().unwrap_or(top).max(0.0) / top).sqrt();
    let v = vecs.column(0).into_owned();
    let norm = v.dot(unit);
    if norm.norm() < 1e-12 {
        return Err(Error::Falsified("invariant functional vanishes on the unit".into()));
    }
    let phi = v / norm;
    let residual = invariance_residual(delta, unit, &phi);
    Ok(HaarSolution { functional: phi, nullity, residual, gap })
}
