use crate::fdlin::linalg::{Mat, Vector, C64};
use crate::error::{Error, Result};

/// Sparse comultiplication: column `c` lists the terms `(a, b, coef)` of
/// `Δ(e_c) = Σ coef · e_a ⊗ e_b`.
#[derive(Clone, Debug)]
pub struct SparseCoproduct {
    pub dim: usize,
    pub cols: Vec<Vec<(usize, usize, C64)>>,
}

impl SparseCoproduct {
    /// From a dense `(dim²) × dim` matrix with rows indexed `a * dim + b`.
    pub fn from_dense(delta: &Mat) -> Result<Self> {
        let dim = delta.ncols();
        if delta.nrows() != dim * dim {
            return Err(Error::Shape(format!("coproduct matrix is {:?}, expected {}x{dim}", delta.shape(), dim * dim)));
        }
        let mut cols = vec![Vec::new(); dim];
        for c in 0..dim {
            for r in 0..dim * dim {
                let v = delta[(r, c)];
                if v != C64::new(0.0, 0.0) {
                    cols[c].push((r / dim, r % dim, v));
                }
            }
        }
        Ok(SparseCoproduct { dim, cols })
    }

    /// Dense matrix of the restriction to the first `m` coordinates, with the
    /// codomain also truncated to `m ⊗ m`. Valid when the prefix is a
    /// subcoalgebra.
    pub fn dense_prefix(&self, m: usize) -> Mat {
        let mut out = Mat::zeros(m * m, m);
        for c in 0..m {
            for &(a, b, v) in &self.cols[c] {
                debug_assert!(a < m && b < m, "prefix is not a subcoalgebra");
                if a < m && b < m {
                    out[(a * m + b, c)] += v;
                }
            }
        }
        out
    }

    /// `Δ(x)` as a `dim × dim` coefficient matrix (`X[a, b]` multiplies `e_a ⊗ e_b`).
    pub fn apply(&self, x: &Vector) -> Mat {
        let mut out = Mat::zeros(self.dim, self.dim);
        for (c, xc) in x.iter().enumerate() {
            if xc.norm() == 0.0 {
                continue;
            }
            for &(a, b, v) in &self.cols[c] {
                out[(a, b)] += v * xc;
            }
        }
        out
    }

    /// `(ι ⊗ f)Δ(x)`.
    pub fn contract_right(&self, x: &Vector, f: &Vector) -> Vector {
        let mut out = Vector::zeros(self.dim);
        for (c, xc) in x.iter().enumerate() {
            if xc.norm() == 0.0 {
                continue;
            }
            for &(a, b, v) in &self.cols[c] {
                if b < f.len() {
                    out[a] += v * xc * f[b];
                }
            }
        }
        out
    }

    /// `(f ⊗ ι)Δ(x)`.
    pub fn contract_left(&self, x: &Vector, f: &Vector) -> Vector {
        let mut out = Vector::zeros(self.dim);
        for (c, xc) in x.iter().enumerate() {
            if xc.norm() == 0.0 {
                continue;
            }
            for &(a, b, v) in &self.cols[c] {
                if a < f.len() {
                    out[b] += v * xc * f[a];
                }
            }
        }
        out
    }
}
