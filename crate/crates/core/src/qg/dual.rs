//! The dual algebra of the window coalgebra, realized through the regular
//! representation `λ(ω)x = (ι⊗ω)Δ(x)` on `L²` of the window.

use rand::Rng;

use super::wedderburn::{self, MatrixUnits};
use super::QuantumGroup;
use crate::error::{Error, Result};
use crate::fdlin::linalg::{hermitian_fn, Mat, Vector};

#[derive(Clone, Debug)]
pub struct DualAlgebra {
    /// `λ(e^c)` in the raw window basis, `λ(e^c)_{ab} = Δ[(a, c), b]`.
    pub lambda: Vec<Mat>,
    /// `Φ^{1/2}` and its inverse, mapping to orthonormal coordinates.
    pub sqrt_gram: Mat,
    pub inv_sqrt_gram: Mat,
    /// Matrix units of the simple blocks in orthonormal coordinates.
    pub blocks: Vec<MatrixUnits>,
}

impl DualAlgebra {
    pub(crate) fn empty() -> Self {
        DualAlgebra { lambda: vec![], sqrt_gram: Mat::zeros(0, 0), inv_sqrt_gram: Mat::zeros(0, 0), blocks: vec![] }
    }

    pub(crate) fn regular<R: Rng>(qg: &QuantumGroup, rng: &mut R, tol: f64) -> Result<Self> {
        let m = qg.m;
        let mut lambda = vec![Mat::zeros(m, m); m];
        for b in 0..m {
            for a in 0..m {
                for c in 0..m {
                    lambda[c][(a, b)] = qg.delta[(a * m + c, b)];
                }
            }
        }
        let sqrt_gram = hermitian_fn(&qg.gram, f64::sqrt);
        let inv_sqrt_gram = hermitian_fn(&qg.gram, |x| 1.0 / x.sqrt());
        let ortho: Vec<Mat> = lambda.iter().map(|l| &sqrt_gram * l * &inv_sqrt_gram).collect();
        let closure = wedderburn::star_closure_residual(&ortho, tol);
        if closure > 1e-6 {
            return Err(Error::Falsified(format!("regular representation of the dual is not *-closed (residual {closure:e})")));
        }
        let blocks = wedderburn::decompose(&ortho, rng, tol)?;
        Ok(DualAlgebra { lambda, sqrt_gram, inv_sqrt_gram, blocks })
    }

    pub fn block_dims(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.blocks.iter().map(|b| b.n).collect();
        d.sort();
        d
    }

    pub fn dim(&self) -> usize {
        self.lambda.len()
    }

    /// `λ(ω)` in raw window coordinates.
    pub fn lambda_of(&self, omega: &Vector) -> Mat {
        let m = self.dim();
        let mut out = Mat::zeros(m, m);
        for (c, w) in omega.iter().enumerate() {
            if w.norm() != 0.0 {
                out += &self.lambda[c] * *w;
            }
        }
        out
    }

    /// `λ(ω)` in orthonormal coordinates.
    pub fn lambda_ortho(&self, omega: &Vector) -> Mat {
        &self.sqrt_gram * self.lambda_of(omega) * &self.inv_sqrt_gram
    }
}

/// Convolution `(ω·ν)(x) = (ω⊗ν)Δ(x)` of window functionals.
pub fn convolve(qg: &QuantumGroup, omega: &Vector, nu: &Vector) -> Vector {
    let m = qg.m;
    let mut out = Vector::zeros(m);
    for c in 0..m {
        let mut s = num_complex::Complex64::new(0.0, 0.0);
        for a in 0..m {
            if omega[a].norm() == 0.0 {
                continue;
            }
            for b in 0..m {
                s += qg.delta[(a * m + b, c)] * omega[a] * nu[b];
            }
        }
        out[c] = s;
    }
    out
}

/// `ω*(x) = conj(ω(S(x)*))`.
pub fn dual_star(qg: &QuantumGroup, omega: &Vector) -> Vector {
    Vector::from_fn(qg.m, |c, _| {
        let y = qg.star(&qg.antipode_apply(&qg.basis(c)));
        y.dot(omega).conj()
    })
}
