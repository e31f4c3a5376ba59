use super::linalg::{Mat, Vector, C64};
use crate::error::Result;

/// A *-algebra seen through coordinates in a fixed basis.
///
/// Finite-dimensional C*-algebras and degree-truncated algebraic cores both
/// implement this. For truncated cores `mul` fails with a degree overflow
/// instead of dropping terms.
pub trait StarAlgebra: Send + Sync {
    fn dim(&self) -> usize;
    fn unit(&self) -> Vector;
    fn mul(&self, x: &Vector, y: &Vector) -> Result<Vector>;
    fn star(&self, x: &Vector) -> Vector;

    /// Number of leading basis vectors of degree at most `degree`. Finite
    /// algebras are concentrated in degree zero.
    fn prefix_len(&self, _degree: usize) -> usize {
        self.dim()
    }

    /// Block sizes when the algebra is a direct sum of matrix algebras in the
    /// matrix-unit basis.
    fn matrix_blocks(&self) -> Option<&[usize]> {
        None
    }

    fn basis(&self, i: usize) -> Vector {
        let mut v = Vector::zeros(self.dim());
        v[i] = C64::new(1.0, 0.0);
        v
    }

    /// Left multiplication operator `y ↦ x y` restricted to the first `cols`
    /// basis vectors.
    fn left_mul_matrix(&self, x: &Vector, cols: usize) -> Result<Mat> {
        let mut m = Mat::zeros(self.dim(), cols);
        for j in 0..cols {
            m.set_column(j, &self.mul(x, &self.basis(j))?);
        }
        Ok(m)
    }

    fn right_mul_matrix(&self, x: &Vector, cols: usize) -> Result<Mat> {
        let mut m = Mat::zeros(self.dim(), cols);
        for j in 0..cols {
            m.set_column(j, &self.mul(&self.basis(j), x)?);
        }
        Ok(m)
    }

    fn commutator(&self, x: &Vector, y: &Vector) -> Result<Vector> {
        Ok(self.mul(x, y)? - self.mul(y, x)?)
    }
}

/// Pads or truncates a coordinate vector to length `n`. Truncation is only
/// valid when the dropped tail is zero, which callers guarantee.
pub fn resize(v: &Vector, n: usize) -> Vector {
    let mut out = Vector::zeros(n);
    let k = n.min(v.len());
    out.rows_mut(0, k).copy_from(&v.rows(0, k));
    out
}

fn nonzero_columns(x: &Mat) -> Vec<usize> {
    (0..x.ncols()).filter(|&j| x.column(j).iter().any(|z| z.norm() != 0.0)).collect()
}

/// Product in `A ⊗ B` of coefficient matrices (`X[a, b]` multiplies
/// `e_a ⊗ e_b`). Inputs may cover only leading coordinates of either leg; the
/// result always has shape `a.dim() × b.dim()`.
pub fn tensor_mul(a: &dyn StarAlgebra, b: &dyn StarAlgebra, x: &Mat, y: &Mat) -> Result<Mat> {
    let (na, nb) = (a.dim(), b.dim());
    let mut out = Mat::zeros(na, nb);
    let xc = nonzero_columns(x);
    let yc = nonzero_columns(y);
    for &j in &xc {
        let xj = resize(&x.column(j).into_owned(), na);
        for &k in &yc {
            let ebb = b.mul(&b.basis(j), &b.basis(k))?;
            if ebb.iter().all(|z| z.norm() == 0.0) {
                continue;
            }
            let z = a.mul(&xj, &resize(&y.column(k).into_owned(), na))?;
            for (d, c) in ebb.iter().enumerate() {
                if c.norm() != 0.0 {
                    let mut col = out.column_mut(d);
                    col += &z * *c;
                }
            }
        }
    }
    Ok(out)
}

/// Adjoint in `A ⊗ B` of a coefficient matrix.
pub fn tensor_star(a: &dyn StarAlgebra, b: &dyn StarAlgebra, x: &Mat) -> Mat {
    let (na, nb) = (a.dim(), b.dim());
    let mut out = Mat::zeros(na, nb);
    for j in nonzero_columns(x) {
        let s = a.star(&resize(&x.column(j).into_owned(), na));
        let eb = b.star(&b.basis(j));
        for (d, c) in eb.iter().enumerate() {
            if c.norm() != 0.0 {
                let mut col = out.column_mut(d);
                col += &s * *c;
            }
        }
    }
    out
}

/// Truncates a matrix to its leading `r × c` corner.
pub fn corner(x: &Mat, r: usize, c: usize) -> Mat {
    x.view((0, 0), (r.min(x.nrows()), c.min(x.ncols()))).into_owned()
}

/// Largest entry outside the leading `r × c` corner.
pub fn outside_corner(x: &Mat, r: usize, c: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..x.nrows() {
        for j in 0..x.ncols() {
            if i >= r || j >= c {
                worst = worst.max(x[(i, j)].norm());
            }
        }
    }
    worst
}
