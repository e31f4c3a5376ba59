//! Dense complex linear algebra helpers shared by every module.
//!
//! Rank decisions use singular values compared against `tol * max(1, σ_max)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type C64 = Complex64;
pub type Mat = DMatrix<C64>;
pub type Vector = DVector<C64>;

pub const DEFAULT_TOL: f64 = 1e-9;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn threshold(sv: &[f64], tol: f64) -> f64 {
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    tol * smax.max(1.0)
}

/// Run every decomposition single-threaded, so results are reproducible bit
/// for bit.
pub fn sequential() {
    faer::set_global_parallelism(faer::Par::Seq);
}

fn to_faer(a: &Mat) -> faer::Mat<C64> {
    faer::Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

fn from_faer(a: faer::MatRef<'_, C64>) -> Mat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

/// Thin SVD `a = U Σ V*` with `min(m, n)` singular triplets, not necessarily
/// sorted.
fn thin_svd(a: &Mat) -> (Mat, Vec<f64>, Mat) {
    if a.nrows() > 2 * a.ncols() {
        // tall: reduce to the square R factor first
        let qr = to_faer(a).qr();
        let q = qr.compute_thin_Q();
        let svd = qr.thin_R().thin_svd().expect("SVD did not converge");
        let sv = (0..a.ncols()).map(|i| svd.S()[i].re).collect();
        return (from_faer((&q * svd.U()).as_ref()), sv, from_faer(svd.V()));
    }
    let svd = to_faer(a).thin_svd().expect("SVD did not converge");
    let sv = (0..a.nrows().min(a.ncols())).map(|i| svd.S()[i].re).collect();
    (from_faer(svd.U()), sv, from_faer(svd.V()))
}

/// Singular values together with a full set of right singular vectors
/// (columns of an `n x n` unitary), for a matrix of any shape.
fn right_svd(a: &Mat) -> (Vec<f64>, Mat) {
    let (m, n) = a.shape();
    if n == 0 {
        return (vec![], Mat::zeros(0, 0));
    }
    let square = if m < n {
        let mut padded = Mat::zeros(n, n);
        padded.view_mut((0, 0), (m, n)).copy_from(a);
        padded
    } else {
        a.clone()
    };
    let (_, sv, v) = thin_svd(&square);
    (sv, v)
}

/// Haar-ish random unitary from the QR factor of a Gaussian matrix.
pub fn random_unitary<R: Rng>(rng: &mut R, n: usize) -> Mat {
    let g = to_faer(&random_complex_matrix(rng, n, n));
    from_faer(g.qr().compute_thin_Q().as_ref())
}

/// Orthonormal basis (as columns) of the kernel of `a`.
pub fn null_space(a: &Mat, tol: f64) -> Mat {
    let n = a.ncols();
    if a.nrows() == 0 {
        return Mat::identity(n, n);
    }
    let (sv, v) = right_svd(a);
    let thr = threshold(&sv, tol);
    let cols: Vec<usize> = (0..sv.len()).filter(|&i| sv[i] <= thr).collect();
    let mut out = Mat::zeros(n, cols.len());
    for (k, &i) in cols.iter().enumerate() {
        out.set_column(k, &v.column(i));
    }
    out
}

/// Orthonormal basis (as columns) of the column span of `a`.
pub fn column_space(a: &Mat, tol: f64) -> Mat {
    let (m, n) = a.shape();
    if n == 0 || m == 0 {
        return Mat::zeros(m, 0);
    }
    let (u, sv, _) = thin_svd(a);
    let thr = threshold(&sv, tol);
    let cols: Vec<usize> = (0..sv.len()).filter(|&i| sv[i] > thr).collect();
    let mut out = Mat::zeros(m, cols.len());
    for (k, &i) in cols.iter().enumerate() {
        out.set_column(k, &u.column(i));
    }
    out
}

pub fn singular_values(a: &Mat) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return vec![];
    }
    let mut sv: Vec<f64> = to_faer(a).singular_values().expect("SVD did not converge");
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap());
    sv
}

pub fn rank(a: &Mat, tol: f64) -> usize {
    let sv = singular_values(a);
    let thr = threshold(&sv, tol);
    sv.iter().filter(|&&s| s > thr).count()
}

/// Minimum-norm least-squares solution of `a x = b`, with the residual
/// `‖a x − b‖`.
pub fn solve_min_norm(a: &Mat, b: &Vector, tol: f64) -> (Vector, f64) {
    let n = a.ncols();
    if n == 0 || a.nrows() == 0 {
        return (Vector::zeros(n), b.norm());
    }
    let (u, sv, v) = thin_svd(a);
    let thr = threshold(&sv, tol);
    let ub = u.adjoint() * b;
    let mut y = Vector::zeros(sv.len());
    for i in 0..sv.len() {
        if sv[i] > thr {
            y[i] = ub[i] / sv[i];
        }
    }
    let x = v * y;
    let r = (a * &x - b).norm();
    (x, r)
}

/// Same as [`solve_min_norm`] for several right-hand sides at once.
pub fn solve_min_norm_multi(a: &Mat, b: &Mat, tol: f64) -> (Mat, f64) {
    let n = a.ncols();
    if n == 0 || a.nrows() == 0 {
        return (Mat::zeros(n, b.ncols()), b.norm());
    }
    let (u, sv, v) = thin_svd(a);
    let thr = threshold(&sv, tol);
    let mut ub = u.adjoint() * b;
    for i in 0..sv.len() {
        let s = if sv[i] > thr { 1.0 / sv[i] } else { 0.0 };
        for j in 0..ub.ncols() {
            ub[(i, j)] *= s;
        }
    }
    let x = v * ub;
    let r = (a * &x - b).iter().map(|z| z.norm()).fold(0.0, f64::max);
    (x, r)
}

pub fn hermitian_part(a: &Mat) -> Mat {
    (a + a.adjoint()).scale(0.5)
}

/// Eigenvalues (ascending) and eigenvectors of the Hermitian part of `a`.
pub fn hermitian_eigen(a: &Mat) -> (Vec<f64>, Mat) {
    let n = a.nrows();
    if n == 0 {
        return (vec![], Mat::zeros(0, 0));
    }
    let eig = to_faer(&hermitian_part(a)).self_adjoint_eigen(faer::Side::Lower).expect("eigensolver did not converge");
    let raw: Vec<f64> = (0..n).map(|i| eig.S()[i].re).collect();
    let u = from_faer(eig.U());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| raw[i].partial_cmp(&raw[j]).unwrap());
    let vals = order.iter().map(|&i| raw[i]).collect();
    let mut vecs = Mat::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vecs.set_column(k, &u.column(i));
    }
    (vals, vecs)
}

/// Applies a real function to a Hermitian matrix through its spectral decomposition.
pub fn hermitian_fn(a: &Mat, f: impl Fn(f64) -> f64) -> Mat {
    let (vals, vecs) = hermitian_eigen(a);
    let n = vals.len();
    let mut d = Mat::zeros(n, n);
    for i in 0..n {
        d[(i, i)] = re(f(vals[i]));
    }
    &vecs * d * vecs.adjoint()
}

/// Largest entry modulus of any complex matrix or vector view.
pub trait MaxAbs {
    fn max_abs(&self) -> f64;
}

impl<R: nalgebra::Dim, C: nalgebra::Dim, S: nalgebra::RawStorage<C64, R, C>> MaxAbs for nalgebra::Matrix<C64, R, C, S> {
    fn max_abs(&self) -> f64 {
        self.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

pub fn max_abs(a: &Mat) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_vec(a: &Vector) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Columns of `a` stacked into one vector (column-major order).
pub fn vec_of(a: &Mat) -> Vector {
    Vector::from_iterator(a.len(), a.iter().cloned())
}

pub fn unvec(v: &Vector, rows: usize, cols: usize) -> Mat {
    Mat::from_iterator(rows, cols, v.iter().cloned())
}

/// Matrix whose columns are the given vectors.
pub fn columns(vs: &[Vector], dim: usize) -> Mat {
    let mut m = Mat::zeros(dim, vs.len());
    for (k, v) in vs.iter().enumerate() {
        m.set_column(k, v);
    }
    m
}

/// Largest principal angle sine between two column spans; zero when the
/// spans coincide.
pub fn subspace_distance(a: &Mat, b: &Mat, tol: f64) -> f64 {
    let qa = column_space(a, tol);
    let qb = column_space(b, tol);
    if qa.ncols() != qb.ncols() {
        return 1.0;
    }
    if qa.ncols() == 0 {
        return 0.0;
    }
    let resid = &qb - &qa * (qa.adjoint() * &qb);
    singular_values(&resid).first().cloned().unwrap_or(0.0)
}

/// Whether span(b) ⊆ span(a), measured by the residual of projecting b onto span(a).
pub fn containment_residual(a: &Mat, b: &Mat, tol: f64) -> f64 {
    if b.ncols() == 0 {
        return 0.0;
    }
    // rows zero in both spans contribute nothing
    let rows: Vec<usize> = (0..a.nrows()).filter(|&r| a.row(r).iter().chain(b.row(r).iter()).any(|z| z.norm() != 0.0)).collect();
    if rows.len() < a.nrows() {
        let a = Mat::from_fn(rows.len(), a.ncols(), |i, j| a[(rows[i], j)]);
        let b = Mat::from_fn(rows.len(), b.ncols(), |i, j| b[(rows[i], j)]);
        return containment_residual(&a, &b, tol);
    }
    let qa = column_space(a, tol);
    let resid = b - &qa * (qa.adjoint() * b);
    max_abs(&resid)
}

pub fn random_complex_vector<R: Rng>(rng: &mut R, n: usize) -> Vector {
    Vector::from_fn(n, |_, _| {
        let a: f64 = rng.sample(StandardNormal);
        let b: f64 = rng.sample(StandardNormal);
        c64(a, b)
    })
}

pub fn random_complex_matrix<R: Rng>(rng: &mut R, r: usize, c: usize) -> Mat {
    Mat::from_fn(r, c, |_, _| {
        let a: f64 = rng.sample(StandardNormal);
        let b: f64 = rng.sample(StandardNormal);
        c64(a, b)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn null_space_of_wide_and_tall() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_complex_matrix(&mut rng, 2, 5);
        let k = null_space(&a, 1e-10);
        assert_eq!(k.ncols(), 3);
        assert!(max_abs(&(&a * &k)) < 1e-12);
        let t = random_complex_matrix(&mut rng, 9, 3) * random_complex_matrix(&mut rng, 3, 4);
        let k = null_space(&t, 1e-10);
        assert_eq!(k.ncols(), 1);
        assert!(max_abs(&(&t * &k)) < 1e-10);
    }

    #[test]
    fn tall_column_space_and_containment() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut a = random_complex_matrix(&mut rng, 40, 3) * random_complex_matrix(&mut rng, 3, 6);
        // zero rows take the compressed path in containment_residual
        for r in 20..40 {
            a.row_mut(r).fill(re(0.0));
        }
        let q = column_space(&a, 1e-10);
        assert_eq!(q.ncols(), 3);
        assert!(max_abs(&(q.adjoint() * &q - Mat::identity(3, 3))) < 1e-12);
        assert!(containment_residual(&a, &(&a * random_complex_matrix(&mut rng, 6, 2)), 1e-10) < 1e-12);
        let mut outside = Vector::zeros(40);
        outside[30] = re(1.0);
        assert!((containment_residual(&a, &Mat::from_columns(&[outside]), 1e-10) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn min_norm_solution() {
        let a = Mat::from_row_slice(1, 2, &[re(1.0), re(1.0)]);
        let b = Vector::from_vec(vec![re(2.0)]);
        let (x, r) = solve_min_norm(&a, &b, 1e-12);
        assert!(r < 1e-12);
        assert!((x[0] - re(1.0)).norm() < 1e-12 && (x[1] - re(1.0)).norm() < 1e-12);
    }

    #[test]
    fn hermitian_sqrt_squares_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let y = random_complex_matrix(&mut rng, 4, 4);
        let p = y.adjoint() * &y;
        let s = hermitian_fn(&p, f64::sqrt);
        assert!(max_abs(&(&s * &s - &p)) < 1e-9);
    }
}
