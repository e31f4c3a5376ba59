//! Concrete Wedderburn decomposition of a *-closed span of square matrices.
//!
//! The center is split by the spectrum of a random self-adjoint central
//! element; each simple block is split into matrix units by the spectrum of a
//! random self-adjoint element of the block. Degenerate draws are retried.

use rand::Rng;

use crate::error::{Error, Result};
use crate::fdlin::linalg::{
    column_space, containment_residual, hermitian_eigen, max_abs, null_space, random_complex_vector, unvec, vec_of,
    Mat, C64,
};

const ATTEMPTS: usize = 12;

/// Matrix units `e_ij` (stored at `i * n + j`) of one simple block, realized
/// with multiplicity `mult` on the ambient space.
#[derive(Clone, Debug)]
pub struct MatrixUnits {
    pub n: usize,
    pub mult: usize,
    pub units: Vec<Mat>,
}

impl MatrixUnits {
    pub fn unit(&self, i: usize, j: usize) -> &Mat {
        &self.units[i * self.n + j]
    }

    pub fn central_projection(&self) -> Mat {
        let d = self.units[0].nrows();
        let mut p = Mat::zeros(d, d);
        for i in 0..self.n {
            p += self.unit(i, i);
        }
        p
    }

    /// Coordinates of `x` in this block: `ρ(x)_ij = Tr(e_ji x) / mult`.
    pub fn coordinates(&self, x: &Mat) -> Mat {
        let mut r = Mat::zeros(self.n, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                r[(i, j)] = (self.unit(j, i) * x).trace() / C64::new(self.mult as f64, 0.0);
            }
        }
        r
    }
}

fn random_combination<R: Rng>(basis: &[Mat], rng: &mut R) -> Mat {
    let c = random_complex_vector(rng, basis.len());
    let mut x = Mat::zeros(basis[0].nrows(), basis[0].ncols());
    for (b, ci) in basis.iter().zip(c.iter()) {
        x += b * *ci;
    }
    x
}

/// Groups sorted eigenvalues into clusters separated by more than `gap`.
fn clusters(vals: &[f64], gap: f64) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (i, &v) in vals.iter().enumerate() {
        match out.last_mut() {
            Some(last) if (v - vals[*last.last().unwrap()]).abs() <= gap => last.push(i),
            _ => out.push(vec![i]),
        }
    }
    out
}

fn span_basis(mats: &[Mat], tol: f64) -> Vec<Mat> {
    let d = mats[0].nrows();
    let mut stacked = Mat::zeros(d * d, mats.len());
    for (k, m) in mats.iter().enumerate() {
        stacked.set_column(k, &vec_of(m));
    }
    let q = column_space(&stacked, tol);
    (0..q.ncols()).map(|k| unvec(&q.column(k).into_owned(), d, d)).collect()
}

fn columns_of(vecs: &Mat, idx: &[usize]) -> Mat {
    let mut w = Mat::zeros(vecs.nrows(), idx.len());
    for (k, &i) in idx.iter().enumerate() {
        w.set_column(k, &vecs.column(i));
    }
    w
}

/// Residual of *-closure of the span.
pub fn star_closure_residual(mats: &[Mat], tol: f64) -> f64 {
    let d = mats[0].nrows();
    let mut stacked = Mat::zeros(d * d, mats.len());
    let mut adj = Mat::zeros(d * d, mats.len());
    for (k, m) in mats.iter().enumerate() {
        stacked.set_column(k, &vec_of(m));
        adj.set_column(k, &vec_of(&m.adjoint()));
    }
    let scale = max_abs(&stacked).max(1.0);
    containment_residual(&stacked, &adj, tol) / scale
}

/// Decomposes the algebra spanned by `mats` (assumed unital and *-closed).
pub fn decompose<R: Rng>(mats: &[Mat], rng: &mut R, tol: f64) -> Result<Vec<MatrixUnits>> {
    if mats.is_empty() {
        return Err(Error::Invalid("empty span".into()));
    }
    let basis = span_basis(mats, tol);
    let dim = basis.len();
    let d = basis[0].nrows();

    // center: elements of the span commuting with a few random elements
    let probes: Vec<Mat> = (0..3).map(|_| random_combination(&basis, rng)).collect();
    let mut sys = Mat::zeros(probes.len() * d * d, dim);
    for (k, b) in basis.iter().enumerate() {
        for (p, r) in probes.iter().enumerate() {
            let comm = b * r - r * b;
            sys.view_mut((p * d * d, k), (d * d, 1)).copy_from(&vec_of(&comm));
        }
    }
    let zc = null_space(&sys, tol.max(1e-10));
    let center: Vec<Mat> = (0..zc.ncols())
        .map(|c| {
            let mut z = Mat::zeros(d, d);
            for k in 0..dim {
                z += &basis[k] * zc[(k, c)];
            }
            z
        })
        .collect();
    let r = center.len();
    if r == 0 {
        return Err(Error::SpanDeficiency("trivial center; span is not a unital algebra".into()));
    }

    for _ in 0..ATTEMPTS {
        let w = random_combination(&center, rng);
        let z = &w + w.adjoint();
        let (vals, vecs) = hermitian_eigen(&z);
        let spread = vals.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        let groups = clusters(&vals, 1e-6 * spread);
        if groups.len() != r {
            continue;
        }
        let mut blocks = Vec::with_capacity(r);
        let mut ok = true;
        for g in &groups {
            let v = columns_of(&vecs, g);
            match split_block(&basis, &v, rng, tol) {
                Some(b) => blocks.push(b),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        let total: usize = blocks.iter().map(|b| b.n * b.n).sum();
        if total != dim {
            return Err(Error::SpanDeficiency(format!("blocks account for dimension {total} of {dim}")));
        }
        return Ok(blocks);
    }
    Err(Error::NoSpectralGap { what: "Wedderburn splitting kept producing degenerate spectra".into(), gap: 0.0 })
}

/// Splits the block supported on the orthonormal columns `v`.
fn split_block<R: Rng>(basis: &[Mat], v: &Mat, rng: &mut R, tol: f64) -> Option<MatrixUnits> {
    let p = v * v.adjoint();
    let rank_p = v.ncols();
    let compressed: Vec<Mat> = basis.iter().map(|b| &p * b * &p).collect();
    let local = span_basis(&compressed, tol);
    let dim = local.len();
    let n = (dim as f64).sqrt().round() as usize;
    if n * n != dim || n == 0 || rank_p % n != 0 {
        return None;
    }
    let mult = rank_p / n;
    if n == 1 {
        return Some(MatrixUnits { n, mult, units: vec![p] });
    }
    for _ in 0..ATTEMPTS {
        let w = random_combination(&local, rng);
        let y = v.adjoint() * (&w + w.adjoint()) * v;
        let (vals, vecs) = hermitian_eigen(&y);
        let spread = vals.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
        let groups = clusters(&vals, 1e-6 * spread);
        if groups.len() != n || groups.iter().any(|g| g.len() != mult) {
            continue;
        }
        let es: Vec<Mat> = groups
            .iter()
            .map(|g| {
                let wg = v * columns_of(&vecs, g);
                &wg * wg.adjoint()
            })
            .collect();
        let x = random_combination(&local, rng);
        let mut col: Vec<Mat> = Vec::with_capacity(n);
        let mut degenerate = false;
        for e in &es {
            let t = e * &x * &es[0];
            let s = (t.adjoint() * &t).trace().re / mult as f64;
            if s < 1e-8 {
                degenerate = true;
                break;
            }
            col.push(t / C64::new(s.sqrt(), 0.0));
        }
        if degenerate {
            continue;
        }
        col[0] = es[0].clone();
        let mut units = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                units.push(&col[i] * col[j].adjoint());
            }
        }
        return Some(MatrixUnits { n, mult, units });
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fdlin::linalg::re;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// `M_2 ⊗ 1_2 ⊕ C ⊕ C` conjugated by a random unitary.
    fn test_algebra(rng: &mut ChaCha8Rng) -> Vec<Mat> {
        let d = 6;
        let q = crate::fdlin::linalg::random_unitary(rng, d);
        let mut mats = Vec::new();
        for i in 0..2 {
            for j in 0..2 {
                let mut m = Mat::zeros(d, d);
                m[(i, j)] = re(1.0);
                m[(i + 2, j + 2)] = re(1.0);
                mats.push(&q * m * q.adjoint());
            }
        }
        for k in 4..6 {
            let mut m = Mat::zeros(d, d);
            m[(k, k)] = re(1.0);
            mats.push(&q * m * q.adjoint());
        }
        mats
    }

    #[test]
    fn recovers_block_structure() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mats = test_algebra(&mut rng);
        assert!(star_closure_residual(&mats, 1e-10) < 1e-10);
        let blocks = decompose(&mats, &mut rng, 1e-10).unwrap();
        let mut dims: Vec<(usize, usize)> = blocks.iter().map(|b| (b.n, b.mult)).collect();
        dims.sort();
        assert_eq!(dims, vec![(1, 1), (1, 1), (2, 2)]);
        for b in &blocks {
            for i in 0..b.n {
                for j in 0..b.n {
                    for k in 0..b.n {
                        for l in 0..b.n {
                            let prod = b.unit(i, j) * b.unit(k, l);
                            let expect = if j == k { b.unit(i, l).clone() } else { Mat::zeros(6, 6) };
                            assert!(max_abs(&(prod - expect)) < 1e-9);
                        }
                        assert!(max_abs(&(b.unit(i, j).adjoint() - b.unit(j, i))) < 1e-9);
                    }
                }
            }
        }
    }
}
