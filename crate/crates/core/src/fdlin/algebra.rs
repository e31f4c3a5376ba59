//! Direct sums of full matrix algebras and their elements.
//!
//! Coordinates: matrix units `e_ij` of each block in row-major order, blocks
//! concatenated in declared order.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::linalg::{hermitian_eigen, max_abs, re, Mat, Vector, C64};
use super::star::StarAlgebra;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FdCStarAlgebra {
    pub block_dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis_labels: Option<Vec<String>>,
}

impl FdCStarAlgebra {
    pub fn new(block_dims: Vec<usize>) -> Result<Self> {
        if block_dims.is_empty() || block_dims.contains(&0) {
            return Err(Error::Invalid(format!("block dims must be non-empty and positive, got {block_dims:?}")));
        }
        Ok(FdCStarAlgebra { block_dims, basis_labels: None })
    }

    /// C^n as n one-dimensional blocks.
    pub fn commutative(n: usize) -> Result<Self> {
        Self::new(vec![1; n])
    }

    pub fn total_dim(&self) -> usize {
        self.block_dims.iter().map(|n| n * n).sum()
    }

    pub fn block_offsets(&self) -> Vec<usize> {
        let mut off = Vec::with_capacity(self.block_dims.len());
        let mut acc = 0;
        for n in &self.block_dims {
            off.push(acc);
            acc += n * n;
        }
        off
    }

    /// (block, row, col) of a coordinate index.
    pub fn locate(&self, idx: usize) -> (usize, usize, usize) {
        let mut rest = idx;
        for (b, &n) in self.block_dims.iter().enumerate() {
            if rest < n * n {
                return (b, rest / n, rest % n);
            }
            rest -= n * n;
        }
        panic!("coordinate {idx} out of range");
    }

    pub fn index(&self, block: usize, i: usize, j: usize) -> usize {
        let n = self.block_dims[block];
        self.block_offsets()[block] + i * n + j
    }

    pub fn unit_element(&self) -> AlgElement {
        AlgElement {
            algebra: self.clone(),
            blocks: self.block_dims.iter().map(|&n| Mat::identity(n, n)).collect(),
        }
    }

    pub fn zero_element(&self) -> AlgElement {
        AlgElement {
            algebra: self.clone(),
            blocks: self.block_dims.iter().map(|&n| Mat::zeros(n, n)).collect(),
        }
    }

    pub fn basis_element(&self, idx: usize) -> AlgElement {
        let mut v = Vector::zeros(self.total_dim());
        v[idx] = re(1.0);
        self.element(&v)
    }

    pub fn element(&self, coords: &Vector) -> AlgElement {
        assert_eq!(coords.len(), self.total_dim(), "coordinate length");
        let mut blocks = Vec::with_capacity(self.block_dims.len());
        let mut k = 0;
        for &n in &self.block_dims {
            blocks.push(Mat::from_row_iterator(n, n, coords.iter().skip(k).take(n * n).cloned()));
            k += n * n;
        }
        AlgElement { algebra: self.clone(), blocks }
    }

    pub fn from_blocks(&self, blocks: Vec<Mat>) -> Result<AlgElement> {
        if blocks.len() != self.block_dims.len() {
            return Err(Error::Shape(format!("expected {} blocks, got {}", self.block_dims.len(), blocks.len())));
        }
        for (b, &n) in blocks.iter().zip(&self.block_dims) {
            if b.shape() != (n, n) {
                return Err(Error::Shape(format!("block of shape {:?}, expected {n}x{n}", b.shape())));
            }
        }
        Ok(AlgElement { algebra: self.clone(), blocks })
    }

    /// Block structure of the tensor product, left leg slowest.
    pub fn tensor(&self, other: &FdCStarAlgebra) -> FdCStarAlgebra {
        let mut dims = Vec::with_capacity(self.block_dims.len() * other.block_dims.len());
        for &n in &self.block_dims {
            for &m in &other.block_dims {
                dims.push(n * m);
            }
        }
        FdCStarAlgebra { block_dims: dims, basis_labels: None }
    }

    /// Permutation `p` with `p[a * M + b]` = coordinate of `e_a ⊗ e_b` in the
    /// tensor algebra, where `M = other.total_dim()`.
    pub fn tensor_coordinate_map(&self, other: &FdCStarAlgebra) -> Vec<usize> {
        let t = self.tensor(other);
        let m = other.total_dim();
        let mut out = vec![0; self.total_dim() * m];
        for a in 0..self.total_dim() {
            let (ba, ia, ja) = self.locate(a);
            for b in 0..m {
                let (bb, ib, jb) = other.locate(b);
                let nb = other.block_dims[bb];
                let block = ba * other.block_dims.len() + bb;
                out[a * m + b] = t.index(block, ia * nb + ib, ja * nb + jb);
            }
        }
        out
    }

    /// Normalized faithful trace: Σ_blocks Tr / Σ_blocks n.
    pub fn trace_functional(&self) -> Vector {
        let total: usize = self.block_dims.iter().sum();
        let mut v = Vector::zeros(self.total_dim());
        for (b, &n) in self.block_dims.iter().enumerate() {
            for i in 0..n {
                v[self.index(b, i, i)] = re(1.0 / total as f64);
            }
        }
        v
    }
}

impl fmt::Display for FdCStarAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .block_dims
            .iter()
            .map(|&n| if n == 1 { "C".to_string() } else { format!("M_{n}") })
            .collect();
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlgElement {
    pub algebra: FdCStarAlgebra,
    pub blocks: Vec<Mat>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Positivity {
    Positive,
    NotPositive { block: usize, eigenvalue: f64, eigenvector: Vector },
}

impl Positivity {
    pub fn is_positive(&self) -> bool {
        matches!(self, Positivity::Positive)
    }
}

impl AlgElement {
    pub fn coords(&self) -> Vector {
        let mut v = Vector::zeros(self.algebra.total_dim());
        let mut k = 0;
        for b in &self.blocks {
            let n = b.nrows();
            for i in 0..n {
                for j in 0..n {
                    v[k] = b[(i, j)];
                    k += 1;
                }
            }
        }
        v
    }

    fn check_same(&self, other: &AlgElement) -> Result<()> {
        if self.algebra.block_dims != other.algebra.block_dims {
            return Err(Error::AlgebraMismatch(format!("{} vs {}", self.algebra, other.algebra)));
        }
        Ok(())
    }

    pub fn mul(&self, other: &AlgElement) -> Result<AlgElement> {
        self.check_same(other)?;
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(x, y)| x * y).collect();
        Ok(AlgElement { algebra: self.algebra.clone(), blocks })
    }

    pub fn add(&self, other: &AlgElement) -> Result<AlgElement> {
        self.check_same(other)?;
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(x, y)| x + y).collect();
        Ok(AlgElement { algebra: self.algebra.clone(), blocks })
    }

    pub fn sub(&self, other: &AlgElement) -> Result<AlgElement> {
        self.check_same(other)?;
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(x, y)| x - y).collect();
        Ok(AlgElement { algebra: self.algebra.clone(), blocks })
    }

    pub fn scale(&self, s: C64) -> AlgElement {
        AlgElement { algebra: self.algebra.clone(), blocks: self.blocks.iter().map(|b| b * s).collect() }
    }

    pub fn adjoint(&self) -> AlgElement {
        AlgElement { algebra: self.algebra.clone(), blocks: self.blocks.iter().map(|b| b.adjoint()).collect() }
    }

    pub fn tensor(&self, other: &AlgElement) -> AlgElement {
        let mut blocks = Vec::with_capacity(self.blocks.len() * other.blocks.len());
        for x in &self.blocks {
            for y in &other.blocks {
                blocks.push(x.kronecker(y));
            }
        }
        AlgElement { algebra: self.algebra.tensor(&other.algebra), blocks }
    }

    pub fn self_adjoint_residual(&self) -> f64 {
        self.blocks.iter().map(|b| max_abs(&(b - b.adjoint()))).fold(0.0, f64::max)
    }

    pub fn operator_norm(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| crate::fdlin::linalg::singular_values(b).first().cloned().unwrap_or(0.0))
            .fold(0.0, f64::max)
    }

    pub fn positivity_certificate(&self, tol: f64) -> Result<Positivity> {
        let r = self.self_adjoint_residual();
        if r > tol.max(1e-12) * self.operator_norm().max(1.0) {
            return Err(Error::NotSelfAdjoint(r));
        }
        let mut worst: Option<(usize, f64, Vector)> = None;
        for (k, b) in self.blocks.iter().enumerate() {
            let (vals, vecs) = hermitian_eigen(b);
            if vals[0] < -tol && worst.as_ref().map_or(true, |w| vals[0] < w.1) {
                worst = Some((k, vals[0], vecs.column(0).into_owned()));
            }
        }
        Ok(match worst {
            None => Positivity::Positive,
            Some((block, eigenvalue, eigenvector)) => Positivity::NotPositive { block, eigenvalue, eigenvector },
        })
    }

    /// Smallest eigenvalue over all blocks of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        self.blocks.iter().map(|b| hermitian_eigen(b).0[0]).fold(f64::INFINITY, f64::min)
    }
}

impl StarAlgebra for FdCStarAlgebra {
    fn dim(&self) -> usize {
        self.total_dim()
    }

    fn unit(&self) -> Vector {
        self.unit_element().coords()
    }

    fn mul(&self, x: &Vector, y: &Vector) -> Result<Vector> {
        if x.len() != self.total_dim() || y.len() != self.total_dim() {
            return Err(Error::Shape(format!("vectors of length {} and {} in an algebra of dimension {}", x.len(), y.len(), self.total_dim())));
        }
        Ok(self.element(x).mul(&self.element(y))?.coords())
    }

    fn star(&self, x: &Vector) -> Vector {
        self.element(x).adjoint().coords()
    }

    fn matrix_blocks(&self) -> Option<&[usize]> {
        Some(&self.block_dims)
    }
}

/// Linear map between coordinate spaces.
#[derive(Clone, Debug, PartialEq)]
pub struct LinMap {
    pub domain_dim: usize,
    pub codomain_dim: usize,
    pub matrix: Mat,
}

impl LinMap {
    pub fn new(matrix: Mat) -> Self {
        LinMap { domain_dim: matrix.ncols(), codomain_dim: matrix.nrows(), matrix }
    }

    pub fn with_dims(domain_dim: usize, codomain_dim: usize, matrix: Mat) -> Result<Self> {
        if matrix.shape() != (codomain_dim, domain_dim) {
            return Err(Error::Shape(format!(
                "matrix {:?} does not match {codomain_dim}x{domain_dim}",
                matrix.shape()
            )));
        }
        Ok(LinMap { domain_dim, codomain_dim, matrix })
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        &self.matrix * v
    }

    pub fn compose(&self, inner: &LinMap) -> Result<LinMap> {
        if inner.codomain_dim != self.domain_dim {
            return Err(Error::Shape(format!("cannot compose {}->{} after {}->{}", self.domain_dim, self.codomain_dim, inner.domain_dim, inner.codomain_dim)));
        }
        Ok(LinMap::new(&self.matrix * &inner.matrix))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fdlin::linalg::{c64, random_complex_matrix, random_complex_vector};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_element(alg: &FdCStarAlgebra, rng: &mut ChaCha8Rng) -> AlgElement {
        alg.element(&random_complex_vector(rng, alg.total_dim()))
    }

    #[test]
    fn unit_acts_as_identity() {
        let alg = FdCStarAlgebra::new(vec![2, 1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x = random_element(&alg, &mut rng);
        let y = alg.unit_element().mul(&x).unwrap();
        assert!((y.coords() - x.coords()).norm() < 1e-14);
    }

    #[test]
    fn diagonal_algebra_is_pointwise() {
        let alg = FdCStarAlgebra::commutative(2).unwrap();
        let x = alg.element(&Vector::from_vec(vec![re(2.0), re(3.0)]));
        let y = alg.element(&Vector::from_vec(vec![re(5.0), c64(0.0, 1.0)]));
        let z = x.mul(&y).unwrap().coords();
        assert_eq!(z[0], re(10.0));
        assert_eq!(z[1], c64(0.0, 3.0));
    }

    #[test]
    fn mul_matches_matrix_product() {
        let alg = FdCStarAlgebra::new(vec![3]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_complex_matrix(&mut rng, 3, 3);
        let b = random_complex_matrix(&mut rng, 3, 3);
        let x = alg.from_blocks(vec![a.clone()]).unwrap();
        let y = alg.from_blocks(vec![b.clone()]).unwrap();
        // plain triple loop as the oracle
        let mut expect = Mat::zeros(3, 3);
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    expect[(i, j)] += a[(i, k)] * b[(k, j)];
                }
            }
        }
        assert!(max_abs(&(x.mul(&y).unwrap().blocks[0].clone() - expect)) < 1e-12);
    }

    #[test]
    fn mismatched_algebras_are_rejected() {
        let a = FdCStarAlgebra::new(vec![2]).unwrap().unit_element();
        let b = FdCStarAlgebra::new(vec![1, 1]).unwrap().unit_element();
        assert!(matches!(a.mul(&b), Err(Error::AlgebraMismatch(_))));
    }

    #[test]
    fn tensor_block_structure() {
        let c = FdCStarAlgebra::new(vec![1]).unwrap();
        let m2 = FdCStarAlgebra::new(vec![2]).unwrap();
        let c2 = FdCStarAlgebra::commutative(2).unwrap();
        assert_eq!(c.tensor(&m2).block_dims, vec![2]);
        assert_eq!(c2.tensor(&c2).block_dims, vec![1, 1, 1, 1]);
    }

    #[test]
    fn tensor_legs_commute_across() {
        let a1 = FdCStarAlgebra::new(vec![2, 1]).unwrap();
        let a2 = FdCStarAlgebra::new(vec![1, 2]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = random_element(&a1, &mut rng);
        let y = random_element(&a2, &mut rng);
        let left = a1.unit_element().tensor(&y).mul(&x.tensor(&a2.unit_element())).unwrap();
        let direct = x.tensor(&y);
        assert!((left.coords() - direct.coords()).norm() < 1e-12);
    }

    #[test]
    fn tensor_coordinate_map_matches_elements() {
        let a1 = FdCStarAlgebra::new(vec![2, 1]).unwrap();
        let a2 = FdCStarAlgebra::new(vec![1, 2]).unwrap();
        let p = a1.tensor_coordinate_map(&a2);
        let m = a2.total_dim();
        for a in 0..a1.total_dim() {
            for b in 0..m {
                let t = a1.basis_element(a).tensor(&a2.basis_element(b)).coords();
                assert_eq!(t[p[a * m + b]], re(1.0));
            }
        }
    }

    #[test]
    fn tensor_is_associative_up_to_reindexing() {
        let algs = [
            FdCStarAlgebra::new(vec![2]).unwrap(),
            FdCStarAlgebra::commutative(2).unwrap(),
            FdCStarAlgebra::new(vec![1, 2]).unwrap(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let xs: Vec<AlgElement> = algs.iter().map(|a| random_element(a, &mut rng)).collect();
        let left = xs[0].tensor(&xs[1]).tensor(&xs[2]);
        let right = xs[0].tensor(&xs[1].tensor(&xs[2]));
        // same multiset of block dims and the same spectra after re-indexing
        let mut ld = left.algebra.block_dims.clone();
        let mut rd = right.algebra.block_dims.clone();
        ld.sort();
        rd.sort();
        assert_eq!(ld, rd);
        assert!((left.operator_norm() - right.operator_norm()).abs() < 1e-10);
        // map basis: e_a ⊗ e_b ⊗ e_c through both nestings
        let (d0, d1, d2) = (algs[0].total_dim(), algs[1].total_dim(), algs[2].total_dim());
        let p01 = algs[0].tensor_coordinate_map(&algs[1]);
        let p01_2 = algs[0].tensor(&algs[1]).tensor_coordinate_map(&algs[2]);
        let p12 = algs[1].tensor_coordinate_map(&algs[2]);
        let p0_12 = algs[0].tensor_coordinate_map(&algs[1].tensor(&algs[2]));
        let lc = left.coords();
        let rc = right.coords();
        let d12 = d1 * d2;
        for a in 0..d0 {
            for b in 0..d1 {
                for c in 0..d2 {
                    let li = p01_2[p01[a * d1 + b] * d2 + c];
                    let ri = p0_12[a * d12 + p12[b * d2 + c]];
                    assert!((lc[li] - rc[ri]).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn positivity_examples() {
        let alg = FdCStarAlgebra::new(vec![2]).unwrap();
        assert!(alg.unit_element().positivity_certificate(1e-9).unwrap().is_positive());
        let d = alg.from_blocks(vec![Mat::from_diagonal(&Vector::from_vec(vec![re(1.0), re(-1.0)]))]).unwrap();
        match d.positivity_certificate(1e-9).unwrap() {
            Positivity::NotPositive { eigenvalue, .. } => assert!((eigenvalue + 1.0).abs() < 1e-12),
            Positivity::Positive => panic!("diag(1,-1) reported positive"),
        }
        let nsa = alg.from_blocks(vec![Mat::from_row_slice(2, 2, &[re(0.0), re(1.0), re(0.0), re(0.0)])]).unwrap();
        assert!(matches!(nsa.positivity_certificate(1e-9), Err(Error::NotSelfAdjoint(_))));
    }

    #[test]
    fn operator_norm_examples() {
        let alg = FdCStarAlgebra::commutative(2).unwrap();
        assert!((alg.unit_element().operator_norm() - 1.0).abs() < 1e-14);
        let x = alg.element(&Vector::from_vec(vec![re(3.0), re(-4.0)]));
        assert!((x.operator_norm() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn c_star_identity_on_random_elements() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for dims in [vec![1, 2, 3], vec![4], vec![1, 1, 1]] {
            let alg = FdCStarAlgebra::new(dims).unwrap();
            for _ in 0..100 {
                let x = random_element(&alg, &mut rng);
                let n = x.operator_norm();
                let nn = x.adjoint().mul(&x).unwrap().operator_norm();
                assert!((nn - n * n).abs() < 1e-9 * n.max(1.0).powi(2));
            }
        }
    }

    proptest! {
        #[test]
        fn y_star_y_is_positive(seed in any::<u64>(), d1 in 1usize..4, d2 in 1usize..3) {
            let alg = FdCStarAlgebra::new(vec![d1, d2]).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let y = random_element(&alg, &mut rng);
            let p = y.adjoint().mul(&y).unwrap();
            prop_assert!(p.positivity_certificate(1e-9).unwrap().is_positive());
        }

        #[test]
        fn adjoint_is_involutive(seed in any::<u64>()) {
            let alg = FdCStarAlgebra::new(vec![2, 3]).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = random_element(&alg, &mut rng);
            prop_assert_eq!(x.adjoint().adjoint(), x);
        }
    }
}
