//! Quantum groups in coordinates: finite ones from structure tensors and
//! degree-truncated algebraic cores, handled through one type.
//!
//! A quantum group carries an *ambient* algebra (all coordinates in which
//! products are taken) and a *window*, a leading block of coordinates that is
//! a subcoalgebra closed under `*` and `S`. Corepresentations, characters and
//! the dual algebra live on the window; the Haar state lives on the ambient
//! algebra so that products of window elements can be integrated.

pub mod axioms;
pub mod coproduct;
pub mod corep;
pub mod dual;
pub mod examples;
pub mod finite;
pub mod haar;
pub mod wedderburn;

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use coproduct::SparseCoproduct;
pub use corep::Corep;
pub use dual::DualAlgebra;
pub use haar::HaarSolution;

use crate::fdlin::linalg::MaxAbs;
use crate::error::{Error, Result};
use crate::fdlin::linalg::{hermitian_eigen, Mat, Vector, C64};
use crate::fdlin::star::{resize, StarAlgebra};

/// Raw structure data before the Haar state and irreducibles are computed.
#[derive(Clone)]
pub struct QgData {
    pub name: String,
    pub alg: Arc<dyn StarAlgebra>,
    pub window: usize,
    pub delta: SparseCoproduct,
    pub counit: Vector,
    pub antipode: Mat,
}

/// How irreducibles are named once sorted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LabelScheme {
    /// `triv`, `pi1`, `pi2`, … in sorted order.
    Generic,
    /// `triv`, `spin1/2`, `spin1`, … by dimension.
    Spin,
    /// `chi0`, `chi1`, … for characters of `Z/n`, read off the value at the generator.
    Cyclic,
    /// `triv`, `sign`, `std` for the symmetric group on three letters.
    Symmetric3,
}

pub struct QuantumGroup {
    pub name: String,
    pub alg: Arc<dyn StarAlgebra>,
    /// Window dimension.
    pub m: usize,
    pub delta_sparse: SparseCoproduct,
    /// Dense coproduct on the window, rows `a * m + b`.
    pub delta: Mat,
    pub counit: Vector,
    pub antipode: Mat,
    pub haar: HaarSolution,
    /// `Φ_ab = φ(e_a* e_b)` on the window.
    pub gram: Mat,
    /// `φ(e_a e_b)` on the window.
    pub pairing: Mat,
    pub dual: DualAlgebra,
    pub irreps: Vec<Corep>,
    pub seed: u64,
}

impl QuantumGroup {
    pub fn build(data: QgData, seed: u64, scheme: LabelScheme, tol: f64) -> Result<QuantumGroup> {
        let QgData { name, alg, window: m, delta: delta_sparse, counit, antipode } = data;
        let big = alg.dim();
        if delta_sparse.dim != big || counit.len() != big || antipode.shape() != (big, big) || m > big {
            return Err(Error::Shape(format!("structure maps do not match ambient dimension {big}")));
        }
        let haar = haar::solve_haar(&delta_sparse, &alg.unit())?;
        if haar.residual > tol.max(1e-9) * 10.0 {
            return Err(Error::Falsified(format!("Haar invariance residual {:e}", haar.residual)));
        }
        let delta = delta_sparse.dense_prefix(m);
        let mut qg = QuantumGroup {
            name,
            alg,
            m,
            delta_sparse,
            delta,
            counit,
            antipode,
            haar,
            gram: Mat::zeros(m, m),
            pairing: Mat::zeros(m, m),
            dual: DualAlgebra::empty(),
            irreps: Vec::new(),
            seed,
        };
        let mut gram = Mat::zeros(m, m);
        let mut pairing = Mat::zeros(m, m);
        for a in 0..m {
            let ea = qg.basis(a);
            let sa = qg.star(&ea);
            for b in 0..m {
                let eb = qg.basis(b);
                gram[(a, b)] = qg.phi(&qg.mul(&sa, &eb)?);
                pairing[(a, b)] = qg.phi(&qg.mul(&ea, &eb)?);
            }
        }
        let (gv, _) = hermitian_eigen(&gram);
        if gv[0] <= tol {
            return Err(Error::NotPositive(format!("Haar Gram matrix has eigenvalue {:e}", gv[0])));
        }
        qg.gram = gram;
        qg.pairing = pairing;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        qg.dual = DualAlgebra::regular(&qg, &mut rng, tol)?;
        let irreps = corep::decompose_regular(&qg, tol)?;
        qg.irreps = corep::assign_labels(&qg, irreps, scheme)?;
        Ok(qg)
    }

    pub fn ambient_dim(&self) -> usize {
        self.alg.dim()
    }

    pub fn basis(&self, i: usize) -> Vector {
        let mut v = Vector::zeros(self.m);
        v[i] = C64::new(1.0, 0.0);
        v
    }

    pub fn unit(&self) -> Vector {
        resize(&self.alg.unit(), self.m)
    }

    /// Product of two elements given in window or ambient coordinates;
    /// returns ambient coordinates.
    pub fn mul(&self, x: &Vector, y: &Vector) -> Result<Vector> {
        let n = self.alg.dim();
        self.alg.mul(&resize(x, n), &resize(y, n))
    }

    /// Adjoint; preserves the length of the input (window stays window).
    pub fn star(&self, x: &Vector) -> Vector {
        resize(&self.alg.star(&resize(x, self.alg.dim())), x.len())
    }

    pub fn antipode_apply(&self, x: &Vector) -> Vector {
        let n = self.alg.dim();
        resize(&(&self.antipode * resize(x, n)), x.len())
    }

    pub fn counit_apply(&self, x: &Vector) -> C64 {
        resize(x, self.counit.len()).dot(&self.counit)
    }

    pub fn phi(&self, x: &Vector) -> C64 {
        let f = &self.haar.functional;
        x.iter().zip(f.iter()).map(|(a, b)| a * b).sum()
    }

    /// `⟨x, y⟩ = φ(x* y)` for window vectors.
    pub fn inner(&self, x: &Vector, y: &Vector) -> C64 {
        (x.adjoint() * &self.gram * y)[(0, 0)]
    }

    /// `Δ(x)` for a window vector as an `m × m` coefficient matrix.
    pub fn coproduct(&self, x: &Vector) -> Mat {
        let v = &self.delta * resize(x, self.m);
        Mat::from_row_iterator(self.m, self.m, v.iter().cloned())
    }

    /// `Δ(x)` for an ambient vector.
    pub fn coproduct_ambient(&self, x: &Vector) -> Mat {
        self.delta_sparse.apply(&resize(x, self.alg.dim()))
    }

    pub fn irrep(&self, label: &str) -> Result<&Corep> {
        self.irreps.iter().find(|c| c.label == label).ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn irrep_index(&self, label: &str) -> Result<usize> {
        self.irreps.iter().position(|c| c.label == label).ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn trivial(&self) -> &Corep {
        &self.irreps[0]
    }

    pub fn labels(&self) -> Vec<String> {
        self.irreps.iter().map(|c| c.label.clone()).collect()
    }

    /// Index of the conjugate irreducible: the one whose coefficient space
    /// contains the adjoints of the coefficients of `pi`.
    pub fn conjugate_index(&self, pi: usize) -> usize {
        let u = &self.irreps[pi];
        let probe = self.star(&u.entry(0, 0).clone());
        self.irreps
            .iter()
            .enumerate()
            .map(|(k, c)| (k, c.projection_residual(self, &probe)))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .map(|(k, _)| k)
            .unwrap()
    }

    pub fn is_kac(&self, tol: f64) -> bool {
        self.irreps.iter().all(|c| (&c.q - Mat::identity(c.n, c.n)).max_abs() < tol)
    }
}
