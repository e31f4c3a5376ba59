//! Unitary corepresentations as coefficient matrices, elements of `A ⊗ M_n`
//! and equivariant vectors, plus the Haar-pairing contractions that stand in
//! for Sweedler notation.

use std::collections::HashMap;

use crate::action::Coaction;
use crate::error::{Error, Result};
use crate::fdlin::linalg::{null_space, Mat, MaxAbs, Vector, C64};
use crate::fdlin::star::resize;
use crate::qg::QuantumGroup;

/// A unitary corepresentation, `Σ_k u_ik* u_jk = δ_ij`: one irreducible or a
/// direct sum of them.
#[derive(Clone, Debug)]
pub struct Rep {
    pub label: String,
    pub n: usize,
    /// `u_ij` at `i * n + j`, window coordinates.
    pub u: Vec<Vector>,
    pub q: Mat,
    pub qdim: f64,
    pub summands: Vec<usize>,
}

impl Rep {
    pub fn irreducible(qg: &QuantumGroup, pi: usize) -> Rep {
        Rep::sum(qg, &[pi])
    }

    /// Block-diagonal sum of irreducibles.
    pub fn sum(qg: &QuantumGroup, pis: &[usize]) -> Rep {
        let n: usize = pis.iter().map(|&p| qg.irreps[p].n).sum();
        let mut u = vec![Vector::zeros(qg.m); n * n];
        let mut q = Mat::zeros(n, n);
        let mut off = 0;
        for &p in pis {
            let r = &qg.irreps[p];
            for i in 0..r.n {
                for j in 0..r.n {
                    u[(off + i) * n + off + j] = r.entry(i, j).clone();
                    q[(off + i, off + j)] = r.q[(i, j)];
                }
            }
            off += r.n;
        }
        let label = pis.iter().map(|&p| qg.irreps[p].label.as_str()).collect::<Vec<_>>().join("+");
        let qdim = pis.iter().map(|&p| qg.irreps[p].qdim).sum();
        Rep { label, n, u, q, qdim, summands: pis.to_vec() }
    }

    /// `"std"` or `"chi0+chi1"`.
    pub fn parse(qg: &QuantumGroup, label: &str) -> Result<Rep> {
        let pis = label.split('+').map(|l| qg.irrep_index(l.trim())).collect::<Result<Vec<_>>>()?;
        Ok(Rep::sum(qg, &pis))
    }

    pub fn is_irreducible(&self) -> bool {
        self.summands.len() == 1
    }

    pub fn entry(&self, i: usize, j: usize) -> &Vector {
        &self.u[i * self.n + j]
    }

    /// Largest coefficient degree.
    pub fn degree(&self, c: &Coaction) -> usize {
        self.summands.iter().map(|&p| c.pi_degree(p)).max().unwrap_or(0)
    }
}

/// `Σ x_ij ⊗ e_ij ∈ A ⊗ M_n`, entries at `i * n + j` in coordinates of `A`.
#[derive(Clone, Debug)]
pub struct AmpElement {
    pub n: usize,
    pub entries: Vec<Vector>,
}

impl AmpElement {
    pub fn zeros(n: usize, d: usize) -> Self {
        AmpElement { n, entries: vec![Vector::zeros(d); n * n] }
    }

    /// `b ⊗ 1`.
    pub fn diagonal(n: usize, b: &Vector) -> Self {
        let mut out = AmpElement::zeros(n, b.len());
        for i in 0..n {
            out.entries[i * n + i] = b.clone();
        }
        out
    }

    pub fn entry(&self, i: usize, j: usize) -> &Vector {
        &self.entries[i * self.n + j]
    }

    /// `ξ η*` for `ξ, η ∈ A ⊗ H`.
    pub fn outer(c: &Coaction, xi: &[Vector], eta: &[Vector]) -> Result<Self> {
        let n = xi.len();
        let stars: Vec<Vector> = eta.iter().map(|y| c.star(y)).collect();
        let mut entries = Vec::with_capacity(n * n);
        for x in xi {
            for s in &stars {
                entries.push(c.mul(x, s)?);
            }
        }
        Ok(AmpElement { n, entries })
    }

    pub fn mul(&self, c: &Coaction, other: &AmpElement) -> Result<Self> {
        let n = self.n;
        let mut out = AmpElement::zeros(n, c.dim());
        for i in 0..n {
            for k in 0..n {
                let a = self.entry(i, k);
                if a.iter().all(|z| z.norm() < 1e-15) {
                    continue;
                }
                for j in 0..n {
                    out.entries[i * n + j] += c.mul(a, other.entry(k, j))?;
                }
            }
        }
        Ok(out)
    }

    pub fn star(&self, c: &Coaction) -> Self {
        let n = self.n;
        let entries = (0..n * n).map(|k| c.star(self.entry(k % n, k / n))).collect();
        AmpElement { n, entries }
    }

    /// `X (b ⊗ 1)`.
    pub fn mul_b(&self, c: &Coaction, b: &Vector) -> Result<Self> {
        let entries = self.entries.iter().map(|x| c.mul(x, b)).collect::<Result<_>>()?;
        Ok(AmpElement { n: self.n, entries })
    }

    /// `(b ⊗ 1) X`.
    pub fn b_mul(&self, c: &Coaction, b: &Vector) -> Result<Self> {
        let entries = self.entries.iter().map(|x| c.mul(b, x)).collect::<Result<_>>()?;
        Ok(AmpElement { n: self.n, entries })
    }

    pub fn add(&self, other: &AmpElement) -> Self {
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        AmpElement { n: self.n, entries }
    }

    pub fn sub(&self, other: &AmpElement) -> Self {
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        AmpElement { n: self.n, entries }
    }

    pub fn scale(&self, s: C64) -> Self {
        AmpElement { n: self.n, entries: self.entries.iter().map(|a| a * s).collect() }
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|a| a.max_abs()).fold(0.0, f64::max)
    }

    pub fn flat(&self) -> Vector {
        let d = self.entries[0].len();
        let mut v = Vector::zeros(self.entries.len() * d);
        for (k, a) in self.entries.iter().enumerate() {
            v.rows_mut(k * d, d).copy_from(a);
        }
        v
    }

    /// Inverse of [`AmpElement::flat`] for entries of length `k`, padded to `d`.
    pub fn from_flat(n: usize, k: usize, d: usize, v: &Vector) -> Self {
        let entries = (0..n * n).map(|e| resize(&v.rows(e * k, k).into_owned(), d)).collect();
        AmpElement { n, entries }
    }
}

/// Helpers on tuples `Σ z_i ⊗ e_i ∈ A ⊗ H`.
pub(crate) mod tuple {
    use super::*;

    pub fn right(c: &Coaction, z: &[Vector], b: &Vector) -> Result<Vec<Vector>> {
        z.iter().map(|x| c.mul(x, b)).collect()
    }

    pub fn left(c: &Coaction, b: &Vector, z: &[Vector]) -> Result<Vec<Vector>> {
        z.iter().map(|x| c.mul(b, x)).collect()
    }

    pub fn axpy(acc: &mut [Vector], z: &[Vector]) {
        for (a, x) in acc.iter_mut().zip(z) {
            *a += x;
        }
    }

    pub fn flat(z: &[Vector]) -> Vector {
        let d = z.first().map_or(0, |x| x.len());
        let mut v = Vector::zeros(z.len() * d);
        for (k, a) in z.iter().enumerate() {
            v.rows_mut(k * d, d).copy_from(a);
        }
        v
    }

    pub fn distance(a: &[Vector], b: &[Vector]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).max_abs()).fold(0.0, f64::max)
    }
}

/// `c ↦ φ(u* c)` on the window, as a coefficient vector.
pub fn haar_pairing(qg: &QuantumGroup, u: &Vector) -> Vector {
    let u = resize(u, qg.m);
    (u.adjoint() * &qg.gram).transpose()
}

/// `(ι ⊗ ω)α(x) = ω(x₍₁₎) x₍₀₎`.
pub fn sweedler(c: &Coaction, x: &Vector, omega: &Vector) -> Result<Vector> {
    c.slice(&resize(&resize(x, c.n), c.dim()), omega)
}

/// Sparse rows keyed by arbitrary indices; only rows that receive an entry
/// are materialized.
pub(crate) struct Rows {
    cols: usize,
    index: HashMap<usize, usize>,
    entries: Vec<(usize, usize, C64)>,
}

impl Rows {
    pub fn new(cols: usize) -> Self {
        Rows { cols, index: HashMap::new(), entries: Vec::new() }
    }

    pub fn add(&mut self, key: usize, col: usize, v: C64) {
        if v.norm() < 1e-15 {
            return;
        }
        let next = self.index.len();
        let row = *self.index.entry(key).or_insert(next);
        self.entries.push((row, col, v));
    }

    pub fn dense(&self) -> Mat {
        let mut m = Mat::zeros(self.index.len(), self.cols);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }

    pub fn kernel(&self, tol: f64) -> Mat {
        null_space(&self.dense(), tol)
    }
}

/// Window-degree budget: entries of `C` and of `A ⊡ H` sit in degree `≤ 2 d_π`.
pub(crate) fn require_budget(c: &Coaction, rep: &Rep) -> Result<()> {
    let need = 2 * rep.degree(c);
    if c.is_graded() && need as i64 > c.window() {
        return Err(Error::DegreeOverflow { needed: need, max: c.window() as usize });
    }
    Ok(())
}

/// Window coordinates of degree `≤ degree`.
pub(crate) fn unknowns(c: &Coaction, degree: usize) -> usize {
    c.prefix(degree as i64).min(c.n)
}

/// Solutions `z = (z_j)` of `α(z_j) = Σ_i z_i ⊗ u_ij`, an orthonormal basis in
/// flat coordinates, with entries padded to `A.dim`. Unknowns stop at degree
/// `d_π`.
pub fn equivariant_space(c: &Coaction, rep: &Rep, tol: f64) -> Result<Vec<Vec<Vector>>> {
    let (n, na, d, m) = (rep.n, unknowns(c, rep.degree(c)), c.dim(), c.qg.m);
    let mut rows = Rows::new(n * na);
    for j in 0..n {
        for a in 0..na {
            let al = c.alpha_basis(a);
            for r in 0..d {
                for s in 0..m {
                    rows.add((j * d + r) * m + s, j * na + a, al[(r, s)]);
                }
            }
            for i in 0..n {
                let u = rep.entry(i, j);
                for s in 0..m {
                    rows.add((j * d + a) * m + s, i * na + a, -u[s]);
                }
            }
        }
    }
    let ker = rows.kernel(tol);
    Ok((0..ker.ncols())
        .map(|k| (0..n).map(|j| resize(&ker.column(k).rows(j * na, na).into_owned(), d)).collect())
        .collect())
}
