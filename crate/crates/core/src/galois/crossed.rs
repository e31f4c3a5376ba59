//! The crossed product `A ⋊ G = [α(A)(1 ⊗ Ĉ(G))]` acting on `A ⊗ L²(G)`,
//! its corners, `Π_α`, `π_red`, and saturation.
//!
//! Only finite data: `A` a direct sum of matrix blocks and `C(G)` finite.
//! `A ⊗ L²(G)` carries the inner product of `τ ⊗ φ`, so adjoints are
//! `X† = K⁻¹ X* K` with `K` the Gram matrix of that state.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::map::PiDefect;
use crate::action::isotypic::right_inner;
use crate::action::Coaction;
use crate::error::{Error, Result};
use crate::fdlin::linalg::{
    column_space, containment_residual, hermitian_fn, rank, unvec, vec_of, Mat, MaxAbs, Vector,
};
use crate::qg::wedderburn;

pub(crate) fn require_finite(c: &Coaction) -> Result<()> {
    if c.fd.is_none() || c.is_graded() || c.qg.ambient_dim() != c.qg.m {
        return Err(Error::Unsupported("the crossed product is only formed for finite data".into()));
    }
    Ok(())
}

/// Gram matrix `[τ(e_a* e_b)]` of a functional on `A`.
pub(crate) fn gram_of(c: &Coaction, f: impl Fn(&Vector) -> Result<Vector>) -> Result<Mat> {
    let n = c.dim();
    let mut g = Mat::zeros(n, n);
    for a in 0..n {
        let sa = c.star(&c.basis(a));
        for b in 0..n {
            g[(a, b)] = c.tau_apply(&f(&c.mul(&sa, &c.basis(b))?)?);
        }
    }
    Ok(g)
}

/// Left multiplications on `A` and on `C(G)`, by basis vectors.
pub(crate) struct LeftMul {
    a: Vec<Mat>,
    g: Vec<Mat>,
}

impl LeftMul {
    pub(crate) fn new(c: &Coaction) -> Result<Self> {
        let n = c.dim();
        let m = c.qg.m;
        let a = (0..n).map(|r| c.alg.left_mul_matrix(&c.basis(r), n)).collect::<Result<_>>()?;
        let g = (0..m).map(|s| c.qg.alg.left_mul_matrix(&c.qg.basis(s), m)).collect::<Result<_>>()?;
        Ok(LeftMul { a, g })
    }

    /// `L_X` for a coefficient matrix `X ∈ A ⊗ C(G)`.
    pub(crate) fn of(&self, x: &Mat) -> Mat {
        let (n, m) = (self.a.len(), self.g.len());
        let mut out = Mat::zeros(n * m, n * m);
        for r in 0..n {
            for s in 0..m {
                let v = x[(r, s)];
                if v.norm() > 1e-15 {
                    out += self.a[r].kronecker(&self.g[s]) * v;
                }
            }
        }
        out
    }
}

/// `1 ⊗ λ(ω)`.
pub(crate) fn dual_op(c: &Coaction, omega: &Vector) -> Mat {
    Mat::identity(c.dim(), c.dim()).kronecker(&c.qg.dual.lambda_of(omega))
}

fn span_basis(mats: &[Mat], d: usize, tol: f64) -> Vec<Mat> {
    let mut stacked = Mat::zeros(d * d, mats.len());
    for (k, m) in mats.iter().enumerate() {
        stacked.set_column(k, &vec_of(m));
    }
    let q = column_space(&stacked, tol);
    (0..q.ncols()).map(|k| unvec(&q.column(k).into_owned(), d, d)).collect()
}

fn stack(mats: &[Mat], d: usize) -> Mat {
    let mut s = Mat::zeros(d * d, mats.len());
    for (k, m) in mats.iter().enumerate() {
        s.set_column(k, &vec_of(m));
    }
    s
}

fn span_dim(mats: &[Mat], d: usize, tol: f64) -> usize {
    if mats.is_empty() {
        0
    } else {
        rank(&stack(mats, d), tol)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CornerReport {
    pub label: String,
    /// `dim (1 ⊗ p_π)(A ⋊ G)`.
    pub left_dim: usize,
    /// `dim (1 ⊗ p_π)(A ⋊ G)(1 ⊗ p_π)`.
    pub corner_dim: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossedProductReport {
    pub dim: usize,
    pub product_closure: f64,
    pub adjoint_closure: f64,
    pub block_dims: Vec<usize>,
    pub corners: Vec<CornerReport>,
    /// `π_red(Π_α(θ_{x,y})) − θ_{x,y}` over basis vectors.
    pub reduced_identity: f64,
    /// Distance of `X·V(A)` from `V(A)` with `V = α`, over a basis of `A ⋊ G`.
    pub invariance: f64,
}

pub struct CrossedProduct {
    /// Dimension of `A ⊗ L²(G)`.
    pub space_dim: usize,
    /// `L_{α(e_a)}(1 ⊗ λ(e^c))` at `a * m + c`.
    pub generators: Vec<Mat>,
    /// Orthonormal (Frobenius) basis of the span.
    pub basis: Vec<Mat>,
    pub gram: Mat,
    pub inv_gram: Mat,
    /// `1 ⊗ p_π` for each irreducible.
    pub projections: Vec<Mat>,
    pub report: CrossedProductReport,
}

impl CrossedProduct {
    pub fn adjoint(&self, x: &Mat) -> Mat {
        &self.inv_gram * x.adjoint() * &self.gram
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

pub fn crossed_product(c: &Coaction, tol: f64) -> Result<CrossedProduct> {
    require_finite(c)?;
    let (n, m) = (c.dim(), c.qg.m);
    let d = n * m;
    let lm = LeftMul::new(c)?;
    let alphas: Vec<Mat> = (0..n).map(|a| lm.of(c.alpha_basis(a))).collect();
    let lambdas: Vec<Mat> = (0..m).map(|k| dual_op(c, &c.qg.basis(k))).collect();
    let mut generators = Vec::with_capacity(n * m);
    for la in &alphas {
        for l in &lambdas {
            generators.push(la * l);
        }
    }
    let basis = span_basis(&generators, d, tol);
    let sb = stack(&basis, d);

    let mut prods = Vec::with_capacity(basis.len() * basis.len());
    for x in &basis {
        for y in &basis {
            prods.push(x * y);
        }
    }
    let product_closure = containment_residual(&sb, &stack(&prods, d), tol);
    if product_closure > tol.sqrt() {
        return Err(Error::Falsified(format!("α(A)(1⊗Ĉ(G)) is not closed under products ({product_closure:e})")));
    }

    let gram = gram_of(c, |x| Ok(x.clone()))?.kronecker(&c.qg.gram);
    let inv_gram = hermitian_fn(&gram, |x| 1.0 / x);
    let sqrt_gram = hermitian_fn(&gram, f64::sqrt);
    let inv_sqrt = hermitian_fn(&gram, |x| 1.0 / x.sqrt());
    let adjoints: Vec<Mat> = basis.iter().map(|x| &inv_gram * x.adjoint() * &gram).collect();
    let adjoint_closure = containment_residual(&sb, &stack(&adjoints, d), tol);

    let ortho: Vec<Mat> = basis.iter().map(|x| &sqrt_gram * x * &inv_sqrt).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(c.qg.seed);
    let mut block_dims: Vec<usize> = wedderburn::decompose(&ortho, &mut rng, tol)?.iter().map(|b| b.n).collect();
    block_dims.sort();

    let projections: Vec<Mat> = c.qg.irreps.iter().map(|r| dual_op(c, &r.omega)).collect();
    let corners = c
        .qg
        .irreps
        .iter()
        .zip(&projections)
        .map(|(r, p)| {
            let left: Vec<Mat> = basis.iter().map(|x| p * x).collect();
            let two: Vec<Mat> = left.iter().map(|x| x * p).collect();
            CornerReport { label: r.label.clone(), left_dim: span_dim(&left, d, tol), corner_dim: span_dim(&two, d, tol) }
        })
        .collect();

    // Π_α(θ_{x,y}) = α(x)(1⊗p_triv)α(y*) restricted to V(A) is V θ_{x,y}
    let v = c.alpha_matrix();
    let p_triv = dual_op(c, &c.qg.haar.functional);
    let stars: Vec<Mat> = (0..n).map(|b| Ok(lm.of(&c.alpha(&c.star(&c.basis(b)))?))).collect::<Result<_>>()?;
    let mut reduced_identity: f64 = 0.0;
    for x in 0..n {
        let left = &alphas[x] * &p_triv;
        for y in 0..n {
            let pi = &left * &stars[y];
            let mut theta = Mat::zeros(n, n);
            for z in 0..n {
                let e = right_inner(c, &c.basis(y), &c.basis(z))?;
                theta.set_column(z, &c.mul(&c.basis(x), &e)?);
            }
            reduced_identity = reduced_identity.max((&pi * &v - &v * theta).max_abs());
        }
    }
    let invariance = basis.iter().map(|x| containment_residual(&v, &(x * &v), tol)).fold(0.0, f64::max);

    Ok(CrossedProduct {
        space_dim: d,
        generators,
        report: CrossedProductReport {
            dim: basis.len(),
            product_closure,
            adjoint_closure,
            block_dims,
            corners,
            reduced_identity,
            invariance,
        },
        basis,
        gram,
        inv_gram,
        projections,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SaturationReport {
    pub saturated: bool,
    /// `dim(A ⋊ G) − dim [(A⋊G)_triv (A⋊G)_triv*]`.
    pub defect: usize,
    pub ideal_dim: usize,
    pub crossed_dim: usize,
    /// Codimension of `(1⊗p_π)J` in `(1⊗p_π)(A ⋊ G)`.
    pub per_pi: Vec<PiDefect>,
}

/// `(A⋊G)_triv = span L_{α(a)}(1 ⊗ p_triv)`, since `λ(ω) p_triv = ω(1) p_triv`;
/// the products `x y*` are then `L_{α(a)}(1⊗p_triv)L_{α(b)}`.
pub fn saturation_check(c: &Coaction, cp: &CrossedProduct, tol: f64) -> Result<SaturationReport> {
    require_finite(c)?;
    let n = c.dim();
    let d = cp.space_dim;
    let lm = LeftMul::new(c)?;
    let alphas: Vec<Mat> = (0..n).map(|a| lm.of(c.alpha_basis(a))).collect();
    let p = dual_op(c, &c.qg.haar.functional);
    let mut ideal = Vec::with_capacity(n * n);
    for x in &alphas {
        let xp = x * &p;
        for y in &alphas {
            ideal.push(&xp * y);
        }
    }
    let inside = containment_residual(&stack(&cp.basis, d), &stack(&ideal, d), tol);
    if inside > tol.sqrt() {
        return Err(Error::Falsified(format!("(A⋊G)_triv(A⋊G)_triv* leaves A⋊G ({inside:e})")));
    }
    let ideal_dim = span_dim(&ideal, d, tol);
    let per_pi = c
        .qg
        .irreps
        .iter()
        .zip(&cp.projections)
        .zip(&cp.report.corners)
        .map(|((r, q), corner)| {
            let j: Vec<Mat> = ideal.iter().map(|x| q * x).collect();
            PiDefect { label: r.label.clone(), codim: corner.left_dim - span_dim(&j, d, tol) }
        })
        .collect();
    let defect = cp.dim() - ideal_dim;
    Ok(SaturationReport { saturated: defect == 0, defect, ideal_dim, crossed_dim: cp.dim(), per_pi })
}
