//! Fixed points, `E_B`, and the isotypical components `A_π = E_π(A)`.

use serde::Serialize;

use super::Coaction;
use crate::error::{Error, Result};
use crate::fdlin::linalg::{column_space, containment_residual, null_space, vec_of, Mat, MaxAbs, Vector, C64};
use crate::fdlin::star::resize;
use crate::fdlin::FdCStarAlgebra;
use crate::qg::QuantumGroup;

#[derive(Clone, Debug)]
pub struct FixedPointData {
    /// Columns spanning `B` (coordinates of `A`).
    pub basis: Mat,
    /// `E_B` on the first `n` coordinates.
    pub e_b: Mat,
    pub unit_in_b: bool,
    pub report: FixedPointReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct FixedPointReport {
    pub dim: usize,
    pub idempotence: f64,
    /// Distance between `im E_B` and the kernel of `α - (·)⊗1`.
    pub image: f64,
    pub unital: f64,
    pub bimodularity: f64,
    /// Smallest eigenvalue of `E_B(x* x)` over matrix units and the unit;
    /// absent when `A` is not a finite direct sum of matrix blocks.
    pub min_positivity: Option<f64>,
}

impl FixedPointData {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }
}

/// `α(x) - x ⊗ 1` for every window basis vector, stacked as columns.
fn invariance_matrix(c: &Coaction) -> Result<Mat> {
    let (d, m) = (c.dim(), c.qg.m);
    let unit = c.qg.unit();
    let mut out = Mat::zeros(d * m, c.n);
    for i in 0..c.n {
        let mut x = c.alpha_basis(i).clone();
        for s in 0..m {
            x[(i, s)] -= unit[s];
        }
        out.set_column(i, &vec_of(&x));
    }
    Ok(out)
}

pub fn fixed_points(c: &Coaction, tol: f64) -> Result<FixedPointData> {
    let d = c.dim();
    let ker = null_space(&invariance_matrix(c)?, tol);
    let mut basis = Mat::zeros(d, ker.ncols());
    basis.view_mut((0, 0), (c.n, ker.ncols())).copy_from(&ker);

    let mut e_b = Mat::zeros(d, c.n);
    for i in 0..c.n {
        e_b.set_column(i, &c.e_b(&c.basis(i))?);
    }
    let square = corner_square(&e_b, c.n);
    let idempotence = (&square * &square - &square).max_abs();
    let image = crate::fdlin::linalg::subspace_distance(&column_space(&e_b, tol), &basis, tol);
    let unit = c.unit();
    let unital = (c.e_b(&unit)? - &unit).max_abs();
    let unit_in_b = containment_residual(&basis, &Mat::from_column_slice(d, 1, unit.as_slice()), tol) < tol.sqrt();

    // E_B(b x b') = b E_B(x) b' on low-degree x
    let half = c.prefix(c.window() / 2);
    let mut bimodularity: f64 = 0.0;
    for k in 0..basis.ncols() {
        let b = basis.column(k).into_owned();
        for i in 0..half {
            let x = c.basis(i);
            let l = c.e_b(&c.mul(&b, &x)?)? - c.mul(&b, &c.e_b(&x)?)?;
            let r = c.e_b(&c.mul(&x, &b)?)? - c.mul(&c.e_b(&x)?, &b)?;
            bimodularity = bimodularity.max(l.max_abs()).max(r.max_abs());
        }
    }

    let min_positivity = match &c.fd {
        Some(fd) => {
            let mut worst = f64::INFINITY;
            for i in 0..c.n {
                let x = c.basis(i);
                let p = c.e_b(&c.mul(&c.star(&x), &x)?)?;
                worst = worst.min(fd.element(&p).min_eigenvalue());
            }
            Some(worst)
        }
        None => None,
    };

    Ok(FixedPointData {
        report: FixedPointReport { dim: basis.ncols(), idempotence, image, unital, bimodularity, min_positivity },
        basis,
        e_b,
        unit_in_b,
    })
}

/// Leading `n × n` block of a `dim × n` map, i.e. the map as an endomorphism
/// of the window.
fn corner_square(x: &Mat, n: usize) -> Mat {
    x.view((0, 0), (n, n)).into_owned()
}

#[derive(Clone, Debug)]
pub struct IsotypicalComponent {
    pub pi: usize,
    pub label: String,
    /// Columns spanning `A_π`.
    pub basis: Mat,
    /// `E_π` on the first `n` coordinates.
    pub e_pi: Mat,
    pub idempotence: f64,
    /// `‖χ_π‖`, available when `C(G)` is a finite direct sum of matrix blocks.
    pub c_pi: Option<f64>,
}

impl IsotypicalComponent {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn element(&self, k: usize) -> Vector {
        self.basis.column(k).into_owned()
    }

    /// `Σ_k t_k x_k` for a coefficient vector over the basis.
    pub fn combine(&self, t: &Vector) -> Vector {
        &self.basis * t
    }
}

pub fn character_norm(qg: &QuantumGroup, pi: usize) -> Result<Option<f64>> {
    if qg.ambient_dim() != qg.m {
        return Ok(None);
    }
    match qg.alg.matrix_blocks() {
        Some(b) => Ok(Some(FdCStarAlgebra::new(b.to_vec())?.element(&qg.irreps[pi].chi).operator_norm())),
        None => Ok(None),
    }
}

pub fn isotypical(c: &Coaction, pi: usize, tol: f64) -> Result<IsotypicalComponent> {
    if pi >= c.qg.irreps.len() {
        return Err(Error::UnknownLabel(format!("irreducible #{pi}")));
    }
    let d = c.dim();
    let mut e_pi = Mat::zeros(d, c.n);
    for i in 0..c.n {
        e_pi.set_column(i, &c.e_pi(pi, &c.basis(i))?);
    }
    let square = corner_square(&e_pi, c.n);
    let idempotence = (&square * &square - &square).max_abs() + crate::fdlin::star::outside_corner(&e_pi, c.n, c.n);
    Ok(IsotypicalComponent {
        pi,
        label: c.qg.irreps[pi].label.clone(),
        basis: column_space(&e_pi, tol),
        e_pi,
        idempotence,
        c_pi: character_norm(&c.qg, pi)?,
    })
}

pub fn isotypical_by_label(c: &Coaction, label: &str, tol: f64) -> Result<IsotypicalComponent> {
    isotypical(c, c.qg.irrep_index(label)?, tol)
}

/// `⟨x, y⟩_B = E_B(x* y)`.
pub fn right_inner(c: &Coaction, x: &Vector, y: &Vector) -> Result<Vector> {
    c.e_b(&c.mul(&c.star(x), y)?)
}

/// `_B⟨x, y⟩ = E_B(x y*)`.
pub fn left_inner(c: &Coaction, x: &Vector, y: &Vector) -> Result<Vector> {
    c.e_b(&c.mul(x, &c.star(y))?)
}

/// Irreducibles occurring in `π₁ × π₂`, read off from which coefficient
/// spaces the products `u^{π₁}_ij u^{π₂}_kl` meet. Errors when the products
/// leave the window.
pub fn tensor_constituents(qg: &QuantumGroup, p1: usize, p2: usize) -> Result<Vec<usize>> {
    let (a, b) = (&qg.irreps[p1], &qg.irreps[p2]);
    let mut prods = Vec::new();
    for x in &a.u {
        for y in &b.u {
            let z = qg.mul(x, y)?;
            if z.rows(qg.m, z.len() - qg.m).iter().any(|t| t.norm() > 1e-10) {
                return Err(Error::DegreeOverflow { needed: 0, max: 0 });
            }
            prods.push(resize(&z, qg.m));
        }
    }
    let mut out = Vec::new();
    for (k, rho) in qg.irreps.iter().enumerate() {
        let hit = prods.iter().any(|z| {
            (qg.coproduct(z) * &rho.omega).max_abs() > 1e-8
        });
        if hit {
            out.push(k);
        }
    }
    Ok(out)
}

/// Worst distance of `x y` from `⊕_{ρ ⊂ π₁×π₂} A_ρ` over basis pairs.
pub fn product_inclusion(c: &Coaction, a: &IsotypicalComponent, b: &IsotypicalComponent, tol: f64) -> Result<f64> {
    let rhos = tensor_constituents(&c.qg, a.pi, b.pi)?;
    let mut worst: f64 = 0.0;
    for i in 0..a.dim() {
        for j in 0..b.dim() {
            let z = c.mul(&a.element(i), &b.element(j))?;
            if z.rows(c.n, z.len() - c.n).max_abs() > tol {
                return Err(Error::DegreeOverflow { needed: 0, max: c.window() as usize });
            }
            let zw = resize(&z, c.n);
            let mut proj = Vector::zeros(c.dim());
            for &r in &rhos {
                proj += c.e_pi(r, &zw)?;
            }
            worst = worst.max((proj - resize(&zw, c.dim())).max_abs());
        }
    }
    Ok(worst)
}

/// `A_{π̄} = A_π*`: distance between the two subspaces.
pub fn conjugation_distance(c: &Coaction, a: &IsotypicalComponent, conj: &IsotypicalComponent, tol: f64) -> f64 {
    let stars: Vec<Vector> = (0..a.dim()).map(|k| c.star(&a.element(k))).collect();
    let s = crate::fdlin::linalg::columns(&stars, c.dim());
    crate::fdlin::linalg::subspace_distance(&column_space(&s, tol), &conj.basis, tol)
}

/// Smallest eigenvalue of the `M_k(B)` matrix `(g_ij)` inside `M_k(A)`.
/// Needs `A` to be a direct sum of matrix blocks, or `B = C·1`.
pub fn matrix_min_eigenvalue(c: &Coaction, g: &[Vec<Vector>], fixed: &FixedPointData) -> Result<f64> {
    let k = g.len();
    if let Some(fd) = &c.fd {
        let mut worst = f64::INFINITY;
        let offs = fd.block_offsets();
        for (bi, &nb) in fd.block_dims.iter().enumerate() {
            let mut big = Mat::zeros(k * nb, k * nb);
            for i in 0..k {
                for j in 0..k {
                    for r in 0..nb {
                        for s in 0..nb {
                            big[(i * nb + r, j * nb + s)] = g[i][j][offs[bi] + r * nb + s];
                        }
                    }
                }
            }
            let h = crate::fdlin::linalg::hermitian_part(&big);
            worst = worst.min(crate::fdlin::linalg::hermitian_eigen(&h).0[0]);
        }
        return Ok(worst);
    }
    if fixed.dim() == 1 && fixed.unit_in_b {
        let unit = c.unit();
        let u0 = unit.iter().position(|z| z.norm() > 0.5).unwrap_or(0);
        let mut s = Mat::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                s[(i, j)] = g[i][j][u0] / unit[u0];
            }
        }
        let h = crate::fdlin::linalg::hermitian_part(&s);
        return Ok(crate::fdlin::linalg::hermitian_eigen(&h).0[0]);
    }
    Err(Error::Unsupported("positivity in M_k(B) needs matrix blocks or B = C".into()))
}

/// Scalar multiple `λ` with `x = λ·1`, if `x` is one.
pub fn as_scalar(c: &Coaction, x: &Vector, tol: f64) -> Option<C64> {
    let unit = c.unit();
    let u0 = unit.iter().position(|z| z.norm() > 0.5)?;
    let lam = x[u0] / unit[u0];
    ((x - &unit * lam).max_abs() <= tol).then_some(lam)
}
