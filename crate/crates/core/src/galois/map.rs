//! Localized Galois maps `G_π: A_π ⊗_B A → A ⊗ C(G)_π, x ⊗ y ↦ α(x)(y ⊗ 1)`
//! and the Ellwood condition `[α(A)(A ⊗ 1)] = A ⊗ C(G)`.
//!
//! For a truncated core the second factor is cut at degree `W − d_π`, which
//! keeps every product in the isometry check inside the ambient truncation.
//! Surjectivity is then tested on `A_{≤W−d_π} ⊗ C(G)_π` against images with
//! second factor up to degree `W`; the cancellation
//! `a ⊗ u_ij = Σ_l α(u_lj)(S⁻¹(u_il) a ⊗ 1)` shows this is the right budget.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{cut, flat, unflat, PhiSlice};
use crate::action::isotypic::{fixed_points, isotypical, right_inner};
use crate::action::Coaction;
use crate::error::{Error, Result};
use crate::fdlin::linalg::{column_space, columns, random_complex_vector, rank, Mat, MaxAbs, Vector, C64};

#[derive(Clone, Debug)]
pub struct GaloisMap {
    pub pi: usize,
    pub label: String,
    /// Orthonormal basis of `A_π` (columns).
    pub x: Mat,
    /// Second factors are the first `y_dim` basis vectors of `A`.
    pub y_dim: usize,
    /// `G(x_k ⊗ e_j)` flattened, column `k * y_dim + j`.
    pub matrix: Mat,
    /// Orthonormal basis of the span of `xb ⊗ y − x ⊗ by`.
    pub balancing: Mat,
    pub report: GaloisReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct GaloisReport {
    pub label: String,
    pub domain_dim: usize,
    pub balancing_rank: usize,
    pub quotient_dim: usize,
    pub rank: usize,
    /// Dimension of the target, all of `A ⊗ C(G)_π` for finite data.
    pub codomain_dim: usize,
    /// Codimension of the image inside the target.
    pub codim: usize,
    /// Largest image of a balancing vector.
    pub well_defined: f64,
    /// Worst deviation of `(ι⊗φ)(G(t)* G(t))` from `⟨t, t⟩_A`.
    pub isometry: f64,
    pub injective: bool,
    pub surjective: bool,
}

/// `α(x_k)(e_j ⊗ 1)` for every `x_k` and `j < y_count`, at `k * y_count + j`.
pub(crate) fn images(c: &Coaction, xs: &[Vector], y_count: usize) -> Result<Vec<Mat>> {
    let m = c.qg.m;
    let axs: Vec<Mat> = xs.iter().map(|x| c.alpha(&cut(c, x))).collect::<Result<_>>()?;
    let rows: Vec<usize> =
        (0..c.dim()).filter(|&r| axs.iter().any(|a| a.row(r).iter().any(|z| z.norm() > 1e-15))).collect();
    let mut out = vec![Mat::zeros(c.dim(), m); xs.len() * y_count];
    for j in 0..y_count {
        let y = c.basis(j);
        let prods: Vec<(usize, Vector)> = rows.iter().map(|&r| Ok((r, c.mul(&c.basis(r), &y)?))).collect::<Result<_>>()?;
        for (k, a) in axs.iter().enumerate() {
            let g = &mut out[k * y_count + j];
            for (r, ry) in &prods {
                for s in 0..m {
                    let v = a[(*r, s)];
                    if v.norm() > 1e-15 {
                        g.column_mut(s).axpy(v, ry, C64::new(1.0, 0.0));
                    }
                }
            }
        }
    }
    Ok(out)
}

fn flat_columns(ms: &[Mat], rows: usize) -> Mat {
    columns(&ms.iter().map(flat).collect::<Vec<_>>(), rows)
}

/// `e_r ⊗ u_ij` for `r < a_count`, flattened.
fn targets(c: &Coaction, pi: usize, a_count: usize) -> Mat {
    let (d, m) = (c.dim(), c.qg.m);
    let rep = &c.qg.irreps[pi];
    let mut out = Mat::zeros(d * m, a_count * rep.u.len());
    for r in 0..a_count {
        for (k, u) in rep.u.iter().enumerate() {
            for s in 0..m {
                out[(r * m + s, r * rep.u.len() + k)] = u[s];
            }
        }
    }
    out
}

/// Dimension of `span(t)` not covered by `span(s)`.
fn uncovered(s: &Mat, t: &Mat, tol: f64) -> usize {
    let mut both = Mat::zeros(s.nrows(), s.ncols() + t.ncols());
    both.view_mut((0, 0), s.shape()).copy_from(s);
    both.view_mut((0, s.ncols()), t.shape()).copy_from(t);
    rank(&both, tol) - rank(s, tol)
}

/// `max ‖(ι⊗φ)(G(t)* G(t)) − ⟨t, t⟩_A‖` over `trials` random unit tensors.
pub fn isometry_trials(c: &Coaction, g: &GaloisMap, trials: usize, seed: u64) -> Result<f64> {
    let xs: Vec<Vector> = (0..g.x.ncols()).map(|k| denoise(g.x.column(k).into_owned())).collect();
    isometry_deviation(c, &xs, g.y_dim, &g.matrix, trials, seed)
}

/// Drops rounding noise, which a truncated core would read as leaving the
/// window.
fn denoise(mut v: Vector) -> Vector {
    let top = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let floor = (1e-13 * top).max(1e-14);
    for z in v.iter_mut() {
        if z.norm() < floor {
            *z = C64::new(0.0, 0.0);
        }
    }
    v
}

fn isometry_deviation(c: &Coaction, xs: &[Vector], y_dim: usize, matrix: &Mat, trials: usize, seed: u64) -> Result<f64> {
    let (d, m) = (c.dim(), c.qg.m);
    let a_dim = xs.len();
    let dom = a_dim * y_dim;
    let mut eb = vec![vec![Vector::zeros(d); a_dim]; a_dim];
    for k in 0..a_dim {
        for l in 0..a_dim {
            eb[k][l] = denoise(right_inner(c, &xs[k], &xs[l])?);
        }
    }
    let phi = PhiSlice::new(c);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut isometry: f64 = 0.0;
    if dom > 0 {
        for _ in 0..trials {
            let mut t = random_complex_vector(&mut rng, dom);
            t /= C64::new(t.norm(), 0.0);
            let w: Vec<Vector> = (0..a_dim)
                .map(|k| {
                    let mut v = Vector::zeros(d);
                    for j in 0..y_dim {
                        v[j] = t[k * y_dim + j];
                    }
                    v
                })
                .collect();
            let mut source = Vector::zeros(d);
            for k in 0..a_dim {
                let ws = c.star(&w[k]);
                for l in 0..a_dim {
                    source += c.mul(&denoise(c.mul(&ws, &eb[k][l])?), &w[l])?;
                }
            }
            let g = unflat(&(matrix * &t), d, m);
            isometry = isometry.max((phi.apply(c, &g, &g)? - source).max_abs());
        }
    }
    Ok(isometry)
}

pub fn galois_map(c: &Coaction, pi: usize, tol: f64) -> Result<GaloisMap> {
    let iso = isotypical(c, pi, tol)?;
    let a_dim = iso.dim();
    let xs: Vec<Vector> = (0..a_dim).map(|k| cut(c, &iso.element(k))).collect();
    let (d, m) = (c.dim(), c.qg.m);
    let dpi = c.pi_degree(pi) as i64;
    let y_dim = c.prefix(c.window() - dpi);
    let dom = a_dim * y_dim;

    let imgs = images(c, &xs, y_dim)?;
    let matrix = flat_columns(&imgs, d * m);

    let fp = fixed_points(c, tol)?;
    let x = crate::fdlin::linalg::columns(&xs, d);
    let mut bal = Vec::new();
    for l in 0..fp.dim() {
        let b = fp.basis.column(l).into_owned();
        for k in 0..a_dim {
            let coords = x.adjoint() * c.mul(&xs[k], &b)?;
            for j in 0..y_dim {
                let by = c.mul(&b, &c.basis(j))?;
                if by.iter().skip(y_dim).any(|z| z.norm() > tol) {
                    continue;
                }
                let mut v = Vector::zeros(dom);
                for k2 in 0..a_dim {
                    v[k2 * y_dim + j] += coords[k2];
                }
                for j2 in 0..y_dim {
                    v[k * y_dim + j2] -= by[j2];
                }
                bal.push(v);
            }
        }
    }
    let balancing = column_space(&columns(&bal, dom), tol);
    let balancing_rank = balancing.ncols();
    let well_defined = if balancing_rank == 0 { 0.0 } else { (&matrix * &balancing).max_abs() };
    let rk = rank(&matrix, tol);
    let quotient_dim = dom - balancing_rank;

    let seed = c.qg.seed ^ (pi as u64 + 1).wrapping_mul(0x9e37_79b9);
    let isometry = isometry_deviation(c, &xs, y_dim, &matrix, 6, seed)?;

    let target_rows = if c.is_graded() { c.prefix(c.window() - dpi) } else { d };
    let tg = targets(c, pi, target_rows);
    let span = if c.is_graded() { flat_columns(&images(c, &xs, c.prefix(c.window()))?, d * m) } else { matrix.clone() };
    let codim = uncovered(&span, &tg, tol);
    let codomain_dim = rank(&tg, tol);

    if well_defined > tol.sqrt() {
        return Err(Error::Falsified(format!("G_{} does not vanish on the balancing subspace ({well_defined:e})", iso.label)));
    }
    Ok(GaloisMap {
        pi,
        label: iso.label.clone(),
        x,
        y_dim,
        matrix,
        balancing,
        report: GaloisReport {
            label: iso.label,
            domain_dim: dom,
            balancing_rank,
            quotient_dim,
            rank: rk,
            codomain_dim,
            codim,
            well_defined,
            isometry,
            injective: rk == quotient_dim,
            surjective: codim == 0,
        },
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PiDefect {
    pub label: String,
    pub codim: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct EllwoodReport {
    pub free: bool,
    /// Codimension of `[α(A)(A ⊗ 1)]`; the sum of the per-irreducible ones
    /// for truncated cores.
    pub defect: usize,
    pub global_rank: Option<usize>,
    pub global_expected: Option<usize>,
    pub per_pi: Vec<PiDefect>,
    pub galois: Vec<GaloisReport>,
    pub galois_unitary: bool,
    /// Global and per-irreducible verdicts agree.
    pub agree: bool,
    /// Irreducibles of a truncated core whose Galois map leaves the window.
    pub beyond_window: Vec<String>,
}

pub fn ellwood_check(c: &Coaction, tol: f64) -> Result<EllwoodReport> {
    let mut galois = Vec::new();
    let mut beyond_window = Vec::new();
    for pi in 0..c.qg.irreps.len() {
        match galois_map(c, pi, tol) {
            Ok(g) => galois.push(g.report),
            Err(Error::DegreeOverflow { .. }) if c.is_graded() => beyond_window.push(c.qg.irreps[pi].label.clone()),
            Err(e) => return Err(e),
        }
    }
    let per_pi: Vec<PiDefect> = galois.iter().map(|g| PiDefect { label: g.label.clone(), codim: g.codim }).collect();
    let summed: usize = per_pi.iter().map(|p| p.codim).sum();
    let galois_unitary = galois.iter().all(|g| g.injective && g.surjective);
    let (defect, global_rank, global_expected) = if c.is_graded() {
        (summed, None, None)
    } else {
        let xs: Vec<Vector> = (0..c.n).map(|i| c.basis(i)).collect();
        let span = flat_columns(&images(c, &xs, c.n)?, c.dim() * c.qg.m);
        let r = rank(&span, tol);
        let expected = c.dim() * c.qg.m;
        (expected - r, Some(r), Some(expected))
    };
    let agree = defect == summed && (defect == 0) == galois_unitary;
    Ok(EllwoodReport { free: defect == 0, defect, global_rank, global_expected, per_pi, galois, galois_unitary, agree, beyond_window })
}
