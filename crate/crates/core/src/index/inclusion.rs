//! `C = (A ⊗ B(H_π))^G` by its two descriptions, the invariant state `θ_π`
//! and the expectation `E = ι ⊗ θ_π: C → B`.
//!
//! The twisted coaction is `α_π(a ⊗ e_ij) = Σ a₍₀₎ ⊗ e_kl ⊗ u_ki* a₍₁₎ u_lj`
//! and the adjoint coaction `Ad_π(e_ij) = Σ u_ik u_jl* ⊗ e_kl`; `C` is both
//! the fixed points of `α_π` and `{x : (α ⊗ ι)x = (ι ⊗ Ad_π)x}`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::rep::{require_budget, unknowns, AmpElement, Rep, Rows};
use crate::action::isotypic::{as_scalar, fixed_points, FixedPointData};
use crate::action::Coaction;
use crate::error::{Error, Result};
use crate::fdlin::linalg::{
    columns, hermitian_eigen, hermitian_part, random_complex_vector, subspace_distance, Mat, MaxAbs, Vector, C64,
};
use crate::fdlin::star::resize;

#[derive(Clone, Debug, Serialize)]
pub struct ExpectationReport {
    /// Distance of `E(x)` from `B` over a basis of `C`.
    pub into_b: f64,
    pub idempotence: f64,
    pub bimodularity: f64,
    pub unital: f64,
    /// Smallest eigenvalue of `E(x* x)` over random `x ∈ C`; absent when
    /// positivity in `B` cannot be decided.
    pub positivity: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct InclusionReport {
    pub label: String,
    pub n: usize,
    pub dim_c: usize,
    pub dim_b: usize,
    /// Subspace distance between the two descriptions of `C`.
    pub descriptions: f64,
    /// Largest distance of `b ⊗ 1` from `C`.
    pub b_in_c: f64,
    /// Dimension of the space of `Ad_π`-invariant functionals.
    pub invariant_functionals: usize,
    pub theta_unique: bool,
    /// Smallest eigenvalue of the density of `θ_π`.
    pub theta_min_eigenvalue: f64,
    /// `‖ρ − Q⁻¹/Tr Q⁻¹‖` for the density `θ_π = Tr(ρ ·)`.
    pub inverse_q_form: f64,
    /// `‖ρ − Q/Tr Q‖`.
    pub q_form: f64,
    pub expectation: ExpectationReport,
}

pub struct WassermannInclusion {
    pub rep: Rep,
    /// Orthonormal basis of `C` in flat coordinates.
    pub basis: Vec<AmpElement>,
    /// `θ(e_kl)` at `(k, l)`.
    pub theta: Mat,
    pub fixed: FixedPointData,
    pub report: InclusionReport,
}

impl WassermannInclusion {
    pub fn n(&self) -> usize {
        self.rep.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn b_basis(&self) -> Vec<Vector> {
        (0..self.fixed.dim()).map(|l| self.fixed.basis.column(l).into_owned()).collect()
    }

    /// `E(x) = Σ θ(e_ij) x_ij`.
    pub fn expectation(&self, x: &AmpElement) -> Vector {
        let n = self.n();
        let mut out = Vector::zeros(x.entries[0].len());
        for i in 0..n {
            for j in 0..n {
                out += x.entry(i, j) * self.theta[(i, j)];
            }
        }
        out
    }

    /// Distance of `x` from `C`.
    pub fn distance(&self, x: &AmpElement) -> f64 {
        let v = x.flat();
        let mut r = v.clone();
        for b in &self.basis {
            let f = b.flat();
            r -= &f * f.dotc(&v);
        }
        r.max_abs()
    }

    /// `B = C·1`.
    pub fn scalar_b(&self) -> bool {
        self.fixed.dim() == 1 && self.fixed.unit_in_b
    }
}

/// `u_ki* e_s u_lj` at `[((k n + i) n + l) n + j][s]`, ambient coordinates.
fn twist_products(c: &Coaction, rep: &Rep) -> Result<Vec<Vec<Vector>>> {
    let (n, m) = (rep.n, c.qg.m);
    let qg = &c.qg;
    let mut out = Vec::with_capacity(n * n * n * n);
    for k in 0..n {
        for i in 0..n {
            let left = qg.star(rep.entry(k, i));
            let ls: Vec<Vector> = (0..m).map(|s| qg.mul(&left, &qg.basis(s))).collect::<Result<_>>()?;
            for l in 0..n {
                for j in 0..n {
                    out.push(ls.iter().map(|x| qg.mul(x, rep.entry(l, j))).collect::<Result<_>>()?);
                }
            }
        }
    }
    Ok(out)
}

/// `u_ik u_jl*` at `((i n + k) n + j) n + l`, ambient coordinates.
pub(crate) fn adjoint_products(c: &Coaction, rep: &Rep) -> Result<Vec<Vector>> {
    let n = rep.n;
    let qg = &c.qg;
    let mut out = Vec::with_capacity(n * n * n * n);
    for i in 0..n {
        for k in 0..n {
            for j in 0..n {
                for l in 0..n {
                    out.push(qg.mul(rep.entry(i, k), &qg.star(rep.entry(j, l)))?);
                }
            }
        }
    }
    Ok(out)
}

/// Fixed points of `α_π` with entries on the window.
fn twisted_fixed_points(c: &Coaction, rep: &Rep, tol: f64) -> Result<Mat> {
    let (n, na, d) = (rep.n, unknowns(c, 2 * rep.degree(c)), c.dim());
    let amb = c.qg.ambient_dim();
    let unit = resize(&c.qg.alg.unit(), amb);
    let tw = twist_products(c, rep)?;
    let key = |k: usize, l: usize, r: usize, t: usize| ((k * n + l) * d + r) * amb + t;
    let mut rows = Rows::new(n * n * na);
    for i in 0..n {
        for j in 0..n {
            for a in 0..na {
                let col = (i * n + j) * na + a;
                let al = c.alpha_basis(a);
                for r in 0..d {
                    for s in 0..c.qg.m {
                        let v = al[(r, s)];
                        if v.norm() < 1e-15 {
                            continue;
                        }
                        for k in 0..n {
                            for l in 0..n {
                                let p = &tw[((k * n + i) * n + l) * n + j][s];
                                for (t, z) in p.iter().enumerate() {
                                    rows.add(key(k, l, r, t), col, v * z);
                                }
                            }
                        }
                    }
                }
                for (t, z) in unit.iter().enumerate() {
                    rows.add(key(i, j, a, t), col, -z);
                }
            }
        }
    }
    Ok(rows.kernel(tol))
}

/// `{x : α(x_kl) = Σ_ij x_ij ⊗ u_ik u_jl*}` with entries on the window.
fn equivariant_matrices(c: &Coaction, rep: &Rep, ad: &[Vector], tol: f64) -> Result<Mat> {
    let (n, na, d) = (rep.n, unknowns(c, 2 * rep.degree(c)), c.dim());
    let amb = c.qg.ambient_dim();
    let key = |k: usize, l: usize, r: usize, t: usize| ((k * n + l) * d + r) * amb + t;
    let mut rows = Rows::new(n * n * na);
    for k in 0..n {
        for l in 0..n {
            for a in 0..na {
                let col = (k * n + l) * na + a;
                let al = c.alpha_basis(a);
                for r in 0..d {
                    for s in 0..c.qg.m {
                        rows.add(key(k, l, r, s), col, al[(r, s)]);
                    }
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for a in 0..na {
                let col = (i * n + j) * na + a;
                for k in 0..n {
                    for l in 0..n {
                        for (t, z) in ad[((i * n + k) * n + j) * n + l].iter().enumerate() {
                            rows.add(key(k, l, a, t), col, -z);
                        }
                    }
                }
            }
        }
    }
    Ok(rows.kernel(tol))
}

/// Functionals `T_kl = θ(e_kl)` with `Σ_kl T_kl u_ik u_jl* = T_ij 1`.
fn invariant_functionals(c: &Coaction, rep: &Rep, ad: &[Vector], tol: f64) -> Mat {
    let n = rep.n;
    let amb = c.qg.ambient_dim();
    let unit = resize(&c.qg.alg.unit(), amb);
    let mut rows = Rows::new(n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    for (t, z) in ad[((i * n + k) * n + j) * n + l].iter().enumerate() {
                        rows.add((i * n + j) * amb + t, k * n + l, *z);
                    }
                }
            }
            for (t, z) in unit.iter().enumerate() {
                rows.add((i * n + j) * amb + t, i * n + j, -z);
            }
        }
    }
    rows.kernel(tol)
}

fn normalized(t: &Mat) -> Mat {
    let tr: C64 = (0..t.nrows()).map(|i| t[(i, i)]).sum();
    t / tr
}

/// Invariance residual of `T`.
fn invariance_residual(c: &Coaction, rep: &Rep, ad: &[Vector], t: &Mat) -> f64 {
    let n = rep.n;
    let unit = resize(&c.qg.alg.unit(), c.qg.ambient_dim());
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut s = &unit * -t[(i, j)];
            for k in 0..n {
                for l in 0..n {
                    s += &ad[((i * n + k) * n + j) * n + l] * t[(k, l)];
                }
            }
            worst = worst.max(s.max_abs());
        }
    }
    worst
}

/// `λ_min` of `b ∈ B`, when decidable.
pub(crate) fn min_eigenvalue_in_b(c: &Coaction, fixed: &FixedPointData, b: &Vector) -> Option<f64> {
    if let (Some(fd), false) = (&c.fd, c.is_graded()) {
        return Some(fd.element(b).min_eigenvalue());
    }
    if fixed.dim() == 1 && fixed.unit_in_b {
        return as_scalar(c, b, 1e-6).map(|z| z.re);
    }
    None
}

pub fn build_inclusion(c: &Coaction, rep: &Rep, tol: f64) -> Result<WassermannInclusion> {
    require_budget(c, rep)?;
    let (n, na, d) = (rep.n, unknowns(c, 2 * rep.degree(c)), c.dim());
    let fixed = fixed_points(c, tol)?;
    let ker1 = twisted_fixed_points(c, rep, tol)?;
    let ad = adjoint_products(c, rep)?;
    let ker2 = equivariant_matrices(c, rep, &ad, tol)?;
    let descriptions = if ker1.ncols() == ker2.ncols() { subspace_distance(&ker1, &ker2, tol) } else { f64::INFINITY };
    if descriptions > tol.sqrt() {
        return Err(Error::Falsified(format!(
            "fixed points of α_π ({}) and the Ad_π-equivariant matrices ({}) differ by {descriptions:e}",
            ker1.ncols(),
            ker2.ncols()
        )));
    }
    let basis: Vec<AmpElement> =
        (0..ker1.ncols()).map(|k| AmpElement::from_flat(n, na, d, &ker1.column(k).into_owned())).collect();

    let funcs = invariant_functionals(c, rep, &ad, tol);
    let q = &rep.q;
    let qi = q.clone().try_inverse().ok_or_else(|| Error::NotPositive("Q is singular".into()))?;
    // θ = Tr(ρ ·) has T = ρᵗ
    let inverse_form = normalized(&qi.transpose());
    let direct_form = normalized(&q.transpose());
    let theta_unique = funcs.ncols() == 1;
    let theta = if rep.is_irreducible() {
        if !theta_unique {
            return Err(Error::NonUnique { what: format!("Ad_{}-invariant state", rep.label), dim: funcs.ncols() });
        }
        normalized(&Mat::from_fn(n, n, |k, l| funcs[(k * n + l, 0)]))
    } else {
        let res = invariance_residual(c, rep, &ad, &inverse_form);
        if res > tol.sqrt() {
            return Err(Error::Falsified(format!("Tr(Q⁻¹ ·) is not Ad-invariant ({res:e})")));
        }
        inverse_form.clone()
    };
    let rho = theta.transpose();
    let theta_min_eigenvalue = hermitian_eigen(&hermitian_part(&rho)).0[0];
    if theta_min_eigenvalue <= tol {
        return Err(Error::NotPositive(format!("θ_{} is not faithful ({theta_min_eigenvalue:e})", rep.label)));
    }

    let mut inc = WassermannInclusion {
        rep: rep.clone(),
        basis,
        theta,
        fixed,
        report: InclusionReport {
            label: rep.label.clone(),
            n,
            dim_c: ker1.ncols(),
            dim_b: 0,
            descriptions,
            b_in_c: 0.0,
            invariant_functionals: funcs.ncols(),
            theta_unique,
            theta_min_eigenvalue,
            inverse_q_form: (&rho - inverse_form.transpose()).max_abs(),
            q_form: (&rho - direct_form.transpose()).max_abs(),
            expectation: ExpectationReport { into_b: 0.0, idempotence: 0.0, bimodularity: 0.0, unital: 0.0, positivity: None },
        },
    };
    inc.report.dim_b = inc.fixed.dim();
    let bs = inc.b_basis();
    inc.report.b_in_c = bs.iter().map(|b| inc.distance(&AmpElement::diagonal(n, b))).fold(0.0, f64::max);
    inc.report.expectation = expectation_report(c, &inc, &bs)?;
    Ok(inc)
}

fn expectation_report(c: &Coaction, inc: &WassermannInclusion, bs: &[Vector]) -> Result<ExpectationReport> {
    let n = inc.n();
    let fb = columns(bs, c.dim());
    let dist_b = |x: &Vector| {
        let mut r = x.clone();
        for k in 0..fb.ncols() {
            let col = fb.column(k);
            let proj = col.dotc(&r);
            r -= col * proj;
        }
        r.max_abs()
    };
    let mut rep = ExpectationReport { into_b: 0.0, idempotence: 0.0, bimodularity: 0.0, unital: 0.0, positivity: None };
    rep.unital = (inc.expectation(&AmpElement::diagonal(n, &c.unit())) - c.unit()).max_abs();
    for x in &inc.basis {
        let e = inc.expectation(x);
        rep.into_b = rep.into_b.max(dist_b(&e));
        rep.idempotence = rep.idempotence.max((inc.expectation(&AmpElement::diagonal(n, &e)) - &e).max_abs());
        for b in bs {
            for b2 in bs {
                let lhs = inc.expectation(&x.b_mul(c, b)?.mul_b(c, b2)?);
                let rhs = c.mul(&c.mul(b, &e)?, b2)?;
                rep.bimodularity = rep.bimodularity.max((lhs - rhs).max_abs());
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(c.qg.seed ^ 0xe5);
    let mut worst: Option<f64> = None;
    for _ in 0..4 {
        if inc.basis.is_empty() {
            break;
        }
        let w = random_complex_vector(&mut rng, inc.basis.len());
        let mut x = AmpElement::zeros(n, c.dim());
        for (b, z) in inc.basis.iter().zip(w.iter()) {
            x = x.add(&b.scale(*z));
        }
        let e = inc.expectation(&x.star(c).mul(c, &x)?);
        match min_eigenvalue_in_b(c, &inc.fixed, &e) {
            Some(l) => worst = Some(worst.map_or(l, |v: f64| v.min(l))),
            None => return Ok(rep),
        }
    }
    rep.positivity = worst;
    Ok(rep)
}
