//! `Index(E) = dim_q(H_π)² · 1` for irreducible `π` under a free action,
//! checked on generic quasi-bases and through the explicit families
//! built from `h, g` with `φ(u_ij* h) = δ_ij`, `φ(v_ij* g) = δ_ij`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::inclusion::{build_inclusion, WassermannInclusion};
use super::quasi::{assess, quasi_basis};
use super::rep::{equivariant_space, haar_pairing, sweedler, tuple, unknowns, AmpElement, Rep};
use super::structure::{reconstruction, right_inner, Frame, Side};
use crate::action::isotypic::as_scalar;
use crate::action::Coaction;
use crate::error::{Error, Result};
use crate::fdlin::linalg::{
    columns, hermitian_fn, null_space, random_complex_vector, solve_min_norm, Mat, MaxAbs, Vector, C64,
};
use crate::galois::{flat, map::images};

#[derive(Clone, Debug, Serialize)]
pub struct ConstructionReport {
    /// `‖(φ(u_ij* h)) − 1‖` and the same for `g`.
    pub h_residual: f64,
    pub g_residual: f64,
    /// `‖Σ α(x_k)(y_k* ⊗ 1) − 1 ⊗ h‖` and the same for `g`.
    pub decomposition_h: f64,
    pub decomposition_g: f64,
    /// `Σ_k v_ik* v_jk = δ_ij` for `v` in the basis `(f_i)`.
    pub conjugate_unitarity: f64,
    /// Distance of all four families from `A ⊡ H_π`.
    pub membership: f64,
    pub right_reconstruction: f64,
    pub left_reconstruction: f64,
    /// `Σ ⟨η̃, ξ̃⟩_B` as a scalar, and its distance from that scalar times 1.
    pub middle: Option<f64>,
    pub middle_deviation: f64,
    /// `Σ_i f_i f_i*`.
    pub f_sum: f64,
    pub left_identity: f64,
    pub right_identity: f64,
    /// `‖Σ v w − dim_q² · 1‖` for the assembled quasi-basis.
    pub index_residual: f64,
    /// Same quantity for a second, non-minimal choice of `h, g`.
    pub second_solution_residual: f64,
    /// `‖Index − Index'‖` between the two choices.
    pub solution_independence: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct IndexTheoremReport {
    pub label: String,
    pub qdim: f64,
    pub qdim_sq: f64,
    pub index_scalar: Option<f64>,
    /// `‖Index(E) − dim_q² · 1‖`, generic quasi-basis.
    pub residual: f64,
    /// `‖Index − Index'‖` for two independently seeded quasi-bases.
    pub independence: f64,
    pub centrality: f64,
    pub quasi_basis_size: usize,
    pub construction: ConstructionReport,
}

/// Min-norm `h` on the first `k` window coordinates with `φ(w_ij* h) = δ_ij`,
/// and the residual.
fn dual_element(c: &Coaction, w: &[Vector], n: usize, k: usize, tol: f64) -> (Vector, Mat, f64) {
    let qg = &c.qg;
    let mut a = Mat::zeros(n * n, k);
    for (r, u) in w.iter().enumerate() {
        a.set_row(r, &haar_pairing(qg, u).rows(0, k).transpose());
    }
    let mut rhs = Vector::zeros(n * n);
    for i in 0..n {
        rhs[i * n + i] = C64::new(1.0, 0.0);
    }
    let (h, res) = solve_min_norm(&a, &rhs, tol);
    (h, a, res)
}

/// `(x_k, y_k)` with `Σ α(x_k)(y_k* ⊗ 1) = 1 ⊗ h`, from x_k = e_k.
fn decompose(c: &Coaction, h: &Vector, na: usize, tol: f64) -> Result<(Vec<Vector>, Vec<Vector>, f64)> {
    let (d, m) = (c.dim(), c.qg.m);
    let h = crate::fdlin::star::resize(h, m);
    let xs: Vec<Vector> = (0..na).map(|k| c.basis(k)).collect();
    let imgs = images(c, &xs, na)?;
    let sys = columns(&imgs.iter().map(flat).collect::<Vec<_>>(), d * m);
    let unit = c.unit();
    let target = Vector::from_fn(d * m, |i, _| unit[i / m] * h[i % m]);
    let (coef, res) = solve_min_norm(&sys, &target, tol);
    let mut x_out = Vec::new();
    let mut y_out = Vec::new();
    for k in 0..na {
        let ys = Vector::from_fn(d, |b, _| if b < na { coef[k * na + b] } else { C64::new(0.0, 0.0) });
        if ys.max_abs() > 1e-14 {
            x_out.push(xs[k].clone());
            y_out.push(c.star(&ys));
        }
    }
    Ok((x_out, y_out, res))
}

/// `Σ_p ω_pi(x₍₁₎) x₍₀₎ ⊗ e_p` for each `i`, with `ω_pi = φ(w_pi* ·)`.
fn contract(c: &Coaction, w: &[Vector], n: usize, x: &Vector) -> Result<Vec<Vec<Vector>>> {
    let funcs: Vec<Vector> = w.iter().map(|u| haar_pairing(&c.qg, u)).collect();
    (0..n).map(|i| (0..n).map(|p| sweedler(c, x, &funcs[p * n + i])).collect()).collect()
}

struct Built {
    right: Frame,
    left: Frame,
    h_res: f64,
    g_res: f64,
    dec_h: f64,
    dec_g: f64,
}

/// The four families for given `h, g`. `fmat[(p, q)]` is the coefficient of
/// `e_q*` in `f_p`; the conjugate corepresentation is `v = F ū F⁻¹`.
fn build(c: &Coaction, rep: &Rep, v: &[Vector], fmat: &Mat, h: &Vector, g: &Vector, res: (f64, f64), tol: f64) -> Result<Built> {
    let n = rep.n;
    let na = unknowns(c, rep.degree(c));
    let (xs, ys, dec_h) = decompose(c, h, na, tol)?;
    let (ws, zs, dec_g) = decompose(c, g, na, tol)?;
    let worst = dec_h.max(dec_g);
    if worst > tol.sqrt() {
        return Err(Error::Unsolvable { what: format!("1 ⊗ h in span α(A)(A ⊗ 1) for {}", rep.label), residual: worst });
    }
    let mut right = Frame { side: Side::Right, xi: vec![], eta: vec![] };
    for (x, y) in xs.iter().zip(&ys) {
        let cx = contract(c, &rep.u, n, x)?;
        let cy = contract(c, &rep.u, n, y)?;
        for i in 0..n {
            right.xi.push(cx[i].clone());
            right.eta.push(cy[i].clone());
        }
    }
    // ξ̃ = Σ_p φ(z₍₁₎* v_pi) z₍₀₎* ⊗ f_p*, with f_p* = Σ_q conj(F_pq) e_q
    let tilde = |z: &Vector| -> Result<Vec<Vec<Vector>>> {
        let cz = contract(c, v, n, z)?;
        Ok((0..n)
            .map(|i| {
                (0..n)
                    .map(|q| {
                        let mut out = Vector::zeros(c.dim());
                        for p in 0..n {
                            out += c.star(&cz[i][p]) * fmat[(p, q)].conj();
                        }
                        out
                    })
                    .collect()
            })
            .collect())
    };
    let mut left = Frame { side: Side::Left, xi: vec![], eta: vec![] };
    for (w, z) in ws.iter().zip(&zs) {
        let tz = tilde(z)?;
        let tw = tilde(w)?;
        for i in 0..n {
            left.xi.push(tz[i].clone());
            left.eta.push(tw[i].clone());
        }
    }
    Ok(Built { right, left, h_res: res.0, g_res: res.1, dec_h, dec_g })
}

fn pairs_of(c: &Coaction, b: &Built) -> Result<Vec<(AmpElement, AmpElement)>> {
    let mut pairs = Vec::new();
    for (xt, et) in b.left.xi.iter().zip(&b.left.eta) {
        for (x, e) in b.right.xi.iter().zip(&b.right.eta) {
            pairs.push((AmpElement::outer(c, x, et)?, AmpElement::outer(c, xt, e)?));
        }
    }
    Ok(pairs)
}

fn construction(c: &Coaction, inc: &WassermannInclusion, tol: f64) -> Result<ConstructionReport> {
    let rep = &inc.rep;
    let n = rep.n;
    let qg = &c.qg;
    let fmat = hermitian_fn(&rep.q, f64::sqrt) * C64::new(rep.qdim.sqrt(), 0.0);
    let finv = fmat.clone().try_inverse().ok_or_else(|| Error::NotPositive("F is singular".into()))?;
    let mut v = vec![Vector::zeros(qg.m); n * n];
    for i in 0..n {
        for l in 0..n {
            for k in 0..n {
                for j in 0..n {
                    let s = fmat[(i, k)] * finv[(j, l)];
                    if s.norm() > 1e-15 {
                        v[i * n + l] += qg.star(rep.entry(k, j)) * s;
                    }
                }
            }
        }
    }
    let mut conjugate_unitarity: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut s = Vector::zeros(qg.ambient_dim());
            for k in 0..n {
                s += qg.mul(&qg.star(&v[i * n + k]), &v[j * n + k])?;
            }
            let mut e = crate::fdlin::star::resize(&qg.alg.unit(), qg.ambient_dim());
            if i != j {
                e.fill(C64::new(0.0, 0.0));
            }
            conjugate_unitarity = conjugate_unitarity.max((s - e).max_abs());
        }
    }

    let k = unknowns(c, rep.degree(c));
    let (h, ah, hr) = dual_element(c, &rep.u, n, k, tol);
    let (g, ag, gr) = dual_element(c, &v, n, k, tol);
    let built = build(c, rep, &v, &fmat, &h, &g, (hr, gr), tol)?;

    let module = equivariant_space(c, rep, tol)?;
    let mflat: Vec<Vector> = module.iter().map(|z| tuple::flat(z)).collect();
    let mdist = |z: &Vec<Vector>| {
        let f = tuple::flat(z);
        let mut r = f.clone();
        for b in &mflat {
            r -= b * b.dotc(&f);
        }
        r.max_abs()
    };
    let membership = built
        .right
        .xi
        .iter()
        .chain(&built.right.eta)
        .chain(&built.left.xi)
        .chain(&built.left.eta)
        .map(mdist)
        .fold(0.0, f64::max);
    let right_reconstruction = reconstruction(c, inc, &built.right, &module)?;
    let left_reconstruction = reconstruction(c, inc, &built.left, &module)?;
    let mut mid = Vector::zeros(c.dim());
    for (xt, et) in built.left.xi.iter().zip(&built.left.eta) {
        mid += right_inner(c, et, xt)?;
    }
    let middle = as_scalar(c, &mid, tol.sqrt()).map(|z| z.re);
    let middle_deviation = match middle {
        Some(l) => (&mid - c.unit() * C64::new(l, 0.0)).max_abs(),
        None => f64::INFINITY,
    };
    let f_sum: f64 = fmat.iter().map(|z| z.norm_sqr()).sum();

    let target = AmpElement::diagonal(n, &(c.unit() * C64::new(rep.qdim * rep.qdim, 0.0)));
    let pairs = pairs_of(c, &built)?;
    let (index, qb) = assess(c, inc, &rep.label, &pairs, tol)?;
    let index_residual = index.sub(&target).max_abs();

    // a second solution: add kernel directions of the constraints
    let mut rng = ChaCha8Rng::seed_from_u64(qg.seed ^ 0x4a11);
    let shift = |a: &Mat, x: &Vector, rng: &mut ChaCha8Rng| {
        let k = null_space(a, tol);
        if k.ncols() == 0 {
            return x.clone();
        }
        let scale = C64::new(0.5 / (k.ncols() as f64).sqrt(), 0.0);
        let w = random_complex_vector(rng, k.ncols());
        x + k * w * scale
    };
    let h2 = shift(&ah, &h, &mut rng);
    let g2 = shift(&ag, &g, &mut rng);
    let built2 = build(c, rep, &v, &fmat, &h2, &g2, (hr, gr), tol)?;
    let pairs2 = pairs_of(c, &built2)?;
    let (index2, _) = assess(c, inc, &rep.label, &pairs2, tol)?;
    Ok(ConstructionReport {
        h_residual: built.h_res,
        g_residual: built.g_res,
        decomposition_h: built.dec_h,
        decomposition_g: built.dec_g,
        conjugate_unitarity,
        membership,
        right_reconstruction,
        left_reconstruction,
        middle,
        middle_deviation,
        f_sum,
        left_identity: qb.left_identity,
        right_identity: qb.right_identity,
        index_residual,
        second_solution_residual: index2.sub(&target).max_abs(),
        solution_independence: index.sub(&index2).max_abs(),
    })
}

/// For irreducible `π`. An unsolvable decomposition of `1 ⊗ h` signals a
/// non-free action (or a window too small) and is an error.
pub fn index_theorem_check(c: &Coaction, pi: usize, tol: f64) -> Result<IndexTheoremReport> {
    let rep = Rep::irreducible(&c.qg, pi);
    let inc = build_inclusion(c, &rep, tol)?;
    let n = rep.n;
    let qb = quasi_basis(c, &inc, c.qg.seed, tol)?;
    let qb2 = quasi_basis(c, &inc, c.qg.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(1), tol)?;
    let qdim_sq = rep.qdim * rep.qdim;
    let target = AmpElement::diagonal(n, &(c.unit() * C64::new(qdim_sq, 0.0)));
    let construction = construction(c, &inc, tol)?;
    Ok(IndexTheoremReport {
        label: rep.label.clone(),
        qdim: rep.qdim,
        qdim_sq,
        index_scalar: qb.report.index_scalar,
        residual: qb.index.sub(&target).max_abs(),
        independence: qb.index.sub(&qb2.index).max_abs(),
        centrality: qb.report.centrality,
        quasi_basis_size: qb.pairs.len(),
        construction,
    })
}
