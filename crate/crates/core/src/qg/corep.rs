//! Irreducible corepresentations extracted from the dual blocks, their
//! Q-matrices, and quantum characters.
//!
//! Conventions: `Δ(u_ij) = Σ_k u_ik ⊗ u_kj` and unitarity in the form
//! `Σ_k u_ik* u_jk = δ_ij = Σ_k u_ki u_kj*`. A *-representation `ρ` of the
//! dual gives coefficients `v_ij = ρ_ij ∘ λ` with `v v* = v* v = 1`; the
//! corepresentation reported is the entrywise adjoint `u_ij = v_ij*`.

use super::QuantumGroup;
use super::LabelScheme;
use crate::fdlin::linalg::MaxAbs;
use crate::error::{Error, Result};
use crate::fdlin::linalg::{containment_residual, hermitian_eigen, solve_min_norm, columns, Mat, Vector, C64};

#[derive(Clone, Debug)]
pub struct Corep {
    pub label: String,
    pub n: usize,
    /// Coefficients `u_ij` at `i * n + j`, window coordinates.
    pub u: Vec<Vector>,
    pub q: Mat,
    pub qdim: f64,
    /// `ω_π` with `ω_π(u^ρ_ij) = δ_{ρπ} δ_ij`.
    pub omega: Vector,
    /// Quantum character, `φ(χ_π x) = ω_π(x)`.
    pub chi: Vector,
    pub is_trivial: bool,
}

impl Corep {
    pub fn entry(&self, i: usize, j: usize) -> &Vector {
        &self.u[i * self.n + j]
    }

    /// Coefficient matrix of `span{u_ij}` as columns.
    pub fn coefficient_matrix(&self) -> Mat {
        columns(&self.u, self.u[0].len())
    }

    /// Distance of `x` from the coefficient space.
    pub fn projection_residual(&self, _qg: &QuantumGroup, x: &Vector) -> f64 {
        let b = Mat::from_column_slice(x.len(), 1, x.as_slice());
        containment_residual(&self.coefficient_matrix(), &b, 1e-10)
    }

    pub fn q_inverse(&self) -> Mat {
        self.q.clone().try_inverse().expect("Q is positive definite")
    }
}

/// `R_ki = (1/n) Σ_j φ(u_ij u_kj*)`, equal to `Q⁻¹/Tr Q⁻¹` by orthogonality.
fn second_gram(qg: &QuantumGroup, u: &[Vector], n: usize) -> Result<Mat> {
    let mut r = Mat::zeros(n, n);
    for i in 0..n {
        for k in 0..n {
            let mut s = C64::new(0.0, 0.0);
            for j in 0..n {
                s += qg.phi(&qg.mul(&u[i * n + j], &qg.star(&u[k * n + j]))?);
            }
            r[(k, i)] = s / C64::new(n as f64, 0.0);
        }
    }
    Ok(r)
}

/// Q-matrix normalized so that `Tr Q = Tr Q⁻¹`, and `dim_q = Tr Q`.
pub fn compute_q(qg: &QuantumGroup, u: &[Vector], n: usize) -> Result<(Mat, f64)> {
    let r = second_gram(qg, u, n)?;
    let (vals, _) = hermitian_eigen(&r);
    if vals[0] <= 1e-12 {
        return Err(Error::NotPositive(format!("coefficient Gram matrix has eigenvalue {:e}", vals[0])));
    }
    let rinv = r.clone().try_inverse().ok_or_else(|| Error::NotPositive("singular coefficient Gram".into()))?;
    let t = rinv.trace().re;
    let q = crate::fdlin::linalg::hermitian_part(&(rinv / C64::new(t.sqrt(), 0.0)));
    let qdim = q.trace().re;
    Ok((q, qdim))
}

/// Rotates `u` to a basis in which `Q` is diagonal with decreasing entries.
fn diagonalize(qg: &QuantumGroup, u: Vec<Vector>, n: usize) -> Result<Vec<Vector>> {
    let r = second_gram(qg, &u, n)?;
    let off = (&r - Mat::identity(n, n) / C64::new(n as f64, 0.0)).max_abs();
    if off < 1e-10 {
        return Ok(u);
    }
    let (_, w) = hermitian_eigen(&r);
    let v = w.map(|z| z.conj());
    let mut out = vec![Vector::zeros(u[0].len()); n * n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = Vector::zeros(u[0].len());
            for k in 0..n {
                for l in 0..n {
                    let c = v[(k, i)].conj() * v[(l, j)];
                    if c.norm() != 0.0 {
                        acc += &u[k * n + l] * c;
                    }
                }
            }
            out[i * n + j] = acc;
        }
    }
    Ok(out)
}

pub(crate) fn decompose_regular(qg: &QuantumGroup, tol: f64) -> Result<Vec<Corep>> {
    let m = qg.m;
    let ortho: Vec<Mat> = qg.dual.lambda.iter().map(|l| &qg.dual.sqrt_gram * l * &qg.dual.inv_sqrt_gram).collect();
    let mut reps: Vec<(usize, Vec<Vector>)> = Vec::new();
    for block in &qg.dual.blocks {
        let n = block.n;
        let mut v = vec![Vector::zeros(m); n * n];
        for (c, x) in ortho.iter().enumerate() {
            let rho = block.coordinates(x);
            for i in 0..n {
                for j in 0..n {
                    v[i * n + j][c] = rho[(i, j)];
                }
            }
        }
        let u: Vec<Vector> = v.iter().map(|x| qg.star(x)).collect();
        reps.push((n, diagonalize(qg, u, n)?));
    }
    let total: usize = reps.iter().map(|(n, _)| n * n).sum();
    if total != m {
        return Err(Error::SpanDeficiency(format!("irreducible coefficients span {total} of {m} dimensions")));
    }
    // ω_π from the full coefficient basis
    let mut all = Vec::with_capacity(m);
    for (_, u) in &reps {
        all.extend(u.iter().cloned());
    }
    let basis = columns(&all, m);
    let unit = qg.unit();
    let mut out = Vec::with_capacity(reps.len());
    let mut offset = 0;
    for (n, u) in reps {
        let mut target = Vector::zeros(m);
        for i in 0..n {
            target[offset + i * n + i] = C64::new(1.0, 0.0);
        }
        offset += n * n;
        let (omega, res) = solve_min_norm(&basis.transpose(), &target, 1e-12);
        if res > 1e-8 {
            return Err(Error::Unsolvable { what: "ω_π".into(), residual: res });
        }
        let (chi, res) = solve_min_norm(&qg.pairing.transpose(), &omega, 1e-12);
        if res > 1e-8 {
            return Err(Error::Unsolvable { what: "quantum character".into(), residual: res });
        }
        let (q, qdim) = compute_q(qg, &u, n)?;
        let is_trivial = n == 1 && (&u[0] - &unit).max_abs() < 1e-8;
        out.push(Corep { label: String::new(), n, u, q, qdim, omega, chi, is_trivial });
    }
    if out.iter().filter(|c| c.is_trivial).count() != 1 {
        return Err(Error::Falsified("regular decomposition does not contain exactly one trivial corepresentation".into()));
    }
    let _ = tol;
    Ok(out)
}

fn rounded_key(v: &Vector) -> Vec<(i64, i64)> {
    v.iter().map(|z| ((z.re * 1e6).round() as i64, (z.im * 1e6).round() as i64)).collect()
}

pub(crate) fn assign_labels(qg: &QuantumGroup, mut reps: Vec<Corep>, scheme: LabelScheme) -> Result<Vec<Corep>> {
    reps.sort_by(|a, b| {
        (!a.is_trivial, a.n, rounded_key(&a.chi)).cmp(&(!b.is_trivial, b.n, rounded_key(&b.chi)))
    });
    match scheme {
        LabelScheme::Generic => {
            for (k, r) in reps.iter_mut().enumerate() {
                r.label = if k == 0 { "triv".into() } else { format!("pi{k}") };
            }
        }
        LabelScheme::Spin => {
            for r in reps.iter_mut() {
                r.label = match r.n {
                    1 => "triv".into(),
                    n if n % 2 == 0 => format!("spin{}/2", n - 1),
                    n => format!("spin{}", (n - 1) / 2),
                };
            }
        }
        LabelScheme::Cyclic => {
            // C(Z/n) with point masses δ_0, δ_1, …: a character is determined by its value at 1
            let n = qg.m;
            for r in reps.iter_mut() {
                let z = r.u[0][1 % n];
                let k = ((z.arg() / (2.0 * std::f64::consts::PI) * n as f64).round() as i64).rem_euclid(n as i64);
                r.label = format!("chi{k}");
            }
            reps.sort_by_key(|r| r.label[3..].parse::<usize>().unwrap_or(0));
        }
        LabelScheme::Symmetric3 => {
            for r in reps.iter_mut() {
                r.label = match (r.n, r.is_trivial) {
                    (1, true) => "triv".into(),
                    (1, false) => "sign".into(),
                    _ => "std".into(),
                };
            }
        }
    }
    let mut seen = std::collections::HashSet::new();
    for r in &reps {
        if !seen.insert(r.label.clone()) {
            return Err(Error::Invalid(format!("label scheme {scheme:?} produced duplicate label {}", r.label)));
        }
    }
    Ok(reps)
}

/// Largest deviation from both orthogonality relations:
/// `φ(u_ij* v_kl) = δ δ_ik Q_lj / Tr Q` and `φ(u_ij v_kl*) = δ δ_jl (Q⁻¹)_ki / Tr Q⁻¹`.
pub fn orthogonality_check(qg: &QuantumGroup, pi: &Corep, rho: &Corep) -> Result<f64> {
    let same = std::ptr::eq(pi, rho) || pi.label == rho.label;
    let qi = pi.q_inverse();
    let tq = pi.q.trace();
    let tqi = qi.trace();
    let mut worst: f64 = 0.0;
    for i in 0..pi.n {
        for j in 0..pi.n {
            let uij = pi.entry(i, j);
            let us = qg.star(uij);
            for k in 0..rho.n {
                for l in 0..rho.n {
                    let vkl = rho.entry(k, l);
                    let first = qg.phi(&qg.mul(&us, vkl)?);
                    let second = qg.phi(&qg.mul(uij, &qg.star(vkl))?);
                    let (e1, e2) = if same {
                        (
                            if i == k { pi.q[(l, j)] / tq } else { C64::new(0.0, 0.0) },
                            if j == l { qi[(k, i)] / tqi } else { C64::new(0.0, 0.0) },
                        )
                    } else {
                        (C64::new(0.0, 0.0), C64::new(0.0, 0.0))
                    };
                    worst = worst.max((first - e1).norm()).max((second - e2).norm());
                }
            }
        }
    }
    Ok(worst)
}

/// Unitarity residual of both forms.
pub fn unitarity_residual(qg: &QuantumGroup, pi: &Corep) -> Result<f64> {
    let n = pi.n;
    let unit = qg.unit();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut a = Vector::zeros(qg.ambient_dim());
            let mut b = Vector::zeros(qg.ambient_dim());
            for k in 0..n {
                a += qg.mul(&qg.star(pi.entry(i, k)), pi.entry(j, k))?;
                b += qg.mul(pi.entry(k, i), &qg.star(pi.entry(k, j)))?;
            }
            let mut expect = crate::fdlin::star::resize(&unit, qg.ambient_dim());
            if i != j {
                expect.fill(C64::new(0.0, 0.0));
            }
            worst = worst.max((a - &expect).max_abs()).max((b - &expect).max_abs());
        }
    }
    Ok(worst)
}

/// Residual of `Δ(u_ij) = Σ_k u_ik ⊗ u_kj`.
pub fn comultiplicativity_residual(qg: &QuantumGroup, pi: &Corep) -> f64 {
    let n = pi.n;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let d = qg.coproduct(pi.entry(i, j));
            let mut expect = Mat::zeros(qg.m, qg.m);
            for k in 0..n {
                expect += pi.entry(i, k) * pi.entry(k, j).transpose();
            }
            worst = worst.max((d - expect).max_abs());
        }
    }
    worst
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct CharacterReport {
    pub s2_residual: f64,
    pub s_star_residual: f64,
    pub adjoint_in_block_residual: f64,
    /// `max |φ(χ_π u^ρ_ij) − δ_{πρ} δ_ij|`.
    pub defining_residual: f64,
}

pub fn character_report(qg: &QuantumGroup, pi: &Corep) -> CharacterReport {
    let chi = &pi.chi;
    let s = qg.antipode_apply(chi);
    let s2 = qg.antipode_apply(&s);
    let s_star = qg.star(&s);
    let cs = qg.star(chi);
    let adj = containment_residual(&pi.coefficient_matrix(), &Mat::from_column_slice(cs.len(), 1, cs.as_slice()), 1e-10);
    let mut def: f64 = 0.0;
    for rho in &qg.irreps {
        for i in 0..rho.n {
            for j in 0..rho.n {
                let val = chi.transpose() * &qg.pairing * rho.entry(i, j);
                let expect = if rho.label == pi.label && i == j { 1.0 } else { 0.0 };
                def = def.max((val[(0, 0)] - C64::new(expect, 0.0)).norm());
            }
        }
    }
    CharacterReport {
        s2_residual: (s2 - chi).max_abs(),
        s_star_residual: (s_star - chi).max_abs(),
        adjoint_in_block_residual: adj,
        defining_residual: def,
    }
}
