//! Projectivity witnesses: `A_π ≅ p Bⁿ` as right Hilbert `B`-modules.
//!
//! Generators `x_1..x_n` of `A_π` are picked greedily until their right
//! `B`-span is all of `A_π`. The frame operator `S(a) = Σ x_i E_B(x_i* a)` is
//! then invertible and `ζ_i = S^{-1/2} x_i` is a Parseval frame:
//! `a = Σ ζ_i ⟨ζ_i, a⟩_B`. Its Gram matrix `p_ij = ⟨ζ_i, ζ_j⟩_B` is a
//! projection in `M_n(B)`, and `a ↦ (⟨ζ_i, a⟩_B)_i` maps `A_π` onto `p Bⁿ`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use super::cut;
use crate::action::bounds::amplified_blocks;
use crate::action::isotypic::{as_scalar, fixed_points, isotypical, right_inner, FixedPointData, IsotypicalComponent};
use crate::action::Coaction;
use crate::error::{Error, Result};
use crate::fdlin::json::{vector_from_json, vector_to_json};
use crate::fdlin::linalg::{columns, hermitian_eigen, hermitian_fn, hermitian_part, random_complex_vector, rank, Mat, MaxAbs, Vector};

#[derive(Clone, Debug, Serialize)]
pub struct WitnessReport {
    pub n: usize,
    pub component_dim: usize,
    /// `dim_C p Bⁿ`.
    pub module_dim: usize,
    /// Rank of `p` as a scalar matrix, when `B = C·1`.
    pub rank: Option<usize>,
    /// Distance of the spectrum of `p` from 1/2.
    pub gap: f64,
    /// Change made by the spectral cleanup.
    pub cleanup: f64,
    pub idempotence: f64,
    pub self_adjointness: f64,
    /// `‖Σ ζ_i ⟨ζ_i, a⟩_B − a‖` on a basis of `A_π`.
    pub reconstruction: f64,
    /// `‖⟨Φa, Φa'⟩ − ⟨a, a'⟩_B‖` with `Φa = (⟨ζ_i, a⟩_B)_i`.
    pub inner_product: f64,
    /// `‖pΦa − Φa‖`.
    pub fixed_range: f64,
    /// `‖E_π ζ_i − ζ_i‖`.
    pub in_component: f64,
    /// Stored against recomputed `p`; zero for a fresh witness.
    pub projection_match: f64,
}

impl WitnessReport {
    pub fn max_residual(&self) -> f64 {
        [
            self.idempotence,
            self.self_adjointness,
            self.reconstruction,
            self.inner_product,
            self.fixed_range,
            self.in_component,
            self.projection_match,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.module_dim == self.component_dim && self.max_residual() <= tol && self.gap >= 10.0 * tol
    }
}

#[derive(Clone, Debug)]
pub struct ProjectivityWitness {
    pub action: String,
    pub label: String,
    pub pi: usize,
    pub generators: Vec<Vector>,
    pub frame: Vec<Vector>,
    /// `p_ij ∈ B` in coordinates of `A`.
    pub projection: Vec<Vec<Vector>>,
    pub report: WitnessReport,
}

impl ProjectivityWitness {
    pub fn n(&self) -> usize {
        self.frame.len()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "action": self.action,
            "pi": self.label,
            "n": self.n(),
            "generators": self.generators.iter().map(vector_to_json).collect::<Vec<_>>(),
            "frame": self.frame.iter().map(vector_to_json).collect::<Vec<_>>(),
            "projection": self.projection.iter().map(|r| r.iter().map(vector_to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "rank": self.report.rank,
        })
    }

    /// Reads a witness back and re-verifies it against `c`.
    pub fn from_json(c: &Coaction, v: &Value, tol: f64) -> Result<Self> {
        let label = v.get("pi").and_then(Value::as_str).ok_or_else(|| Error::Invalid("witness: missing pi".into()))?;
        let pi = c.qg.irrep_index(label)?;
        let list = |key: &str| -> Result<Vec<Vector>> {
            v.get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Invalid(format!("witness: missing {key}")))?
                .iter()
                .map(vector_from_json)
                .collect()
        };
        let generators = list("generators")?;
        let frame = list("frame")?;
        let projection = v
            .get("projection")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Invalid("witness: missing projection".into()))?
            .iter()
            .map(|row| row.as_array().ok_or_else(|| Error::Invalid("witness: projection row".into()))?.iter().map(vector_from_json).collect())
            .collect::<Result<Vec<Vec<Vector>>>>()?;
        let n = frame.len();
        if projection.len() != n || projection.iter().any(|r| r.len() != n) || frame.iter().any(|z| z.len() != c.dim()) {
            return Err(Error::Shape(format!("witness: frame of {n} elements does not match its projection")));
        }
        let mut w = ProjectivityWitness {
            action: v.get("action").and_then(Value::as_str).unwrap_or("").to_string(),
            label: label.to_string(),
            pi,
            generators,
            frame,
            projection,
            report: empty_report(),
        };
        w.report = verify_witness(c, &w, tol)?;
        Ok(w)
    }
}

fn empty_report() -> WitnessReport {
    WitnessReport {
        n: 0,
        component_dim: 0,
        module_dim: 0,
        rank: None,
        gap: f64::INFINITY,
        cleanup: 0.0,
        idempotence: 0.0,
        self_adjointness: 0.0,
        reconstruction: 0.0,
        inner_product: 0.0,
        fixed_range: 0.0,
        in_component: 0.0,
        projection_match: 0.0,
    }
}

/// Greedy generating set of `A_π` as a right `B`-module.
fn generators(c: &Coaction, iso: &IsotypicalComponent, fp: &FixedPointData, tol: f64) -> Result<Vec<Vector>> {
    let target = iso.dim();
    let bs: Vec<Vector> = (0..fp.dim()).map(|l| fp.basis.column(l).into_owned()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(c.qg.seed ^ 0x5157_0000 ^ iso.pi as u64);
    let mut first = Vec::new();
    if c.qg.irreps[iso.pi].is_trivial && fp.unit_in_b {
        first.push(c.unit());
    }
    let mut gens = Vec::new();
    let mut span: Vec<Vector> = Vec::new();
    let mut have = 0;
    for attempt in 0..(4 * target + 8) {
        if have == target {
            break;
        }
        let cand = match first.get(attempt) {
            Some(u) => u.clone(),
            None => cut(c, &iso.combine(&random_complex_vector(&mut rng, target))),
        };
        let mut trial = span.clone();
        for b in &bs {
            trial.push(c.mul(&cand, b)?);
        }
        let r = rank(&columns(&trial, c.dim()), tol);
        if r > have {
            have = r;
            span = trial;
            gens.push(cand);
        }
    }
    if have < target {
        return Err(Error::SpanDeficiency(format!("{}: generators reach {have} of {target} dimensions", iso.label)));
    }
    Ok(gens)
}

/// `p` as Hermitian matrices: one per block of `M_n(A)`, or one scalar
/// matrix when `B = C·1`.
pub(crate) fn spectral_form(c: &Coaction, fp: &FixedPointData, p: &[Vec<Vector>], tol: f64) -> Result<(Vec<Mat>, bool)> {
    let n = p.len();
    if fp.dim() == 1 && fp.unit_in_b {
        let mut s = Mat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                s[(i, j)] = as_scalar(c, &p[i][j], tol.sqrt())
                    .ok_or_else(|| Error::Falsified("⟨ζ_i, ζ_j⟩_B is not a scalar although B = C".into()))?;
            }
        }
        return Ok((vec![s], true));
    }
    match (&c.fd, c.is_graded()) {
        (Some(fd), false) => Ok((amplified_blocks(fd, p), false)),
        _ => Err(Error::Unsupported("spectral cleanup needs matrix blocks or B = C".into())),
    }
}

pub(crate) fn from_spectral(c: &Coaction, blocks: &[Mat], scalar: bool, n: usize) -> Vec<Vec<Vector>> {
    let d = c.dim();
    let mut out = vec![vec![Vector::zeros(d); n]; n];
    if scalar {
        let unit = c.unit();
        for i in 0..n {
            for j in 0..n {
                out[i][j] = &unit * blocks[0][(i, j)];
            }
        }
        return out;
    }
    let fd = c.fd.as_ref().expect("block form implies matrix blocks");
    let offs = fd.block_offsets();
    for (bi, &nb) in fd.block_dims.iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                for r in 0..nb {
                    for s in 0..nb {
                        out[i][j][offs[bi] + r * nb + s] = blocks[bi][(i * nb + r, j * nb + s)];
                    }
                }
            }
        }
    }
    out
}

fn gram_matrix(c: &Coaction, frame: &[Vector]) -> Result<Vec<Vec<Vector>>> {
    frame.iter().map(|a| frame.iter().map(|b| right_inner(c, a, b)).collect()).collect()
}

fn assess(
    c: &Coaction,
    iso: &IsotypicalComponent,
    fp: &FixedPointData,
    frame: &[Vector],
    p: &[Vec<Vector>],
    tol: f64,
) -> Result<WitnessReport> {
    let n = frame.len();
    let d = c.dim();
    let mut r = empty_report();
    r.n = n;
    r.component_dim = iso.dim();
    let basis: Vec<Vector> = (0..iso.dim()).map(|k| cut(c, &iso.element(k))).collect();
    for i in 0..n {
        for j in 0..n {
            let mut sq = Vector::zeros(d);
            for k in 0..n {
                sq += c.mul(&p[i][k], &p[k][j])?;
            }
            r.idempotence = r.idempotence.max((sq - &p[i][j]).max_abs());
            r.self_adjointness = r.self_adjointness.max((c.star(&p[j][i]) - &p[i][j]).max_abs());
        }
        r.in_component = r.in_component.max((c.e_pi(iso.pi, &cut(c, &frame[i]))? - &frame[i]).max_abs());
    }
    let phis: Vec<Vec<Vector>> =
        basis.iter().map(|a| frame.iter().map(|z| right_inner(c, z, a)).collect::<Result<_>>()).collect::<Result<_>>()?;
    for (a, ph) in basis.iter().zip(&phis) {
        let mut back = Vector::zeros(d);
        for (z, e) in frame.iter().zip(ph) {
            back += c.mul(z, e)?;
        }
        r.reconstruction = r.reconstruction.max((back - a).max_abs());
        for i in 0..n {
            let mut v = Vector::zeros(d);
            for j in 0..n {
                v += c.mul(&p[i][j], &ph[j])?;
            }
            r.fixed_range = r.fixed_range.max((v - &ph[i]).max_abs());
        }
    }
    for (a, pa) in basis.iter().zip(&phis) {
        for (b, pb) in basis.iter().zip(&phis) {
            let mut s = Vector::zeros(d);
            for (u, v) in pa.iter().zip(pb) {
                s += c.mul(&c.star(u), v)?;
            }
            r.inner_product = r.inner_product.max((s - right_inner(c, a, b)?).max_abs());
        }
    }
    let bs: Vec<Vector> = (0..fp.dim()).map(|l| fp.basis.column(l).into_owned()).collect();
    let mut cols = Vec::new();
    for j in 0..n {
        for b in &bs {
            let mut v = Vector::zeros(n * d);
            for i in 0..n {
                v.rows_mut(i * d, d).copy_from(&c.mul(&p[i][j], b)?);
            }
            cols.push(v);
        }
    }
    r.module_dim = if cols.is_empty() { 0 } else { rank(&columns(&cols, n * d), tol) };
    if n > 0 {
        match spectral_form(c, fp, p, tol) {
            Ok((blocks, scalar)) => {
                let eig: Vec<f64> = blocks.iter().flat_map(|b| hermitian_eigen(b).0).collect();
                r.gap = eig.iter().map(|l| (l - 0.5).abs()).fold(f64::INFINITY, f64::min);
                if scalar {
                    r.rank = Some(eig.iter().filter(|&&l| l > 0.5).count());
                }
            }
            // entries outside B: no spectrum to speak of
            Err(Error::Falsified(_)) => r.gap = 0.0,
            Err(e) => return Err(e),
        }
    } else {
        r.rank = fp.dim().eq(&1).then_some(0);
    }
    Ok(r)
}

pub fn projectivity_witness(c: &Coaction, pi: usize, tol: f64) -> Result<ProjectivityWitness> {
    let iso = isotypical(c, pi, tol)?;
    let fp = fixed_points(c, tol)?;
    let label = iso.label.clone();
    if iso.dim() == 0 {
        let report = assess(c, &iso, &fp, &[], &[], tol)?;
        return Ok(ProjectivityWitness { action: c.name.clone(), label, pi, generators: vec![], frame: vec![], projection: vec![], report });
    }
    let gens = generators(c, &iso, &fp, tol)?;
    let dcomp = iso.dim();
    let f: Vec<Vector> = (0..dcomp).map(|k| cut(c, &iso.element(k))).collect();
    let fm = columns(&f, c.dim());

    let mut h = Mat::zeros(dcomp, dcomp);
    let mut s = Mat::zeros(dcomp, dcomp);
    for l in 0..dcomp {
        let mut sf = Vector::zeros(c.dim());
        for x in &gens {
            sf += c.mul(x, &right_inner(c, x, &f[l])?)?;
        }
        s.set_column(l, &(fm.adjoint() * sf));
        for k in 0..dcomp {
            h[(k, l)] = c.tau_apply(&right_inner(c, &f[k], &f[l])?);
        }
    }
    let hs = hermitian_fn(&h, f64::sqrt);
    let his = hermitian_fn(&h, |x| 1.0 / x.sqrt());
    let o = hermitian_part(&(&hs * &s * &his));
    let low = hermitian_eigen(&o).0[0];
    if low <= tol {
        return Err(Error::SpanDeficiency(format!("{label}: frame operator has eigenvalue {low:e}")));
    }
    let t = &his * hermitian_fn(&o, |x| 1.0 / x.sqrt()) * &hs;
    let frame: Vec<Vector> = gens.iter().map(|x| &fm * (&t * (fm.adjoint() * x))).collect();

    let raw = gram_matrix(c, &frame)?;
    let n = frame.len();
    let (blocks, scalar) = spectral_form(c, &fp, &raw, tol)?;
    let eig: Vec<f64> = blocks.iter().flat_map(|b| hermitian_eigen(b).0).collect();
    let gap = eig.iter().map(|l| (l - 0.5).abs()).fold(f64::INFINITY, f64::min);
    if gap < 10.0 * tol {
        return Err(Error::NoSpectralGap { what: format!("{label}: frame Gram matrix"), gap });
    }
    let cleaned: Vec<Mat> = blocks.iter().map(|b| hermitian_fn(b, |x| if x > 0.5 { 1.0 } else { 0.0 })).collect();
    let projection = from_spectral(c, &cleaned, scalar, n);
    let mut cleanup: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            cleanup = cleanup.max((&projection[i][j] - &raw[i][j]).max_abs());
        }
    }
    let mut report = assess(c, &iso, &fp, &frame, &projection, tol)?;
    report.cleanup = cleanup;
    Ok(ProjectivityWitness { action: c.name.clone(), label, pi, generators: gens, frame, projection, report })
}

/// Re-derives every witness identity from the stored frame and projection.
pub fn verify_witness(c: &Coaction, w: &ProjectivityWitness, tol: f64) -> Result<WitnessReport> {
    let iso = isotypical(c, w.pi, tol)?;
    let fp = fixed_points(c, tol)?;
    let mut report = assess(c, &iso, &fp, &w.frame, &w.projection, tol)?;
    let fresh = gram_matrix(c, &w.frame)?;
    let mut m: f64 = 0.0;
    for (a, b) in fresh.iter().flatten().zip(w.projection.iter().flatten()) {
        m = m.max((a - b).max_abs());
    }
    report.projection_match = m;
    Ok(report)
}
