//! Right and left Hilbert `B`-module structures on `A ⊡ H_π`:
//! `⟨ξ, η⟩_B = Σ ξ_i* η_i` and `_B⟨ξ, η⟩ = (ι ⊗ θ_π)(ξ η*)`, with finite
//! reconstructing families on each side.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::inclusion::{min_eigenvalue_in_b, WassermannInclusion};
use super::rep::{equivariant_space, tuple, AmpElement};
use crate::action::Coaction;
use crate::error::{Error, Result};
use crate::fdlin::linalg::{columns, hermitian_eigen, random_complex_vector, rank, Mat, MaxAbs, Vector, C64};
use crate::galois::witness::{from_spectral, spectral_form};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    Right,
    Left,
}

/// Families with `Σ_j ξ_j ⟨η_j, ξ⟩_B = ξ` (right) or
/// `Σ_i _B⟨ξ, ξ_i⟩ η_i = ξ` (left).
#[derive(Clone, Debug)]
pub struct Frame {
    pub side: Side,
    pub xi: Vec<Vec<Vector>>,
    pub eta: Vec<Vec<Vector>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StructureReport {
    pub label: String,
    pub module_dim: usize,
    pub right_generators: usize,
    pub left_generators: usize,
    /// Smallest eigenvalue of each Gram matrix in `M_k(B)`.
    pub right_gram_min: Option<f64>,
    pub left_gram_min: Option<f64>,
    pub right_reconstruction: f64,
    pub left_reconstruction: f64,
    /// `⟨bξ, η⟩_B − ⟨ξ, b*η⟩_B` and `_B⟨ξb, η⟩ − _B⟨ξ, ηb*⟩`.
    pub right_balance: f64,
    pub left_balance: f64,
    /// Smallest eigenvalue of `⟨ξ, ξ⟩_B` and `_B⟨ξ, ξ⟩` over random `ξ`.
    pub positivity: Option<f64>,
}

pub struct TwoSidedStructure {
    pub module: Vec<Vec<Vector>>,
    pub right: Frame,
    pub left: Frame,
    pub report: StructureReport,
}

pub fn right_inner(c: &Coaction, xi: &[Vector], eta: &[Vector]) -> Result<Vector> {
    let mut out = Vector::zeros(c.dim());
    for (a, b) in xi.iter().zip(eta) {
        out += c.mul(&c.star(a), b)?;
    }
    Ok(out)
}

pub fn left_inner(c: &Coaction, inc: &WassermannInclusion, xi: &[Vector], eta: &[Vector]) -> Result<Vector> {
    Ok(inc.expectation(&AmpElement::outer(c, xi, eta)?))
}

fn act(c: &Coaction, side: Side, z: &[Vector], b: &Vector) -> Result<Vec<Vector>> {
    match side {
        Side::Right => tuple::right(c, z, b),
        Side::Left => tuple::left(c, b, z),
    }
}

/// Random combinations of the module basis until `span{z·b}` (or `span{b·z}`)
/// is everything.
fn generators(
    c: &Coaction,
    module: &[Vec<Vector>],
    bs: &[Vector],
    side: Side,
    rng: &mut ChaCha8Rng,
    tol: f64,
) -> Result<Vec<Vec<Vector>>> {
    let target = module.len();
    let n = module.first().map_or(0, |z| z.len());
    let d = c.dim();
    let mut gens = Vec::new();
    let mut span: Vec<Vector> = Vec::new();
    let mut have = 0;
    for _ in 0..(4 * target + 8) {
        if have == target {
            break;
        }
        let w = random_complex_vector(rng, target);
        let mut cand = vec![Vector::zeros(d); n];
        for (z, s) in module.iter().zip(w.iter()) {
            for (a, x) in cand.iter_mut().zip(z) {
                *a += x * *s;
            }
        }
        let mut trial = span.clone();
        for b in bs {
            trial.push(tuple::flat(&act(c, side, &cand, b)?));
        }
        let r = rank(&columns(&trial, n * d), tol);
        if r > have {
            have = r;
            span = trial;
            gens.push(cand);
        }
    }
    if have < target {
        return Err(Error::SpanDeficiency(format!("{side:?} generators reach {have} of {target} dimensions")));
    }
    Ok(gens)
}

/// Moore-Penrose inverse of a positive matrix over `B`.
fn pseudo_inverse(c: &Coaction, inc: &WassermannInclusion, g: &[Vec<Vector>], tol: f64) -> Result<(Vec<Vec<Vector>>, f64)> {
    let (blocks, scalar) = spectral_form(c, &inc.fixed, g, tol)?;
    let mut lmin = f64::INFINITY;
    let inv: Vec<Mat> = blocks
        .iter()
        .map(|b| {
            let h = (b + b.adjoint()).scale(0.5);
            let (vals, vecs) = hermitian_eigen(&h);
            lmin = lmin.min(vals[0]);
            let top = vals.last().copied().unwrap_or(0.0).max(1.0);
            let mut out = Mat::zeros(h.nrows(), h.ncols());
            for (k, &l) in vals.iter().enumerate() {
                if l > tol.sqrt() * top {
                    let v = vecs.column(k);
                    out += v * v.adjoint() * C64::new(1.0 / l, 0.0);
                }
            }
            out
        })
        .collect();
    Ok((from_spectral(c, &inv, scalar, g.len()), lmin))
}

fn frame(
    c: &Coaction,
    inc: &WassermannInclusion,
    module: &[Vec<Vector>],
    side: Side,
    rng: &mut ChaCha8Rng,
    tol: f64,
) -> Result<(Frame, Option<f64>)> {
    let bs = inc.b_basis();
    let gens = generators(c, module, &bs, side, rng, tol)?;
    let k = gens.len();
    let gram: Vec<Vec<Vector>> = gens
        .iter()
        .map(|a| {
            gens.iter()
                .map(|b| match side {
                    Side::Right => right_inner(c, a, b),
                    Side::Left => left_inner(c, inc, a, b),
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    if k == 0 {
        return Ok((Frame { side, xi: vec![], eta: vec![] }, None));
    }
    let (pinv, lmin) = pseudo_inverse(c, inc, &gram, tol)?;
    let n = inc.n();
    let mut eta = Vec::with_capacity(k);
    for a in 0..k {
        let mut e = vec![Vector::zeros(c.dim()); n];
        for b in 0..k {
            // right: η_a = Σ_b z_b P_ba; left: η̃_a = Σ_b P_ab z_b
            let t = match side {
                Side::Right => tuple::right(c, &gens[b], &pinv[b][a])?,
                Side::Left => tuple::left(c, &pinv[a][b], &gens[b])?,
            };
            tuple::axpy(&mut e, &t);
        }
        eta.push(e);
    }
    Ok((Frame { side, xi: gens, eta }, Some(lmin)))
}

/// Largest reconstruction error of a frame over `module`.
pub fn reconstruction(c: &Coaction, inc: &WassermannInclusion, f: &Frame, module: &[Vec<Vector>]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for z in module {
        let mut back = vec![Vector::zeros(c.dim()); z.len()];
        for (x, e) in f.xi.iter().zip(&f.eta) {
            let t = match f.side {
                Side::Right => tuple::right(c, x, &right_inner(c, e, z)?)?,
                Side::Left => tuple::left(c, &left_inner(c, inc, z, x)?, e)?,
            };
            tuple::axpy(&mut back, &t);
        }
        worst = worst.max(tuple::distance(&back, z));
    }
    Ok(worst)
}

pub fn two_sided_structure(c: &Coaction, inc: &WassermannInclusion, seed: u64, tol: f64) -> Result<TwoSidedStructure> {
    let module = equivariant_space(c, &inc.rep, tol)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (right, right_gram_min) = frame(c, inc, &module, Side::Right, &mut rng, tol)?;
    let (left, left_gram_min) = frame(c, inc, &module, Side::Left, &mut rng, tol)?;
    let right_reconstruction = reconstruction(c, inc, &right, &module)?;
    let left_reconstruction = reconstruction(c, inc, &left, &module)?;

    let bs = inc.b_basis();
    let (mut right_balance, mut left_balance) = (0.0f64, 0.0f64);
    for x in &module {
        for y in &module {
            for b in &bs {
                let bs_ = c.star(b);
                let r = right_inner(c, &tuple::left(c, b, x)?, y)? - right_inner(c, x, &tuple::left(c, &bs_, y)?)?;
                let l = left_inner(c, inc, &tuple::right(c, x, b)?, y)? - left_inner(c, inc, x, &tuple::right(c, y, &bs_)?)?;
                right_balance = right_balance.max(r.max_abs());
                left_balance = left_balance.max(l.max_abs());
            }
        }
    }
    let mut positivity: Option<f64> = None;
    if !module.is_empty() {
        for _ in 0..4 {
            let w = random_complex_vector(&mut rng, module.len());
            let mut xi = vec![Vector::zeros(c.dim()); inc.n()];
            for (z, s) in module.iter().zip(w.iter()) {
                for (a, x) in xi.iter_mut().zip(z) {
                    *a += x * *s;
                }
            }
            for v in [right_inner(c, &xi, &xi)?, left_inner(c, inc, &xi, &xi)?] {
                match min_eigenvalue_in_b(c, &inc.fixed, &v) {
                    Some(l) => positivity = Some(positivity.map_or(l, |p| p.min(l))),
                    None => break,
                }
            }
        }
    }
    let report = StructureReport {
        label: inc.rep.label.clone(),
        module_dim: module.len(),
        right_generators: right.xi.len(),
        left_generators: left.xi.len(),
        right_gram_min,
        left_gram_min,
        right_reconstruction,
        left_reconstruction,
        right_balance,
        left_balance,
        positivity,
    };
    Ok(TwoSidedStructure { module, right, left, report })
}
