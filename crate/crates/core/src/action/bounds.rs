//! Amplified Pimsner–Popa inequality and the norm comparison on `A_π`,
//! for actions on finite direct sums of matrix blocks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::isotypic::{right_inner, IsotypicalComponent};
use super::Coaction;
use crate::error::{Error, Result};
use crate::fdlin::linalg::{hermitian_eigen, hermitian_part, random_complex_vector, Mat, Vector, C64};
use crate::fdlin::FdCStarAlgebra;

#[derive(Clone, Debug, Serialize)]
pub struct PimsnerPopaReport {
    pub label: String,
    pub c_pi: f64,
    pub trials: usize,
    /// Smallest eigenvalue of `c² (ι⊗E_B)(a*a) − (ι⊗E_π)(a)*(ι⊗E_π)(a)`.
    pub worst_slack: f64,
    pub worst_amplification: usize,
}

fn require_fd(c: &Coaction) -> Result<&FdCStarAlgebra> {
    c.fd.as_ref().filter(|_| !c.is_graded()).ok_or_else(|| Error::Unsupported("bound checks need a finite-dimensional algebra".into()))
}

/// `M_k(A)` element, entry `(i, j)` in coordinates of `A`, as one matrix per block.
pub(crate) fn amplified_blocks(fd: &FdCStarAlgebra, a: &[Vec<Vector>]) -> Vec<Mat> {
    let k = a.len();
    let offs = fd.block_offsets();
    fd.block_dims
        .iter()
        .enumerate()
        .map(|(bi, &nb)| {
            let mut big = Mat::zeros(k * nb, k * nb);
            for i in 0..k {
                for j in 0..k {
                    for r in 0..nb {
                        for s in 0..nb {
                            big[(i * nb + r, j * nb + s)] = a[i][j][offs[bi] + r * nb + s];
                        }
                    }
                }
            }
            big
        })
        .collect()
}

fn apply_entrywise(a: &[Vec<Vector>], f: impl Fn(&Vector) -> Result<Vector>) -> Result<Vec<Vec<Vector>>> {
    a.iter().map(|row| row.iter().map(&f).collect()).collect()
}

fn star_product(c: &Coaction, x: &[Vec<Vector>], y: &[Vec<Vector>]) -> Result<Vec<Vec<Vector>>> {
    let k = x.len();
    let mut out = vec![vec![Vector::zeros(c.dim()); k]; k];
    for i in 0..k {
        for j in 0..k {
            for l in 0..k {
                out[i][j] += c.mul(&c.star(&x[l][i]), &y[l][j])?;
            }
        }
    }
    Ok(out)
}

/// Slack for one amplified element.
pub fn pimsner_popa_slack(c: &Coaction, iso: &IsotypicalComponent, a: &[Vec<Vector>]) -> Result<f64> {
    let fd = require_fd(c)?;
    let cp = iso.c_pi.ok_or_else(|| Error::Unsupported("‖χ_π‖ unavailable".into()))?;
    let ea = apply_entrywise(a, |x| c.e_pi(iso.pi, x))?;
    let lhs = apply_entrywise(&star_product(c, a, a)?, |x| c.e_b(x))?;
    let rhs = star_product(c, &ea, &ea)?;
    let mut worst = f64::INFINITY;
    for (l, r) in amplified_blocks(fd, &lhs).iter().zip(amplified_blocks(fd, &rhs)) {
        let d = hermitian_part(&(l * C64::new(cp * cp, 0.0) - r));
        worst = worst.min(hermitian_eigen(&d).0[0]);
    }
    Ok(worst)
}

pub fn pimsner_popa_check(c: &Coaction, iso: &IsotypicalComponent, trials: usize, seed: u64) -> Result<PimsnerPopaReport> {
    require_fd(c)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::INFINITY;
    let mut worst_k = 1;
    for _ in 0..trials {
        let k = rng.random_range(1..=3);
        let a: Vec<Vec<Vector>> = (0..k).map(|_| (0..k).map(|_| random_complex_vector(&mut rng, c.dim())).collect()).collect();
        let s = pimsner_popa_slack(c, iso, &a)?;
        if s < worst {
            worst = s;
            worst_k = k;
        }
    }
    Ok(PimsnerPopaReport {
        label: iso.label.clone(),
        c_pi: iso.c_pi.unwrap_or(f64::NAN),
        trials,
        worst_slack: worst,
        worst_amplification: worst_k,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct NormComparison {
    /// Worst `‖⟨a,a⟩_B‖^{1/2} − ‖a‖`; non-positive when the lower bound holds.
    pub lower_excess: f64,
    /// Worst `‖a‖ − c_π ‖⟨a,a⟩_B‖^{1/2}`; non-positive when the upper bound holds.
    pub upper_excess: f64,
}

pub fn norm_comparison(c: &Coaction, iso: &IsotypicalComponent, trials: usize, seed: u64) -> Result<NormComparison> {
    let fd = require_fd(c)?;
    let cp = iso.c_pi.ok_or_else(|| Error::Unsupported("‖χ_π‖ unavailable".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lower_excess = f64::NEG_INFINITY;
    let mut upper_excess = f64::NEG_INFINITY;
    if iso.dim() == 0 {
        return Ok(NormComparison { lower_excess: 0.0, upper_excess: 0.0 });
    }
    for _ in 0..trials {
        let a = iso.combine(&random_complex_vector(&mut rng, iso.dim()));
        let na = fd.element(&a).operator_norm();
        let ip = fd.element(&right_inner(c, &a, &a)?).operator_norm().sqrt();
        lower_excess = lower_excess.max(ip - na);
        upper_excess = upper_excess.max(na - cp * ip);
    }
    Ok(NormComparison { lower_excess, upper_excess })
}
