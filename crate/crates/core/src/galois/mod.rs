//! Freeness of a coaction: localized Galois maps, the Ellwood condition, the
//! crossed product and saturation, range projections of the Galois
//! isometries, and projectivity witnesses for the isotypical components.
//!
//! Elements of `A ⊗ C(G)` are `dim × m` coefficient matrices; flattened they
//! use the row index `r * m + s`, which is also the order in which operators
//! on `A ⊗ L²(G)` act.

pub mod crossed;
pub mod map;
pub mod range;
pub mod witness;

use serde::Serialize;

pub use crossed::{crossed_product, saturation_check, CrossedProduct, SaturationReport};
pub use map::{ellwood_check, galois_map, isometry_trials, EllwoodReport, GaloisMap, PiDefect};
pub use range::{range_projection_check, RangeProjectionReport};
pub use witness::{projectivity_witness, verify_witness, ProjectivityWitness, WitnessReport};

use crate::action::Coaction;
use crate::error::{Error, Result};
use crate::fdlin::linalg::{hermitian_eigen, Mat, Vector, C64};
use crate::fdlin::star::resize;

/// Row-major flattening, `x[(r, s)]` at `r * cols + s`.
pub(crate) fn flat(x: &Mat) -> Vector {
    let c = x.ncols();
    Vector::from_fn(x.len(), |i, _| x[(i / c, i % c)])
}

pub(crate) fn unflat(v: &Vector, rows: usize, cols: usize) -> Mat {
    Mat::from_fn(rows, cols, |r, s| v[r * cols + s])
}

/// Drops coordinates past the window, where `α` is known; isotypical bases
/// come out of an SVD and carry rounding noise there.
pub(crate) fn cut(c: &Coaction, x: &Vector) -> Vector {
    resize(&resize(x, c.n), c.dim())
}

/// `(ι ⊗ φ)(X* Y)` for coefficient matrices over the window.
pub(crate) struct PhiSlice {
    vals: Vec<f64>,
    vecs: Mat,
}

impl PhiSlice {
    pub(crate) fn new(c: &Coaction) -> Self {
        let (vals, vecs) = hermitian_eigen(&c.qg.gram);
        PhiSlice { vals, vecs: vecs.map(|z| z.conj()) }
    }

    /// With `gram = V D V*`, `(ι⊗φ)(X*Y) = Σ_k d_k (X V̄)_k* (Y V̄)_k`.
    pub(crate) fn apply(&self, c: &Coaction, x: &Mat, y: &Mat) -> Result<Vector> {
        // entries below rounding of the whole matrix are dropped, or a
        // truncated core reads them as leaving the window
        let clean = |z: Mat| {
            let floor = 1e-13 * z.iter().map(|v| v.norm()).fold(0.0, f64::max);
            z.map(|v| if v.norm() <= floor { C64::new(0.0, 0.0) } else { v })
        };
        let zx = clean(x * &self.vecs);
        let zy = clean(y * &self.vecs);
        let mut out = Vector::zeros(c.dim());
        for (k, d) in self.vals.iter().enumerate() {
            let a = zx.column(k).into_owned();
            let b = zy.column(k).into_owned();
            if a.iter().all(|z| z.norm() == 0.0) || b.iter().all(|z| z.norm() == 0.0) {
                continue;
            }
            out += c.mul(&c.star(&a), &b)? * C64::new(*d, 0.0);
        }
        Ok(out)
    }
}

/// The two freeness verdicts and the Galois-map cross-check.
#[derive(Clone, Debug, Serialize)]
pub struct VerdictPair {
    pub action: String,
    pub ellwood: EllwoodReport,
    /// Absent for truncated cores, where the crossed product is not formed.
    pub saturation: Option<SaturationReport>,
    pub free: bool,
    pub saturated: Option<bool>,
    /// Every localized Galois map is bijective.
    pub galois_unitary: bool,
    pub agree: bool,
    /// Per-irreducible saturation defects match the Galois codimensions.
    pub defects_agree: Option<bool>,
}

/// Runs both checks without judging them.
pub fn freeness_verdicts(c: &Coaction, tol: f64) -> Result<VerdictPair> {
    let ellwood = ellwood_check(c, tol)?;
    let saturation = if c.is_graded() || c.fd.is_none() { None } else { Some(saturation_check(c, &crossed_product(c, tol)?, tol)?) };
    let saturated = saturation.as_ref().map(|s| s.saturated);
    let defects_agree = saturation.as_ref().map(|s| {
        s.defect == ellwood.defect
            && s.per_pi.iter().zip(&ellwood.per_pi).all(|(a, b)| a.label == b.label && a.codim == b.codim)
    });
    let agree = ellwood.agree && saturated.is_none_or(|s| s == ellwood.free) && defects_agree.unwrap_or(true);
    Ok(VerdictPair {
        action: c.name.clone(),
        free: ellwood.free,
        galois_unitary: ellwood.galois_unitary,
        ellwood,
        saturation,
        saturated,
        agree,
        defects_agree,
    })
}

/// Free iff saturated iff every `G_π` is unitary; a disagreement is an error.
pub fn theorem_freeness_equivalence(c: &Coaction, tol: f64) -> Result<VerdictPair> {
    let v = freeness_verdicts(c, tol)?;
    if !v.agree {
        return Err(Error::Falsified(format!(
            "{}: ellwood free={} (defect {}), saturated={:?}, galois unitary={}",
            c.name, v.free, v.ellwood.defect, v.saturated, v.galois_unitary
        )));
    }
    Ok(v)
}
