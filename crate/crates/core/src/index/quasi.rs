//! Quasi-bases `v_ij = ξ_j η̃_i*`, `w_ij = ξ̃_i η_j*` assembled from a right
//! and a left reconstructing family, and the index `Σ v_i w_i`.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::inclusion::WassermannInclusion;
use super::rep::{unknowns, AmpElement, Rows};
use super::structure::{two_sided_structure, StructureReport, TwoSidedStructure};
use crate::action::isotypic::as_scalar;
use crate::action::Coaction;
use crate::error::{Error, Result};
use crate::fdlin::json::{vector_from_json, vector_to_json};
use crate::fdlin::linalg::{columns, containment_residual, rank, Mat, Vector};
use crate::fdlin::star::resize;

#[derive(Clone, Debug, Serialize)]
pub struct QuasiBasisReport {
    pub label: String,
    pub size: usize,
    /// `max ‖Σ v_i E(w_i x) − x‖` over a basis of `C`.
    pub left_identity: f64,
    /// `max ‖Σ E(x v_i) w_i − x‖`.
    pub right_identity: f64,
    /// `max ‖[Index(E), x]‖`.
    pub centrality: f64,
    /// `λ` when `Index(E) = λ·1`.
    pub index_scalar: Option<f64>,
    /// `‖Index(E) − E(Index(E))·1‖`.
    pub scalar_deviation: f64,
    /// The `v_i` generate `C` as a right `B`-module.
    pub generates: bool,
}

pub struct QuasiBasis {
    pub label: String,
    pub pairs: Vec<(AmpElement, AmpElement)>,
    pub index: AmpElement,
    pub structure: StructureReport,
    pub report: QuasiBasisReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct FaithfulnessReport {
    pub module_dim: usize,
    /// `dim span{ξ η*}`.
    pub compact_dim: usize,
    pub c_dim: usize,
    /// Distance of the products `ξ η*` from `C`.
    pub containment: f64,
    pub faithful: bool,
}

/// `dim 𝒦(A ⊡ H_π) = dim C`, with `𝒦` spanned by `ξ η*`.
pub fn faithfulness(c: &Coaction, inc: &WassermannInclusion, st: &TwoSidedStructure, tol: f64) -> Result<FaithfulnessReport> {
    let mut prods = Vec::new();
    for x in &st.module {
        for y in &st.module {
            prods.push(AmpElement::outer(c, x, y)?);
        }
    }
    let (compact_dim, containment) = span_in_c(inc, &prods, tol);
    Ok(FaithfulnessReport {
        module_dim: st.module.len(),
        compact_dim,
        c_dim: inc.dim(),
        containment,
        faithful: compact_dim == inc.dim() && containment < tol.sqrt(),
    })
}

fn span_in_c(inc: &WassermannInclusion, xs: &[AmpElement], tol: f64) -> (usize, f64) {
    if xs.is_empty() {
        return (0, 0.0);
    }
    let flats: Vec<Vector> = xs.iter().map(|x| x.flat()).collect();
    let len = flats[0].len();
    let span = columns(&flats, len);
    let cb: Vec<Vector> = inc.basis.iter().map(|b| b.flat()).collect();
    let containment = if cb.is_empty() { span.iter().map(|z| z.norm()).fold(0.0, f64::max) } else { containment_residual(&columns(&cb, len), &span, tol) };
    (rank(&span, tol), containment)
}

/// Left and right quasi-basis identities over a basis of `C`.
pub fn identities(c: &Coaction, inc: &WassermannInclusion, pairs: &[(AmpElement, AmpElement)]) -> Result<(f64, f64)> {
    let n = inc.n();
    let (mut left, mut right) = (0.0f64, 0.0f64);
    for x in &inc.basis {
        let mut l = AmpElement::zeros(n, c.dim());
        let mut r = AmpElement::zeros(n, c.dim());
        for (v, w) in pairs {
            l = l.add(&v.mul_b(c, &inc.expectation(&w.mul(c, x)?))?);
            r = r.add(&w.b_mul(c, &inc.expectation(&x.mul(c, v)?))?);
        }
        left = left.max(l.sub(x).max_abs());
        right = right.max(r.sub(x).max_abs());
    }
    Ok((left, right))
}

pub fn index_element(c: &Coaction, n: usize, pairs: &[(AmpElement, AmpElement)]) -> Result<AmpElement> {
    let mut out = AmpElement::zeros(n, c.dim());
    for (v, w) in pairs {
        out = out.add(&v.mul(c, w)?);
    }
    Ok(out)
}

pub fn assess(c: &Coaction, inc: &WassermannInclusion, label: &str, pairs: &[(AmpElement, AmpElement)], tol: f64) -> Result<(AmpElement, QuasiBasisReport)> {
    let n = inc.n();
    let (left_identity, right_identity) = identities(c, inc, pairs)?;
    let index = index_element(c, n, pairs)?;
    let mut centrality: f64 = 0.0;
    for x in &inc.basis {
        centrality = centrality.max(index.mul(c, x)?.sub(&x.mul(c, &index)?).max_abs());
    }
    let e = inc.expectation(&index);
    let scalar_deviation = index.sub(&AmpElement::diagonal(n, &e)).max_abs();
    let index_scalar = as_scalar(c, &e, tol.sqrt()).filter(|_| scalar_deviation < tol.sqrt()).map(|z| z.re);
    let mut gens = Vec::new();
    for (v, _) in pairs {
        for b in inc.b_basis() {
            gens.push(v.mul_b(c, &b)?);
        }
    }
    let (dim, _) = span_in_c(inc, &gens, tol);
    let report = QuasiBasisReport {
        label: label.to_string(),
        size: pairs.len(),
        left_identity,
        right_identity,
        centrality,
        index_scalar,
        scalar_deviation,
        generates: dim == inc.dim(),
    };
    Ok((index, report))
}

/// Quasi-basis from the reconstructing families of [`two_sided_structure`];
/// `seed` drives the choice of generators.
pub fn quasi_basis(c: &Coaction, inc: &WassermannInclusion, seed: u64, tol: f64) -> Result<QuasiBasis> {
    let st = two_sided_structure(c, inc, seed, tol)?;
    let faith = faithfulness(c, inc, &st, tol)?;
    if !faith.faithful {
        return Err(Error::SpanDeficiency(format!(
            "{}: 𝒦(A ⊡ H) has dimension {} inside C of dimension {}",
            inc.rep.label, faith.compact_dim, faith.c_dim
        )));
    }
    let worst = st.report.right_reconstruction.max(st.report.left_reconstruction);
    if worst > tol.sqrt() {
        return Err(Error::Unsolvable { what: format!("{} reconstructing families", inc.rep.label), residual: worst });
    }
    let mut pairs = Vec::new();
    for (xt, et) in st.left.xi.iter().zip(&st.left.eta) {
        for (x, e) in st.right.xi.iter().zip(&st.right.eta) {
            pairs.push((AmpElement::outer(c, x, et)?, AmpElement::outer(c, xt, e)?));
        }
    }
    let (index, report) = assess(c, inc, &inc.rep.label, &pairs, tol)?;
    if report.left_identity.max(report.right_identity) > tol.sqrt() {
        return Err(Error::Falsified(format!(
            "{}: quasi-basis identities fail ({:e}, {:e})",
            inc.rep.label, report.left_identity, report.right_identity
        )));
    }
    Ok(QuasiBasis { label: inc.rep.label.clone(), pairs, index, structure: st.report, report })
}

#[derive(Serialize, Deserialize)]
struct StoredPair {
    v: Vec<Value>,
    w: Vec<Value>,
}

impl QuasiBasis {
    pub fn to_json(&self, action: &str) -> Value {
        let enc = |x: &AmpElement| x.entries.iter().map(vector_to_json).collect::<Vec<_>>();
        json!({
            "action": action,
            "pi": self.label,
            "n": self.index.n,
            "pairs": self.pairs.iter().map(|(v, w)| json!({"v": enc(v), "w": enc(w)})).collect::<Vec<_>>(),
        })
    }

    /// Reloads pairs and recomputes every check against `inc`.
    pub fn from_json(c: &Coaction, inc: &WassermannInclusion, v: &Value, tol: f64) -> Result<QuasiBasis> {
        let label = v["pi"].as_str().ok_or_else(|| Error::Invalid("quasi-basis needs a \"pi\" label".into()))?;
        if label != inc.rep.label {
            return Err(Error::Invalid(format!("quasi-basis is for {label}, inclusion for {}", inc.rep.label)));
        }
        let n = inc.n();
        let dec = |xs: &[Value]| -> Result<AmpElement> {
            if xs.len() != n * n {
                return Err(Error::Shape(format!("expected {} entries, found {}", n * n, xs.len())));
            }
            let entries = xs.iter().map(|e| vector_from_json(e).map(|x| resize(&x, c.dim()))).collect::<Result<_>>()?;
            Ok(AmpElement { n, entries })
        };
        let stored: Vec<StoredPair> = serde_json::from_value(v["pairs"].clone()).map_err(|e| Error::Invalid(e.to_string()))?;
        let pairs = stored.iter().map(|p| Ok((dec(&p.v)?, dec(&p.w)?))).collect::<Result<Vec<_>>>()?;
        let (index, report) = assess(c, inc, label, &pairs, tol)?;
        let structure = StructureReport {
            label: label.to_string(),
            module_dim: 0,
            right_generators: 0,
            left_generators: 0,
            right_gram_min: None,
            left_gram_min: None,
            right_reconstruction: 0.0,
            left_reconstruction: 0.0,
            right_balance: 0.0,
            left_balance: 0.0,
            positivity: None,
        };
        Ok(QuasiBasis { label: label.to_string(), pairs, index, structure, report })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EigenmatrixReport {
    pub label: String,
    /// `dim A(π)`.
    pub eigen_dim: usize,
    /// `dim span{x y* : x, y ∈ A(π)}`.
    pub span_dim: usize,
    pub c_dim: usize,
    /// Distance of the products from `C`.
    pub containment: f64,
    /// `dim C − dim A(π)A(π)*`.
    pub defect: usize,
}

/// `A(π) = {Σ x_ij ⊗ e_ji : α(x_ij) = Σ_k x_ik ⊗ u_kj}` and its products.
pub fn eigenmatrix_check(c: &Coaction, inc: &WassermannInclusion, tol: f64) -> Result<EigenmatrixReport> {
    let rep = &inc.rep;
    let (n, na, d, m) = (rep.n, unknowns(c, rep.degree(c)), c.dim(), c.qg.m);
    let mut rows = Rows::new(n * n * na);
    for i in 0..n {
        for j in 0..n {
            for a in 0..na {
                let al = c.alpha_basis(a);
                for r in 0..d {
                    for s in 0..m {
                        rows.add(((i * n + j) * d + r) * m + s, (i * n + j) * na + a, al[(r, s)]);
                    }
                }
                for k in 0..n {
                    let u = rep.entry(k, j);
                    for s in 0..m {
                        rows.add(((i * n + j) * d + a) * m + s, (i * n + k) * na + a, -u[s]);
                    }
                }
            }
        }
    }
    let ker: Mat = rows.kernel(tol);
    let eig: Vec<AmpElement> = (0..ker.ncols())
        .map(|k| {
            let col = ker.column(k).into_owned();
            // x_ij sits at matrix position (j, i)
            let mut out = AmpElement::zeros(n, d);
            for i in 0..n {
                for j in 0..n {
                    out.entries[j * n + i] = resize(&col.rows((i * n + j) * na, na).into_owned(), d);
                }
            }
            out
        })
        .collect();
    let mut prods = Vec::with_capacity(eig.len() * eig.len());
    for x in &eig {
        for y in &eig {
            prods.push(x.mul(c, &y.star(c))?);
        }
    }
    let (span_dim, containment) = span_in_c(inc, &prods, tol);
    Ok(EigenmatrixReport {
        label: rep.label.clone(),
        eigen_dim: eig.len(),
        span_dim,
        c_dim: inc.dim(),
        containment,
        defect: inc.dim().saturating_sub(span_dim),
    })
}
