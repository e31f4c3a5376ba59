//! Individual checks, each reduced to a named residual against a bound.

use std::fmt::Display;

use serde::Serialize;
use serde_json::{json, Value};

use qact_core::action::bounds::pimsner_popa_check;
use qact_core::action::isotypic::{fixed_points, isotypical};
use qact_core::action::verify::verify_coaction;
use qact_core::action::Coaction;
use qact_core::fdlin::json::{matrix_to_json, vector_to_json};
use qact_core::fdlin::linalg::{Mat, MaxAbs};
use qact_core::galois::{
    crossed_product, freeness_verdicts, galois_map, isometry_trials, projectivity_witness, range_projection_check,
    verify_witness, ProjectivityWitness, VerdictPair,
};
use qact_core::index::{build_inclusion, eigenmatrix_check, index_theorem_check, quasi_basis, Rep};
use qact_core::qg::corep::{character_report, comultiplicativity_residual, orthogonality_check, unitarity_residual};
use qact_core::Error;

use crate::input::{Group, Loaded};
use crate::Settings;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub residual: Option<f64>,
    pub detail: Value,
}

impl Check {
    pub fn bounded(name: impl Into<String>, residual: f64, bound: f64, detail: Value) -> Check {
        Check { name: name.into(), pass: residual <= bound, residual: Some(residual), detail }
    }

    pub fn flag(name: impl Into<String>, pass: bool, detail: Value) -> Check {
        Check { name: name.into(), pass, residual: None, detail }
    }

    pub fn failed(name: impl Into<String>, e: impl Display) -> Check {
        Check { name: name.into(), pass: false, residual: None, detail: json!({"error": e.to_string()}) }
    }

    pub fn skipped(name: impl Into<String>, why: impl Display) -> Check {
        Check { name: name.into(), pass: true, residual: None, detail: json!({"skipped": why.to_string()}) }
    }
}

/// Turns an error into a failed check; a degree overflow means the check lies
/// beyond the truncation and is skipped.
fn guard(name: &str, r: Result<Check, Error>) -> Check {
    match r {
        Ok(c) => c,
        Err(e @ Error::DegreeOverflow { .. }) => Check::skipped(name, format!("beyond the truncation: {e}")),
        Err(e) => Check::failed(name, e),
    }
}

fn guard_many(name: &str, r: Result<Vec<Check>, Error>) -> Vec<Check> {
    r.unwrap_or_else(|e| vec![guard(name, Err(e))])
}

pub fn qg_checks(g: &Group, s: &Settings) -> Vec<Check> {
    let qg = &g.qg;
    let mut out = Vec::new();
    out.push(guard(
        "axioms",
        g.axioms().map(|r| {
            let detail = json!(r.residuals().into_iter().collect::<std::collections::BTreeMap<_, _>>());
            Check::bounded("axioms", r.max_residual(), s.tol, detail)
        }),
    ));
    let h = &qg.haar;
    out.push(Check {
        name: "haar".into(),
        pass: h.nullity == 1 && h.residual <= s.tol,
        residual: Some(h.residual),
        detail: json!({"nullity": h.nullity, "gap": h.gap}),
    });
    if g.is_finite() {
        let dims: usize = qg.irreps.iter().map(|p| p.n * p.n).sum();
        out.push(Check::flag(
            "peter_weyl",
            dims == qg.ambient_dim(),
            json!({"coefficient_dims": dims, "dim": qg.ambient_dim()}),
        ));
    }
    for p in &qg.irreps {
        let name = format!("corep[{}]", p.label);
        out.push(guard(
            &name,
            unitarity_residual(qg, p).map(|u| {
                let c = comultiplicativity_residual(qg, p);
                Check::bounded(&name, u.max(c), s.assert_tol, json!({"unitarity": u, "comultiplicativity": c}))
            }),
        ));
    }
    let mut orth: f64 = 0.0;
    let mut orth_err = None;
    for p in &qg.irreps {
        for r in &qg.irreps {
            match orthogonality_check(qg, p, r) {
                Ok(v) => orth = orth.max(v),
                Err(e) => orth_err = Some(e),
            }
        }
    }
    out.push(match orth_err {
        Some(e) => guard("orthogonality", Err(e)),
        None => Check::bounded("orthogonality", orth, s.assert_tol, json!({"pairs": qg.irreps.len() * qg.irreps.len()})),
    });
    let norm = qg
        .irreps
        .iter()
        .map(|p| (p.q.trace().re - p.q_inverse().trace().re).abs())
        .fold(0.0, f64::max);
    out.push(Check::bounded("q_normalization", norm, s.assert_tol, json!({"kac": qg.is_kac(s.assert_tol)})));
    let mut chars: f64 = 0.0;
    for p in &qg.irreps {
        let r = character_report(qg, p);
        chars = chars.max(r.s2_residual).max(r.s_star_residual).max(r.adjoint_in_block_residual).max(r.defining_residual);
    }
    out.push(Check::bounded("characters", chars, s.assert_tol, json!({})));
    out
}

pub fn irreps_json(g: &Group) -> Value {
    let qg = &g.qg;
    json!(qg
        .irreps
        .iter()
        .map(|p| json!({
            "label": p.label,
            "dim": p.n,
            "qdim": p.qdim,
            "trivial": p.is_trivial,
            "tr_q": p.q.trace().re,
            "tr_q_inv": p.q_inverse().trace().re,
            "q": matrix_to_json(&p.q),
        }))
        .collect::<Vec<_>>())
}

pub fn coaction_checks(c: &Coaction, s: &Settings) -> Vec<Check> {
    vec![guard(
        "coaction",
        verify_coaction(c, s.tol).map(|r| Check {
            name: "coaction".into(),
            pass: r.passes(s.assert_tol),
            residual: Some(r.max_residual()),
            detail: serde_json::to_value(&r).unwrap_or(Value::Null),
        }),
    )]
}

pub fn fixed_point_checks(c: &Coaction, s: &Settings) -> Vec<Check> {
    vec![guard(
        "fixed_points",
        fixed_points(c, s.tol).map(|f| {
            let r = &f.report;
            let res = r.idempotence.max(r.image).max(r.unital).max(r.bimodularity);
            let positive = r.min_positivity.is_none_or(|m| m >= -s.tol);
            Check {
                name: "fixed_points".into(),
                pass: res <= s.assert_tol && positive,
                residual: Some(res),
                detail: serde_json::to_value(r).unwrap_or(Value::Null),
            }
        }),
    )]
}

pub const PIMSNER_POPA_TRIALS: usize = 200;

pub fn isotypic_checks(c: &Coaction, only: Option<usize>, s: &Settings) -> Vec<Check> {
    let mut out = Vec::new();
    let pis: Vec<usize> = match only {
        Some(p) => vec![p],
        None => (0..c.qg.irreps.len()).collect(),
    };
    let mut projections: Vec<(String, Mat)> = Vec::new();
    for &pi in &pis {
        let label = &c.qg.irreps[pi].label;
        let name = format!("isotypic[{label}]");
        match isotypical(c, pi, s.tol) {
            Ok(iso) => {
                out.push(Check::bounded(
                    &name,
                    iso.idempotence,
                    s.assert_tol,
                    json!({"dim": iso.dim(), "c_pi": iso.c_pi}),
                ));
                let pp = format!("pimsner_popa[{label}]");
                out.push(match iso.c_pi {
                    None => Check::skipped(&pp, "‖χ_π‖ needs C(G) as a finite direct sum of matrix blocks"),
                    Some(_) => guard(
                        &pp,
                        pimsner_popa_check(c, &iso, PIMSNER_POPA_TRIALS, s.seed).map(|r| Check {
                            name: pp.clone(),
                            pass: r.worst_slack >= -s.tol,
                            residual: Some((-r.worst_slack).max(0.0)),
                            detail: serde_json::to_value(&r).unwrap_or(Value::Null),
                        }),
                    ),
                });
                projections.push((label.clone(), iso.e_pi.clone()));
            }
            Err(e) => out.push(guard(&name, Err(e))),
        }
    }
    if only.is_none() && projections.len() > 1 {
        let mut cross: f64 = 0.0;
        for (i, (_, a)) in projections.iter().enumerate() {
            for (j, (_, b)) in projections.iter().enumerate() {
                if i != j {
                    let n = c.n;
                    let (a, b) = (a.view((0, 0), (n, n)), b.view((0, 0), (n, n)));
                    cross = cross.max((a * b).max_abs());
                }
            }
        }
        out.push(Check::bounded("isotypic_orthogonality", cross, s.assert_tol, json!({})));
        if !c.is_graded() {
            let mut sum = Mat::identity(c.n, c.n).scale(-1.0);
            for (_, p) in &projections {
                sum += p;
            }
            out.push(Check::bounded("isotypic_completeness", sum.max_abs(), s.assert_tol, json!({})));
        }
    }
    out
}

pub const GALOIS_TRIALS: usize = 50;

pub fn verdicts_json(v: &VerdictPair) -> Value {
    json!({
        "free": v.free,
        "saturated": v.saturated,
        "galois_unitary": v.galois_unitary,
        "agree": v.agree,
        "defects_agree": v.defects_agree,
    })
}

/// Freeness verdicts plus Galois isometry and range projections.
pub fn freeness_checks(l: &Loaded, c: &Coaction, s: &Settings) -> (Vec<Check>, Option<VerdictPair>) {
    let mut out = Vec::new();
    let v = match freeness_verdicts(c, s.tol) {
        Ok(v) => v,
        Err(e) => return (vec![Check::failed("freeness", e)], None),
    };
    out.push(Check::flag(
        "freeness_agreement",
        v.agree && v.defects_agree != Some(false),
        json!({
            "free": v.free,
            "saturated": v.saturated,
            "ellwood_defect": v.ellwood.defect,
            "saturation_defect": v.saturation.as_ref().map(|r| r.defect),
            "beyond_window": v.ellwood.beyond_window,
        }),
    ));
    if let Some(expected) = l.expected_free {
        out.push(Check::flag("expected_verdict", v.free == expected, json!({"expected_free": expected, "free": v.free})));
    }
    for pi in 0..c.qg.irreps.len() {
        let label = c.qg.irreps[pi].label.clone();
        let name = format!("galois[{label}]");
        out.push(guard(
            &name,
            galois_map(c, pi, s.tol).and_then(|g| {
                let iso = isometry_trials(c, &g, GALOIS_TRIALS, s.seed.wrapping_add(pi as u64))?;
                let r = &g.report;
                Ok(Check {
                    name: name.clone(),
                    pass: iso.max(r.well_defined) <= s.assert_tol && r.injective && (!v.free || r.surjective),
                    residual: Some(iso.max(r.well_defined)),
                    detail: json!({"trials": GALOIS_TRIALS, "injective": r.injective, "surjective": r.surjective, "codim": r.codim}),
                })
            }),
        ));
    }
    if c.fd.is_some() && !c.is_graded() {
        match crossed_product(c, s.tol) {
            Ok(cp) => {
                for pi in 0..c.qg.irreps.len() {
                    let label = c.qg.irreps[pi].label.clone();
                    let name = format!("range_projection[{label}]");
                    out.push(guard(
                        &name,
                        range_projection_check(c, &cp, pi, s.tol).map(|r| {
                            let res = r.idempotence.max(r.self_adjointness).max(r.right_a_vs_b).max(r.right_vs_left).max(r.centrality);
                            let full = !v.free || r.identity_distance <= s.assert_tol;
                            Check {
                                name: name.clone(),
                                pass: res <= s.assert_tol && full,
                                residual: Some(res),
                                detail: serde_json::to_value(&r).unwrap_or(Value::Null),
                            }
                        }),
                    ));
                }
            }
            Err(e) => out.push(Check::failed("crossed_product", e)),
        }
    }
    (out, Some(v))
}

/// Witness for `A_π`, and its JSON round trip.
pub fn witness_checks(c: &Coaction, pi: usize, s: &Settings) -> Vec<Check> {
    let label = c.qg.irreps[pi].label.clone();
    let name = format!("projectivity[{label}]");
    guard_many(
        &name,
        (|| {
            let w = projectivity_witness(c, pi, s.tol)?;
            let r = &w.report;
            let fresh = Check {
                name: name.clone(),
                pass: r.passes(s.assert_tol),
                residual: Some(r.max_residual()),
                detail: serde_json::to_value(r).unwrap_or(Value::Null),
            };
            let text = serde_json::to_string(&w.to_json()).map_err(|e| Error::Invalid(e.to_string()))?;
            let back = ProjectivityWitness::from_json(c, &serde_json::from_str(&text).map_err(|e| Error::Invalid(e.to_string()))?, s.tol)?;
            let rr = verify_witness(c, &back, s.tol)?;
            let reload = Check::bounded(format!("witness_reload[{label}]"), rr.max_residual(), s.assert_tol, json!({"bytes": text.len()}));
            Ok(vec![fresh, reload])
        })(),
    )
}

pub fn projectivity_checks(c: &Coaction, free: Option<bool>, only: Option<usize>, s: &Settings) -> Vec<Check> {
    if free == Some(false) {
        return vec![Check::skipped("projectivity", "the action is not free")];
    }
    let pis: Vec<usize> = match only {
        Some(p) => vec![p],
        None => (0..c.qg.irreps.len()).collect(),
    };
    pis.into_iter().flat_map(|pi| witness_checks(c, pi, s)).collect()
}

fn within_budget(c: &Coaction, pi: usize) -> bool {
    !c.is_graded() || 2 * c.pi_degree(pi) as i64 <= c.window()
}

pub fn index_checks(c: &Coaction, free: Option<bool>, only: Option<usize>, s: &Settings) -> Vec<Check> {
    let mut out = Vec::new();
    let pis: Vec<usize> = match only {
        Some(p) => vec![p],
        None => (0..c.qg.irreps.len()).collect(),
    };
    for pi in pis {
        let label = c.qg.irreps[pi].label.clone();
        let name = format!("index[{label}]");
        let eig = format!("eigenmatrix[{label}]");
        if !within_budget(c, pi) {
            out.push(Check::skipped(&name, "C needs degree 2·d_π beyond the window"));
            continue;
        }
        let free = free.unwrap_or(true);
        out.push(guard(
            &eig,
            build_inclusion(c, &Rep::irreducible(&c.qg, pi), s.tol).and_then(|inc| eigenmatrix_check(c, &inc, s.tol)).map(|r| Check {
                name: eig.clone(),
                pass: !free || r.defect == 0,
                residual: None,
                detail: json!({"defect": r.defect, "eigen_dim": r.eigen_dim, "c_dim": r.c_dim, "asserted": free}),
            }),
        ));
        if !free {
            out.push(Check::skipped(&name, "the action is not free"));
            continue;
        }
        out.push(guard(
            &name,
            index_theorem_check(c, pi, s.tol).map(|t| {
                let k = &t.construction;
                let construction = k.index_residual.max(k.left_identity).max(k.right_identity).max(k.solution_independence);
                Check {
                    name: name.clone(),
                    pass: t.residual <= s.assert_tol && t.independence <= s.assert_tol && t.centrality <= s.assert_tol && construction <= s.assert_tol,
                    residual: Some(t.residual),
                    detail: json!({
                        "qdim": t.qdim,
                        "qdim_sq": t.qdim_sq,
                        "index": t.index_scalar,
                        "independence": t.independence,
                        "centrality": t.centrality,
                        "quasi_basis_size": t.quasi_basis_size,
                        "construction_residual": construction,
                    }),
                }
            }),
        ));
    }
    out
}

/// `qact index`: the index element for one label, which may be a sum such as
/// `triv+std`.
pub fn index_report(c: &Coaction, label: &str, s: &Settings) -> Result<(Value, bool, Value), Error> {
    let rep = Rep::parse(&c.qg, label)?;
    let inc = build_inclusion(c, &rep, s.tol)?;
    let qb = quasi_basis(c, &inc, s.seed, s.tol)?;
    let qb2 = quasi_basis(c, &inc, s.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(1), s.tol)?;
    let qdim_sq = rep.qdim * rep.qdim;
    let n = rep.n;
    let target = qact_core::index::AmpElement::diagonal(n, &(c.unit() * qact_core::fdlin::linalg::C64::new(qdim_sq, 0.0)));
    let residual = qb.index.sub(&target).max_abs();
    let independence = qb.index.sub(&qb2.index).max_abs();
    let identities = qb.report.left_identity.max(qb.report.right_identity);
    let matrix: Vec<Vec<Value>> = (0..n).map(|i| (0..n).map(|j| vector_to_json(qb.index.entry(i, j))).collect()).collect();
    let mut v = json!({
        "action": c.name,
        "pi": rep.label,
        "index_matrix": matrix,
        "index_scalar": qb.report.index_scalar,
        "qdim": rep.qdim,
        "qdim_sq": qdim_sq,
        "residual": residual,
        "independence": independence,
        "centrality": qb.report.centrality,
        "identities": identities,
        "quasi_basis_size": qb.pairs.len(),
    });
    let mut pass = independence <= s.assert_tol && qb.report.centrality <= s.assert_tol && identities <= s.assert_tol;
    if rep.is_irreducible() {
        let t = index_theorem_check(c, rep.summands[0], s.tol)?;
        v["construction_residual"] = json!(t.construction.index_residual);
        pass &= residual <= s.assert_tol && t.construction.index_residual <= s.assert_tol;
    }
    v["pass"] = json!(pass);
    Ok((v, pass, qb.to_json(&c.name)))
}
