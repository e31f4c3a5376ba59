//! Bundled quantum groups and actions.

use serde::Serialize;
use serde_json::{json, Value};

use qact_core::action::verify::verify_coaction;
use qact_core::action::Coaction;
use qact_core::fdlin::FdCStarAlgebra;
use qact_core::pbw::suq2::suq2;
use qact_core::qg::examples::{c_s3, c_zn, dual_s3, s3_elements};
use qact_core::qg::finite::FiniteQuantumGroup;

use crate::input::{digest, Group, GroupSource, Loaded};
use crate::{CliError, Settings};

pub const SUQ2_Q: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Group,
    DualGroup,
    Quantum,
    Action,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Example {
    pub name: &'static str,
    pub kind: Kind,
    pub summary: &'static str,
    /// Freeness of the action, or of the translation action for a bare group.
    pub expected_free: bool,
}

const fn ex(name: &'static str, kind: Kind, summary: &'static str, expected_free: bool) -> Example {
    Example { name, kind, summary, expected_free }
}

pub const CATALOG: &[Example] = &[
    ex("c_z2", Kind::Group, "functions on Z/2", true),
    ex("c_z3", Kind::Group, "functions on Z/3", true),
    ex("c_s3", Kind::Group, "functions on S_3", true),
    ex("dual_s3", Kind::DualGroup, "group algebra C[S_3]", true),
    ex("suq2", Kind::Quantum, "SU_q(2) at q = 1/2, PBW core truncated at --truncation", true),
    ex("c_z2_translation", Kind::Action, "Z/2 translating C(Z/2)", true),
    ex("c_z3_translation", Kind::Action, "Z/3 translating C(Z/3)", true),
    ex("c_s3_translation", Kind::Action, "S_3 translating C(S_3)", true),
    ex("dual_s3_translation", Kind::Action, "coproduct of C[S_3] on itself", true),
    ex("suq2_translation", Kind::Action, "coproduct of SU_q(2) on its truncated core", true),
    ex("c_z2_swap", Kind::Action, "Z/2 swapping the two points of C^2", true),
    ex("c_z2_trivial", Kind::Action, "Z/2 acting trivially on C^2", false),
    ex("c_z2_mixed", Kind::Action, "translation on C(Z/2) plus a fixed point", false),
    ex("c_s3_points", Kind::Action, "S_3 permuting three points", false),
];

pub fn find(name: &str) -> Option<&'static Example> {
    let name = match name {
        "swap2" => "c_z2_swap",
        "trivial2" => "c_z2_trivial",
        other => other,
    };
    let joined = name.replace('+', "_");
    CATALOG.iter().find(|e| e.name == joined)
}

pub fn catalog_json() -> Value {
    json!(CATALOG
        .iter()
        .map(|e| json!({
            "name": e.name,
            "kind": e.kind,
            "summary": e.summary,
            "expected_verdict": if e.expected_free { "free" } else { "not free" },
        }))
        .collect::<Vec<_>>())
}

fn finite_group(name: &str) -> Option<FiniteQuantumGroup> {
    match name {
        "c_z2" => c_zn(2).ok(),
        "c_z3" => c_zn(3).ok(),
        "c_s3" => c_s3().ok(),
        "dual_s3" => dual_s3().ok(),
        _ => None,
    }
}

fn group(name: &str, s: &Settings) -> Result<Group, CliError> {
    if name == "suq2" {
        let pqg = suq2(SUQ2_Q, s.truncation)?;
        return Group::build(name, GroupSource::Presented { window: (s.truncation / 2).max(1), pqg }, s);
    }
    let fqg = finite_group(name).ok_or_else(|| CliError::Invalid(format!("unknown group {name}")))?;
    Group::build(name, GroupSource::Finite(fqg), s)
}

/// Right action of `S_3` on three points; the permutation convention is the
/// one that satisfies the coaction identity.
fn s3_points(g: &Group, s: &Settings) -> Result<Coaction, CliError> {
    let perms = s3_elements();
    let direct: Vec<Vec<usize>> = perms.iter().map(|p| p.to_vec()).collect();
    let inverse: Vec<Vec<usize>> = perms
        .iter()
        .map(|p| {
            let mut q = vec![0; 3];
            for (i, &j) in p.iter().enumerate() {
                q[j] = i;
            }
            q
        })
        .collect();
    for act in [direct, inverse] {
        let c = Coaction::function_action("c_s3_points", g.qg.clone(), &act)?;
        if verify_coaction(&c, s.tol)?.passes(s.assert_tol) {
            return Ok(c);
        }
    }
    Err(CliError::Invalid("no permutation convention gives a coaction".into()))
}

fn action(name: &str, s: &Settings) -> Result<(Group, Coaction), CliError> {
    if let Some(base) = name.strip_suffix("_translation") {
        let g = group(base, s)?;
        let c = Coaction::translation(g.qg.clone())?;
        return Ok((g, c));
    }
    let g = group("c_z2", s)?;
    let qg = g.qg.clone();
    let c = match name {
        "c_z2_swap" => Coaction::function_action(name, qg, &[vec![0, 1], vec![1, 0]])?,
        "c_z2_trivial" => Coaction::trivial(name, qg, FdCStarAlgebra::commutative(2)?)?,
        "c_z2_mixed" => {
            let free = Coaction::translation(qg.clone())?;
            let fixed = Coaction::trivial("point", qg, FdCStarAlgebra::commutative(1)?)?;
            Coaction::direct_sum(name, &free, &fixed)?
        }
        "c_s3_points" => {
            let g = group("c_s3", s)?;
            let c = s3_points(&g, s)?;
            return Ok((g, c));
        }
        _ => return Err(CliError::Invalid(format!("unknown example {name}"))),
    };
    Ok((g, c))
}

pub fn load(name: &str, s: &Settings) -> Result<Loaded, CliError> {
    let e = find(name).ok_or_else(|| CliError::Invalid(format!("unknown example {name}; see `qact examples`")))?;
    let (g, c) = match e.kind {
        Kind::Action => {
            let (g, c) = action(e.name, s)?;
            (g, Some(c))
        }
        _ => (group(e.name, s)?, None),
    };
    let data = json!({
        "example": e.name,
        "qg": g.source_json(),
        "action": c.as_ref().map(|c| c.to_json().unwrap_or_else(|_| json!("translation"))),
    });
    Ok(Loaded::new(format!("example:{}", e.name), digest(&data), g, c, Some(e.expected_free)))
}
