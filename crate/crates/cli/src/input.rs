//! Loading quantum groups and actions from JSON files or the registry.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use qact_core::action::verify::verify_coaction;
use qact_core::action::Coaction;
use qact_core::fdlin::FdCStarAlgebra;
use qact_core::pbw::PresentedQG;
use qact_core::qg::finite::FiniteQuantumGroup;
use qact_core::qg::axioms::{verify_axioms, AxiomReport};
use qact_core::qg::{QgData, QuantumGroup};

use crate::{examples, CliError, Settings};

pub enum GroupSource {
    Finite(FiniteQuantumGroup),
    /// Truncated core with window degree `window` inside ambient degree
    /// `2 · window`.
    Presented { pqg: Arc<PresentedQG>, window: usize },
}

pub struct Group {
    pub name: String,
    pub source: GroupSource,
    pub qg: Arc<QuantumGroup>,
    axioms: std::cell::OnceCell<AxiomReport>,
}

impl Group {
    pub fn build(name: &str, source: GroupSource, s: &Settings) -> Result<Group, CliError> {
        let qg = match &source {
            GroupSource::Finite(f) => f.build(s.seed, s.tol)?,
            GroupSource::Presented { pqg, window } => pqg.quantum_group(*window, s.seed, s.tol)?,
        };
        Ok(Group { name: name.to_string(), source, qg: Arc::new(qg), axioms: Default::default() })
    }

    pub fn data(&self) -> qact_core::Result<QgData> {
        match &self.source {
            GroupSource::Finite(f) => f.data(),
            GroupSource::Presented { pqg, window } => pqg.qg_data(*window, 2 * window),
        }
    }

    /// Hopf axiom residuals, computed once.
    pub fn axioms(&self) -> qact_core::Result<&AxiomReport> {
        if self.axioms.get().is_none() {
            let _ = self.axioms.set(verify_axioms(&self.data()?)?);
        }
        Ok(self.axioms.get().expect("set above"))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.source, GroupSource::Finite(_))
    }

    pub fn source_json(&self) -> Value {
        match &self.source {
            GroupSource::Finite(f) => f.to_json(),
            GroupSource::Presented { pqg, window } => json!({"presented": pqg.to_json(), "window": window}),
        }
    }
}

/// A validated input: a quantum group and, unless the input was a bare
/// group, an action of it.
pub struct Loaded {
    pub source: String,
    /// SHA-256 of the canonical JSON of the input.
    pub digest: String,
    pub group: Group,
    pub action: Option<Coaction>,
    pub expected_free: Option<bool>,
    translation: std::cell::OnceCell<Coaction>,
}

impl Loaded {
    /// The input action, or the translation action of a bare group.
    pub fn coaction(&self) -> Result<&Coaction, CliError> {
        if let Some(c) = &self.action {
            return Ok(c);
        }
        if self.translation.get().is_none() {
            let _ = self.translation.set(Coaction::translation(self.group.qg.clone())?);
        }
        Ok(self.translation.get().expect("set above"))
    }

    pub fn new(source: String, digest: String, group: Group, action: Option<Coaction>, expected_free: Option<bool>) -> Loaded {
        Loaded { source, digest, group, action, expected_free, translation: Default::default() }
    }
}

pub fn digest(v: &Value) -> String {
    let bytes = serde_json::to_vec(v).expect("JSON values serialize");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn group_from_json(v: &Value, s: &Settings, explicit_truncation: bool) -> Result<Group, CliError> {
    match v.get("kind").and_then(Value::as_str) {
        Some("finite") => {
            let f = FiniteQuantumGroup::from_json(v)?;
            let name = f.name.clone();
            Group::build(&name, GroupSource::Finite(f), s)
        }
        Some("presented") => {
            let pqg = Arc::new(PresentedQG::from_json(v)?);
            let ambient = if explicit_truncation { s.truncation } else { pqg.truncation };
            let name = pqg.name.clone();
            Group::build(&name, GroupSource::Presented { pqg, window: (ambient / 2).max(1) }, s)
        }
        other => Err(CliError::Invalid(format!("unknown quantum group kind {other:?}; expected \"finite\" or \"presented\""))),
    }
}

/// `{"qg": <object or path>, "algebra": {...}, "alpha": matrix}`, or
/// `"action": "translation"` / `"trivial"` in place of `alpha`.
fn action_from_json(v: &Value, base: &Path, s: &Settings, explicit: bool) -> Result<(Group, Coaction, Value), CliError> {
    let (qv, inlined) = match v.get("qg") {
        Some(Value::String(p)) => {
            let path = resolve(base, p);
            let q = read_json(&path)?;
            (q.clone(), q)
        }
        Some(q @ Value::Object(_)) => (q.clone(), q.clone()),
        _ => return Err(CliError::Invalid("action input needs a \"qg\" object or path".into())),
    };
    let g = group_from_json(&qv, s, explicit)?;
    let name = v.get("name").and_then(Value::as_str).unwrap_or("input");
    let c = match v.get("action").and_then(Value::as_str) {
        Some("translation") => Coaction::translation(g.qg.clone())?,
        Some("trivial") => {
            let dims: Vec<usize> = serde_json::from_value(
                v.get("algebra").and_then(|a| a.get("block_dims")).cloned().unwrap_or(Value::Null),
            )
            .map_err(|e| CliError::Invalid(format!("algebra.block_dims: {e}")))?;
            Coaction::trivial(name, g.qg.clone(), FdCStarAlgebra::new(dims)?)?
        }
        Some(other) => return Err(CliError::Invalid(format!("unknown action {other:?}"))),
        None => Coaction::from_json(v, g.qg.clone())?,
    };
    let mut canonical = v.clone();
    canonical["qg"] = inlined;
    Ok((g, c, canonical))
}

fn resolve(base: &Path, p: &str) -> PathBuf {
    let p = Path::new(p);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

pub fn load_file(path: &Path, s: &Settings, explicit_truncation: bool) -> Result<Loaded, CliError> {
    let v = read_json(path)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let (group, action, canonical) = if v.get("kind").is_some() && v.get("qg").is_none() {
        (group_from_json(&v, s, explicit_truncation)?, None, v.clone())
    } else {
        let (g, c, canonical) = action_from_json(&v, &base, s, explicit_truncation)?;
        (g, Some(c), canonical)
    };
    let expected_free = v.get("expected_free").and_then(Value::as_bool);
    Ok(Loaded::new(path.display().to_string(), digest(&canonical), group, action, expected_free))
}

/// Loads `--input` or `--example` and validates the structure maps.
pub fn load(input: Option<&Path>, example: Option<&str>, s: &Settings, explicit_truncation: bool) -> Result<Loaded, CliError> {
    let loaded = match (input, example) {
        (Some(p), None) => load_file(p, s, explicit_truncation)?,
        (None, Some(e)) => examples::load(e, s)?,
        (Some(_), Some(_)) => return Err(CliError::Parse("give either --input or --example, not both".into())),
        (None, None) => return Err(CliError::Parse("an --input file or an --example name is required".into())),
    };
    validate(&loaded, s)?;
    Ok(loaded)
}

fn validate(l: &Loaded, s: &Settings) -> Result<(), CliError> {
    let ax = l.group.axioms()?;
    if !ax.passes(s.assert_tol) {
        return Err(CliError::Invalid(format!("{} fails the Hopf axioms (residual {:e})", l.group.name, ax.max_residual())));
    }
    if let Some(c) = &l.action {
        let r = verify_coaction(c, s.tol)?;
        if !r.passes(s.assert_tol) {
            return Err(CliError::Invalid(format!("{} is not a coaction (residual {:e})", c.name, r.max_residual())));
        }
    }
    Ok(())
}
