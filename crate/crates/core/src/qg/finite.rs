//! Finite quantum groups given by structure tensors in the matrix-unit basis.

use std::sync::Arc;

use serde_json::{json, Value};

use super::{axioms, LabelScheme, QgData, QuantumGroup, SparseCoproduct};
use crate::error::{Error, Result};
use crate::fdlin::json::{matrix_from_json, matrix_to_json, vector_from_json, vector_to_json};
use crate::fdlin::linalg::{Mat, Vector};
use crate::fdlin::FdCStarAlgebra;

/// Structure data of `C(G)`: the coproduct is a `(M²) × M` matrix with rows
/// `a * M + b` for `e_a ⊗ e_b`.
#[derive(Clone, Debug)]
pub struct FiniteQuantumGroup {
    pub name: String,
    pub cg: FdCStarAlgebra,
    pub delta: Mat,
    pub counit: Vector,
    pub antipode: Mat,
    pub scheme: LabelScheme,
}

impl FiniteQuantumGroup {
    pub fn new(name: &str, cg: FdCStarAlgebra, delta: Mat, counit: Vector, antipode: Mat) -> Result<Self> {
        let m = cg.total_dim();
        if delta.shape() != (m * m, m) {
            return Err(Error::Shape(format!("delta is {:?}, expected ({}, {m})", delta.shape(), m * m)));
        }
        if counit.len() != m || antipode.shape() != (m, m) {
            return Err(Error::Shape(format!("counit/antipode do not match dimension {m}")));
        }
        Ok(FiniteQuantumGroup { name: name.to_string(), cg, delta, counit, antipode, scheme: LabelScheme::Generic })
    }

    pub fn with_labels(mut self, scheme: LabelScheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn dim(&self) -> usize {
        self.cg.total_dim()
    }

    pub fn data(&self) -> Result<QgData> {
        Ok(QgData {
            name: self.name.clone(),
            alg: Arc::new(self.cg.clone()),
            window: self.dim(),
            delta: SparseCoproduct::from_dense(&self.delta)?,
            counit: self.counit.clone(),
            antipode: self.antipode.clone(),
        })
    }

    pub fn verify_axioms(&self) -> Result<axioms::AxiomReport> {
        axioms::verify_axioms(&self.data()?)
    }

    pub fn build(&self, seed: u64, tol: f64) -> Result<QuantumGroup> {
        QuantumGroup::build(self.data()?, seed, self.scheme, tol)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        if v.get("kind").and_then(Value::as_str) != Some("finite") {
            return Err(Error::Invalid("expected \"kind\": \"finite\"".into()));
        }
        let dims: Vec<usize> = serde_json::from_value(v.get("block_dims").cloned().unwrap_or(Value::Null))
            .map_err(|e| Error::Invalid(format!("block_dims: {e}")))?;
        let cg = FdCStarAlgebra::new(dims)?;
        let field = |k: &str| v.get(k).ok_or_else(|| Error::Invalid(format!("missing field {k}")));
        let delta = matrix_from_json(field("delta")?)?;
        let counit = vector_from_json(field("epsilon")?)?;
        let antipode = matrix_from_json(field("antipode")?)?;
        let name = v.get("name").and_then(Value::as_str).unwrap_or("input");
        FiniteQuantumGroup::new(name, cg, delta, counit, antipode)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": "finite",
            "name": self.name,
            "block_dims": self.cg.block_dims,
            "delta": matrix_to_json(&self.delta),
            "epsilon": vector_to_json(&self.counit),
            "antipode": matrix_to_json(&self.antipode),
        })
    }
}
