//! JSON value encoding: complex numbers as `[re, im]`, matrices as lists of
//! rows, algebra elements as lists of row-major blocks.

use serde_json::{json, Value};

use super::algebra::{AlgElement, FdCStarAlgebra};
use super::linalg::{Mat, Vector, C64};
use crate::error::{Error, Result};

pub fn complex_to_json(z: C64) -> Value {
    json!([z.re, z.im])
}

pub fn complex_from_json(v: &Value) -> Result<C64> {
    match v {
        Value::Number(n) => Ok(C64::new(n.as_f64().unwrap_or(0.0), 0.0)),
        Value::Array(a) if a.len() == 2 => {
            let re = a[0].as_f64().ok_or_else(|| Error::Invalid("complex real part is not a number".into()))?;
            let im = a[1].as_f64().ok_or_else(|| Error::Invalid("complex imaginary part is not a number".into()))?;
            Ok(C64::new(re, im))
        }
        _ => Err(Error::Invalid(format!("expected [re, im], got {v}"))),
    }
}

pub fn matrix_to_json(m: &Mat) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| complex_to_json(m[(i, j)])).collect()))
            .collect(),
    )
}

pub fn matrix_from_json(v: &Value) -> Result<Mat> {
    let rows = v.as_array().ok_or_else(|| Error::Invalid("matrix must be a list of rows".into()))?;
    if rows.is_empty() {
        return Ok(Mat::zeros(0, 0));
    }
    let ncols = rows[0].as_array().map(|r| r.len()).unwrap_or(0);
    let mut m = Mat::zeros(rows.len(), ncols);
    for (i, r) in rows.iter().enumerate() {
        let r = r.as_array().ok_or_else(|| Error::Invalid(format!("row {i} is not a list")))?;
        if r.len() != ncols {
            return Err(Error::Shape(format!("row {i} has {} entries, expected {ncols}", r.len())));
        }
        for (j, z) in r.iter().enumerate() {
            m[(i, j)] = complex_from_json(z)?;
        }
    }
    Ok(m)
}

pub fn vector_to_json(v: &Vector) -> Value {
    Value::Array(v.iter().map(|z| complex_to_json(*z)).collect())
}

pub fn vector_from_json(v: &Value) -> Result<Vector> {
    let a = v.as_array().ok_or_else(|| Error::Invalid("vector must be a list".into()))?;
    let entries: Result<Vec<C64>> = a.iter().map(complex_from_json).collect();
    Ok(Vector::from_vec(entries?))
}

pub fn element_to_json(x: &AlgElement) -> Value {
    Value::Array(x.blocks.iter().map(matrix_to_json).collect())
}

pub fn element_from_json(alg: &FdCStarAlgebra, v: &Value) -> Result<AlgElement> {
    let blocks = v.as_array().ok_or_else(|| Error::Invalid("element must be a list of blocks".into()))?;
    let blocks: Result<Vec<Mat>> = blocks.iter().map(matrix_from_json).collect();
    alg.from_blocks(blocks?)
}
