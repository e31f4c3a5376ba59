//! Finite-dimensional C*-algebra engine.

pub mod algebra;
pub mod json;
pub mod linalg;
pub mod star;

pub use algebra::{AlgElement, FdCStarAlgebra, LinMap, Positivity};
pub use linalg::{Mat, Vector, C64, DEFAULT_TOL};
pub use star::{resize, tensor_mul, tensor_star, StarAlgebra};
