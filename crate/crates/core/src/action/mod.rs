//! Coactions `α: A → A ⊗ C(G)` and the objects derived from them.
//!
//! `α(x)` is stored as an `A.dim × m` coefficient matrix (`m` the window of
//! the quantum group). For finite data `α` is given on all of `A`; for the
//! translation action of a truncated core it is `Δ` restricted to the window,
//! and only identities whose degrees fit the ambient truncation are formed.

pub mod bounds;
pub mod equivariant;
pub mod isotypic;
pub mod verify;

use std::sync::Arc;

use serde_json::{json, Value};

pub use equivariant::EquivariantVectors;
pub use isotypic::{FixedPointData, IsotypicalComponent};
pub use verify::CoactionReport;

use crate::error::{Error, Result};
use crate::fdlin::json::{matrix_from_json, matrix_to_json};
use crate::fdlin::linalg::{Mat, Vector, C64};
use crate::fdlin::star::{resize, StarAlgebra};
use crate::fdlin::FdCStarAlgebra;
use crate::qg::QuantumGroup;

pub struct Coaction {
    pub name: String,
    pub qg: Arc<QuantumGroup>,
    pub alg: Arc<dyn StarAlgebra>,
    /// Set when `A` is a direct sum of matrix algebras.
    pub fd: Option<FdCStarAlgebra>,
    /// Number of leading coordinates of `A` on which `α` is known.
    pub n: usize,
    /// `α(e_i)` for `i < n`.
    alpha: Vec<Mat>,
    /// Faithful state on `A`, tracial on the fixed points.
    pub tau: Vector,
    /// Window degree for graded algebras, `None` for finite ones.
    pub window_degree: Option<usize>,
    pub translation: bool,
}

fn window_degree_of(alg: &dyn StarAlgebra, m: usize) -> Option<usize> {
    if alg.prefix_len(0) == alg.dim() {
        return None;
    }
    (0..64).find(|&d| alg.prefix_len(d) == m)
}

impl Coaction {
    /// From a `(N·M) × N` matrix with rows `i * M + c` for `e_i ⊗ e_c`.
    pub fn finite(name: &str, qg: Arc<QuantumGroup>, alg: FdCStarAlgebra, alpha: &Mat) -> Result<Self> {
        let n = alg.total_dim();
        let m = qg.m;
        if qg.ambient_dim() != m {
            return Err(Error::Unsupported("finite coactions need a finite quantum group".into()));
        }
        if alpha.shape() != (n * m, n) {
            return Err(Error::Shape(format!("alpha is {:?}, expected ({}, {n})", alpha.shape(), n * m)));
        }
        let mats = (0..n).map(|i| Mat::from_fn(n, m, |a, c| alpha[(a * m + c, i)])).collect();
        let tau = alg.trace_functional();
        Ok(Coaction {
            name: name.to_string(),
            qg,
            alg: Arc::new(alg.clone()),
            fd: Some(alg),
            n,
            alpha: mats,
            tau,
            window_degree: None,
            translation: false,
        })
    }

    /// `α = Δ` on the quantum group's own algebra.
    pub fn translation(qg: Arc<QuantumGroup>) -> Result<Self> {
        let alg = qg.alg.clone();
        let big = alg.dim();
        let m = qg.m;
        let mats: Vec<Mat> = (0..m)
            .map(|i| {
                let d = qg.coproduct(&qg.basis(i));
                let mut out = Mat::zeros(big, m);
                out.view_mut((0, 0), (m, m)).copy_from(&d);
                out
            })
            .collect();
        let fd = match alg.matrix_blocks() {
            Some(b) if big == m => Some(FdCStarAlgebra::new(b.to_vec())?),
            _ => None,
        };
        let tau = match &fd {
            Some(f) => f.trace_functional(),
            None => qg.haar.functional.clone(),
        };
        Ok(Coaction {
            name: format!("{}_translation", qg.name),
            window_degree: window_degree_of(alg.as_ref(), m),
            qg,
            alg,
            fd,
            n: m,
            alpha: mats,
            tau,
            translation: true,
        })
    }

    /// `α(x) = x ⊗ 1`.
    pub fn trivial(name: &str, qg: Arc<QuantumGroup>, alg: FdCStarAlgebra) -> Result<Self> {
        let n = alg.total_dim();
        let m = qg.m;
        let unit = qg.unit();
        let mut alpha = Mat::zeros(n * m, n);
        for i in 0..n {
            for c in 0..m {
                alpha[(i * m + c, i)] = unit[c];
            }
        }
        Coaction::finite(name, qg, alg, &alpha)
    }

    /// Right action of a group on a finite set through `C(X)`, with
    /// `α(f)(x, g) = f(act[g][x])`; the quantum group must be `C(G)` with
    /// point masses as its basis.
    pub fn function_action(name: &str, qg: Arc<QuantumGroup>, act: &[Vec<usize>]) -> Result<Self> {
        let m = qg.m;
        if act.len() != m {
            return Err(Error::Shape("one permutation per group element expected".into()));
        }
        let n = act[0].len();
        let mut alpha = Mat::zeros(n * m, n);
        for (g, perm) in act.iter().enumerate() {
            for (x, &y) in perm.iter().enumerate() {
                alpha[(x * m + g, y)] = C64::new(1.0, 0.0);
            }
        }
        Coaction::finite(name, qg, FdCStarAlgebra::commutative(n)?, &alpha)
    }

    /// `A_1 ⊕ A_2` with `α_1 ⊕ α_2`; both finite over the same quantum group.
    pub fn direct_sum(name: &str, a: &Coaction, b: &Coaction) -> Result<Self> {
        let (fa, fb) = match (&a.fd, &b.fd) {
            (Some(x), Some(y)) if a.window_degree.is_none() && b.window_degree.is_none() => (x, y),
            _ => return Err(Error::Unsupported("direct sums need finite-dimensional algebras".into())),
        };
        if !Arc::ptr_eq(&a.qg, &b.qg) {
            return Err(Error::AlgebraMismatch("direct summands must share the quantum group".into()));
        }
        let mut dims = fa.block_dims.clone();
        dims.extend(fb.block_dims.iter());
        let alg = FdCStarAlgebra::new(dims)?;
        let (na, nb, m) = (a.n, b.n, a.qg.m);
        let n = na + nb;
        let mut alpha = Mat::zeros(n * m, n);
        for i in 0..na {
            for r in 0..na {
                for c in 0..m {
                    alpha[(r * m + c, i)] = a.alpha[i][(r, c)];
                }
            }
        }
        for i in 0..nb {
            for r in 0..nb {
                for c in 0..m {
                    alpha[((na + r) * m + c, na + i)] = b.alpha[i][(r, c)];
                }
            }
        }
        Coaction::finite(name, a.qg.clone(), alg, &alpha)
    }

    pub fn from_json(v: &Value, qg: Arc<QuantumGroup>) -> Result<Self> {
        let dims: Vec<usize> = serde_json::from_value(
            v.get("algebra").and_then(|a| a.get("block_dims")).cloned().unwrap_or(Value::Null),
        )
        .map_err(|e| Error::Invalid(format!("algebra.block_dims: {e}")))?;
        let alg = FdCStarAlgebra::new(dims)?;
        let alpha = matrix_from_json(v.get("alpha").ok_or_else(|| Error::Invalid("missing alpha".into()))?)?;
        let name = v.get("name").and_then(Value::as_str).unwrap_or("input");
        Coaction::finite(name, qg, alg, &alpha)
    }

    pub fn to_json(&self) -> Result<Value> {
        let fd = self.fd.as_ref().ok_or_else(|| Error::Unsupported("only finite actions serialize".into()))?;
        Ok(json!({"name": self.name, "algebra": {"block_dims": fd.block_dims}, "alpha": matrix_to_json(&self.alpha_matrix())}))
    }

    pub fn alpha_matrix(&self) -> Mat {
        let (n, m) = (self.n, self.qg.m);
        let big = self.alg.dim();
        let mut out = Mat::zeros(big * m, n);
        for i in 0..n {
            for r in 0..big {
                for c in 0..m {
                    out[(r * m + c, i)] = self.alpha[i][(r, c)];
                }
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.alg.dim()
    }

    pub fn basis(&self, i: usize) -> Vector {
        let mut v = Vector::zeros(self.alg.dim());
        v[i] = C64::new(1.0, 0.0);
        v
    }

    pub fn unit(&self) -> Vector {
        self.alg.unit()
    }

    pub fn alpha_basis(&self, i: usize) -> &Mat {
        &self.alpha[i]
    }

    /// `α(x)` for `x` supported on the first `n` coordinates.
    pub fn alpha(&self, x: &Vector) -> Result<Mat> {
        let mut out = Mat::zeros(self.alg.dim(), self.qg.m);
        for (i, c) in x.iter().enumerate() {
            if c.norm() == 0.0 {
                continue;
            }
            if i >= self.n {
                return Err(Error::DegreeOverflow { needed: self.degree_of_index(i), max: self.window_degree.unwrap_or(0) });
            }
            out += &self.alpha[i] * *c;
        }
        Ok(out)
    }

    pub fn mul(&self, x: &Vector, y: &Vector) -> Result<Vector> {
        let d = self.alg.dim();
        self.alg.mul(&resize(x, d), &resize(y, d))
    }

    pub fn star(&self, x: &Vector) -> Vector {
        self.alg.star(&resize(x, self.alg.dim()))
    }

    pub fn tau_apply(&self, x: &Vector) -> C64 {
        resize(x, self.tau.len()).dot(&self.tau)
    }

    /// `E_B = (ι ⊗ φ)α`, on all of `A`: for the translation action this is
    /// `φ(x)1`, which needs no degree budget.
    pub fn e_b(&self, x: &Vector) -> Result<Vector> {
        if self.translation {
            let x = resize(x, self.alg.dim());
            return Ok(self.qg.delta_sparse.contract_right(&x, &self.qg.haar.functional));
        }
        Ok(self.alpha(x)? * resize(&self.qg.haar.functional, self.qg.m))
    }

    /// `(ι ⊗ ω)α(x)` for a functional on the window.
    pub fn slice(&self, x: &Vector, omega: &Vector) -> Result<Vector> {
        Ok(self.alpha(x)? * omega)
    }

    pub fn e_pi(&self, pi: usize, x: &Vector) -> Result<Vector> {
        self.slice(x, &self.qg.irreps[pi].omega)
    }

    /// Number of coordinates of degree at most `d` (all of them for finite `A`).
    pub fn prefix(&self, d: i64) -> usize {
        match self.window_degree {
            None => self.n,
            Some(_) if d < 0 => 0,
            Some(_) => self.alg.prefix_len(d as usize),
        }
    }

    fn degree_of_index(&self, i: usize) -> usize {
        (0..64).find(|&d| self.alg.prefix_len(d) > i).unwrap_or(0)
    }

    /// Degree of the coefficients of `π` (zero for finite quantum groups).
    pub fn pi_degree(&self, pi: usize) -> usize {
        if self.window_degree.is_none() {
            return 0;
        }
        let u = &self.qg.irreps[pi].u;
        u.iter()
            .flat_map(|v| v.iter().enumerate().filter(|(_, c)| c.norm() > 1e-12).map(|(i, _)| i))
            .map(|i| self.degree_of_index(i))
            .max()
            .unwrap_or(0)
    }

    /// `W` for graded algebras.
    pub fn window(&self) -> i64 {
        self.window_degree.map(|w| w as i64).unwrap_or(0)
    }

    pub fn is_graded(&self) -> bool {
        self.window_degree.is_some()
    }
}
