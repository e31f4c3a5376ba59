//! Bundled finite quantum groups built from group data.

use super::finite::FiniteQuantumGroup;
use super::LabelScheme;
use crate::error::{Error, Result};
use crate::fdlin::linalg::{Mat, Vector, C64};
use crate::fdlin::FdCStarAlgebra;

/// Multiplication table of a finite group: `table[g][h] = gh`, identity at 0.
pub fn check_group_table(table: &[Vec<usize>]) -> Result<()> {
    let n = table.len();
    for row in table {
        if row.len() != n || row.iter().any(|&x| x >= n) {
            return Err(Error::Invalid("group table is not square over its elements".into()));
        }
    }
    for g in 0..n {
        if table[0][g] != g || table[g][0] != g {
            return Err(Error::Invalid("element 0 is not the identity".into()));
        }
        for h in 0..n {
            for k in 0..n {
                if table[table[g][h]][k] != table[g][table[h][k]] {
                    return Err(Error::Invalid("group table is not associative".into()));
                }
            }
        }
    }
    Ok(())
}

fn inverse(table: &[Vec<usize>], g: usize) -> usize {
    (0..table.len()).find(|&h| table[g][h] == 0).expect("group element without inverse")
}

/// Functions on a finite group: `Δδ_g = Σ_{hk=g} δ_h ⊗ δ_k`.
pub fn c_group(name: &str, table: &[Vec<usize>]) -> Result<FiniteQuantumGroup> {
    check_group_table(table)?;
    let n = table.len();
    let one = C64::new(1.0, 0.0);
    let mut delta = Mat::zeros(n * n, n);
    let mut antipode = Mat::zeros(n, n);
    for h in 0..n {
        for k in 0..n {
            delta[(h * n + k, table[h][k])] = one;
        }
        antipode[(inverse(table, h), h)] = one;
    }
    let mut counit = Vector::zeros(n);
    counit[0] = one;
    FiniteQuantumGroup::new(name, FdCStarAlgebra::commutative(n)?, delta, counit, antipode)
}

pub fn cyclic_table(n: usize) -> Vec<Vec<usize>> {
    (0..n).map(|g| (0..n).map(|h| (g + h) % n).collect()).collect()
}

/// Permutations of three letters, identity first, composed as `(gh)(x) = g(h(x))`.
pub fn s3_elements() -> Vec<[usize; 3]> {
    vec![[0, 1, 2], [1, 2, 0], [2, 0, 1], [1, 0, 2], [0, 2, 1], [2, 1, 0]]
}

pub fn s3_table() -> Vec<Vec<usize>> {
    let el = s3_elements();
    let pos = |p: [usize; 3]| el.iter().position(|q| *q == p).unwrap();
    el.iter()
        .map(|g| el.iter().map(|h| pos([g[h[0]], g[h[1]], g[h[2]]])).collect())
        .collect()
}

pub fn c_zn(n: usize) -> Result<FiniteQuantumGroup> {
    Ok(c_group(&format!("c_z{n}"), &cyclic_table(n))?.with_labels(LabelScheme::Cyclic))
}

pub fn c_s3() -> Result<FiniteQuantumGroup> {
    Ok(c_group("c_s3", &s3_table())?.with_labels(LabelScheme::Symmetric3))
}

fn sign(p: &[usize; 3]) -> f64 {
    let mut inv = 0;
    for i in 0..3 {
        for j in i + 1..3 {
            if p[i] > p[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 { 1.0 } else { -1.0 }
}

/// Real orthogonal two-dimensional representation of the permutation group,
/// obtained by restricting the permutation action to the sum-zero plane.
fn standard_rep(p: &[usize; 3]) -> [[f64; 2]; 2] {
    let basis = [
        [1.0 / 2f64.sqrt(), -1.0 / 2f64.sqrt(), 0.0],
        [1.0 / 6f64.sqrt(), 1.0 / 6f64.sqrt(), -2.0 / 6f64.sqrt()],
    ];
    let mut out = [[0.0; 2]; 2];
    for j in 0..2 {
        let mut img = [0.0; 3];
        for x in 0..3 {
            img[p[x]] += basis[j][x];
        }
        for i in 0..2 {
            out[i][j] = (0..3).map(|x| basis[i][x] * img[x]).sum();
        }
    }
    out
}

/// The group algebra of the permutation group in the matrix-unit basis of
/// `C ⊕ C ⊕ M_2`, with `λ_g ↦ (1, sgn g, ρ(g))` and `Δλ_g = λ_g ⊗ λ_g`.
pub fn dual_s3() -> Result<FiniteQuantumGroup> {
    let el = s3_elements();
    let table = s3_table();
    let alg = FdCStarAlgebra::new(vec![1, 1, 2])?;
    let n = 6;
    let mut t = Mat::zeros(n, n);
    for (g, p) in el.iter().enumerate() {
        let r = standard_rep(p);
        t[(0, g)] = C64::new(1.0, 0.0);
        t[(1, g)] = C64::new(sign(p), 0.0);
        for i in 0..2 {
            for j in 0..2 {
                t[(alg.index(2, i, j), g)] = C64::new(r[i][j], 0.0);
            }
        }
    }
    let tinv = t.clone().try_inverse().ok_or_else(|| Error::Invalid("group elements do not span".into()))?;
    // group-basis structure maps
    let mut dg = Mat::zeros(n * n, n);
    let mut sg = Mat::zeros(n, n);
    for g in 0..n {
        dg[(g * n + g, g)] = C64::new(1.0, 0.0);
        sg[(inverse(&table, g), g)] = C64::new(1.0, 0.0);
    }
    let tt = t.kronecker(&t);
    let delta = &tt * dg * &tinv;
    let antipode = &t * sg * &tinv;
    let ones = Vector::from_element(n, C64::new(1.0, 0.0));
    let counit = tinv.transpose() * ones;
    let clean = |m: Mat| m.map(|z| if z.norm() < 1e-14 { C64::new(0.0, 0.0) } else { z });
    FiniteQuantumGroup::new("dual_s3", alg, clean(delta), clean(Mat::from_column_slice(n, 1, counit.as_slice())).column(0).into_owned(), clean(antipode))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s3_table_is_a_group() {
        let t = s3_table();
        check_group_table(&t).unwrap();
        // non-abelian
        assert!((0..6).any(|g| (0..6).any(|h| t[g][h] != t[h][g])));
    }

    #[test]
    fn standard_rep_is_a_homomorphism() {
        let el = s3_elements();
        let t = s3_table();
        for g in 0..6 {
            for h in 0..6 {
                let (a, b, c) = (standard_rep(&el[g]), standard_rep(&el[h]), standard_rep(&el[t[g][h]]));
                for i in 0..2 {
                    for j in 0..2 {
                        let p: f64 = (0..2).map(|k| a[i][k] * b[k][j]).sum();
                        assert!((p - c[i][j]).abs() < 1e-14);
                    }
                }
            }
        }
    }
}
