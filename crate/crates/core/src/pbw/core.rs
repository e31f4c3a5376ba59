//! Degree-truncated normal-form basis as a coordinate *-algebra.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use super::rewrite::{Letter, Poly, Word};
use super::PresentedQG;
use crate::error::{Error, Result};
use crate::fdlin::linalg::{Mat, Vector, C64};
use crate::fdlin::star::StarAlgebra;
use crate::qg::SparseCoproduct;

/// Product of two basis words: in-range terms plus the largest coefficient
/// that fell outside the truncation.
struct PairProduct {
    terms: Vec<(usize, C64)>,
    overflow: f64,
}

pub struct TruncatedCore {
    pub pqg: Arc<PresentedQG>,
    pub max_degree: usize,
    pub words: Vec<Word>,
    pub degrees: Vec<usize>,
    index: HashMap<Word, usize>,
    /// `prefix[d]` = number of basis words of degree at most `d`.
    prefix: Vec<usize>,
    stars: Vec<Vec<(usize, C64)>>,
    pairs: Mutex<HashMap<(u32, u32), Arc<PairProduct>>>,
}

/// Relative size below which out-of-range product terms are treated as
/// rounding noise in the inputs.
const OVERFLOW_NOISE: f64 = 1e-12;

impl TruncatedCore {
    pub fn new(pqg: Arc<PresentedQG>, max_degree: usize) -> Result<Self> {
        let nl = pqg.letters.len();
        let mut by_degree: Vec<Vec<Word>> = vec![Vec::new(); max_degree + 1];
        by_degree[0].push(vec![]);
        // extend normal words letter by letter; prefixes of normal words are normal
        let mut frontier: Vec<Word> = vec![vec![]];
        while let Some(w) = frontier.pop() {
            let d = pqg.degree(&w);
            for l in 0..nl {
                let ld = pqg.letters[l].degree;
                if d + ld > max_degree {
                    continue;
                }
                let mut x = w.clone();
                x.push(l as Letter);
                if pqg.rewriter.is_normal(&x) {
                    by_degree[d + ld].push(x.clone());
                    frontier.push(x);
                }
            }
        }
        let mut words = Vec::new();
        let mut degrees = Vec::new();
        let mut prefix = Vec::new();
        for (d, mut ws) in by_degree.into_iter().enumerate() {
            ws.sort();
            for w in ws {
                words.push(w);
                degrees.push(d);
            }
            prefix.push(words.len());
        }
        let index: HashMap<Word, usize> = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        let mut core = TruncatedCore {
            pqg,
            max_degree,
            words,
            degrees,
            index,
            prefix,
            stars: vec![],
            pairs: Mutex::new(HashMap::new()),
        };
        let mut stars = Vec::with_capacity(core.words.len());
        for w in &core.words {
            let nf = core.pqg.normal_form(&core.pqg.star_word(w))?;
            stars.push(core.indexed(&nf)?);
        }
        core.stars = stars;
        Ok(core)
    }

    pub fn index_of(&self, w: &[Letter]) -> Option<usize> {
        self.index.get(w).copied()
    }

    fn indexed(&self, p: &[(Word, C64)]) -> Result<Vec<(usize, C64)>> {
        p.iter()
            .map(|(w, c)| {
                self.index_of(w)
                    .map(|i| (i, *c))
                    .ok_or(Error::DegreeOverflow { needed: self.pqg.degree(w), max: self.max_degree })
            })
            .collect()
    }

    /// Coordinates of a combination of (not necessarily normal) words.
    pub fn poly_vector(&self, p: &Poly) -> Result<Vector> {
        let mut v = Vector::zeros(self.words.len());
        for (i, c) in self.indexed(&self.pqg.rewriter.reduce(p)?)? {
            v[i] += c;
        }
        Ok(v)
    }

    pub fn word_vector(&self, s: &str) -> Result<Vector> {
        self.poly_vector(&vec![(self.pqg.word(s)?, C64::new(1.0, 0.0))])
    }

    fn pair(&self, i: usize, j: usize) -> Result<Arc<PairProduct>> {
        let key = (i as u32, j as u32);
        if let Some(p) = self.pairs.lock().unwrap().get(&key) {
            return Ok(p.clone());
        }
        let mut w = self.words[i].clone();
        w.extend_from_slice(&self.words[j]);
        let nf = self.pqg.normal_form(&w)?;
        let mut terms = Vec::new();
        let mut overflow: f64 = 0.0;
        for (x, c) in nf.iter() {
            match self.index_of(x) {
                Some(k) => terms.push((k, *c)),
                None => overflow = overflow.max(c.norm()),
            }
        }
        let p = Arc::new(PairProduct { terms, overflow });
        self.pairs.lock().unwrap().insert(key, p.clone());
        Ok(p)
    }

    /// `Δ` on every basis word, multiplicatively from the letters.
    pub fn coproduct(&self) -> Result<SparseCoproduct> {
        let n = self.words.len();
        let mut cols: Vec<BTreeMap<(usize, usize), C64>> = vec![BTreeMap::new(); n];
        cols[0].insert((0, 0), C64::new(1.0, 0.0));
        let mut letter_cop: Vec<Vec<(usize, usize, C64)>> = Vec::new();
        for l in 0..self.pqg.letters.len() {
            let mut t = Vec::new();
            for (c, x, y) in &self.pqg.coproduct[l] {
                for (i, a) in self.indexed(&self.pqg.normal_form(x)?)? {
                    for (j, b) in self.indexed(&self.pqg.normal_form(y)?)? {
                        t.push((i, j, c * a * b));
                    }
                }
            }
            letter_cop.push(t);
        }
        for k in 1..n {
            let w = &self.words[k];
            let head = self.index_of(&w[..w.len() - 1]).expect("prefix of a normal word is normal");
            let last = *w.last().unwrap() as usize;
            let mut acc: BTreeMap<(usize, usize), C64> = BTreeMap::new();
            for (&(a, b), v) in &cols[head] {
                for &(x, y, u) in &letter_cop[last] {
                    let pa = self.pair(a, x)?;
                    let pb = self.pair(b, y)?;
                    if pa.overflow > 0.0 || pb.overflow > 0.0 {
                        return Err(Error::DegreeOverflow { needed: self.degrees[k], max: self.max_degree });
                    }
                    for &(i, ci) in &pa.terms {
                        for &(j, cj) in &pb.terms {
                            *acc.entry((i, j)).or_default() += v * u * ci * cj;
                        }
                    }
                }
            }
            acc.retain(|_, c| c.norm() > 1e-15);
            cols[k] = acc;
        }
        Ok(SparseCoproduct { dim: n, cols: cols.into_iter().map(|m| m.into_iter().map(|((a, b), c)| (a, b, c)).collect()).collect() })
    }

    pub fn counit_vector(&self) -> Vector {
        Vector::from_iterator(self.words.len(), self.words.iter().map(|w| self.pqg.counit_word(w)))
    }

    pub fn antipode_matrix(&self) -> Result<Mat> {
        let n = self.words.len();
        let mut s = Mat::zeros(n, n);
        for (k, w) in self.words.iter().enumerate() {
            for (i, c) in self.indexed(&self.pqg.antipode_word(w)?)? {
                s[(i, k)] += c;
            }
        }
        Ok(s)
    }

    pub fn word_names(&self) -> Vec<String> {
        self.words.iter().map(|w| self.pqg.word_name(w)).collect()
    }
}

impl StarAlgebra for TruncatedCore {
    fn dim(&self) -> usize {
        self.words.len()
    }

    fn unit(&self) -> Vector {
        let mut v = Vector::zeros(self.words.len());
        v[0] = C64::new(1.0, 0.0);
        v
    }

    fn mul(&self, x: &Vector, y: &Vector) -> Result<Vector> {
        let n = self.words.len();
        let mut out = Vector::zeros(n);
        let xs: Vec<(usize, C64)> = x.iter().enumerate().filter(|(_, c)| c.norm() != 0.0).map(|(i, c)| (i, *c)).collect();
        let ys: Vec<(usize, C64)> = y.iter().enumerate().filter(|(_, c)| c.norm() != 0.0).map(|(i, c)| (i, *c)).collect();
        let scale = xs.iter().map(|t| t.1.norm()).fold(0.0, f64::max) * ys.iter().map(|t| t.1.norm()).fold(0.0, f64::max);
        for &(i, a) in &xs {
            for &(j, b) in &ys {
                let p = self.pair(i, j)?;
                if p.overflow > 0.0 && p.overflow * (a * b).norm() >= OVERFLOW_NOISE * scale {
                    return Err(Error::DegreeOverflow { needed: self.degrees[i] + self.degrees[j], max: self.max_degree });
                }
                for &(k, c) in &p.terms {
                    out[k] += a * b * c;
                }
            }
        }
        Ok(out)
    }

    fn star(&self, x: &Vector) -> Vector {
        let mut out = Vector::zeros(self.words.len());
        for (i, c) in x.iter().enumerate() {
            if c.norm() != 0.0 {
                for &(k, d) in &self.stars[i] {
                    out[k] += c.conj() * d;
                }
            }
        }
        out
    }

    fn prefix_len(&self, degree: usize) -> usize {
        self.prefix[degree.min(self.max_degree)]
    }
}
