//! Word rewriting toward normal forms.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::fdlin::linalg::C64;

pub type Letter = u8;
pub type Word = Vec<Letter>;
/// Linear combination of words, sorted by word, no zero coefficients.
pub type Poly = Vec<(Word, C64)>;

#[derive(Clone, Debug)]
pub struct Rule {
    pub lhs: Word,
    pub rhs: Poly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    Leftmost,
    Rightmost,
}

/// Recursion guard; a terminating system never gets close on desk-scale words.
const MAX_DEPTH: usize = 1024;

pub struct Rewriter {
    pub rules: Vec<Rule>,
    memo: Mutex<HashMap<(Strategy, Word), Arc<Poly>>>,
}

pub fn collect(terms: impl IntoIterator<Item = (Word, C64)>) -> Poly {
    let mut acc: BTreeMap<Word, C64> = BTreeMap::new();
    for (w, c) in terms {
        *acc.entry(w).or_default() += c;
    }
    acc.into_iter().filter(|(_, c)| c.norm() > 1e-15).collect()
}

impl Rewriter {
    pub fn new(rules: Vec<Rule>) -> Self {
        Rewriter { rules, memo: Mutex::new(HashMap::new()) }
    }

    /// First match in the requested direction: `(position, rule index)`.
    pub fn find_match(&self, w: &[Letter], strategy: Strategy) -> Option<(usize, usize)> {
        let positions: Box<dyn Iterator<Item = usize>> = match strategy {
            Strategy::Leftmost => Box::new(0..w.len()),
            Strategy::Rightmost => Box::new((0..w.len()).rev()),
        };
        for p in positions {
            for (k, r) in self.rules.iter().enumerate() {
                if w[p..].starts_with(&r.lhs) {
                    return Some((p, k));
                }
            }
        }
        None
    }

    pub fn is_normal(&self, w: &[Letter]) -> bool {
        self.find_match(w, Strategy::Leftmost).is_none()
    }

    /// One rewriting step with rule `k` at position `p`.
    pub fn step(&self, w: &[Letter], p: usize, k: usize) -> Poly {
        let r = &self.rules[k];
        r.rhs
            .iter()
            .map(|(rw, c)| {
                let mut out = w[..p].to_vec();
                out.extend_from_slice(rw);
                out.extend_from_slice(&w[p + r.lhs.len()..]);
                (out, *c)
            })
            .collect()
    }

    pub fn normal_form(&self, w: &[Letter]) -> Result<Arc<Poly>> {
        self.normal_form_with(w, Strategy::Leftmost)
    }

    pub fn normal_form_with(&self, w: &[Letter], strategy: Strategy) -> Result<Arc<Poly>> {
        self.nf(w, strategy, 0)
    }

    fn nf(&self, w: &[Letter], strategy: Strategy, depth: usize) -> Result<Arc<Poly>> {
        if depth > MAX_DEPTH {
            return Err(Error::Rewrite(format!("rewriting does not terminate on a word of length {}", w.len())));
        }
        let key = (strategy, w.to_vec());
        if let Some(hit) = self.memo.lock().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        let result = match self.find_match(w, strategy) {
            None => vec![(w.to_vec(), C64::new(1.0, 0.0))],
            Some((p, k)) => {
                let mut terms = Vec::new();
                for (nw, c) in self.step(w, p, k) {
                    for (x, d) in self.nf(&nw, strategy, depth + 1)?.iter() {
                        terms.push((x.clone(), c * d));
                    }
                }
                collect(terms)
            }
        };
        let result = Arc::new(result);
        self.memo.lock().unwrap().insert(key, result.clone());
        Ok(result)
    }

    /// Normal form of a linear combination.
    pub fn reduce(&self, p: &Poly) -> Result<Poly> {
        let mut terms = Vec::new();
        for (w, c) in p {
            for (x, d) in self.normal_form(w)?.iter() {
                terms.push((x.clone(), c * d));
            }
        }
        Ok(collect(terms))
    }

    /// Critical pairs: proper overlaps and inclusions of left-hand sides, as
    /// `(word, first reduction, second reduction)`.
    pub fn critical_pairs(&self) -> Vec<(Word, Poly, Poly)> {
        let mut out = Vec::new();
        for (i, ri) in self.rules.iter().enumerate() {
            for (j, rj) in self.rules.iter().enumerate() {
                let (li, lj) = (&ri.lhs, &rj.lhs);
                for k in 1..li.len().min(lj.len()) {
                    if li[li.len() - k..] == lj[..k] {
                        let mut w = li.clone();
                        w.extend_from_slice(&lj[k..]);
                        out.push((w.clone(), self.step(&w, 0, i), self.step(&w, li.len() - k, j)));
                    }
                }
                if i != j && lj.len() < li.len() {
                    for p in 0..=li.len() - lj.len() {
                        if li[p..].starts_with(lj) {
                            out.push((li.clone(), self.step(li, 0, i), self.step(li, p, j)));
                        }
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(lhs: &[u8], rhs: &[(f64, &[u8])]) -> Rule {
        Rule { lhs: lhs.to_vec(), rhs: rhs.iter().map(|(c, w)| (w.to_vec(), C64::new(*c, 0.0))).collect() }
    }

    #[test]
    fn commutative_ordering() {
        // letters 0 < 1; rule 1 0 -> 0 1 sorts any word
        let rw = Rewriter::new(vec![r(&[1, 0], &[(1.0, &[0, 1])])]);
        let nf = rw.normal_form(&[1, 1, 0, 1, 0]).unwrap();
        assert_eq!(nf.as_slice(), &[(vec![0, 0, 1, 1, 1], C64::new(1.0, 0.0))]);
        assert_eq!(rw.normal_form(&[]).unwrap()[0].0, Vec::<u8>::new());
    }

    #[test]
    fn non_terminating_system_is_reported() {
        let rw = Rewriter::new(vec![r(&[0], &[(1.0, &[0, 0])])]);
        assert!(rw.normal_form(&[0]).is_err());
    }

    #[test]
    fn strategies_agree_on_confluent_system() {
        let rw = Rewriter::new(vec![r(&[1, 0], &[(2.0, &[0, 1])])]);
        let w = [1, 0, 1, 1, 0, 0];
        assert_eq!(
            rw.normal_form_with(&w, Strategy::Leftmost).unwrap(),
            rw.normal_form_with(&w, Strategy::Rightmost).unwrap()
        );
    }
}
