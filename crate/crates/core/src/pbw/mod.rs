//! Algebraic cores of compact matrix quantum groups from generators and
//! relations, truncated by degree.

pub mod core;
pub mod rewrite;
pub mod suq2;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::{json, Value};

pub use self::core::TruncatedCore;
pub use rewrite::{Letter, Poly, Rewriter, Rule, Strategy, Word};

use crate::error::{Error, Result};
use crate::fdlin::json::{complex_from_json, complex_to_json};
use crate::fdlin::linalg::{MaxAbs, Mat, Vector, C64};
use crate::fdlin::star::StarAlgebra;
use crate::qg::{LabelScheme, QgData, QuantumGroup};
use rewrite::collect;

/// A letter: a generator or the formal adjoint of one.
#[derive(Clone, Debug)]
pub struct LetterInfo {
    pub name: String,
    pub degree: usize,
    pub adjoint: Letter,
}

/// Sums of `coef · w ⊗ w'`.
pub type TensorPoly = Vec<(C64, Word, Word)>;

pub struct PresentedQG {
    pub name: String,
    pub letters: Vec<LetterInfo>,
    pub rewriter: Arc<Rewriter>,
    pub coproduct: Vec<TensorPoly>,
    pub counit: Vec<C64>,
    pub antipode: Vec<Poly>,
    /// Fundamental corepresentation, entries as combinations of words.
    pub fundamental: Vec<Vec<Poly>>,
    pub truncation: usize,
    pub scheme: LabelScheme,
}

fn parse_word(letters: &[LetterInfo], s: &str) -> Result<Word> {
    s.split_whitespace()
        .map(|t| {
            letters
                .iter()
                .position(|l| l.name == t)
                .map(|i| i as Letter)
                .ok_or_else(|| Error::Invalid(format!("unknown letter {t:?} in word {s:?}")))
        })
        .collect()
}

fn parse_poly(letters: &[LetterInfo], v: &Value) -> Result<Poly> {
    let arr = v.as_array().ok_or_else(|| Error::Invalid("expected a list of [coeff, word] terms".into()))?;
    arr.iter()
        .map(|t| match t.as_array().map(|a| a.as_slice()) {
            Some([c, w]) => Ok((parse_word(letters, w.as_str().unwrap_or("\u{0}"))?, complex_from_json(c)?)),
            _ => Err(Error::Invalid(format!("malformed term {t}"))),
        })
        .collect()
}

impl PresentedQG {
    pub fn word_name(&self, w: &[Letter]) -> String {
        w.iter().map(|&l| self.letters[l as usize].name.as_str()).collect::<Vec<_>>().join(" ")
    }

    pub fn word(&self, s: &str) -> Result<Word> {
        parse_word(&self.letters, s)
    }

    pub fn degree(&self, w: &[Letter]) -> usize {
        w.iter().map(|&l| self.letters[l as usize].degree).sum()
    }

    pub fn star_word(&self, w: &[Letter]) -> Word {
        w.iter().rev().map(|&l| self.letters[l as usize].adjoint).collect()
    }

    pub fn star_poly(&self, p: &Poly) -> Poly {
        collect(p.iter().map(|(w, c)| (self.star_word(w), c.conj())))
    }

    pub fn normal_form(&self, w: &[Letter]) -> Result<Arc<Poly>> {
        self.rewriter.normal_form(w)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        if v.get("kind").and_then(Value::as_str) != Some("presented") {
            return Err(Error::Invalid("expected \"kind\": \"presented\"".into()));
        }
        let gens: Vec<String> = serde_json::from_value(v.get("generators").cloned().unwrap_or(Value::Null))
            .map_err(|e| Error::Invalid(format!("generators: {e}")))?;
        if gens.is_empty() || gens.len() > 100 {
            return Err(Error::Invalid("need between 1 and 100 generators".into()));
        }
        let degrees = v.get("degrees").cloned().unwrap_or(json!({}));
        let mut letters = Vec::new();
        for (k, g) in gens.iter().enumerate() {
            let d = degrees.get(g).and_then(Value::as_u64).unwrap_or(1) as usize;
            if d == 0 {
                return Err(Error::Invalid(format!("generator {g} has degree 0")));
            }
            letters.push(LetterInfo { name: g.clone(), degree: d, adjoint: (2 * k + 1) as Letter });
            letters.push(LetterInfo { name: format!("{g}*"), degree: d, adjoint: (2 * k) as Letter });
        }
        let mut rules = Vec::new();
        for r in v.get("relations").and_then(Value::as_array).ok_or_else(|| Error::Invalid("missing relations".into()))? {
            let lhs = parse_word(&letters, r.get("lhs").and_then(Value::as_str).unwrap_or(""))?;
            if lhs.is_empty() {
                return Err(Error::Invalid("relation with empty left-hand side".into()));
            }
            let rhs = parse_poly(&letters, r.get("rhs").unwrap_or(&Value::Null))?;
            rules.push(Rule { lhs, rhs });
        }
        let nl = letters.len();
        let mut coproduct: Vec<Option<TensorPoly>> = vec![None; nl];
        let mut counit: Vec<Option<C64>> = vec![None; nl];
        let mut antipode: Vec<Option<Poly>> = vec![None; nl];
        let obj = |k: &str| v.get(k).and_then(Value::as_object).ok_or_else(|| Error::Invalid(format!("missing object {k}")));
        for (name, terms) in obj("coproduct")? {
            let l = parse_word(&letters, name)?;
            let arr = terms.as_array().ok_or_else(|| Error::Invalid(format!("coproduct of {name}")))?;
            let mut tp = Vec::new();
            for t in arr {
                match t.as_array().map(|a| a.as_slice()) {
                    Some([c, w1, w2]) => tp.push((
                        complex_from_json(c)?,
                        parse_word(&letters, w1.as_str().unwrap_or("\u{0}"))?,
                        parse_word(&letters, w2.as_str().unwrap_or("\u{0}"))?,
                    )),
                    _ => return Err(Error::Invalid(format!("malformed coproduct term {t}"))),
                }
            }
            coproduct[l[0] as usize] = Some(tp);
        }
        for (name, c) in obj("counit")? {
            counit[parse_word(&letters, name)?[0] as usize] = Some(complex_from_json(c)?);
        }
        for (name, p) in obj("antipode")? {
            antipode[parse_word(&letters, name)?[0] as usize] = Some(parse_poly(&letters, p)?);
        }
        // adjoint letters default to the adjoint data
        for l in 0..nl {
            let a = letters[l].adjoint as usize;
            let star_w = |w: &Word| -> Word { w.iter().rev().map(|&x| letters[x as usize].adjoint).collect() };
            if coproduct[l].is_none() {
                if let Some(tp) = coproduct[a].clone() {
                    coproduct[l] = Some(tp.iter().map(|(c, w1, w2)| (c.conj(), star_w(w1), star_w(w2))).collect());
                }
            }
            if counit[l].is_none() {
                counit[l] = counit[a].map(|c| c.conj());
            }
        }
        let missing = |what: &str, l: usize| Error::Invalid(format!("{what} of letter {} is not given", letters[l].name));
        let coproduct = (0..nl).map(|l| coproduct[l].clone().ok_or_else(|| missing("coproduct", l))).collect::<Result<Vec<_>>>()?;
        let counit = (0..nl).map(|l| counit[l].ok_or_else(|| missing("counit", l))).collect::<Result<Vec<_>>>()?;
        let antipode = (0..nl).map(|l| antipode[l].clone().ok_or_else(|| missing("antipode", l))).collect::<Result<Vec<_>>>()?;
        let fundamental = match v.get("fundamental") {
            Some(f) => f
                .as_array()
                .ok_or_else(|| Error::Invalid("fundamental must be a matrix".into()))?
                .iter()
                .map(|row| {
                    row.as_array()
                        .ok_or_else(|| Error::Invalid("fundamental row".into()))?
                        .iter()
                        .map(|e| parse_poly(&letters, e))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?,
            None => vec![],
        };
        let truncation = v.get("truncation").and_then(Value::as_u64).unwrap_or(6) as usize;
        let scheme = match v.get("labels").and_then(Value::as_str) {
            Some("spin") => LabelScheme::Spin,
            _ => LabelScheme::Generic,
        };
        Ok(PresentedQG {
            name: v.get("name").and_then(Value::as_str).unwrap_or("presented").to_string(),
            letters,
            rewriter: Arc::new(Rewriter::new(rules)),
            coproduct,
            counit,
            antipode,
            fundamental,
            truncation,
            scheme,
        })
    }

    pub fn to_json(&self) -> Value {
        let poly = |p: &Poly| Value::Array(p.iter().map(|(w, c)| json!([complex_to_json(*c), self.word_name(w)])).collect());
        let gens: Vec<&str> = self.letters.iter().step_by(2).map(|l| l.name.as_str()).collect();
        let mut coproduct = serde_json::Map::new();
        let mut counit = serde_json::Map::new();
        let mut antipode = serde_json::Map::new();
        for (l, info) in self.letters.iter().enumerate() {
            if l % 2 == 0 {
                coproduct.insert(
                    info.name.clone(),
                    Value::Array(self.coproduct[l].iter().map(|(c, a, b)| json!([complex_to_json(*c), self.word_name(a), self.word_name(b)])).collect()),
                );
                counit.insert(info.name.clone(), complex_to_json(self.counit[l]));
            }
            antipode.insert(info.name.clone(), poly(&self.antipode[l]));
        }
        let degrees: serde_json::Map<String, Value> = self.letters.iter().step_by(2).map(|l| (l.name.clone(), json!(l.degree))).collect();
        json!({
            "kind": "presented",
            "name": self.name,
            "generators": gens,
            "degrees": degrees,
            "relations": self.rewriter.rules.iter().map(|r| json!({"lhs": self.word_name(&r.lhs), "rhs": poly(&r.rhs)})).collect::<Vec<_>>(),
            "coproduct": coproduct,
            "counit": counit,
            "antipode": antipode,
            "fundamental": self.fundamental.iter().map(|row| row.iter().map(poly).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "truncation": self.truncation,
            "labels": match self.scheme { LabelScheme::Spin => "spin", _ => "generic" },
        })
    }

    /// Truncated core on normal words of degree at most `max_degree`.
    pub fn core(self: &Arc<Self>, max_degree: usize) -> Result<TruncatedCore> {
        TruncatedCore::new(self.clone(), max_degree)
    }

    /// Structure data with the given window and ambient degrees.
    pub fn qg_data(self: &Arc<Self>, window_degree: usize, ambient_degree: usize) -> Result<QgData> {
        if ambient_degree < 2 * window_degree {
            return Err(Error::Invalid(format!(
                "ambient degree {ambient_degree} cannot hold products of window degree {window_degree}"
            )));
        }
        let core = Arc::new(self.core(ambient_degree)?);
        let delta = core.coproduct()?;
        let counit = core.counit_vector();
        let antipode = core.antipode_matrix()?;
        Ok(QgData { name: self.name.clone(), window: core.prefix_len(window_degree), alg: core, delta, counit, antipode })
    }

    pub fn quantum_group(self: &Arc<Self>, window_degree: usize, seed: u64, tol: f64) -> Result<QuantumGroup> {
        QuantumGroup::build(self.qg_data(window_degree, 2 * window_degree)?, seed, self.scheme, tol)
    }

    /// `Δ` of an arbitrary word through the letter coproducts, in normal forms.
    pub fn coproduct_word(&self, w: &[Letter]) -> Result<BTreeMap<(Word, Word), C64>> {
        let mut acc: BTreeMap<(Word, Word), C64> = BTreeMap::new();
        acc.insert((vec![], vec![]), C64::new(1.0, 0.0));
        for &l in w {
            let mut next: BTreeMap<(Word, Word), C64> = BTreeMap::new();
            for ((x, y), c) in &acc {
                for (d, lx, ly) in &self.coproduct[l as usize] {
                    let mut xx = x.clone();
                    xx.extend_from_slice(lx);
                    let mut yy = y.clone();
                    yy.extend_from_slice(ly);
                    for (nx, cx) in self.normal_form(&xx)?.iter() {
                        for (ny, cy) in self.normal_form(&yy)?.iter() {
                            *next.entry((nx.clone(), ny.clone())).or_default() += c * d * cx * cy;
                        }
                    }
                }
            }
            acc = next;
        }
        acc.retain(|_, c| c.norm() > 1e-15);
        Ok(acc)
    }

    pub fn counit_word(&self, w: &[Letter]) -> C64 {
        w.iter().fold(C64::new(1.0, 0.0), |acc, &l| acc * self.counit[l as usize])
    }

    /// `S` of a word (anti-multiplicative), in normal form.
    pub fn antipode_word(&self, w: &[Letter]) -> Result<Poly> {
        let mut acc: Poly = vec![(vec![], C64::new(1.0, 0.0))];
        for &l in w {
            let mut terms = Vec::new();
            for (sw, c) in &self.antipode[l as usize] {
                for (x, d) in &acc {
                    let mut y = sw.clone();
                    y.extend_from_slice(x);
                    terms.push((y, c * d));
                }
            }
            acc = self.rewriter.reduce(&collect(terms))?;
        }
        Ok(acc)
    }

    /// Largest violation of a relation's image under `Δ`, `ε`, `S` and `*`.
    pub fn relation_images(&self) -> Result<RelationReport> {
        let mut rep = RelationReport::default();
        for r in &self.rewriter.rules {
            let mut d = self.coproduct_word(&r.lhs)?;
            for (w, c) in &r.rhs {
                for (k, v) in self.coproduct_word(w)? {
                    *d.entry(k).or_default() -= c * v;
                }
            }
            rep.coproduct = rep.coproduct.max(d.values().map(|c| c.norm()).fold(0.0, f64::max));
            let e = self.counit_word(&r.lhs) - r.rhs.iter().map(|(w, c)| c * self.counit_word(w)).sum::<C64>();
            rep.counit = rep.counit.max(e.norm());
            let mut s = self.antipode_word(&r.lhs)?;
            for (w, c) in &r.rhs {
                s.extend(self.antipode_word(w)?.into_iter().map(|(x, d)| (x, -c * d)));
            }
            rep.antipode = rep.antipode.max(collect(s).iter().map(|t| t.1.norm()).fold(0.0, f64::max));
            let mut st = vec![(self.star_word(&r.lhs), C64::new(1.0, 0.0))];
            st.extend(self.star_poly(&r.rhs).into_iter().map(|(w, c)| (w, -c)));
            rep.star = rep.star.max(self.rewriter.reduce(&st)?.iter().map(|t| t.1.norm()).fold(0.0, f64::max));
        }
        Ok(rep)
    }

    /// Resolves every critical pair and compares the two rewriting strategies
    /// on random words up to `2L`.
    pub fn confluence(&self, samples: usize, seed: u64) -> Result<ConfluenceReport> {
        use rand::{Rng, SeedableRng};
        let mut worst: f64 = 0.0;
        let pairs = self.rewriter.critical_pairs();
        for (w, a, b) in &pairs {
            if self.degree(w) > 2 * self.truncation {
                continue;
            }
            let mut diff = self.rewriter.reduce(a)?;
            diff.extend(self.rewriter.reduce(b)?.into_iter().map(|(x, c)| (x, -c)));
            worst = worst.max(collect(diff).iter().map(|t| t.1.norm()).fold(0.0, f64::max));
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut strategy_gap: f64 = 0.0;
        for _ in 0..samples {
            let len = rng.random_range(1..=2 * self.truncation);
            let mut w = Vec::new();
            while w.len() < len {
                let l = rng.random_range(0..self.letters.len()) as Letter;
                if self.degree(&w) + self.letters[l as usize].degree <= 2 * self.truncation {
                    w.push(l);
                } else {
                    break;
                }
            }
            let l = self.rewriter.normal_form_with(&w, Strategy::Leftmost)?;
            let r = self.rewriter.normal_form_with(&w, Strategy::Rightmost)?;
            let mut diff: Poly = l.iter().cloned().collect();
            diff.extend(r.iter().map(|(x, c)| (x.clone(), -c)));
            strategy_gap = strategy_gap.max(collect(diff).iter().map(|t| t.1.norm()).fold(0.0, f64::max));
        }
        Ok(ConfluenceReport { critical_pairs: pairs.len(), critical_residual: worst, strategy_residual: strategy_gap })
    }

    /// Fundamental corepresentation entries as vectors in a core.
    pub fn fundamental_in(&self, core: &TruncatedCore) -> Result<Vec<Vec<Vector>>> {
        self.fundamental.iter().map(|row| row.iter().map(|p| core.poly_vector(p)).collect()).collect()
    }

    /// `Σ_k u_ik* u_jk − δ_ij` and `Σ_k u_ki u_kj* − δ_ij` over the fundamental.
    pub fn fundamental_unitarity(&self, core: &TruncatedCore) -> Result<f64> {
        let u = self.fundamental_in(core)?;
        let n = u.len();
        let unit = core.unit();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut a = Vector::zeros(core.dim());
                let mut b = Vector::zeros(core.dim());
                for k in 0..n {
                    a += core.mul(&core.star(&u[i][k]), &u[j][k])?;
                    b += core.mul(&u[k][i], &core.star(&u[k][j]))?;
                }
                let e = if i == j { unit.clone() } else { Vector::zeros(core.dim()) };
                worst = worst.max((a - &e).max_abs()).max((b - &e).max_abs());
            }
        }
        Ok(worst)
    }

    /// `Δ(u_ij) = Σ_k u_ik ⊗ u_kj` for the fundamental.
    pub fn fundamental_comultiplicativity(&self, core: &TruncatedCore) -> Result<f64> {
        let u = self.fundamental_in(core)?;
        let delta = core.coproduct()?;
        let n = u.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut expect = Mat::zeros(core.dim(), core.dim());
                for k in 0..n {
                    expect += &u[i][k] * u[k][j].transpose();
                }
                worst = worst.max((delta.apply(&u[i][j]) - expect).max_abs());
            }
        }
        Ok(worst)
    }
}

#[derive(Clone, Debug, Default, serde::Serialize)]
pub struct RelationReport {
    pub coproduct: f64,
    pub counit: f64,
    pub antipode: f64,
    pub star: f64,
}

impl RelationReport {
    pub fn max(&self) -> f64 {
        self.coproduct.max(self.counit).max(self.antipode).max(self.star)
    }
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct ConfluenceReport {
    pub critical_pairs: usize,
    pub critical_residual: f64,
    pub strategy_residual: f64,
}

/// Degree-`d` Haar state as the invariance kernel on the degree-`d` core.
pub fn truncated_haar(pqg: &Arc<PresentedQG>, degree: usize) -> Result<crate::qg::HaarSolution> {
    if degree > 2 * pqg.truncation {
        return Err(Error::DegreeOverflow { needed: degree, max: 2 * pqg.truncation });
    }
    let core = pqg.core(degree)?;
    crate::qg::haar::solve_haar(&core.coproduct()?, &core.unit())
}

/// Largest difference between the degree-`lo` Haar state and the restriction
/// of the degree-`hi` one.
pub fn haar_consistency(pqg: &Arc<PresentedQG>, lo: usize, hi: usize) -> Result<f64> {
    let a = truncated_haar(pqg, lo)?.functional;
    let b = truncated_haar(pqg, hi)?.functional;
    Ok((b.rows(0, a.len()) - &a).max_abs())
}

/// Residual of `φ(g h₍₂₎) h₍₁₎ = φ(g₍₂₎ h) S(g₍₁₎)`.
pub fn strong_left_invariance_check(qg: &QuantumGroup, g: &Vector, h: &Vector) -> Result<f64> {
    let n = qg.ambient_dim();
    let dh = qg.coproduct_ambient(h);
    let dg = qg.coproduct_ambient(g);
    let mut lhs = Vector::zeros(n);
    let mut rhs = Vector::zeros(n);
    let basis = |i: usize| {
        let mut v = Vector::zeros(n);
        v[i] = C64::new(1.0, 0.0);
        v
    };
    for a in 0..n {
        for b in 0..n {
            if dh[(a, b)].norm() != 0.0 {
                lhs[a] += dh[(a, b)] * qg.phi(&qg.mul(g, &basis(b))?);
            }
            if dg[(a, b)].norm() != 0.0 {
                let s = qg.antipode_apply(&basis(a));
                rhs += s * (dg[(a, b)] * qg.phi(&qg.mul(&basis(b), h)?));
            }
        }
    }
    Ok((lhs - rhs).max_abs())
}
