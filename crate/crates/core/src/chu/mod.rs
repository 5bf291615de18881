//! Finite Chu spaces over {0,1}: logic instances as satisfaction tables,
//! transforms between them, the induced order, preservation checks and the
//! relativizing transform between chain truth and classical truth.

mod pc;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use pc::{pc_transform_pair, PcPair, PcReport};

#[derive(Debug, Error)]
pub enum ChuError {
    #[error("ill-typed transform: {0}")]
    IllTyped(String),
    #[error("instances do not match: {0}")]
    Mismatch(String),
    #[error("instance has no boolean structure")]
    NoBooleanStructure,
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error(transparent)]
    Formula(#[from] crate::formulas::FormulaError),
    #[error(transparent)]
    Semantics(#[from] crate::semantics::SemanticsError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

/// A conjunction or disjunction entry: `is` has the row of the combination of `of`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Combination {
    pub of: Vec<String>,
    pub is: String,
}

/// Sentences, models and a total satisfaction table, `table[model][sentence]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiniteLogicInstance {
    pub sentences: Vec<String>,
    pub models: Vec<String>,
    pub table: Vec<Vec<u8>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub neg: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub and: Vec<Combination>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub or: Vec<Combination>,
}

impl FiniteLogicInstance {
    /// An instance without boolean structure, from a satisfaction predicate.
    pub fn from_fn(sentences: Vec<String>, models: Vec<String>, sat: impl Fn(usize, usize) -> bool) -> Self {
        let table = (0..models.len()).map(|m| (0..sentences.len()).map(|s| sat(m, s) as u8).collect()).collect();
        FiniteLogicInstance { sentences, models, table, neg: BTreeMap::new(), and: Vec::new(), or: Vec::new() }
    }

    pub fn from_json(text: &str) -> Result<Self, ChuError> {
        let inst: FiniteLogicInstance = serde_json::from_str(text)?;
        inst.validate()?;
        Ok(inst)
    }

    pub fn read(path: &Path) -> Result<Self, ChuError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ChuError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    pub fn sentence(&self, id: &str) -> Option<usize> {
        self.sentences.iter().position(|s| s == id)
    }

    pub fn model(&self, id: &str) -> Option<usize> {
        self.models.iter().position(|m| m == id)
    }

    pub fn sat(&self, model: usize, sentence: usize) -> bool {
        self.table[model][sentence] == 1
    }

    /// The truth values of `sentence` across all models.
    pub fn row(&self, sentence: usize) -> Vec<bool> {
        (0..self.models.len()).map(|m| self.sat(m, sentence)).collect()
    }

    pub fn satisfiable(&self, sentence: usize) -> bool {
        (0..self.models.len()).any(|m| self.sat(m, sentence))
    }

    pub fn has_boolean_structure(&self) -> bool {
        !(self.neg.is_empty() && self.and.is_empty() && self.or.is_empty())
    }

    /// Table totality, unique ids, and boolean maps consistent with the table.
    pub fn validate(&self) -> Result<(), ChuError> {
        let dup = |ids: &[String], what: &str| -> Result<(), ChuError> {
            let set: BTreeSet<&String> = ids.iter().collect();
            if set.len() != ids.len() {
                return Err(ChuError::Invalid(format!("duplicate {what} id")));
            }
            Ok(())
        };
        dup(&self.sentences, "sentence")?;
        dup(&self.models, "model")?;
        if self.table.len() != self.models.len() {
            return Err(ChuError::Invalid(format!(
                "table has {} rows for {} models",
                self.table.len(),
                self.models.len()
            )));
        }
        for (i, row) in self.table.iter().enumerate() {
            if row.len() != self.sentences.len() {
                return Err(ChuError::Invalid(format!("table row {i} has {} entries", row.len())));
            }
            if row.iter().any(|&b| b > 1) {
                return Err(ChuError::Invalid(format!("table row {i} has a value other than 0 or 1")));
            }
        }
        let idx = |id: &str| self.sentence(id).ok_or_else(|| ChuError::Invalid(format!("unknown sentence `{id}`")));
        for (p, q) in &self.neg {
            let (p, q) = (idx(p)?, idx(q)?);
            if (0..self.models.len()).any(|m| self.sat(m, p) == self.sat(m, q)) {
                return Err(ChuError::Invalid(format!(
                    "`{}` is not the negation of `{}`",
                    self.sentences[q], self.sentences[p]
                )));
            }
        }
        for (list, all) in [(&self.and, true), (&self.or, false)] {
            for c in list {
                let parts = c.of.iter().map(|s| idx(s)).collect::<Result<Vec<_>, _>>()?;
                let whole = idx(&c.is)?;
                let bad = (0..self.models.len()).any(|m| {
                    let v =
                        if all { parts.iter().all(|&p| self.sat(m, p)) } else { parts.iter().any(|&p| self.sat(m, p)) };
                    v != self.sat(m, whole)
                });
                if bad {
                    let op = if all { "conjunction" } else { "disjunction" };
                    return Err(ChuError::Invalid(format!("`{}` is not the {op} of {:?}", c.is, c.of)));
                }
            }
        }
        Ok(())
    }
}

/// `f` maps sentences of the first instance to sentences of the second; `g`
/// maps models of the second back to models of the first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChuTransform {
    pub f: Vec<(String, String)>,
    pub g: Vec<(String, String)>,
}

impl ChuTransform {
    pub fn identity(l: &FiniteLogicInstance) -> Self {
        ChuTransform {
            f: l.sentences.iter().map(|s| (s.clone(), s.clone())).collect(),
            g: l.models.iter().map(|m| (m.clone(), m.clone())).collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ChuError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: &Path) -> Result<Self, ChuError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ChuError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    /// Index maps, checked total and well-typed.
    fn typed(&self, l1: &FiniteLogicInstance, l2: &FiniteLogicInstance) -> Result<(Vec<usize>, Vec<usize>), ChuError> {
        let f = map_indices(&self.f, &l1.sentences, &l2.sentences, "f", "sentence")?;
        let g = map_indices(&self.g, &l2.models, &l1.models, "g", "model")?;
        Ok((f, g))
    }
}

fn map_indices(
    assoc: &[(String, String)],
    from: &[String],
    to: &[String],
    name: &str,
    what: &str,
) -> Result<Vec<usize>, ChuError> {
    let mut out = vec![None; from.len()];
    for (a, b) in assoc {
        let i = from
            .iter()
            .position(|x| x == a)
            .ok_or_else(|| ChuError::IllTyped(format!("{name} maps unknown {what} `{a}`")))?;
        let j = to
            .iter()
            .position(|x| x == b)
            .ok_or_else(|| ChuError::IllTyped(format!("{name} maps `{a}` to unknown {what} `{b}`")))?;
        if out[i].replace(j).is_some_and(|old| old != j) {
            return Err(ChuError::IllTyped(format!("{name} maps `{a}` twice")));
        }
    }
    out.iter()
        .enumerate()
        .map(|(i, o)| o.ok_or_else(|| ChuError::IllTyped(format!("{name} is undefined on `{}`", from[i]))))
        .collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ChuReport {
    pub adjoint: bool,
    pub dense: bool,
    pub counterexamples: Vec<String>,
}

impl ChuReport {
    pub fn ok(&self) -> bool {
        self.adjoint && self.dense
    }
}

fn check_indices(f: &[usize], g: &[usize], l1: &FiniteLogicInstance, l2: &FiniteLogicInstance) -> ChuReport {
    let mut cx = Vec::new();
    for (s, &fs) in f.iter().enumerate() {
        for (m2, &gm) in g.iter().enumerate() {
            if l2.sat(m2, fs) != l1.sat(gm, s) {
                cx.push(format!(
                    "adjointness fails at ({}, {}): {} ⊨ {} is {} but {} ⊨ {} is {}",
                    l1.sentences[s],
                    l2.models[m2],
                    l2.models[m2],
                    l2.sentences[fs],
                    l2.sat(m2, fs),
                    l1.models[gm],
                    l1.sentences[s],
                    l1.sat(gm, s)
                ));
            }
        }
    }
    let adjoint = cx.is_empty();
    let mut dense = true;
    for s in 0..l1.sentences.len() {
        if l1.satisfiable(s) && !g.iter().any(|&gm| l1.sat(gm, s)) {
            dense = false;
            cx.push(format!(
                "density fails at {}: satisfiable but no model in the range of g satisfies it",
                l1.sentences[s]
            ));
        }
    }
    ChuReport { adjoint, dense, counterexamples: cx }
}

/// Adjointness at every (sentence, model) pair and density of the range of `g`.
pub fn verify_transform(
    t: &ChuTransform,
    l1: &FiniteLogicInstance,
    l2: &FiniteLogicInstance,
) -> Result<ChuReport, ChuError> {
    let (f, g) = t.typed(l1, l2)?;
    Ok(check_indices(&f, &g, l1, l2))
}

/// Default cap on candidate (f, g) pairs examined by [`search_transform`].
pub const DEFAULT_SEARCH_BUDGET: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchResult {
    pub found: Option<ChuTransform>,
    /// True when the whole space was searched.
    pub exhaustive: bool,
    pub candidates: u64,
}

/// Candidate targets for source `id`: the same id first, then the rest in order.
fn preference(id: &str, targets: &[String]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..targets.len()).collect();
    order.sort_by_key(|&j| (targets[j] != id, j));
    order
}

/// Deterministic backtracking search: `f` before `g`, each source tried
/// against its same-id target first and then in list order. A partial `f` is
/// abandoned once some model of `l2` has no adjoint partner left.
pub fn search_transform(l1: &FiniteLogicInstance, l2: &FiniteLogicInstance, budget: u64) -> SearchResult {
    struct S<'a> {
        l1: &'a FiniteLogicInstance,
        l2: &'a FiniteLogicInstance,
        budget: u64,
        used: u64,
        out_of_budget: bool,
        f: Vec<usize>,
    }
    impl S<'_> {
        /// Models of `l1` that can be `g(m2)` given the current partial `f`.
        fn partners(&self, m2: usize) -> Vec<usize> {
            preference(&self.l2.models[m2], &self.l1.models)
                .into_iter()
                .filter(|&m1| self.f.iter().enumerate().all(|(s, &fs)| self.l2.sat(m2, fs) == self.l1.sat(m1, s)))
                .collect()
        }

        fn search_f(&mut self) -> Option<Vec<usize>> {
            let s = self.f.len();
            if s == self.l1.sentences.len() {
                let options: Vec<Vec<usize>> = (0..self.l2.models.len()).map(|m2| self.partners(m2)).collect();
                return self.search_g(&options, &mut Vec::new());
            }
            for t in preference(&self.l1.sentences[s], &self.l2.sentences) {
                self.f.push(t);
                let alive = (0..self.l2.models.len()).all(|m2| !self.partners(m2).is_empty());
                if alive {
                    if let Some(g) = self.search_f() {
                        return Some(g);
                    }
                }
                self.f.pop();
                if self.out_of_budget {
                    return None;
                }
            }
            None
        }

        fn search_g(&mut self, options: &[Vec<usize>], g: &mut Vec<usize>) -> Option<Vec<usize>> {
            if g.len() == options.len() {
                if self.used >= self.budget {
                    self.out_of_budget = true;
                    return None;
                }
                self.used += 1;
                let ok = check_indices(&self.f, g, self.l1, self.l2).ok();
                return ok.then(|| g.clone());
            }
            for &m1 in &options[g.len()] {
                g.push(m1);
                if let Some(found) = self.search_g(options, g) {
                    return Some(found);
                }
                g.pop();
                if self.out_of_budget {
                    return None;
                }
            }
            None
        }
    }
    let mut s = S { l1, l2, budget, used: 0, out_of_budget: false, f: Vec::new() };
    let found = s.search_f().map(|g| ChuTransform {
        f: s.f.iter().enumerate().map(|(i, &j)| (l1.sentences[i].clone(), l2.sentences[j].clone())).collect(),
        g: g.iter().enumerate().map(|(i, &j)| (l2.models[i].clone(), l1.models[j].clone())).collect(),
    });
    SearchResult { exhaustive: !s.out_of_budget, candidates: s.used, found }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Composition {
    pub transform: ChuTransform,
    pub report: ChuReport,
    /// Density is re-verified on the composite rather than inherited.
    pub density_rechecked: bool,
}

/// `(f₂∘f₁, g₁∘g₂)`, verified afresh.
pub fn compose(
    t1: &ChuTransform,
    t2: &ChuTransform,
    l1: &FiniteLogicInstance,
    l2: &FiniteLogicInstance,
    l3: &FiniteLogicInstance,
) -> Result<Composition, ChuError> {
    let (f1, g1) = t1.typed(l1, l2).map_err(|e| ChuError::Mismatch(format!("first transform: {e}")))?;
    let (f2, g2) = t2.typed(l2, l3).map_err(|e| ChuError::Mismatch(format!("second transform: {e}")))?;
    let f: Vec<usize> = f1.iter().map(|&j| f2[j]).collect();
    let g: Vec<usize> = g2.iter().map(|&j| g1[j]).collect();
    let transform = ChuTransform {
        f: f.iter().enumerate().map(|(i, &j)| (l1.sentences[i].clone(), l3.sentences[j].clone())).collect(),
        g: g.iter().enumerate().map(|(i, &j)| (l3.models[i].clone(), l1.models[j].clone())).collect(),
    };
    let report = check_indices(&f, &g, l1, l3);
    Ok(Composition { transform, report, density_rechecked: true })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BooleanReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

/// For each negation and conjunction/disjunction recorded in `l1`, compares the
/// row of `f` of the combination with the combination of the `f`-rows over
/// the models of `l2`.
pub fn check_boolean_preservation(
    t: &ChuTransform,
    l1: &FiniteLogicInstance,
    l2: &FiniteLogicInstance,
) -> Result<BooleanReport, ChuError> {
    if !l1.has_boolean_structure() {
        return Err(ChuError::NoBooleanStructure);
    }
    let (f, _) = t.typed(l1, l2)?;
    let idx = |id: &str| l1.sentence(id).ok_or_else(|| ChuError::Invalid(format!("unknown sentence `{id}`")));
    let mut report = BooleanReport::default();
    for (p, q) in &l1.neg {
        let (p, q) = (idx(p)?, idx(q)?);
        report.checked += 1;
        let want: Vec<bool> = l2.row(f[p]).iter().map(|b| !b).collect();
        if l2.row(f[q]) != want {
            report.failures.push(format!("negation not preserved at {} = ¬{}", l1.sentences[q], l1.sentences[p]));
        }
    }
    for (list, all) in [(&l1.and, true), (&l1.or, false)] {
        for c in list {
            let parts = c.of.iter().map(|s| idx(s)).collect::<Result<Vec<_>, _>>()?;
            let whole = idx(&c.is)?;
            report.checked += 1;
            let want: Vec<bool> =
                (0..l2.models.len())
                    .map(|m| {
                        if all {
                            parts.iter().all(|&p| l2.sat(m, f[p]))
                        } else {
                            parts.iter().any(|&p| l2.sat(m, f[p]))
                        }
                    })
                    .collect();
            if l2.row(f[whole]) != want {
                let op = if all { "conjunction" } else { "disjunction" };
                report.failures.push(format!("{op} not preserved at {}", c.is));
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "lowercase")]
pub enum Compactness {
    Compact,
    Counterexample { sentences: Vec<String> },
}

/// First set of at most `theta` sentences (by size, then lexicographically)
/// whose subsets of size below `lambda` are all satisfiable but which has no model.
pub fn compactness_check(l: &FiniteLogicInstance, theta: usize, lambda: usize) -> Result<Compactness, ChuError> {
    if theta > l.sentences.len() {
        return Err(ChuError::Invalid(format!("θ = {theta} exceeds the {} sentences", l.sentences.len())));
    }
    if lambda == 0 {
        return Err(ChuError::Invalid("λ must be at least 1".into()));
    }
    let n = l.sentences.len();
    let jointly = |set: &[usize]| (0..l.models.len()).any(|m| set.iter().all(|&s| l.sat(m, s)));
    for k in 1..=theta {
        let mut found = None;
        for_each_subset(n, k, &mut |set| {
            if jointly(set) {
                return false;
            }
            let mut small_ok = true;
            for j in 1..=k.min(lambda - 1) {
                for_each_subset(k, j, &mut |sub| {
                    let part: Vec<usize> = sub.iter().map(|&i| set[i]).collect();
                    if !jointly(&part) {
                        small_ok = false;
                        return true;
                    }
                    false
                });
                if !small_ok {
                    break;
                }
            }
            if small_ok {
                found = Some(set.to_vec());
            }
            small_ok
        });
        if let Some(set) = found {
            return Ok(Compactness::Counterexample {
                sentences: set.iter().map(|&i| l.sentences[i].clone()).collect(),
            });
        }
    }
    Ok(Compactness::Compact)
}

/// Visits `k`-subsets of `0..n` in lexicographic order until `f` returns true.
fn for_each_subset(n: usize, k: usize, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if cur.len() == k {
            return f(cur);
        }
        for e in start..n {
            cur.push(e);
            if rec(e + 1, n, k, cur, f) {
                return true;
            }
            cur.pop();
        }
        false
    }
    rec(0, n, k, &mut Vec::new(), f)
}
