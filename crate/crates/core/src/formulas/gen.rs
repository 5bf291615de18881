use std::collections::{BTreeSet, HashMap};

use super::ast::*;
use super::parse::FormulaError;
use crate::structures::{FilteredFiniteModel, FiniteStructure, Vocabulary};

pub const DEFAULT_VARIABLE_BUDGET: usize = 32;

/// Names of the parameters of a characteristic formula: `x0, x1, ...`.
pub fn hintikka_params(p: usize) -> Vec<String> {
    (0..p).map(|i| format!("x{i}")).collect()
}

fn block_vars(depth: usize, len: usize) -> Vec<String> {
    (0..len).map(|j| format!("y{depth}_{j}")).collect()
}

/// Complete atomic diagram of `elems` named by `vars`, constants included as terms.
pub fn atomic_type(m: &FiniteStructure, vars: &[String], elems: &[usize]) -> Formula {
    let mut terms: Vec<(String, usize)> = vars.iter().cloned().zip(elems.iter().copied()).collect();
    terms.extend(m.consts.iter().map(|(c, &e)| (c.clone(), e)));
    let mut lits = BTreeSet::new();
    for i in 0..terms.len() {
        for j in i + 1..terms.len() {
            let f = Formula::Eq(terms[i].0.clone(), terms[j].0.clone());
            lits.insert(if terms[i].1 == terms[j].1 { f } else { not(f) });
        }
    }
    for r in &m.vocab.relations {
        let mut idx = vec![0usize; r.arity];
        if terms.is_empty() && r.arity > 0 {
            continue;
        }
        loop {
            let args: Vec<String> = idx.iter().map(|&i| terms[i].0.clone()).collect();
            let tuple: Vec<usize> = idx.iter().map(|&i| terms[i].1).collect();
            let f = Formula::Atom(r.name.clone(), args);
            lits.insert(if m.holds(&r.name, &tuple) { f } else { not(f) });
            if !crate::structures::bump(&mut idx, terms.len()) {
                break;
            }
        }
    }
    and(lits.into_iter().collect())
}

struct Hintikka<'a> {
    m: &'a FiniteStructure,
    p: usize,
    cap: usize,
    memo: HashMap<(usize, Vec<usize>), Formula>,
}

impl Hintikka<'_> {
    fn vars(&self, len: usize) -> Vec<String> {
        let mut v = hintikka_params(self.p);
        for d in 0..(len - self.p) / self.cap.max(1) {
            v.extend(block_vars(d, self.cap));
        }
        v
    }

    fn sigma(&mut self, k: usize, tuple: &[usize]) -> Formula {
        if let Some(f) = self.memo.get(&(k, tuple.to_vec())) {
            return f.clone();
        }
        let vars = self.vars(tuple.len());
        let base = atomic_type(self.m, &vars, tuple);
        let f = if k == 0 {
            base
        } else {
            let depth = (tuple.len() - self.p) / self.cap;
            let ys = block_vars(depth, self.cap);
            let mut branches = BTreeSet::new();
            let mut idx = vec![0usize; self.cap];
            if self.m.size() > 0 {
                loop {
                    let mut ext = tuple.to_vec();
                    ext.extend(&idx);
                    branches.insert(self.sigma(k - 1, &ext));
                    if !crate::structures::bump(&mut idx, self.m.size()) {
                        break;
                    }
                }
            }
            let mut conj = vec![base];
            conj.extend(branches.iter().map(|b| Formula::Exists(ys.clone(), Box::new(b.clone()))));
            conj.push(Formula::Forall(ys, Box::new(or(branches.into_iter().collect()))));
            And(conj)
        };
        self.memo.insert((k, tuple.to_vec()), f.clone());
        f
    }
}

use Formula::And;

/// Characteristic formula `σ^β_{M,ā}` for tuple moves of length exactly `cap`
/// (shorter moves are covered by repeating elements). Free variables are `x0..`.
pub fn hintikka(
    m: &FiniteStructure,
    params: &[usize],
    beta: usize,
    cap: usize,
    budget: usize,
) -> Result<Formula, FormulaError> {
    let needed = params.len() + beta * cap;
    if needed > budget {
        return Err(FormulaError::Budget { needed, budget });
    }
    if beta > 0 && cap == 0 {
        return Err(FormulaError::Invalid("tuple cap must be at least 1".into()));
    }
    if let Some(&e) = params.iter().find(|&&e| e >= m.size()) {
        return Err(FormulaError::Invalid(format!("parameter {e} outside the universe")));
    }
    let mut h = Hintikka { m, p: params.len(), cap, memo: HashMap::new() };
    Ok(h.sigma(beta, params))
}

/// `E_α(v)`: `v` has exactly `α` predecessors.
fn well_order_e(alpha: usize, v: &str, order: &str) -> Formula {
    let w = format!("w{alpha}");
    let below = (0..alpha).map(|b| well_order_e(b, &w, order)).collect();
    Formula::Forall(vec![w.clone()], Box::new(iff(atom(order, &[&w, v]), or(below))))
}

/// Linear order axioms for a strict order symbol.
pub fn linear_order_axioms(order: &str) -> Vec<Formula> {
    vec![
        forall(&["x"], not(atom(order, &["x", "x"]))),
        forall(
            &["x", "y", "z"],
            implies(Formula::And(vec![atom(order, &["x", "y"]), atom(order, &["y", "z"])]), atom(order, &["x", "z"])),
        ),
        forall(&["x", "y"], Formula::Or(vec![eq("x", "y"), atom(order, &["x", "y"]), atom(order, &["y", "x"])])),
    ]
}

/// `(E_0(x), ..., E_{n-1}(x))` and `θ_n`, whose finite models are the `n`-element orders.
pub fn wellorder_formulas(n: usize, order: &str) -> Result<(Vec<Formula>, Formula), FormulaError> {
    if n == 0 {
        return Err(FormulaError::Invalid("wellorder_formulas needs n >= 1".into()));
    }
    let es: Vec<Formula> = (0..n).map(|a| well_order_e(a, "x", order)).collect();
    let mut theta = linear_order_axioms(order);
    theta.extend(es.iter().map(|e| Formula::Exists(vec!["x".into()], Box::new(e.clone()))));
    theta.push(Formula::Forall(vec!["x".into()], Box::new(or(es.clone()))));
    Ok((es, Formula::And(theta)))
}

fn pc_guard(vars: &[String], m: usize) -> Formula {
    let syms = FilteredFiniteModel::level_symbols(m);
    or(syms.iter().map(|p| and(vars.iter().map(|v| Formula::Atom(p.clone(), vec![v.clone()])).collect())).collect())
}

/// Relativizes every tuple block to the union of the levels `P0..P{m-1}`.
pub fn pc_translate(f: &Formula, m: usize) -> Result<Formula, FormulaError> {
    if m == 0 {
        return Err(FormulaError::Invalid("level count must be at least 1".into()));
    }
    Ok(match f {
        Formula::Bool(_) | Formula::Atom(..) | Formula::Eq(..) => f.clone(),
        Formula::Not(g) => not(pc_translate(g, m)?),
        Formula::And(gs) => Formula::And(gs.iter().map(|g| pc_translate(g, m)).collect::<Result<_, _>>()?),
        Formula::Or(gs) => Formula::Or(gs.iter().map(|g| pc_translate(g, m)).collect::<Result<_, _>>()?),
        Formula::Exists(vs, g) => {
            Formula::Exists(vs.clone(), Box::new(Formula::And(vec![pc_guard(vs, m), pc_translate(g, m)?])))
        }
        Formula::Forall(vs, g) => Formula::Forall(vs.clone(), Box::new(implies(pc_guard(vs, m), pc_translate(g, m)?))),
        Formula::Mem(..) | Formula::ExistsOmega(..) | Formula::SoExists(..) => {
            return Err(FormulaError::OutsidePcFragment)
        }
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SigmaSentences {
    /// Levels cover the universe and increase.
    pub sigma0: Formula,
    /// `σ₀ ∧ ⋀ ψ_n`.
    pub sigma1: Formula,
    /// `ψ_n`: level `n` has at most `caps[n]` elements.
    pub psi: Vec<Formula>,
}

pub fn sigma_sentences(m: usize, caps: &[usize]) -> Result<SigmaSentences, FormulaError> {
    if m == 0 || caps.len() != m {
        return Err(FormulaError::Invalid(format!("expected {m} caps, found {}", caps.len())));
    }
    if caps.windows(2).any(|w| w[0] >= w[1]) {
        return Err(FormulaError::Invalid("caps must be strictly increasing".into()));
    }
    if caps[0] == 0 {
        return Err(FormulaError::Invalid("caps must be positive".into()));
    }
    let p = FilteredFiniteModel::level_symbols(m);
    let px = |i: usize| atom(&p[i], &["x"]);
    let mut s0 = vec![forall(&["x"], or((0..m).map(px).collect()))];
    s0.extend((0..m - 1).map(|i| forall(&["x"], implies(px(i), px(i + 1)))));
    let sigma0 = and(s0);
    let psi: Vec<Formula> = caps
        .iter()
        .enumerate()
        .map(|(n, &k)| {
            let xs: Vec<String> = (0..k).map(|i| format!("x{i}")).collect();
            let hit = or(xs.iter().map(|x| Formula::Eq("y".into(), x.clone())).collect());
            Formula::Exists(xs, Box::new(forall(&["y"], implies(atom(&p[n], &["y"]), hit))))
        })
        .collect();
    let mut s1 = vec![sigma0.clone()];
    s1.extend(psi.iter().cloned());
    Ok(SigmaSentences { sigma0, sigma1: Formula::And(s1), psi })
}

/// Vocabulary of `Γ_n`: the order plus constants `c0..c{n-1}` and `d`.
pub fn gamma_vocabulary(n: usize, order: &str) -> Vocabulary {
    let mut names: Vec<String> = (0..n).map(|i| format!("c{i}")).collect();
    names.push("d".into());
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    Vocabulary::order(order).with_constants(&refs)
}

/// `Γ_n = {θ_n} ∪ {c_i < c_j : i < j < n} ∪ {c_i < d : i < n}`: finitely satisfiable, not satisfiable.
pub fn gamma_witness(n: usize, order: &str) -> Result<Vec<Formula>, FormulaError> {
    if n < 2 {
        return Err(FormulaError::Invalid("gamma_witness needs n >= 2".into()));
    }
    let (_, theta) = wellorder_formulas(n, order)?;
    let c = |i: usize| format!("c{i}");
    let mut out = vec![theta];
    for i in 0..n {
        for j in i + 1..n {
            out.push(Formula::Atom(order.into(), vec![c(i), c(j)]));
        }
    }
    out.extend((0..n).map(|i| Formula::Atom(order.into(), vec![c(i), "d".into()])));
    Ok(out)
}

/// `¬∃x_0..x_{k-1}` pairwise distinct and pairwise `E`-related (both directions).
pub fn clique_omission(k: usize, e: &str, vocab: &Vocabulary) -> Result<Formula, FormulaError> {
    if k < 2 {
        return Err(FormulaError::Invalid("clique size must be at least 2".into()));
    }
    match vocab.arity(e) {
        Some(2) => {}
        Some(a) => return Err(FormulaError::Arity { name: e.into(), expected: 2, found: a, at: Default::default() }),
        None => return Err(FormulaError::UnknownSymbol { name: e.into(), at: Default::default() }),
    }
    let xs: Vec<String> = (0..k).map(|i| format!("x{i}")).collect();
    let mut body = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            body.push(not(Formula::Eq(xs[i].clone(), xs[j].clone())));
            body.push(Formula::Atom(e.into(), vec![xs[i].clone(), xs[j].clone()]));
            body.push(Formula::Atom(e.into(), vec![xs[j].clone(), xs[i].clone()]));
        }
    }
    Ok(not(Formula::Exists(xs, Box::new(Formula::And(body)))))
}
