use serde::Serialize;

use super::{AnalysisError, FormulaBattery};
use crate::formulas::Formula;
use crate::semantics::{eval_chain_with, EvalBounds, SemanticsError, Verdict};
use crate::structures::{ChainModel, Element, LevelFamily, Prefix, Presentation, Selector};

/// Chain evaluation under an assignment; swapped out by harness self-tests.
pub type Evaluator<'e> =
    dyn Fn(&ChainModel, &Formula, &[(String, Element)], &EvalBounds) -> Result<Verdict, SemanticsError> + 'e;

/// Assignments tried per battery formula.
const MAX_SAMPLES: usize = 64;

/// Blocks to scan so that every block from the result on repeats an earlier one.
fn scan_limit(pres: &Presentation, from: usize) -> usize {
    if pres.is_finite() {
        pres.preamble_len()
    } else {
        from.max(pres.preamble_len()) + pres.cycle_len()
    }
}

/// `None` when every level of `f` lies inside some level of `g`; otherwise a
/// level of `f` that fits in none.
pub fn family_subset(pres: &Presentation, f: &LevelFamily, g: &LevelFamily) -> Option<usize> {
    let cf = ChainModel::new(pres.clone(), f.clone());
    let cg = ChainModel::new(pres.clone(), g.clone());
    let Prefix { a: ga, b: gb } = g.prefix;
    // With a growing prefix only the blocks past every prefix matter; those repeat the cycle.
    let from = if ga >= 1 { pres.preamble_len() } else { gb };
    let limit = scan_limit(pres, from);
    for b in from..limit {
        let gd = cg.designated(b);
        if cf.designated(b).iter().any(|l| !gd.contains(l)) {
            return Some(0);
        }
    }
    if ga >= 1 {
        return None;
    }
    let bad = (gb..limit).find(|&b| cg.designated(b).len() < pres.block_size(b))?;
    let Prefix { a: fa, b: fb } = f.prefix;
    if fb > bad {
        Some(0)
    } else {
        (bad - fb).checked_div(fa).map(|q| q + 1)
    }
}

fn check_comparable(pres: &Presentation, families: &[LevelFamily]) -> Result<(), AnalysisError> {
    for i in 0..families.len() {
        for j in i + 1..families.len() {
            if let (Some(n), Some(_)) =
                (family_subset(pres, &families[i], &families[j]), family_subset(pres, &families[j], &families[i]))
            {
                return Err(AnalysisError::NotChain { left: i, right: j, n });
            }
        }
    }
    Ok(())
}

/// The union of a ⊆-chain of families: prefix `(max a)·n + max b` and the
/// union of the selectors. Levels of the result need not equal the pointwise
/// union level by level, but every level of either is inside a level of the
/// other, so the two define the same bounded sets.
pub fn union_chain(pres: &Presentation, families: &[LevelFamily]) -> Result<LevelFamily, AnalysisError> {
    if families.is_empty() {
        return Err(AnalysisError::Invalid("union of an empty sequence".into()));
    }
    check_comparable(pres, families)?;
    let a = families.iter().map(|f| f.prefix.a).max().unwrap_or(0);
    let b = families.iter().map(|f| f.prefix.b).max().unwrap_or(0);
    let mut selectors: Vec<Selector> = Vec::new();
    for s in families.iter().flat_map(|f| &f.selectors) {
        if selectors.iter().any(|t| t.pick == s.pick) {
            continue;
        }
        let mut sel = s.clone();
        let mut k = 1;
        while selectors.iter().any(|t| t.tag == sel.tag) {
            sel.tag = format!("{}~{k}", s.tag);
            k += 1;
        }
        selectors.push(sel);
    }
    Ok(LevelFamily { prefix: Prefix { a, b }, selectors })
}

#[derive(Clone, Debug, Serialize)]
pub struct Disagreement {
    pub formula: String,
    pub assignment: Vec<(String, String)>,
    pub left: Verdict,
    pub right: Verdict,
}

impl std::fmt::Display for Disagreement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let env: Vec<String> = self.assignment.iter().map(|(v, e)| format!("{v}↦{e}")).collect();
        write!(f, "{} [{}]: {} vs {}", self.formula, env.join(", "), self.left, self.right)
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct BatteryReport {
    /// Formula/assignment pairs evaluated on both sides.
    pub checked: usize,
    /// Pairs where at least one side was unknown.
    pub undecided: usize,
    pub disagreements: Vec<Disagreement>,
}

impl BatteryReport {
    pub fn agrees(&self) -> bool {
        self.disagreements.is_empty()
    }
}

/// Bounded assignments to the free variables of `phi` over elements of `c`
/// below the horizon, at most [`MAX_SAMPLES`].
fn samples(c: &ChainModel, phi: &Formula, bounds: &EvalBounds) -> Vec<Vec<(String, Element)>> {
    let vars: Vec<String> = phi.free_names().into_iter().filter(|n| c.presentation.constant(n).is_none()).collect();
    let pool: Vec<Element> =
        c.presentation.window(bounds.horizon).into_iter().filter(|&e| c.min_level(e).is_some()).collect();
    if vars.is_empty() {
        return vec![vec![]];
    }
    if pool.is_empty() {
        return vec![];
    }
    let mut out = Vec::new();
    let mut idx = vec![0usize; vars.len()];
    'outer: while out.len() < MAX_SAMPLES {
        out.push(vars.iter().cloned().zip(idx.iter().map(|&i| pool[i])).collect());
        for k in (0..idx.len()).rev() {
            idx[k] += 1;
            if idx[k] < pool.len() {
                continue 'outer;
            }
            idx[k] = 0;
        }
        break;
    }
    out
}

fn compare(
    eval: &Evaluator,
    left: &ChainModel,
    right: &ChainModel,
    battery: &FormulaBattery,
    bounds: &EvalBounds,
) -> Result<BatteryReport, AnalysisError> {
    let mut report = BatteryReport::default();
    for phi in battery.formulas() {
        for env in samples(left, phi, bounds) {
            let l = eval(left, phi, &env, bounds)?;
            let r = eval(right, phi, &env, bounds)?;
            report.checked += 1;
            match (l.as_bool(), r.as_bool()) {
                (Some(x), Some(y)) if x != y => report.disagreements.push(Disagreement {
                    formula: phi.to_string(),
                    assignment: env.iter().map(|(v, e)| (v.clone(), e.to_string())).collect(),
                    left: l,
                    right: r,
                }),
                (Some(_), Some(_)) => {}
                _ => report.undecided += 1,
            }
        }
    }
    Ok(report)
}

/// Battery-relative check of `F ≺ G`: every battery formula under every
/// sampled assignment bounded in `F` gets the same definite verdict on both.
pub fn elementary_battery_check(
    pres: &Presentation,
    f: &LevelFamily,
    g: &LevelFamily,
    battery: &FormulaBattery,
    bounds: &EvalBounds,
) -> Result<BatteryReport, AnalysisError> {
    battery_check_with(&eval_chain_with, pres, f, g, battery, bounds)
}

fn battery_check_with(
    eval: &Evaluator,
    pres: &Presentation,
    f: &LevelFamily,
    g: &LevelFamily,
    battery: &FormulaBattery,
    bounds: &EvalBounds,
) -> Result<BatteryReport, AnalysisError> {
    if let Some(n) = family_subset(pres, f, g) {
        return Err(AnalysisError::NotChain { left: 0, right: 1, n });
    }
    let left = ChainModel::new(pres.clone(), f.clone());
    let right = ChainModel::new(pres.clone(), g.clone());
    compare(eval, &left, &right, battery, bounds)
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct UnionReport {
    pub union: Option<LevelFamily>,
    pub precondition_failures: Vec<String>,
    pub failures: Vec<String>,
    pub checked: usize,
}

impl UnionReport {
    pub fn ok(&self) -> bool {
        self.precondition_failures.is_empty() && self.failures.is_empty()
    }
}

pub fn union_lemma_check(
    pres: &Presentation,
    chain: &[LevelFamily],
    battery: &FormulaBattery,
    bounds: &EvalBounds,
) -> UnionReport {
    union_lemma_check_with(&eval_chain_with, pres, chain, battery, bounds)
}

/// Checks every family of the chain against the union on the battery.
/// Broken preconditions are listed in the report; a definite disagreement
/// with the union is a FAILURE.
pub fn union_lemma_check_with(
    eval: &Evaluator,
    pres: &Presentation,
    chain: &[LevelFamily],
    battery: &FormulaBattery,
    bounds: &EvalBounds,
) -> UnionReport {
    let mut report = UnionReport::default();
    let union = match union_chain(pres, chain) {
        Ok(u) => u,
        Err(e) => {
            report.precondition_failures.push(e.to_string());
            return report;
        }
    };
    for (m, pair) in chain.windows(2).enumerate() {
        match battery_check_with(eval, pres, &pair[0], &pair[1], battery, bounds) {
            Ok(r) => {
                report
                    .precondition_failures
                    .extend(r.disagreements.iter().map(|d| format!("family {m} ⊀ family {}: {d}", m + 1)));
            }
            Err(e) => report.precondition_failures.push(format!("family {m} vs family {}: {e}", m + 1)),
        }
    }
    let whole = ChainModel::new(pres.clone(), union.clone());
    let mut seen: Vec<&LevelFamily> = Vec::new();
    for (m, f) in chain.iter().enumerate() {
        if seen.contains(&f) {
            continue;
        }
        seen.push(f);
        let part = ChainModel::new(pres.clone(), f.clone());
        match compare(eval, &part, &whole, battery, bounds) {
            Ok(r) => {
                report.checked += r.checked;
                report.failures.extend(r.disagreements.iter().map(|d| format!("FAILURE: family {m} vs union: {d}")));
            }
            Err(e) => report.failures.push(format!("FAILURE: family {m} vs union: {e}")),
        }
    }
    report.union = Some(union);
    report
}
