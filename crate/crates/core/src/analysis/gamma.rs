use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::AnalysisError;
use crate::formulas::{gamma_vocabulary, gamma_witness, Formula};
use crate::semantics::eval_sentence;
use crate::structures::{all_binary_structures, FiniteStructure, Vocabulary};

const ORDER: &str = "<";

/// A satisfying model of a subset: the order size and the constants' positions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GammaWitness {
    pub size: usize,
    pub constants: BTreeMap<String, usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SubsetCheck {
    /// Sentences left out of Γ_n.
    pub omitted: Vec<String>,
    pub witness: Option<GammaWitness>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GammaReport {
    pub n: usize,
    pub sentences: Vec<String>,
    /// Binary structures of size at most n+1 tried for a model of all of Γ_n.
    pub structures_checked: usize,
    pub jointly_unsatisfiable: bool,
    /// For each `i`, Γ_n without every sentence mentioning `c_i`.
    pub without_constant: Vec<SubsetCheck>,
    /// Γ_n without one sentence, for each sentence.
    pub without_one: Vec<SubsetCheck>,
}

impl GammaReport {
    /// Joint unsatisfiability, and satisfiability once some constant drops out.
    pub fn pattern_holds(&self) -> bool {
        self.jointly_unsatisfiable && self.without_constant.iter().all(|s| s.witness.is_some())
    }
}

/// All assignments of `k` constants into `size` elements, as digit vectors.
fn assignments(k: usize, size: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = size.pow(k as u32);
    (0..total).map(move |mut code| {
        let mut v = vec![0; k];
        for d in v.iter_mut() {
            *d = code % size;
            code /= size;
        }
        v
    })
}

fn with_constants(m: &FiniteStructure, vocab: &Vocabulary, names: &[String], at: &[usize]) -> FiniteStructure {
    let mut out = m.clone();
    out.vocab = vocab.clone();
    out.consts = names.iter().cloned().zip(at.iter().copied()).collect();
    out
}

fn linear_order(vocab: &Vocabulary, size: usize) -> FiniteStructure {
    let mut m = FiniteStructure::new(vocab.clone(), size);
    for i in 0..size {
        for j in i + 1..size {
            m.add(ORDER, vec![i, j]);
        }
    }
    m
}

/// Finite check of the incompactness witness Γ_n: no structure of size at
/// most n+1 satisfies all of it, while dropping every sentence about one
/// constant leaves a set with a model among the linear orders.
pub fn gamma_verify(n: usize) -> Result<GammaReport, AnalysisError> {
    if !(2..=5).contains(&n) {
        return Err(AnalysisError::Caps(format!("gamma_verify needs 2 <= n <= 5, got {n}")));
    }
    let gamma = gamma_witness(n, ORDER)?;
    let vocab = gamma_vocabulary(n, ORDER);
    let names: Vec<String> = vocab.constants.clone();
    let theta = &gamma[0];
    let constant_sentences = &gamma[1..];

    // (i) A model of Γ_n satisfies θ_n; only those need constant assignments.
    // Past n = 3 the binary structures are too many, and θ_n holds only in
    // linear orders, so the search runs over those.
    let mut structures_checked = 0;
    let mut jointly_unsatisfiable = true;
    for size in 1..=n + 1 {
        let candidates: Vec<FiniteStructure> = if n <= 3 {
            all_binary_structures(ORDER, size)
        } else {
            vec![linear_order(&Vocabulary::order(ORDER), size)]
        };
        for m in candidates {
            structures_checked += 1;
            if !eval_sentence(&m, theta)? {
                continue;
            }
            for at in assignments(names.len(), size) {
                let mc = with_constants(&m, &vocab, &names, &at);
                let mut all = true;
                for f in constant_sentences {
                    if !eval_sentence(&mc, f)? {
                        all = false;
                        break;
                    }
                }
                jointly_unsatisfiable &= !all;
            }
        }
    }

    // (ii) Satisfaction rows over linear orders with every constant assignment.
    let mut rows: Vec<(u64, GammaWitness)> = Vec::new();
    let mut seen = BTreeSet::new();
    for size in 1..=n + 1 {
        let order = linear_order(&vocab, size);
        let theta_holds = eval_sentence(&order, theta)?;
        for at in assignments(names.len(), size) {
            let mc = with_constants(&order, &vocab, &names, &at);
            let mut mask = u64::from(theta_holds);
            for (i, f) in constant_sentences.iter().enumerate() {
                if eval_sentence(&mc, f)? {
                    mask |= 1 << (i + 1);
                }
            }
            if seen.insert(mask) {
                rows.push((mask, GammaWitness { size, constants: mc.consts.clone() }));
            }
        }
    }
    let sat = |keep: u64| rows.iter().find(|(m, _)| m & keep == keep).map(|(_, w)| w.clone());
    let full: u64 = (1 << gamma.len()) - 1;
    let render = |mask: u64| -> Vec<String> {
        (0..gamma.len()).filter(|i| mask >> i & 1 == 1).map(|i| gamma[i].to_string()).collect()
    };

    let mut without_constant = Vec::new();
    for c in names.iter().filter(|c| c.as_str() != "d") {
        let drop: u64 = (0..gamma.len()).filter(|&i| gamma[i].free_names().contains(c)).map(|i| 1 << i).sum();
        without_constant.push(SubsetCheck { omitted: render(drop), witness: sat(full & !drop) });
    }
    let without_one =
        (0..gamma.len()).map(|i| SubsetCheck { omitted: render(1 << i), witness: sat(full & !(1 << i)) }).collect();

    Ok(GammaReport {
        n,
        sentences: gamma.iter().map(Formula::to_string).collect(),
        structures_checked,
        jointly_unsatisfiable,
        without_constant,
        without_one,
    })
}
