use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{
    check_boolean_preservation, verify_transform, BooleanReport, ChuError, ChuReport, ChuTransform, Combination,
    FiniteLogicInstance,
};
use crate::formulas::{pc_translate, sigma_sentences, Formula};
use crate::semantics::{eval_chain_finite, eval_sentence};
use crate::structures::FilteredFiniteModel;

/// The two instances, the transform between them and its verification.
#[derive(Clone, Debug, Serialize)]
pub struct PcPair {
    /// Battery sentences under chain truth over weak chain models.
    pub chain: FiniteLogicInstance,
    /// Translated sentences under classical truth over models of σ₀ (or σ₁).
    pub classical: FiniteLogicInstance,
    pub transform: ChuTransform,
    pub report: PcReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct PcReport {
    pub verify: ChuReport,
    pub boolean: BooleanReport,
    /// Models of the catalog that fail σ₀ after padding to `m` levels.
    pub sigma0_failures: Vec<String>,
    /// Filtrations lacking a predicate model with the same reduct and image.
    pub identitary_failures: Vec<String>,
}

impl PcReport {
    pub fn ok(&self) -> bool {
        self.verify.ok()
            && self.boolean.failures.is_empty()
            && self.sigma0_failures.is_empty()
            && self.identitary_failures.is_empty()
    }
}

/// Pads a filtration to exactly `m` levels by repeating the top level.
fn pad(fm: &FilteredFiniteModel, m: usize) -> Result<FilteredFiniteModel, ChuError> {
    if fm.len() > m {
        return Err(ChuError::Invalid(format!("filtration with {} levels exceeds m = {m}", fm.len())));
    }
    let mut filtration = fm.filtration.clone();
    let top: BTreeSet<usize> = filtration.last().cloned().unwrap_or_else(|| (0..fm.base.size()).collect());
    while filtration.len() < m {
        filtration.push(top.clone());
    }
    Ok(FilteredFiniteModel::new(fm.base.clone(), filtration))
}

fn model_id(i: usize, fm: &FilteredFiniteModel) -> String {
    let levels: Vec<String> = fm
        .filtration
        .iter()
        .map(|l| l.iter().map(|&e| fm.base.names[e].as_str()).collect::<Vec<_>>().join(","))
        .collect();
    format!("M{i}⟨{}⟩", levels.join("|"))
}

/// Negations and conjunctions among battery members, read off the syntax.
fn boolean_structure(
    battery: &[Formula],
    ids: &[String],
) -> (BTreeMap<String, String>, Vec<Combination>, Vec<Combination>) {
    let find = |f: &Formula| battery.iter().position(|g| g == f);
    let mut neg = BTreeMap::new();
    let mut and = Vec::new();
    let mut or = Vec::new();
    for (i, f) in battery.iter().enumerate() {
        match f {
            Formula::Not(g) => {
                if let Some(j) = find(g) {
                    neg.insert(ids[j].clone(), ids[i].clone());
                }
            }
            Formula::And(gs) | Formula::Or(gs) => {
                let parts: Option<Vec<String>> = gs.iter().map(|g| find(g).map(|j| ids[j].clone())).collect();
                if let Some(of) = parts {
                    let c = Combination { of, is: ids[i].clone() };
                    if matches!(f, Formula::And(_)) {
                        and.push(c);
                    } else {
                        or.push(c);
                    }
                }
            }
            _ => {}
        }
    }
    (neg, and, or)
}

/// Builds the relativizing transform between chain truth with `m` levels and
/// classical truth over predicate models. `f` translates each battery sentence;
/// `g` reads a predicate model as the weak chain of its predicates. With
/// `caps`, the classical side is restricted to models of σ₁.
pub fn pc_transform_pair(
    m: usize,
    caps: Option<&[usize]>,
    battery: &[Formula],
    catalog: &[FilteredFiniteModel],
) -> Result<PcPair, ChuError> {
    if m == 0 {
        return Err(ChuError::Invalid("m must be at least 1".into()));
    }
    let translated: Vec<Formula> = battery.iter().map(|f| pc_translate(f, m)).collect::<Result<_, _>>()?;
    let sig = sigma_sentences(m, caps.map_or_else(|| (1..=m).collect(), |c| c.to_vec()).as_slice())?;
    let class_sentence = if caps.is_some() { &sig.sigma1 } else { &sig.sigma0 };

    let padded: Vec<FilteredFiniteModel> = catalog.iter().map(|fm| pad(fm, m)).collect::<Result<_, _>>()?;
    let mut sigma0_failures = Vec::new();
    let mut chain_models = Vec::new();
    let mut classical_models = Vec::new();
    for (i, fm) in padded.iter().enumerate() {
        let pm = fm.as_predicates();
        if !eval_sentence(&pm, &sig.sigma0)? {
            sigma0_failures.push(model_id(i, fm));
            continue;
        }
        if eval_sentence(&pm, class_sentence)? {
            classical_models.push((model_id(i, fm), pm));
            chain_models.push((model_id(i, fm), fm.clone()));
        }
    }

    let chain_ids: Vec<String> = (0..battery.len()).map(|i| format!("φ{i}")).collect();
    let classical_ids: Vec<String> = (0..battery.len()).map(|i| format!("f(φ{i})")).collect();
    let mut chain_table = Vec::new();
    for (_, fm) in &chain_models {
        let row = battery.iter().map(|f| eval_chain_finite(fm, f).map(u8::from)).collect::<Result<Vec<_>, _>>()?;
        chain_table.push(row);
    }
    let mut classical_table = Vec::new();
    for (_, pm) in &classical_models {
        let row = translated.iter().map(|f| eval_sentence(pm, f).map(u8::from)).collect::<Result<Vec<_>, _>>()?;
        classical_table.push(row);
    }
    let (neg, and, or) = boolean_structure(battery, &chain_ids);
    let chain = FiniteLogicInstance {
        sentences: chain_ids.clone(),
        models: chain_models.iter().map(|(id, _)| id.clone()).collect(),
        table: chain_table,
        neg,
        and,
        or,
    };
    let (neg, and, or) = boolean_structure(&translated, &classical_ids);
    let classical = FiniteLogicInstance {
        sentences: classical_ids.clone(),
        models: classical_models.iter().map(|(id, _)| id.clone()).collect(),
        table: classical_table,
        neg,
        and,
        or,
    };

    // g reads the predicates back; the result is located in the chain model list.
    let mut g = Vec::new();
    for (id, pm) in &classical_models {
        let back = FilteredFiniteModel::from_predicates(pm, m).map_err(|e| ChuError::Invalid(e.to_string()))?;
        let image = chain_models
            .iter()
            .find(|(_, fm)| fm.base == back.base && fm.filtration == back.filtration)
            .map(|(cid, _)| cid.clone())
            .ok_or_else(|| ChuError::Invalid(format!("g-image of {id} is not in the catalog")))?;
        g.push((id.clone(), image));
    }
    let transform = ChuTransform { f: chain_ids.into_iter().zip(classical_ids).collect(), g };

    let mut identitary_failures = Vec::new();
    for (id, fm) in &chain_models {
        let witness = classical_models.iter().any(|(_, pm)| {
            let reduct_ok = fm.base.names.len() == pm.names.len()
                && fm.base.rels.iter().all(|(r, ts)| pm.rels.get(r) == Some(ts))
                && fm.base.consts == pm.consts;
            reduct_ok && FilteredFiniteModel::from_predicates(pm, m).is_ok_and(|b| b.filtration == fm.filtration)
        });
        if !witness {
            identitary_failures.push(id.clone());
        }
    }

    let verify = verify_transform(&transform, &chain, &classical)?;
    let boolean = if chain.has_boolean_structure() {
        check_boolean_preservation(&transform, &chain, &classical)?
    } else {
        BooleanReport::default()
    };
    Ok(PcPair {
        chain,
        classical,
        transform,
        report: PcReport { verify, boolean, sigma0_failures, identitary_failures },
    })
}
