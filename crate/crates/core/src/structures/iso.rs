use std::collections::BTreeSet;

use super::{ChainModel, FilteredFiniteModel, FiniteStructure, LevelFamily, Presentation, Selector, StructureError};

fn image(f: &[usize], set: &BTreeSet<usize>) -> BTreeSet<usize> {
    set.iter().map(|&e| f[e]).collect()
}

fn levels_covered(f: &[usize], from: &FilteredFiniteModel, to: &FilteredFiniteModel) -> bool {
    from.filtration.iter().all(|l| {
        let img = image(f, l);
        to.filtration.iter().any(|m| img.is_subset(m))
    })
}

fn inverse(f: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; f.len()];
    for (i, &y) in f.iter().enumerate() {
        inv[y] = i;
    }
    inv
}

/// Chain isomorphism: a structure isomorphism sending every level into some level
/// of the other side, and whose inverse does the same. Returns the witness.
pub fn chain_isomorphic(
    m: &FilteredFiniteModel,
    n: &FilteredFiniteModel,
) -> Result<Option<Vec<usize>>, StructureError> {
    if m.base.vocab.relations != n.base.vocab.relations || m.base.vocab.constants != n.base.vocab.constants {
        return Err(StructureError::VocabularyMismatch);
    }
    Ok(m.base.find_isomorphism_where(&n.base, |f| levels_covered(f, m, n) && levels_covered(&inverse(f), n, m)))
}

/// Level-wise isomorphism: an isomorphism carrying `P_i` onto `Q_i` for every `i`
/// (isomorphism of the structures expanded by level predicates).
pub fn level_isomorphic(
    m: &FilteredFiniteModel,
    n: &FilteredFiniteModel,
) -> Result<Option<Vec<usize>>, StructureError> {
    if m.base.vocab.relations != n.base.vocab.relations {
        return Err(StructureError::VocabularyMismatch);
    }
    if m.len() != n.len() {
        return Ok(None);
    }
    Ok(m.base
        .find_isomorphism_where(&n.base, |f| m.filtration.iter().zip(&n.filtration).all(|(p, q)| &image(f, p) == q)))
}

/// Bounds for [`enumerate_filtrations`] and [`enumerate_families`].
#[derive(Clone, Copy, Debug, Default)]
pub struct DecompositionCaps {
    pub max_filtration_len: usize,
    pub max_selectors: usize,
    pub max_slope: usize,
    pub max_offset: usize,
}

/// Strictly increasing chains of nonempty subsets ending in the universe, of
/// length at most `max_len`, shortest first.
pub fn enumerate_filtrations(base: &FiniteStructure, max_len: usize) -> Vec<FilteredFiniteModel> {
    fn grow(chain: &mut Vec<u64>, max_len: usize, out: &mut Vec<Vec<u64>>) {
        out.push(chain.iter().rev().copied().collect());
        if chain.len() == max_len {
            return;
        }
        let low = *chain.last().unwrap();
        let mut subs = Vec::new();
        let mut sub = (low - 1) & low;
        while sub != 0 {
            subs.push(sub);
            sub = (sub - 1) & low;
        }
        subs.sort_unstable();
        for s in subs {
            chain.push(s);
            grow(chain, max_len, out);
            chain.pop();
        }
    }
    let n = base.size();
    if max_len == 0 || n == 0 {
        return vec![];
    }
    let mut chains = Vec::new();
    grow(&mut vec![(1u64 << n) - 1], max_len, &mut chains);
    chains.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    chains
        .into_iter()
        .map(|c| {
            let filtration = c.iter().map(|&mask| (0..n).filter(|i| mask >> i & 1 == 1).collect()).collect();
            FilteredFiniteModel::new(base.clone(), filtration)
        })
        .collect()
}

/// Candidate selector tags: one per choice of a local element in each template.
pub fn candidate_selectors(pres: &Presentation) -> Vec<Selector> {
    let mut used: Vec<usize> = pres.block_seq.preamble.iter().chain(&pres.block_seq.cycle).copied().collect();
    used.sort_unstable();
    used.dedup();
    if used.iter().any(|&t| pres.templates[t].size() == 0) {
        return vec![];
    }
    let mut out = Vec::new();
    let mut idx = vec![0usize; used.len()];
    loop {
        let pick = used.iter().zip(&idx).map(|(&t, &l)| (t, pres.templates[t].names[l].clone())).collect();
        out.push(Selector { tag: format!("s{}", out.len()), pick });
        let mut k = used.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < pres.templates[used[k]].size() {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Level families over `pres` within the caps, in order (slope, offset, selector set).
pub fn enumerate_families(pres: &Presentation, caps: DecompositionCaps) -> Vec<ChainModel> {
    let tags = candidate_selectors(pres);
    let width = tags.len().min(16);
    let mut masks: Vec<u32> = (0u32..1 << width).filter(|m| m.count_ones() as usize <= caps.max_selectors).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    let subsets: Vec<Vec<Selector>> =
        masks.iter().map(|m| (0..width).filter(|i| m >> i & 1 == 1).map(|i| tags[i].clone()).collect()).collect();
    let min_slope = if pres.is_finite() { 0 } else { 1 };
    let mut out = Vec::new();
    for a in min_slope..=caps.max_slope {
        for b in 1..=caps.max_offset {
            for sels in &subsets {
                let levels = LevelFamily { prefix: super::Prefix { a, b }, selectors: sels.clone() };
                let c = ChainModel::new(pres.clone(), levels);
                if c.validate().is_empty() {
                    out.push(c);
                }
            }
        }
    }
    out
}
