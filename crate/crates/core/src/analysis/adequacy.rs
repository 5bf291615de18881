use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use super::AnalysisError;
use crate::games::{ef_winner, Arena, Player};
use crate::structures::{binary_iso_classes, FiniteStructure};

/// Ceilings for [`adequacy_battery`].
#[derive(Clone, Copy, Debug, Serialize)]
pub struct AdequacyCaps {
    pub size: usize,
    pub beta: usize,
    pub width: usize,
}

impl Default for AdequacyCaps {
    fn default() -> Self {
        AdequacyCaps { size: 3, beta: 2, width: 2 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Mismatch {
    pub left: usize,
    pub right: usize,
    pub rows_equal: bool,
    pub winner: Player,
}

#[derive(Clone, Debug, Serialize)]
pub struct AdequacyReport {
    pub beta: usize,
    pub width: usize,
    pub structures: usize,
    pub pairs: usize,
    /// Distinct satisfaction rows, one per class of the sentence partition.
    pub rows: usize,
    pub mismatches: Vec<Mismatch>,
}

impl AdequacyReport {
    pub fn ok(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Interned classes of (structure, tuple) pairs, refined one quantifier block
/// at a time. Two pairs share a class at depth `k` iff they satisfy the same
/// formulas of rank at most `k` built from blocks of at most `width`
/// variables, so a class stands for a satisfaction row of that battery.
struct Refiner<'s> {
    structures: &'s [FiniteStructure],
    width: usize,
    /// Per depth: class key to class id.
    ids: Vec<HashMap<(Vec<u8>, BTreeSet<u32>), u32>>,
    memo: HashMap<(usize, Vec<usize>, usize), u32>,
}

impl Refiner<'_> {
    /// Equalities and relations among the tuple entries.
    fn atomic(&self, s: usize, tuple: &[usize]) -> Vec<u8> {
        let m = &self.structures[s];
        let mut key = Vec::new();
        for &x in tuple {
            for &y in tuple {
                key.push(u8::from(x == y));
            }
        }
        for r in &m.vocab.relations {
            match r.arity {
                1 => key.extend(tuple.iter().map(|&x| u8::from(m.holds(&r.name, &[x])))),
                _ => {
                    for &x in tuple {
                        key.extend(tuple.iter().map(|&y| u8::from(m.holds(&r.name, &[x, y]))));
                    }
                }
            }
        }
        key
    }

    fn class(&mut self, s: usize, tuple: &[usize], depth: usize) -> u32 {
        if let Some(&c) = self.memo.get(&(s, tuple.to_vec(), depth)) {
            return c;
        }
        let atomic = self.atomic(s, tuple);
        let mut children = BTreeSet::new();
        if depth > 0 {
            let n = self.structures[s].size();
            for len in 1..=self.width {
                let total = n.pow(len as u32);
                for code in 0..total {
                    let mut ext = tuple.to_vec();
                    let mut c = code;
                    for _ in 0..len {
                        ext.push(c % n);
                        c /= n;
                    }
                    children.insert(self.class(s, &ext, depth - 1));
                }
            }
        }
        let table = &mut self.ids[depth];
        let next = table.len() as u32;
        let id = *table.entry((atomic, children)).or_insert(next);
        self.memo.insert((s, tuple.to_vec(), depth), id);
        id
    }
}

/// Compares the sentence partition with the EF game for every unordered pair
/// (including each structure with itself). The partition never consults the
/// game solver.
pub fn adequacy_check(
    structures: &[FiniteStructure],
    beta: usize,
    width: usize,
) -> Result<AdequacyReport, AnalysisError> {
    if width == 0 {
        return Err(AnalysisError::Invalid("width must be at least 1".into()));
    }
    if let Some(m) = structures
        .iter()
        .find(|m| !m.consts.is_empty() || m.vocab.relations.iter().any(|r| r.arity == 0 || r.arity > 2))
    {
        return Err(AnalysisError::Invalid(format!(
            "adequacy needs relational vocabularies of arity at most 2, found {:?}",
            m.vocab
        )));
    }
    let mut refiner = Refiner { structures, width, ids: vec![HashMap::new(); beta + 1], memo: HashMap::new() };
    let rows: Vec<u32> = (0..structures.len()).map(|s| refiner.class(s, &[], beta)).collect();
    let arenas: Vec<Arena> = structures.iter().map(Arena::plain).collect();
    let mut mismatches = Vec::new();
    let mut pairs = 0;
    for i in 0..structures.len() {
        for j in i..structures.len() {
            pairs += 1;
            let winner =
                ef_winner(&arenas[i], &arenas[j], beta, width).map_err(|e| AnalysisError::Invalid(e.to_string()))?;
            let rows_equal = rows[i] == rows[j];
            if rows_equal != (winner == Player::II) {
                mismatches.push(Mismatch { left: i, right: j, rows_equal, winner });
            }
        }
    }
    let distinct: BTreeSet<u32> = rows.iter().copied().collect();
    Ok(AdequacyReport { beta, width, structures: structures.len(), pairs, rows: distinct.len(), mismatches })
}

/// [`adequacy_check`] over one representative of every isomorphism class of
/// `rel`-structures with at most `size` elements, within `caps`.
pub fn adequacy_battery(
    rel: &str,
    size: usize,
    beta: usize,
    width: usize,
    caps: AdequacyCaps,
) -> Result<AdequacyReport, AnalysisError> {
    if size > caps.size || beta > caps.beta || width > caps.width {
        return Err(AnalysisError::Caps(format!(
            "size {size}, β {beta}, L {width} exceed caps size {}, β {}, L {}",
            caps.size, caps.beta, caps.width
        )));
    }
    adequacy_check(&binary_iso_classes(rel, size), beta, width)
}
