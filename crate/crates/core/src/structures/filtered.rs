use std::collections::BTreeSet;

use super::{FiniteStructure, StructureError, Violation};

/// A finite structure with a weak chain `P_0 ⊆ ... ⊆ P_{m-1} = universe`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FilteredFiniteModel {
    pub base: FiniteStructure,
    pub filtration: Vec<BTreeSet<usize>>,
}

impl FilteredFiniteModel {
    pub fn new(base: FiniteStructure, filtration: Vec<BTreeSet<usize>>) -> Self {
        FilteredFiniteModel { base, filtration }
    }

    /// The one-level filtration `⟨universe⟩`.
    pub fn trivial(base: FiniteStructure) -> Self {
        let all = (0..base.size()).collect();
        FilteredFiniteModel { base, filtration: vec![all] }
    }

    pub fn from_levels(base: FiniteStructure, levels: &[&[usize]]) -> Self {
        let filtration = levels.iter().map(|l| l.iter().copied().collect()).collect();
        FilteredFiniteModel { base, filtration }
    }

    pub fn len(&self) -> usize {
        self.filtration.len()
    }

    pub fn is_empty(&self) -> bool {
        self.filtration.is_empty()
    }

    /// Index of the least level containing all of `elems`.
    pub fn min_level_of(&self, elems: &[usize]) -> Option<usize> {
        self.filtration.iter().position(|p| elems.iter().all(|e| p.contains(e)))
    }

    pub fn is_bounded(&self, elems: &[usize]) -> bool {
        self.min_level_of(elems).is_some()
    }

    /// Level names `P0, P1, ...` used when the filtration is read as predicates.
    pub fn level_symbols(m: usize) -> Vec<String> {
        (0..m).map(|i| format!("P{i}")).collect()
    }

    /// The base expanded by unary predicates `P0..P{m-1}` naming the levels.
    pub fn as_predicates(&self) -> FiniteStructure {
        let names = Self::level_symbols(self.len());
        let mut m = self.base.clone();
        m.vocab = m.vocab.with_unary(&names);
        for (name, level) in names.iter().zip(&self.filtration) {
            m.rels.insert(name.clone(), level.iter().map(|&e| vec![e]).collect());
        }
        m
    }

    /// Reads levels back from predicates `P0..P{m-1}` and strips them (the map `g`).
    pub fn from_predicates(m: &FiniteStructure, levels: usize) -> Result<Self, StructureError> {
        let names = Self::level_symbols(levels);
        let mut base = m.clone();
        let mut filtration = Vec::with_capacity(levels);
        for n in &names {
            let set = base
                .rels
                .remove(n)
                .ok_or_else(|| StructureError::UnknownSymbol(n.clone()))?
                .into_iter()
                .map(|t| t[0])
                .collect();
            filtration.push(set);
        }
        base.vocab.relations.retain(|r| !names.contains(&r.name));
        Ok(FilteredFiniteModel { base, filtration })
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out: Vec<Violation> = self.base.check().into_iter().map(|m| Violation::new("base", m)).collect();
        if self.filtration.is_empty() {
            out.push(Violation::new("filtration", "no levels"));
            return out;
        }
        let n = self.base.size();
        for (i, p) in self.filtration.iter().enumerate() {
            if p.iter().any(|&e| e >= n) {
                out.push(Violation::new(format!("filtration[{i}]"), "level leaves the universe"));
            }
            if i > 0 && !self.filtration[i - 1].is_subset(p) {
                out.push(Violation::new(
                    format!("filtration[{i}]"),
                    format!("level {} is not contained in level {i}", i - 1),
                ));
            }
        }
        if self.filtration.last().unwrap().len() != n {
            out.push(Violation::new("filtration", "last level is not the universe"));
        }
        out
    }
}
