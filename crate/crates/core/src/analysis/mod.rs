//! Chain-independence over decomposition catalogs, the union harness,
//! the incompactness witness check and the adequacy cross-check battery.

mod adequacy;
mod gamma;
mod union;

use serde::Serialize;
use thiserror::Error;

pub use adequacy::{adequacy_battery, adequacy_check, AdequacyCaps, AdequacyReport, Mismatch};
pub use gamma::{gamma_verify, GammaReport, GammaWitness, SubsetCheck};
pub use union::{
    elementary_battery_check, family_subset, union_chain, union_lemma_check, union_lemma_check_with, BatteryReport,
    Disagreement, Evaluator, UnionReport,
};

use crate::formulas::{Formula, FormulaError};
use crate::semantics::{eval_chain, eval_chain_finite, EvalBounds, SemanticsError, Verdict};
use crate::structures::{ChainModel, FilteredFiniteModel, Loaded};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("catalog is empty")]
    EmptyCatalog,
    #[error("catalog entries do not share a base: entry {0} differs from entry 0")]
    MixedBase(usize),
    #[error("catalog entry {index} is invalid: {message}")]
    InvalidEntry { index: usize, message: String },
    /// `A^left_n` is contained in no level of the other family.
    #[error("families {left} and {right} are not ⊆-comparable: level {n} of family {left} fits in no level of family {right}")]
    NotChain { left: usize, right: usize, n: usize },
    #[error("caps exceeded: {0}")]
    Caps(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

/// One decomposition of the shared base.
#[derive(Clone, Debug)]
pub enum Decomposition {
    Chain(ChainModel),
    Filtered(FilteredFiniteModel),
}

impl Decomposition {
    pub fn label(&self) -> String {
        match self {
            Decomposition::Chain(c) => {
                let p = c.levels.prefix;
                let tags: Vec<&str> = c.levels.selectors.iter().map(|s| s.tag.as_str()).collect();
                format!("prefix {}n+{} selectors [{}]", p.a, p.b, tags.join(","))
            }
            Decomposition::Filtered(fm) => {
                let levels: Vec<String> = fm
                    .filtration
                    .iter()
                    .map(|l| l.iter().map(|&e| fm.base.names[e].as_str()).collect::<Vec<_>>().join(","))
                    .collect();
                format!("⟨{}⟩", levels.join("|"))
            }
        }
    }

    pub fn eval(&self, f: &Formula, bounds: &EvalBounds) -> Result<Verdict, SemanticsError> {
        match self {
            Decomposition::Chain(c) => eval_chain(c, f, bounds),
            Decomposition::Filtered(fm) => eval_chain_finite(fm, f).map(Verdict::of),
        }
    }
}

/// Decompositions of one presentation or one finite structure.
#[derive(Clone, Debug)]
pub struct DecompositionCatalog {
    pub entries: Vec<Decomposition>,
}

impl DecompositionCatalog {
    pub fn new(entries: Vec<Decomposition>) -> Result<Self, AnalysisError> {
        let cat = DecompositionCatalog { entries };
        cat.validate()?;
        Ok(cat)
    }

    pub fn chains(models: Vec<ChainModel>) -> Result<Self, AnalysisError> {
        Self::new(models.into_iter().map(Decomposition::Chain).collect())
    }

    pub fn filtered(models: Vec<FilteredFiniteModel>) -> Result<Self, AnalysisError> {
        Self::new(models.into_iter().map(Decomposition::Filtered).collect())
    }

    /// Catalog entries as read by [`crate::structures::load_catalog`].
    pub fn from_loaded(items: Vec<Loaded>) -> Result<Self, AnalysisError> {
        let mut entries = Vec::new();
        for (index, l) in items.into_iter().enumerate() {
            entries.push(match l {
                Loaded::Chain(c) => Decomposition::Chain(c),
                Loaded::Filtered(f) => Decomposition::Filtered(f),
                other => {
                    return Err(AnalysisError::InvalidEntry {
                        index,
                        message: format!("expected a chain model or filtered model, found a {}", other.kind()),
                    })
                }
            });
        }
        Self::new(entries)
    }

    pub fn validate(&self) -> Result<(), AnalysisError> {
        let first = self.entries.first().ok_or(AnalysisError::EmptyCatalog)?;
        for (index, e) in self.entries.iter().enumerate() {
            let same = match (first, e) {
                (Decomposition::Chain(a), Decomposition::Chain(b)) => a.presentation == b.presentation,
                (Decomposition::Filtered(a), Decomposition::Filtered(b)) => a.base == b.base,
                _ => false,
            };
            if !same {
                return Err(AnalysisError::MixedBase(index));
            }
            let v = match e {
                Decomposition::Chain(c) => c.validate(),
                Decomposition::Filtered(f) => f.validate(),
            };
            if let Some(v) = v.first() {
                return Err(AnalysisError::InvalidEntry { index, message: v.to_string() });
            }
        }
        Ok(())
    }
}

/// Finite surrogate for "all sentences of bounded rank": a list with rank and width.
#[derive(Clone, Debug, Serialize)]
pub struct FormulaBattery {
    pub entries: Vec<BatteryEntry>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BatteryEntry {
    #[serde(serialize_with = "display")]
    pub formula: Formula,
    pub rank: usize,
    pub width: usize,
}

fn display<S: serde::Serializer>(f: &Formula, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(f)
}

impl FormulaBattery {
    pub fn new(formulas: Vec<Formula>) -> Self {
        let entries =
            formulas.into_iter().map(|f| BatteryEntry { rank: f.rank(), width: f.width(), formula: f }).collect();
        FormulaBattery { entries }
    }

    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.entries.iter().map(|e| &e.formula)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Indices whose metadata disagrees with the formula.
    pub fn inconsistent(&self) -> Vec<usize> {
        (0..self.entries.len())
            .filter(|&i| {
                let e = &self.entries[i];
                e.rank != e.formula.rank() || e.width != e.formula.width()
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Independence {
    Independent {
        value: bool,
    },
    /// Entries `left` and `right` give opposite definite verdicts.
    Dependent {
        left: usize,
        right: usize,
    },
    Unknown,
}

#[derive(Clone, Debug, Serialize)]
pub struct IndependenceReport {
    pub result: Independence,
    pub labels: Vec<String>,
    pub verdicts: Vec<Verdict>,
}

impl std::fmt::Display for IndependenceReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let n = self.verdicts.len();
        match &self.result {
            Independence::Independent { value } => {
                write!(f, "independent ({value}) relative to catalog of {n}")
            }
            Independence::Dependent { left, right } => write!(
                f,
                "dependent relative to catalog of {n}: entry {left} [{}] gives {}, entry {right} [{}] gives {}",
                self.labels[*left], self.verdicts[*left], self.labels[*right], self.verdicts[*right]
            ),
            Independence::Unknown => write!(f, "unknown relative to catalog of {n}"),
        }
    }
}

/// Evaluates `phi` on every decomposition. A pair of opposite definite
/// verdicts is reported even when other entries are undecided.
pub fn chain_independent(
    phi: &Formula,
    catalog: &DecompositionCatalog,
    bounds: &EvalBounds,
) -> Result<IndependenceReport, AnalysisError> {
    catalog.validate()?;
    let verdicts: Vec<Verdict> = catalog.entries.iter().map(|d| d.eval(phi, bounds)).collect::<Result<_, _>>()?;
    let labels = catalog.entries.iter().map(Decomposition::label).collect();
    let first_true = verdicts.iter().position(|v| v.as_bool() == Some(true));
    let first_false = verdicts.iter().position(|v| v.as_bool() == Some(false));
    let result = match (first_true, first_false) {
        (Some(t), Some(f)) => Independence::Dependent { left: t.min(f), right: t.max(f) },
        _ if verdicts.iter().any(|v| !v.is_definite()) => Independence::Unknown,
        (t, _) => Independence::Independent { value: t.is_some() },
    };
    Ok(IndependenceReport { result, labels, verdicts })
}
