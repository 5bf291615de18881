//! Vocabularies, finite structures, block-presented chain models and filtered models.

mod chain;
mod doc;
mod filtered;
mod finite;
mod iso;
mod vocab;

pub(crate) use chain::bump;
pub use chain::{BlockSeq, ChainModel, Element, Fragment, LevelFamily, Linkage, Prefix, Presentation, Selector};
pub use doc::{load_catalog, load_path, CatalogEntry, Document, Loaded, TemplateDoc};
pub use filtered::FilteredFiniteModel;
pub use finite::{all_binary_structures, binary_iso_classes, for_each_permutation, FiniteStructure};
pub use iso::{
    candidate_selectors, chain_isomorphic, enumerate_families, enumerate_filtrations, level_isomorphic,
    DecompositionCaps,
};
pub use vocab::{RelSym, Vocabulary};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("arity mismatch for `{symbol}`: expected {expected}, found {found}")]
    Arity { symbol: String, expected: usize, found: usize },
    #[error("window excludes mandatory blocks (horizon {horizon} < prefix {prefix})")]
    WindowTooSmall { horizon: usize, prefix: usize },
    #[error("invalid element: local {local} in block {block}")]
    InvalidElement { block: usize, local: usize },
    #[error("vocabulary mismatch")]
    VocabularyMismatch,
    #[error("expected a {expected}, found a {found}")]
    WrongKind { expected: &'static str, found: &'static str },
    #[error("invalid document: {0}")]
    Invalid(String),
}

/// One violated invariant, with where it was found.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Violation {
    pub location: String,
    pub message: String,
}

impl Violation {
    pub fn new(location: impl Into<String>, message: impl Into<String>) -> Self {
        Violation { location: location.into(), message: message.into() }
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}
