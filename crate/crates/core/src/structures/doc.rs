//! JSON documents for structures, presentations, chain models and filtered models.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{
    BlockSeq, ChainModel, FilteredFiniteModel, FiniteStructure, LevelFamily, Linkage, Presentation, StructureError,
    Violation, Vocabulary,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemplateDoc {
    pub universe: Vec<String>,
    #[serde(default)]
    pub relations: BTreeMap<String, Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub constants: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub vocabulary: Vocabulary,
    pub templates: Vec<TemplateDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_seq: Option<BlockSeq>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub linkage: BTreeMap<String, Linkage>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<LevelFamily>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub filtration: Option<Vec<Vec<String>>>,
}

/// What a document describes.
#[derive(Clone, Debug, PartialEq)]
pub enum Loaded {
    Structure(FiniteStructure),
    Filtered(FilteredFiniteModel),
    Presentation(Presentation),
    Chain(ChainModel),
}

impl Loaded {
    pub fn kind(&self) -> &'static str {
        match self {
            Loaded::Structure(_) => "structure",
            Loaded::Filtered(_) => "filtered model",
            Loaded::Presentation(_) => "presentation",
            Loaded::Chain(_) => "chain model",
        }
    }

    pub fn validate(&self) -> Vec<Violation> {
        match self {
            Loaded::Structure(m) => m.check().into_iter().map(|s| Violation::new("structure", s)).collect(),
            Loaded::Filtered(f) => f.validate(),
            Loaded::Presentation(p) => p.validate(),
            Loaded::Chain(c) => c.validate(),
        }
    }

    /// A plain structure, or the base of a filtered model.
    pub fn into_structure(self) -> Result<FiniteStructure, StructureError> {
        match self {
            Loaded::Structure(m) => Ok(m),
            Loaded::Filtered(f) => Ok(f.base),
            other => Err(StructureError::WrongKind { expected: "finite structure", found: other.kind() }),
        }
    }

    /// A filtered model; plain structures get the trivial filtration.
    pub fn into_filtered(self) -> Result<FilteredFiniteModel, StructureError> {
        match self {
            Loaded::Structure(m) => Ok(FilteredFiniteModel::trivial(m)),
            Loaded::Filtered(f) => Ok(f),
            other => Err(StructureError::WrongKind { expected: "finite structure", found: other.kind() }),
        }
    }

    pub fn into_chain(self) -> Result<ChainModel, StructureError> {
        match self {
            Loaded::Chain(c) => Ok(c),
            other => Err(StructureError::WrongKind { expected: "chain model", found: other.kind() }),
        }
    }
}

fn template_from_doc(vocab: &Vocabulary, t: &TemplateDoc) -> Result<FiniteStructure, StructureError> {
    let mut m = FiniteStructure::new(vocab.clone(), t.universe.len());
    m.names = t.universe.clone();
    let idx = |n: &String| m.index_of(n).ok_or_else(|| StructureError::UnknownElement(n.clone()));
    let mut rels: Vec<(String, Vec<usize>)> = Vec::new();
    for (r, tuples) in &t.relations {
        let arity = vocab.arity(r).ok_or_else(|| StructureError::UnknownSymbol(r.clone()))?;
        for tuple in tuples {
            if tuple.len() != arity {
                return Err(StructureError::Arity { symbol: r.clone(), expected: arity, found: tuple.len() });
            }
            rels.push((r.clone(), tuple.iter().map(idx).collect::<Result<_, _>>()?));
        }
    }
    let mut consts = BTreeMap::new();
    for (c, e) in &t.constants {
        if !vocab.is_constant(c) {
            return Err(StructureError::UnknownSymbol(c.clone()));
        }
        consts.insert(c.clone(), idx(e)?);
    }
    for (r, t) in rels {
        m.add(&r, t);
    }
    m.consts = consts;
    Ok(m)
}

fn template_to_doc(m: &FiniteStructure) -> TemplateDoc {
    let name = |e: &usize| m.names[*e].clone();
    TemplateDoc {
        universe: m.names.clone(),
        relations: m
            .rels
            .iter()
            .map(|(r, ts)| (r.clone(), ts.iter().map(|t| t.iter().map(name).collect()).collect()))
            .collect(),
        constants: m.consts.iter().map(|(c, e)| (c.clone(), name(e))).collect(),
    }
}

impl Document {
    pub fn from_json(text: &str) -> Result<Self, StructureError> {
        serde_json::from_str(text).map_err(|e| StructureError::Invalid(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }

    pub fn read(path: &Path) -> Result<Self, StructureError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| StructureError::Invalid(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn load(&self) -> Result<Loaded, StructureError> {
        let templates: Vec<FiniteStructure> =
            self.templates.iter().map(|t| template_from_doc(&self.vocabulary, t)).collect::<Result<_, _>>()?;
        if let Some(seq) = &self.block_seq {
            if self.filtration.is_some() {
                return Err(StructureError::Invalid("a presentation cannot carry a filtration".into()));
            }
            let pres = Presentation {
                vocab: self.vocabulary.clone(),
                templates,
                block_seq: seq.clone(),
                linkage: self.linkage.clone(),
            };
            return Ok(match &self.levels {
                Some(l) => Loaded::Chain(ChainModel::new(pres, l.clone())),
                None => Loaded::Presentation(pres),
            });
        }
        if self.levels.is_some() || !self.linkage.is_empty() {
            return Err(StructureError::Invalid("levels and linkage need a block_seq".into()));
        }
        let [base] = <[FiniteStructure; 1]>::try_from(templates)
            .map_err(|t| StructureError::Invalid(format!("expected one template, found {}", t.len())))?;
        match &self.filtration {
            None => Ok(Loaded::Structure(base)),
            Some(levels) => {
                let mut filtration = Vec::new();
                for level in levels {
                    let set: BTreeSet<usize> = level
                        .iter()
                        .map(|n| base.index_of(n).ok_or_else(|| StructureError::UnknownElement(n.clone())))
                        .collect::<Result<_, _>>()?;
                    filtration.push(set);
                }
                Ok(Loaded::Filtered(FilteredFiniteModel::new(base, filtration)))
            }
        }
    }

    pub fn from_structure(m: &FiniteStructure) -> Self {
        Document {
            vocabulary: m.vocab.clone(),
            templates: vec![template_to_doc(m)],
            block_seq: None,
            linkage: BTreeMap::new(),
            levels: None,
            filtration: None,
        }
    }

    pub fn from_filtered(f: &FiniteStructure, filtration: &[BTreeSet<usize>]) -> Self {
        let mut d = Self::from_structure(f);
        d.filtration = Some(filtration.iter().map(|l| l.iter().map(|&e| f.names[e].clone()).collect()).collect());
        d
    }

    pub fn from_presentation(p: &Presentation, levels: Option<&LevelFamily>) -> Self {
        Document {
            vocabulary: p.vocab.clone(),
            templates: p.templates.iter().map(template_to_doc).collect(),
            block_seq: Some(p.block_seq.clone()),
            linkage: p.linkage.clone(),
            levels: levels.cloned(),
            filtration: None,
        }
    }

    pub fn from_loaded(l: &Loaded) -> Self {
        match l {
            Loaded::Structure(m) => Self::from_structure(m),
            Loaded::Filtered(f) => Self::from_filtered(&f.base, &f.filtration),
            Loaded::Presentation(p) => Self::from_presentation(p, None),
            Loaded::Chain(c) => Self::from_presentation(&c.presentation, Some(&c.levels)),
        }
    }
}

pub fn load_path(path: &Path) -> Result<Loaded, StructureError> {
    Document::read(path)?.load()
}

/// One catalog entry: a base document plus optional replacement levels or filtration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogEntry {
    pub base: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<LevelFamily>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub filtration: Option<Vec<Vec<String>>>,
}

/// Reads a catalog file (a JSON list of entries); base paths are relative to the catalog.
pub fn load_catalog(path: &Path) -> Result<Vec<Loaded>, StructureError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| StructureError::Invalid(format!("{}: {e}", path.display())))?;
    let entries: Vec<CatalogEntry> = serde_json::from_str(&text).map_err(|e| StructureError::Invalid(e.to_string()))?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut out = Vec::with_capacity(entries.len());
    for e in entries {
        let mut doc = Document::read(&dir.join(&e.base))?;
        if e.levels.is_some() {
            doc.levels = e.levels;
        }
        if e.filtration.is_some() {
            doc.filtration = e.filtration;
        }
        out.push(doc.load()?);
    }
    Ok(out)
}
