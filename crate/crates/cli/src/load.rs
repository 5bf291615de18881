use std::path::Path;

use anyhow::{bail, Context, Result};
use chainlab::formulas::{parse_file, Formula};
use chainlab::games::Arena;
use chainlab::semantics::EvalBounds;
use chainlab::structures::{
    load_path, ChainModel, FilteredFiniteModel, FiniteStructure, Loaded, Presentation, Vocabulary,
};
use serde::Deserialize;

use crate::args::BoundsArgs;

/// Defaults read from `--config`; flags take precedence.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub horizon: Option<usize>,
    pub period: Option<usize>,
    pub heuristic: Option<bool>,
    pub budget: Option<u64>,
}

impl Config {
    pub fn read(path: Option<&Path>) -> Result<Config> {
        let Some(path) = path else { return Ok(Config::default()) };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn bounds(&self, args: &BoundsArgs) -> EvalBounds {
        let d = EvalBounds::default();
        EvalBounds {
            horizon: args.horizon.or(self.horizon).unwrap_or(d.horizon),
            scheme_period: args.period.or(self.period).unwrap_or(d.scheme_period),
            heuristic: !args.no_heuristic && self.heuristic.unwrap_or(d.heuristic),
        }
    }

    /// Search budget: flag, then CHAINLAB_BUDGET, then config, then `default`.
    pub fn budget(&self, flag: Option<u64>, default: u64) -> Result<u64> {
        if let Some(b) = flag {
            return Ok(b);
        }
        if let Ok(v) = std::env::var("CHAINLAB_BUDGET") {
            return v.trim().parse().with_context(|| format!("CHAINLAB_BUDGET is not a number: `{v}`"));
        }
        Ok(self.budget.unwrap_or(default))
    }
}

pub fn load(path: &Path) -> Result<Loaded> {
    let loaded = load_path(path).with_context(|| format!("loading {}", path.display()))?;
    if let Some(v) = loaded.validate().first() {
        bail!("{}: invalid {}: {v}", path.display(), loaded.kind());
    }
    Ok(loaded)
}

pub fn structure(path: &Path) -> Result<FiniteStructure> {
    match load(path)? {
        Loaded::Structure(m) => Ok(m),
        other => bail!("{}: expected a finite structure, found a {}", path.display(), other.kind()),
    }
}

pub fn filtered(path: &Path) -> Result<FilteredFiniteModel> {
    match load(path)? {
        Loaded::Filtered(f) => Ok(f),
        other => bail!("{}: expected a filtered model, found a {}", path.display(), other.kind()),
    }
}

pub fn chain(path: &Path) -> Result<ChainModel> {
    match load(path)? {
        Loaded::Chain(c) => Ok(c),
        other => bail!("{}: expected a chain model, found a {}", path.display(), other.kind()),
    }
}

pub fn presentation(path: &Path) -> Result<Presentation> {
    match load(path)? {
        Loaded::Presentation(p) => Ok(p),
        Loaded::Chain(c) => Ok(c.presentation),
        other => bail!("{}: expected a presentation, found a {}", path.display(), other.kind()),
    }
}

/// A finite structure or filtered model, as a game arena.
pub enum GameModel {
    Plain(FiniteStructure),
    Filtered(FilteredFiniteModel),
}

impl GameModel {
    pub fn from_loaded(l: Loaded, path: &Path) -> Result<Self> {
        match l {
            Loaded::Structure(m) => Ok(GameModel::Plain(m)),
            Loaded::Filtered(f) => Ok(GameModel::Filtered(f)),
            other => {
                bail!("{}: games need a finite structure or filtered model, found a {}", path.display(), other.kind())
            }
        }
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_loaded(load(path)?, path)
    }

    pub fn arena(&self) -> Arena<'_> {
        match self {
            GameModel::Plain(m) => Arena::plain(m),
            GameModel::Filtered(f) => Arena::filtered(f),
        }
    }
}

pub fn formulas(path: &Path, vocab: Option<&Vocabulary>) -> Result<Vec<Formula>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let fs = parse_file(&text, vocab).with_context(|| format!("parsing {}", path.display()))?;
    if fs.is_empty() {
        bail!("{}: no formulas", path.display());
    }
    Ok(fs)
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Base paths of a catalog's entries, for labels.
pub fn catalog_labels(path: &Path) -> Result<Vec<String>> {
    let entries: Vec<chainlab::structures::CatalogEntry> = read_json(path)?;
    Ok(entries.iter().enumerate().map(|(i, e)| format!("{i}:{}", e.base.display())).collect())
}
