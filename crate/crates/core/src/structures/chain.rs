use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{FiniteStructure, StructureError, Violation, Vocabulary};

/// How tuples spread over several blocks are interpreted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Linkage {
    None,
    /// `R(x, y)` holds across blocks iff `x` sits in a later block than `y`.
    AllDecreasing,
    /// `R(x, y)` holds across blocks iff `x` sits in an earlier block than `y`.
    AllIncreasing,
    Complete,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockSeq {
    pub preamble: Vec<usize>,
    pub cycle: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Element {
    pub block: usize,
    pub local: usize,
}

impl Element {
    pub fn new(block: usize, local: usize) -> Self {
        Element { block, local }
    }
}

impl std::fmt::Display for Element {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.local, self.block)
    }
}

/// Eventually periodic sequence of finite blocks with cross-block linkage.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Presentation {
    pub vocab: Vocabulary,
    pub templates: Vec<FiniteStructure>,
    pub block_seq: BlockSeq,
    pub linkage: BTreeMap<String, Linkage>,
}

impl Presentation {
    /// Blocks are copies of `template`, cycle `[0]`, with the given linkage for every symbol.
    pub fn periodic(template: FiniteStructure, mode: Linkage) -> Self {
        let linkage = template.vocab.relations.iter().map(|r| (r.name.clone(), mode)).collect();
        Presentation {
            vocab: template.vocab.clone(),
            templates: vec![template],
            block_seq: BlockSeq { preamble: vec![], cycle: vec![0] },
            linkage,
        }
    }

    /// Reverse ordinal sum of one-point blocks: the order type ω*.
    pub fn omega_star() -> Self {
        Presentation::periodic(FiniteStructure::chain(1), Linkage::AllDecreasing)
    }

    /// Ordinal sum of one-point blocks: the order type ω.
    pub fn omega() -> Self {
        Presentation::periodic(FiniteStructure::chain(1), Linkage::AllIncreasing)
    }

    pub fn preamble_len(&self) -> usize {
        self.block_seq.preamble.len()
    }

    pub fn cycle_len(&self) -> usize {
        self.block_seq.cycle.len()
    }

    pub fn template_index(&self, block: usize) -> usize {
        let p = self.preamble_len();
        if block < p {
            self.block_seq.preamble[block]
        } else {
            self.block_seq.cycle[(block - p) % self.cycle_len()]
        }
    }

    pub fn template(&self, block: usize) -> &FiniteStructure {
        &self.templates[self.template_index(block)]
    }

    pub fn block_size(&self, block: usize) -> usize {
        self.template(block).size()
    }

    /// True iff only finitely many blocks are nonempty.
    pub fn is_finite(&self) -> bool {
        self.block_seq.cycle.iter().all(|&t| self.templates.get(t).is_none_or(|m| m.size() == 0))
    }

    pub fn mode(&self, rel: &str) -> Linkage {
        self.linkage.get(rel).copied().unwrap_or(Linkage::None)
    }

    pub fn is_valid_element(&self, e: Element) -> bool {
        e.local < self.block_size(e.block)
    }

    /// Constants are read off block 0.
    pub fn constant(&self, c: &str) -> Option<Element> {
        self.template(0).consts.get(c).map(|&l| Element::new(0, l))
    }

    pub fn holds(&self, rel: &str, args: &[Element]) -> bool {
        let Some(first) = args.first() else { return false };
        if args.iter().all(|e| e.block == first.block) {
            let locals: Vec<usize> = args.iter().map(|e| e.local).collect();
            return self.template(first.block).holds(rel, &locals);
        }
        match self.mode(rel) {
            Linkage::None => false,
            Linkage::Complete => true,
            Linkage::AllIncreasing => args.len() == 2 && args[0].block < args[1].block,
            Linkage::AllDecreasing => args.len() == 2 && args[0].block > args[1].block,
        }
    }

    /// Every element whose block index is below `horizon`.
    pub fn window(&self, horizon: usize) -> Vec<Element> {
        (0..horizon).flat_map(|b| (0..self.block_size(b)).map(move |l| Element::new(b, l))).collect()
    }

    /// Induced finite structure on `elems`; element names are `local@block`.
    pub fn induced(&self, elems: &[Element]) -> FiniteStructure {
        let mut m = FiniteStructure::new(self.vocab.clone(), elems.len());
        for (i, e) in elems.iter().enumerate() {
            m.names[i] = format!("{}@{}", self.template(e.block).names[e.local], e.block);
        }
        for r in &self.vocab.relations {
            if elems.is_empty() {
                break;
            }
            let mut idx = vec![0usize; r.arity];
            loop {
                let args: Vec<Element> = idx.iter().map(|&i| elems[i]).collect();
                if self.holds(&r.name, &args) {
                    m.add(&r.name, idx.clone());
                }
                if !bump(&mut idx, elems.len()) {
                    break;
                }
            }
        }
        for c in &self.vocab.constants {
            if let Some(e) = self.constant(c) {
                if let Some(p) = elems.iter().position(|x| *x == e) {
                    m.consts.insert(c.clone(), p);
                }
            }
        }
        m
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out: Vec<Violation> = self.vocab.check().into_iter().map(|m| Violation::new("vocabulary", m)).collect();
        if self.templates.is_empty() {
            out.push(Violation::new("templates", "no templates"));
        }
        for (i, t) in self.templates.iter().enumerate() {
            if t.vocab.relations != self.vocab.relations {
                out.push(Violation::new(format!("templates[{i}]"), "vocabulary differs from document"));
            }
            for m in t.check() {
                out.push(Violation::new(format!("templates[{i}]"), m));
            }
        }
        if self.block_seq.cycle.is_empty() {
            out.push(Violation::new("block_seq.cycle", "cycle is empty"));
        }
        for (part, seq) in [("preamble", &self.block_seq.preamble), ("cycle", &self.block_seq.cycle)] {
            for (k, &t) in seq.iter().enumerate() {
                if t >= self.templates.len() {
                    out.push(Violation::new(
                        format!("block_seq.{part}[{k}]"),
                        format!("template index {t} out of range"),
                    ));
                }
            }
        }
        for (r, mode) in &self.linkage {
            match self.vocab.arity(r) {
                None => out.push(Violation::new(format!("linkage.{r}"), "unknown symbol")),
                Some(a) if a != 2 && matches!(mode, Linkage::AllDecreasing | Linkage::AllIncreasing) => out.push(
                    Violation::new(format!("linkage.{r}"), format!("directional linkage on a symbol of arity {a}")),
                ),
                _ => {}
            }
        }
        out
    }
}

/// Increments a mixed-radix counter; false once it wraps around.
pub(crate) fn bump(idx: &mut [usize], radix: usize) -> bool {
    for d in idx.iter_mut().rev() {
        *d += 1;
        if *d < radix {
            return true;
        }
        *d = 0;
    }
    false
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Prefix {
    pub a: usize,
    pub b: usize,
}

/// Designates one local element (by name) in each template.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Selector {
    pub tag: String,
    pub pick: BTreeMap<usize, String>,
}

/// Levels `A_n` = blocks below `a*n+b`, plus the designated element of every later block.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelFamily {
    pub prefix: Prefix,
    #[serde(default)]
    pub selectors: Vec<Selector>,
}

impl LevelFamily {
    pub fn affine(a: usize, b: usize) -> Self {
        LevelFamily { prefix: Prefix { a, b }, selectors: vec![] }
    }

    /// Prefix `n+1` plus the element with local id `local` of every template.
    pub fn diagonal(pres: &Presentation, local: &str) -> Self {
        let pick = (0..pres.templates.len()).map(|t| (t, local.to_string())).collect();
        LevelFamily { prefix: Prefix { a: 1, b: 1 }, selectors: vec![Selector { tag: "diag".into(), pick }] }
    }

    pub fn prefix_at(&self, n: usize) -> usize {
        self.prefix.a * n + self.prefix.b
    }

    pub fn finitary(&self) -> bool {
        self.selectors.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ChainModel {
    pub presentation: Presentation,
    pub levels: LevelFamily,
}

/// A finite window onto one level.
#[derive(Clone, Debug)]
pub struct Fragment {
    pub structure: FiniteStructure,
    pub elements: Vec<Element>,
    pub truncated: bool,
}

impl ChainModel {
    pub fn new(presentation: Presentation, levels: LevelFamily) -> Self {
        ChainModel { presentation, levels }
    }

    fn pick_local(&self, sel: &Selector, template: usize) -> Option<usize> {
        sel.pick.get(&template).and_then(|n| self.presentation.templates[template].index_of(n))
    }

    /// Local id that `sel` designates in `block`.
    pub fn selector_local(&self, sel: &Selector, block: usize) -> Option<usize> {
        self.pick_local(sel, self.presentation.template_index(block))
    }

    /// Local ids designated in `block` by some selector.
    pub fn designated(&self, block: usize) -> Vec<usize> {
        let t = self.presentation.template_index(block);
        let mut v: Vec<usize> = self.levels.selectors.iter().filter_map(|s| self.pick_local(s, t)).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn is_designated(&self, e: Element) -> bool {
        self.designated(e.block).contains(&e.local)
    }

    pub fn level_contains(&self, level: usize, e: Element) -> Result<bool, StructureError> {
        if !self.presentation.is_valid_element(e) {
            return Err(StructureError::InvalidElement { block: e.block, local: e.local });
        }
        Ok(e.block < self.levels.prefix_at(level) || self.is_designated(e))
    }

    /// Least level containing `e`, if any.
    pub fn min_level(&self, e: Element) -> Option<usize> {
        let Prefix { a, b } = self.levels.prefix;
        if e.block < b || self.is_designated(e) {
            Some(0)
        } else if a == 0 {
            None
        } else {
            Some((e.block + 1 - b).div_ceil(a))
        }
    }

    /// Least level containing every element of `elems` (levels are increasing).
    pub fn min_level_of(&self, elems: &[Element]) -> Option<usize> {
        elems.iter().try_fold(0, |acc, &e| self.min_level(e).map(|l| acc.max(l)))
    }

    /// Elements of level `level` with block index below `horizon`.
    pub fn level_window(&self, level: usize, horizon: usize) -> Vec<Element> {
        let p = self.levels.prefix_at(level);
        let mut out = Vec::new();
        for b in 0..horizon {
            if b < p {
                out.extend((0..self.presentation.block_size(b)).map(|l| Element::new(b, l)));
            } else {
                out.extend(self.designated(b).into_iter().map(|l| Element::new(b, l)));
            }
        }
        out
    }

    pub fn materialize(&self, level: usize, horizon: usize) -> Result<Fragment, StructureError> {
        let prefix = self.levels.prefix_at(level);
        if horizon < prefix {
            return Err(StructureError::WindowTooSmall { horizon, prefix });
        }
        let elements = self.level_window(level, horizon);
        Ok(Fragment { structure: self.presentation.induced(&elements), elements, truncated: !self.levels.finitary() })
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = self.presentation.validate();
        if !out.is_empty() {
            return out;
        }
        let Prefix { a, b } = self.levels.prefix;
        if b == 0 {
            out.push(Violation::new("levels.prefix.b", "offset must be at least 1"));
        }
        let exhausted = if self.presentation.is_finite() {
            (b..self.presentation.preamble_len()).all(|k| self.presentation.block_size(k) == 0)
        } else {
            false
        };
        if a == 0 && !exhausted {
            out.push(Violation::new("levels.prefix", "levels do not exhaust universe"));
        }
        let pres = &self.presentation;
        let mut used: Vec<usize> = pres.block_seq.preamble.iter().chain(&pres.block_seq.cycle).copied().collect();
        used.sort_unstable();
        used.dedup();
        let mut tags = std::collections::BTreeSet::new();
        for s in &self.levels.selectors {
            if !tags.insert(s.tag.as_str()) {
                out.push(Violation::new(format!("selector {}", s.tag), "duplicate tag"));
            }
            for &t in &used {
                match s.pick.get(&t) {
                    None => {
                        out.push(Violation::new(format!("selector {} template {t}", s.tag), "no designated element"))
                    }
                    Some(n) if pres.templates[t].index_of(n).is_none() => out.push(Violation::new(
                        format!("selector {} template {t}", s.tag),
                        format!("local id `{n}` absent from template"),
                    )),
                    _ => {}
                }
            }
        }
        out
    }
}
