use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::GameError;
use crate::structures::{FilteredFiniteModel, FiniteStructure};

/// Dense tables above this many entries fall back to set lookups.
const DENSE_LIMIT: usize = 1 << 16;

enum Table {
    Dense(Vec<bool>),
    Sparse(String),
}

/// One side of a game: a finite structure, optionally with levels that bound
/// the tuples a player may pick.
pub struct Arena<'a> {
    pub m: &'a FiniteStructure,
    pub levels: Option<&'a [BTreeSet<usize>]>,
    rels: Vec<(usize, Table)>,
}

impl<'a> Arena<'a> {
    pub fn new(m: &'a FiniteStructure, levels: Option<&'a [BTreeSet<usize>]>) -> Self {
        let n = m.size();
        let mut rels = Vec::new();
        let mut names: Vec<&str> = m.vocab.relations.iter().map(|r| r.name.as_str()).collect();
        names.sort_unstable();
        for name in names {
            let arity = m.vocab.arity(name).unwrap_or(0);
            let cells = n.checked_pow(arity as u32).filter(|&c| c <= DENSE_LIMIT);
            let table = match cells {
                Some(cells) => {
                    let mut t = vec![false; cells];
                    for tuple in m.rels.get(name).into_iter().flatten() {
                        t[index(tuple.iter().copied(), n)] = true;
                    }
                    Table::Dense(t)
                }
                None => Table::Sparse(name.to_string()),
            };
            rels.push((arity, table));
        }
        Arena { m, levels, rels }
    }

    pub fn plain(m: &'a FiniteStructure) -> Self {
        Self::new(m, None)
    }

    pub fn filtered(fm: &'a FilteredFiniteModel) -> Self {
        Self::new(&fm.base, Some(&fm.filtration))
    }

    pub fn size(&self) -> usize {
        self.m.size()
    }

    pub fn name(&self, e: usize) -> &str {
        &self.m.names[e]
    }

    /// Whether `elems` lie inside one level.
    pub fn bounded(&self, elems: &[usize]) -> bool {
        match self.levels {
            None => true,
            Some(ls) => ls.iter().any(|l| elems.iter().all(|e| l.contains(e))),
        }
    }

    fn holds(&self, rel: usize, tuple: &[usize]) -> bool {
        match &self.rels[rel].1 {
            Table::Dense(t) => t[index(tuple.iter().copied(), self.size())],
            Table::Sparse(name) => self.m.holds(name, tuple),
        }
    }

    fn level_sets(&self) -> Vec<BTreeSet<usize>> {
        match self.levels {
            Some(ls) => ls.to_vec(),
            None => vec![(0..self.size()).collect()],
        }
    }
}

fn index(tuple: impl Iterator<Item = usize>, n: usize) -> usize {
    tuple.fold(0, |acc, e| acc * n + e)
}

/// Both sides must agree on relation symbols, arities and constants.
pub fn check_same_vocabulary(a: &FiniteStructure, b: &FiniteStructure) -> Result<(), GameError> {
    let sig = |m: &FiniteStructure| {
        let rels: BTreeSet<(String, usize)> = m.vocab.relations.iter().map(|r| (r.name.clone(), r.arity)).collect();
        let consts: BTreeSet<String> = m.vocab.constants.iter().cloned().collect();
        (rels, consts)
    };
    if sig(a) != sig(b) {
        return Err(GameError::VocabularyMismatch);
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

/// Why a set of pairs is not a partial chain isomorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsoViolation {
    OutOfRange(usize, usize),
    NotFunction(usize),
    NotInjective(usize),
    Atomic { rel: String, left: Vec<usize> },
    Constant(String),
    Level,
}

impl fmt::Display for IsoViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IsoViolation::OutOfRange(a, b) => write!(f, "pair ({a},{b}) outside the universes"),
            IsoViolation::NotFunction(a) => write!(f, "not a function at {a}"),
            IsoViolation::NotInjective(_) => write!(f, "not injective"),
            IsoViolation::Atomic { rel, left } => write!(f, "atomic violated: {rel}{left:?}"),
            IsoViolation::Constant(c) => write!(f, "atomic violated: constant {c}"),
            IsoViolation::Level => write!(f, "level condition violated"),
        }
    }
}

/// A finite injective map between the universes of two arenas, kept sorted by
/// left element. Validity is relative to a pair of arenas; see [`PartialIso::check`].
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PartialIso {
    pairs: Vec<(usize, usize)>,
}

impl PartialIso {
    pub fn empty() -> Self {
        PartialIso::default()
    }

    /// Sorts and deduplicates; no validity check.
    pub fn from_pairs(mut pairs: Vec<(usize, usize)>) -> Self {
        pairs.sort_unstable();
        pairs.dedup();
        PartialIso { pairs }
    }

    /// The map sending each left constant to the right constant of the same name.
    pub fn base(left: &Arena, right: &Arena) -> Result<Self, IsoViolation> {
        let pairs = left
            .m
            .consts
            .iter()
            .map(|(c, &a)| right.m.consts.get(c).map(|&b| (a, b)).ok_or_else(|| IsoViolation::Constant(c.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        let f = PartialIso::from_pairs(pairs);
        f.check(left, right)?;
        Ok(f)
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn image(&self, a: usize) -> Option<usize> {
        self.pairs.iter().find(|p| p.0 == a).map(|p| p.1)
    }

    pub fn preimage(&self, b: usize) -> Option<usize> {
        self.pairs.iter().find(|p| p.1 == b).map(|p| p.0)
    }

    pub fn covers(&self, side: Side, e: usize) -> bool {
        match side {
            Side::Left => self.image(e).is_some(),
            Side::Right => self.preimage(e).is_some(),
        }
    }

    pub fn dom(&self) -> Vec<usize> {
        self.pairs.iter().map(|p| p.0).collect()
    }

    pub fn ran(&self) -> Vec<usize> {
        self.pairs.iter().map(|p| p.1).collect()
    }

    pub fn is_subset_of(&self, other: &PartialIso) -> bool {
        self.pairs.iter().all(|p| other.pairs.binary_search(p).is_ok())
    }

    /// `self` plus `extra`, checked against the arenas.
    pub fn extend(&self, extra: &[(usize, usize)], left: &Arena, right: &Arena) -> Result<PartialIso, IsoViolation> {
        let mut pairs = self.pairs.clone();
        pairs.extend_from_slice(extra);
        let g = PartialIso::from_pairs(pairs);
        g.check_from(left, right, self)?;
        Ok(g)
    }

    /// Full validity: a function, injective, preserving and reflecting every
    /// atomic relation and constant, and respecting levels in both directions.
    pub fn check(&self, left: &Arena, right: &Arena) -> Result<(), IsoViolation> {
        self.check_from(left, right, &PartialIso::empty())
    }

    /// Validity assuming the sub-map `old` is already valid.
    fn check_from(&self, left: &Arena, right: &Arena, old: &PartialIso) -> Result<(), IsoViolation> {
        for &(a, b) in &self.pairs {
            if a >= left.size() || b >= right.size() {
                return Err(IsoViolation::OutOfRange(a, b));
            }
        }
        for w in self.pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(IsoViolation::NotFunction(w[0].0));
            }
        }
        let mut ran = self.ran();
        ran.sort_unstable();
        if let Some(w) = ran.windows(2).find(|w| w[0] == w[1]) {
            return Err(IsoViolation::NotInjective(w[0]));
        }
        for (c, &a) in &left.m.consts {
            let b = right.m.consts.get(c).copied();
            if let Some(img) = self.image(a) {
                if Some(img) != b {
                    return Err(IsoViolation::Constant(c.clone()));
                }
            }
            if let Some(b) = b {
                if self.preimage(b).is_some_and(|pre| pre != a) {
                    return Err(IsoViolation::Constant(c.clone()));
                }
            }
        }
        let fresh: Vec<bool> = self.pairs.iter().map(|p| old.pairs.binary_search(p).is_err()).collect();
        if !old.is_empty() && !fresh.iter().any(|&f| f) {
            return Ok(());
        }
        let p = self.pairs.len();
        if p == 0 {
            return Ok(());
        }
        let mut idx = Vec::new();
        let mut ta = Vec::new();
        let mut tb = Vec::new();
        for (k, (arity, _)) in left.rels.iter().enumerate() {
            idx.clear();
            idx.resize(*arity, 0);
            loop {
                if old.is_empty() || idx.iter().any(|&i| fresh[i]) {
                    ta.clear();
                    tb.clear();
                    ta.extend(idx.iter().map(|&i| self.pairs[i].0));
                    tb.extend(idx.iter().map(|&i| self.pairs[i].1));
                    if left.holds(k, &ta) != right.holds(k, &tb) {
                        let rel = sorted_names(left)[k].to_string();
                        return Err(IsoViolation::Atomic { rel, left: ta.clone() });
                    }
                }
                if !crate::structures::bump(&mut idx, p) {
                    break;
                }
            }
        }
        if left.levels.is_some() || right.levels.is_some() {
            let (ls, rs) = (left.level_sets(), right.level_sets());
            let forth = ls.iter().all(|l| {
                let img: Vec<usize> = self.pairs.iter().filter(|p| l.contains(&p.0)).map(|p| p.1).collect();
                rs.iter().any(|r| img.iter().all(|e| r.contains(e)))
            });
            let back = rs.iter().all(|r| {
                let pre: Vec<usize> = self.pairs.iter().filter(|p| r.contains(&p.1)).map(|p| p.0).collect();
                ls.iter().any(|l| pre.iter().all(|e| l.contains(e)))
            });
            if !(forth && back) {
                return Err(IsoViolation::Level);
            }
        }
        Ok(())
    }

    pub fn is_valid(&self, left: &Arena, right: &Arena) -> bool {
        self.check(left, right).is_ok()
    }

    /// `{a↦x, b↦y}` using element names.
    pub fn render(&self, left: &Arena, right: &Arena) -> String {
        let body: Vec<String> =
            self.pairs.iter().map(|&(a, b)| format!("{}↦{}", left.name(a), right.name(b))).collect();
        format!("{{{}}}", body.join(", "))
    }
}

fn sorted_names<'m>(a: &'m Arena) -> Vec<&'m str> {
    let mut names: Vec<&str> = a.m.vocab.relations.iter().map(|r| r.name.as_str()).collect();
    names.sort_unstable();
    names
}

/// Subsets of `0..n` with between 1 and `cap` elements, in size-then-lex order.
pub(crate) fn small_subsets(n: usize, cap: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for e in start..n {
            cur.push(e);
            rec(e + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for k in 1..=cap.min(n) {
        rec(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

/// Injective assignments of `k` values from `pool`, in lexicographic order.
pub(crate) fn injections(k: usize, pool: &[usize]) -> Vec<Vec<usize>> {
    fn rec(k: usize, pool: &[usize], used: &mut Vec<bool>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for (i, &v) in pool.iter().enumerate() {
            if !used[i] {
                used[i] = true;
                cur.push(v);
                rec(k, pool, used, cur, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(k, pool, &mut vec![false; pool.len()], &mut Vec::with_capacity(k), &mut out);
    out
}

/// Every valid partial isomorphism extending `base`.
pub fn all_partial_isos(left: &Arena, right: &Arena, base: &PartialIso) -> Vec<PartialIso> {
    let free_left: Vec<usize> = (0..left.size()).filter(|&a| !base.covers(Side::Left, a)).collect();
    let free_right: Vec<usize> = (0..right.size()).filter(|&b| !base.covers(Side::Right, b)).collect();
    let mut out = vec![base.clone()];
    for dom in small_subsets(free_left.len(), free_left.len()) {
        let dom: Vec<usize> = dom.iter().map(|&i| free_left[i]).collect();
        for img in injections(dom.len(), &free_right) {
            let extra: Vec<(usize, usize)> = dom.iter().copied().zip(img).collect();
            if let Ok(g) = base.extend(&extra, left, right) {
                out.push(g);
            }
        }
    }
    out.sort();
    out
}
