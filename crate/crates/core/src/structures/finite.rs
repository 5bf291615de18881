use std::collections::{BTreeMap, BTreeSet};

use super::Vocabulary;

/// A finite structure. Elements are the indices `0..names.len()`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteStructure {
    pub vocab: Vocabulary,
    pub names: Vec<String>,
    pub rels: BTreeMap<String, BTreeSet<Vec<usize>>>,
    pub consts: BTreeMap<String, usize>,
}

pub(crate) fn default_name(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("e{i}")
    }
}

impl FiniteStructure {
    /// A structure with `n` elements named `a, b, c, ...` and empty relations.
    pub fn new(vocab: Vocabulary, n: usize) -> Self {
        let rels = vocab.relations.iter().map(|r| (r.name.clone(), BTreeSet::new())).collect();
        FiniteStructure { vocab, names: (0..n).map(default_name).collect(), rels, consts: BTreeMap::new() }
    }

    /// The strict linear order on `n` elements, `a < b < c < ...`.
    pub fn chain(n: usize) -> Self {
        Self::chain_with("<", n)
    }

    pub fn chain_with(sym: &str, n: usize) -> Self {
        let mut m = FiniteStructure::new(Vocabulary::order(sym), n);
        for i in 0..n {
            for j in i + 1..n {
                m.add(sym, vec![i, j]);
            }
        }
        m
    }

    /// Undirected graph on `n` vertices with the given edges, symbol `E`.
    pub fn graph(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut m = FiniteStructure::new(Vocabulary::new(&[("E", 2)]), n);
        for &(x, y) in edges {
            m.add("E", vec![x, y]);
            m.add("E", vec![y, x]);
        }
        m
    }

    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn add(&mut self, rel: &str, tuple: Vec<usize>) {
        self.rels.entry(rel.to_string()).or_default().insert(tuple);
    }

    pub fn holds(&self, rel: &str, args: &[usize]) -> bool {
        self.rels.get(rel).is_some_and(|s| s.contains(args))
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Invariant violations: tuples outside the universe, wrong arities,
    /// uninterpreted constants, undeclared symbols.
    pub fn check(&self) -> Vec<String> {
        let mut out = self.vocab.check();
        let n = self.size();
        for (r, tuples) in &self.rels {
            let Some(ar) = self.vocab.arity(r) else {
                out.push(format!("relation `{r}` not in vocabulary"));
                continue;
            };
            for t in tuples {
                if t.len() != ar {
                    out.push(format!("tuple of `{r}` has length {} (arity {ar})", t.len()));
                }
                if t.iter().any(|&e| e >= n) {
                    out.push(format!("tuple of `{r}` leaves the universe"));
                }
            }
        }
        for c in &self.vocab.constants {
            match self.consts.get(c) {
                None => out.push(format!("constant `{c}` is not interpreted")),
                Some(&e) if e >= n => out.push(format!("constant `{c}` leaves the universe")),
                _ => {}
            }
        }
        out
    }

    /// Substructure induced on `elems`, renumbered in the given order.
    pub fn induced(&self, elems: &[usize]) -> FiniteStructure {
        let pos: BTreeMap<usize, usize> = elems.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let mut out = FiniteStructure {
            vocab: self.vocab.clone(),
            names: elems.iter().map(|&e| self.names[e].clone()).collect(),
            rels: self.rels.keys().map(|k| (k.clone(), BTreeSet::new())).collect(),
            consts: BTreeMap::new(),
        };
        for (r, tuples) in &self.rels {
            for t in tuples {
                if let Some(mapped) = t.iter().map(|e| pos.get(e).copied()).collect::<Option<Vec<_>>>() {
                    out.add(r, mapped);
                }
            }
        }
        for (c, e) in &self.consts {
            if let Some(&p) = pos.get(e) {
                out.consts.insert(c.clone(), p);
            }
        }
        out
    }

    /// Image of the structure under a bijection `perm` (old index -> new index).
    pub fn permuted(&self, perm: &[usize]) -> FiniteStructure {
        let mut out = FiniteStructure::new(self.vocab.clone(), self.size());
        for (i, &p) in perm.iter().enumerate() {
            out.names[p] = self.names[i].clone();
        }
        for (r, tuples) in &self.rels {
            for t in tuples {
                out.add(r, t.iter().map(|&e| perm[e]).collect());
            }
        }
        for (c, &e) in &self.consts {
            out.consts.insert(c.clone(), perm[e]);
        }
        out
    }

    /// Whether `f` (defined on all of `self`) is an isomorphism onto `other`.
    pub fn is_isomorphism(&self, other: &FiniteStructure, f: &[usize]) -> bool {
        if self.size() != other.size() || f.len() != self.size() {
            return false;
        }
        let mut seen = vec![false; other.size()];
        for &y in f {
            if y >= other.size() || std::mem::replace(&mut seen[y], true) {
                return false;
            }
        }
        for r in &self.vocab.relations {
            let a = self.rels.get(&r.name).map_or(0, |s| s.len());
            let b = other.rels.get(&r.name).map_or(0, |s| s.len());
            if a != b {
                return false;
            }
            if let Some(ts) = self.rels.get(&r.name) {
                for t in ts {
                    let img: Vec<usize> = t.iter().map(|&e| f[e]).collect();
                    if !other.holds(&r.name, &img) {
                        return false;
                    }
                }
            }
        }
        self.consts.iter().all(|(c, &e)| other.consts.get(c) == Some(&f[e]))
    }

    /// First isomorphism onto `other` in lexicographic order of permutations.
    pub fn find_isomorphism(&self, other: &FiniteStructure) -> Option<Vec<usize>> {
        self.find_isomorphism_where(other, |_| true)
    }

    pub fn find_isomorphism_where(
        &self,
        other: &FiniteStructure,
        mut accept: impl FnMut(&[usize]) -> bool,
    ) -> Option<Vec<usize>> {
        if self.size() != other.size() {
            return None;
        }
        let mut found = None;
        for_each_permutation(self.size(), &mut |p| {
            if self.is_isomorphism(other, p) && accept(p) {
                found = Some(p.to_vec());
                true
            } else {
                false
            }
        });
        found
    }
}

/// Visits permutations of `0..n` in lexicographic order until `f` returns true.
pub fn for_each_permutation(n: usize, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    fn rec(cur: &mut Vec<usize>, used: &mut [bool], f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if cur.len() == used.len() {
            return f(cur);
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                if rec(cur, used, f) {
                    return true;
                }
                cur.pop();
                used[i] = false;
            }
        }
        false
    }
    rec(&mut Vec::with_capacity(n), &mut vec![false; n], f)
}

/// All structures over a single binary symbol on `n` elements, one per relation.
pub fn all_binary_structures(sym: &str, n: usize) -> Vec<FiniteStructure> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let mut out = Vec::with_capacity(1 << pairs.len());
    for mask in 0u64..(1u64 << pairs.len()) {
        let mut m = FiniteStructure::new(Vocabulary::new(&[(sym, 2)]), n);
        for (k, &(i, j)) in pairs.iter().enumerate() {
            if mask >> k & 1 == 1 {
                m.add(sym, vec![i, j]);
            }
        }
        out.push(m);
    }
    out
}

/// One representative per isomorphism class of binary structures with
/// `1..=max_n` elements, in order of size then relation bitmask.
pub fn binary_iso_classes(sym: &str, max_n: usize) -> Vec<FiniteStructure> {
    let mut reps: Vec<FiniteStructure> = Vec::new();
    for n in 1..=max_n {
        let start = reps.len();
        for m in all_binary_structures(sym, n) {
            if !reps[start..].iter().any(|r| r.find_isomorphism(&m).is_some()) {
                reps.push(m);
            }
        }
    }
    reps
}
