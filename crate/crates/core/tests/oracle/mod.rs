//! Brute-force reference implementations shared by the integration tests.
//!
//! Nothing here calls into the solvers it checks: games are searched over the
//! raw rules with no move pruning, and formulas are evaluated by a direct
//! recursion over assignments.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use chainlab::formulas::{atom, eq, exists, forall, not, Formula};
use chainlab::structures::FiniteStructure;
use proptest::prelude::*;

/// Tarskian truth for the first-order fragment.
pub fn holds(m: &FiniteStructure, f: &Formula, env: &mut Vec<(String, usize)>) -> bool {
    holds_in(m, None, f, env)
}

/// Truth with every quantifier block restricted to tuples inside one level when `levels` is given.
pub fn holds_in(m: &FiniteStructure, levels: Levels, f: &Formula, env: &mut Vec<(String, usize)>) -> bool {
    let look = |env: &Vec<(String, usize)>, name: &str| -> usize {
        env.iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|p| p.1)
            .or_else(|| m.consts.get(name).copied())
            .unwrap_or_else(|| panic!("unbound name {name}"))
    };
    match f {
        Formula::Bool(b) => *b,
        Formula::Atom(r, args) => {
            let t: Vec<usize> = args.iter().map(|a| look(env, a)).collect();
            m.rels.get(r).is_some_and(|s| s.contains(&t))
        }
        Formula::Eq(a, b) => look(env, a) == look(env, b),
        Formula::Not(g) => !holds_in(m, levels, g, env),
        Formula::And(gs) => gs.iter().all(|g| holds_in(m, levels, g, env)),
        Formula::Or(gs) => gs.iter().any(|g| holds_in(m, levels, g, env)),
        Formula::Exists(vs, g) => some(m, levels, vs, g, env, &mut Vec::new()),
        Formula::Forall(vs, g) => !some(m, levels, vs, &Formula::Not(g.clone()), env, &mut Vec::new()),
        other => panic!("oracle covers first-order formulas only: {other}"),
    }
}

fn some(
    m: &FiniteStructure,
    levels: Levels,
    vs: &[String],
    g: &Formula,
    env: &mut Vec<(String, usize)>,
    picked: &mut Vec<usize>,
) -> bool {
    let Some((v, rest)) = vs.split_first() else {
        let inside = levels.is_none_or(|ls| ls.iter().any(|l| picked.iter().all(|e| l.contains(e))));
        return inside && holds_in(m, levels, g, env);
    };
    for e in 0..m.size() {
        env.push((v.clone(), e));
        picked.push(e);
        let ok = some(m, levels, rest, g, env, picked);
        picked.pop();
        env.pop();
        if ok {
            return true;
        }
    }
    false
}

pub fn sentence(m: &FiniteStructure, f: &Formula) -> bool {
    holds(m, f, &mut Vec::new())
}

/// Permutation search for an isomorphism.
pub fn isomorphic(a: &FiniteStructure, b: &FiniteStructure) -> bool {
    fn rec(a: &FiniteStructure, b: &FiniteStructure, f: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        if f.len() == a.size() {
            let pairs: Vec<(usize, usize)> = f.iter().copied().enumerate().collect();
            return partial_iso(a, None, b, None, &pairs);
        }
        for y in 0..b.size() {
            if !used[y] {
                used[y] = true;
                f.push(y);
                let ok = rec(a, b, f, used);
                f.pop();
                used[y] = false;
                if ok {
                    return true;
                }
            }
        }
        false
    }
    a.size() == b.size() && rec(a, b, &mut Vec::new(), &mut vec![false; b.size()])
}

pub type Levels<'a> = Option<&'a [BTreeSet<usize>]>;

fn inside_one(levels: Levels, set: &[usize]) -> bool {
    match levels {
        None => true,
        Some(ls) => ls.iter().any(|l| set.iter().all(|e| l.contains(e))),
    }
}

fn all_levels(levels: Levels, n: usize) -> Vec<BTreeSet<usize>> {
    levels.map(|l| l.to_vec()).unwrap_or_else(|| vec![(0..n).collect()])
}

/// A function, injective, preserving and reflecting every tuple of every
/// relation over its domain, and sending each level into some level both ways.
pub fn partial_iso(a: &FiniteStructure, la: Levels, b: &FiniteStructure, lb: Levels, pairs: &[(usize, usize)]) -> bool {
    for (i, p) in pairs.iter().enumerate() {
        for q in &pairs[..i] {
            if (p.0 == q.0) != (p.1 == q.1) {
                return false;
            }
        }
    }
    for (c, &x) in &a.consts {
        let y = b.consts[c];
        if pairs.iter().any(|p| (p.0 == x) != (p.1 == y)) {
            return false;
        }
    }
    let p = pairs.len();
    if p > 0 {
        for r in &a.vocab.relations {
            for code in 0..p.pow(r.arity as u32) {
                let idx: Vec<usize> = (0..r.arity).map(|k| code / p.pow(k as u32) % p).collect();
                let ta: Vec<usize> = idx.iter().map(|&i| pairs[i].0).collect();
                let tb: Vec<usize> = idx.iter().map(|&i| pairs[i].1).collect();
                if a.holds(&r.name, &ta) != b.holds(&r.name, &tb) {
                    return false;
                }
            }
        }
    }
    if la.is_some() || lb.is_some() {
        let (ls, rs) = (all_levels(la, a.size()), all_levels(lb, b.size()));
        let forth = ls.iter().all(|l| {
            let img: Vec<usize> = pairs.iter().filter(|p| l.contains(&p.0)).map(|p| p.1).collect();
            rs.iter().any(|r| img.iter().all(|e| r.contains(e)))
        });
        let back = rs.iter().all(|r| {
            let pre: Vec<usize> = pairs.iter().filter(|p| r.contains(&p.1)).map(|p| p.0).collect();
            ls.iter().any(|l| pre.iter().all(|e| l.contains(e)))
        });
        if !(forth && back) {
            return false;
        }
    }
    true
}

/// Ordered tuples of distinct elements of `0..n` with length `1..=cap`.
pub fn tuples(n: usize, cap: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn rec(n: usize, len: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for e in 0..n {
            if !cur.contains(&e) {
                cur.push(e);
                rec(n, len, cur, out);
                cur.pop();
            }
        }
    }
    for len in 1..=cap {
        rec(n, len, &mut Vec::new(), &mut out);
    }
    out
}

/// Whether II survives `rounds` rounds of the EF game from `pairs`: I plays
/// any bounded tuple of at most `cap` elements on either side, II any bounded
/// tuple of the same length on the other, and the union must stay a partial
/// isomorphism.
pub fn ef_ii_wins(
    a: &FiniteStructure,
    la: Levels,
    b: &FiniteStructure,
    lb: Levels,
    pairs: &[(usize, usize)],
    rounds: usize,
    cap: usize,
) -> bool {
    if rounds == 0 {
        return true;
    }
    let (ta, tb) = (tuples(a.size(), cap), tuples(b.size(), cap));
    for left in [true, false] {
        let (mine, lm, theirs, lt) = if left { (&ta, la, &tb, lb) } else { (&tb, lb, &ta, la) };
        for t in mine.iter().filter(|t| inside_one(lm, t)) {
            let answered = theirs.iter().filter(|u| u.len() == t.len() && inside_one(lt, u)).any(|u| {
                let mut next = pairs.to_vec();
                for (&x, &y) in t.iter().zip(u) {
                    next.push(if left { (x, y) } else { (y, x) });
                }
                partial_iso(a, la, b, lb, &next) && ef_ii_wins(a, la, b, lb, &next, rounds - 1, cap)
            });
            if !answered {
                return false;
            }
        }
    }
    true
}

pub fn ef_plain(a: &FiniteStructure, b: &FiniteStructure, rounds: usize, cap: usize) -> bool {
    let base: Vec<(usize, usize)> = a.consts.iter().map(|(c, &x)| (x, b.consts[c])).collect();
    partial_iso(a, None, b, None, &base) && ef_ii_wins(a, None, b, None, &base, rounds, cap)
}

/// Every partial isomorphism containing `g`.
fn extensions(a: &FiniteStructure, b: &FiniteStructure, g: &[(usize, usize)]) -> Vec<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    fn rec(
        a: &FiniteStructure,
        b: &FiniteStructure,
        x: usize,
        cur: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        if x == a.size() {
            if partial_iso(a, None, b, None, cur) {
                out.push(cur.clone());
            }
            return;
        }
        if cur.iter().any(|p| p.0 == x) {
            return rec(a, b, x + 1, cur, out);
        }
        rec(a, b, x + 1, cur, out);
        for y in 0..b.size() {
            if !cur.iter().any(|p| p.1 == y) {
                cur.push((x, y));
                rec(a, b, x + 1, cur, out);
                cur.pop();
            }
        }
    }
    rec(a, b, 0, &mut g.to_vec(), &mut out);
    out
}

fn subsets(n: usize, max: usize) -> Vec<Vec<usize>> {
    (1u32..1 << n)
        .filter(|m| m.count_ones() as usize <= max)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
        .collect()
}

type BgState = (Vec<(usize, usize)>, Vec<(bool, usize, usize)>, usize, usize);

/// The borrowing game played straight from its rules. Round `i` challenges
/// the left structure when `i` is even. I names a clock below the previous
/// one and any set of at most `theta` elements; II gives each element a due
/// offset up to `max(clock, 1)` and extends the map by any partial
/// isomorphism covering everything now due. The game ends after clock 0.
pub fn bg_ii_wins(a: &FiniteStructure, b: &FiniteStructure, beta: usize, theta: usize) -> bool {
    let mut memo = HashMap::new();
    let ext_cache = &mut HashMap::new();
    bg_rec(a, b, theta, (vec![], vec![], 0, beta), &mut memo, ext_cache)
}

fn bg_rec(
    a: &FiniteStructure,
    b: &FiniteStructure,
    theta: usize,
    state: BgState,
    memo: &mut HashMap<BgState, bool>,
    ext: &mut HashMap<Vec<(usize, usize)>, Vec<Vec<(usize, usize)>>>,
) -> bool {
    if let Some(&w) = memo.get(&state) {
        return w;
    }
    let (g, due, round, clock) = state.clone();
    let left = round % 2 == 0;
    let n = if left { a.size() } else { b.size() };
    let covered = |g: &[(usize, usize)], l: bool, e: usize| g.iter().any(|p| if l { p.0 == e } else { p.1 == e });
    let mut win = true;
    'challenges: for c in 0..clock {
        let top = c.max(1);
        for set in subsets(n, theta) {
            let mut offsets = vec![0; set.len()];
            let mut answered = false;
            'offsets: loop {
                let mut now_due = due.clone();
                for (&e, &v) in set.iter().zip(&offsets) {
                    now_due.push((left, e, round + v));
                }
                let gs = ext.entry(g.clone()).or_insert_with(|| extensions(a, b, &g)).clone();
                for g2 in gs {
                    if now_due.iter().any(|&(l, e, r)| r <= round && !covered(&g2, l, e)) {
                        continue;
                    }
                    if c == 0 {
                        answered = true;
                        break 'offsets;
                    }
                    let mut rest: Vec<(bool, usize, usize)> =
                        now_due.iter().copied().filter(|&(l, e, r)| !covered(&g2, l, e) && r <= round + c).collect();
                    rest.sort_unstable();
                    rest.dedup_by_key(|t| (t.0, t.1));
                    let mut g2s = g2.clone();
                    g2s.sort_unstable();
                    if bg_rec(a, b, theta, (g2s, rest, round + 1, c), memo, ext) {
                        answered = true;
                        break 'offsets;
                    }
                }
                let mut i = offsets.len();
                loop {
                    if i == 0 {
                        break 'offsets;
                    }
                    i -= 1;
                    if offsets[i] < top {
                        offsets[i] += 1;
                        break;
                    }
                    offsets[i] = 0;
                }
            }
            if !answered {
                win = false;
                break 'challenges;
            }
        }
    }
    memo.insert(state, win);
    win
}

/// Structures of `order_catalog` with at most `n` elements.
pub fn small_orders(n: usize) -> Vec<(String, FiniteStructure)> {
    chainlab::fixtures::order_catalog().into_iter().filter(|(_, m)| m.size() <= n).collect()
}

/// Named-element map for readable failure messages.
pub fn describe(m: &FiniteStructure) -> BTreeMap<String, Vec<Vec<usize>>> {
    m.rels.iter().map(|(k, v)| (k.clone(), v.iter().cloned().collect())).collect()
}

const NAMES: &[&str] = &["x", "y", "z"];

/// First-order formulas over `rel/2`, `P/1` and the variables `x`, `y`, `z`.
pub fn arb_formula(rel: &'static str) -> impl Strategy<Value = Formula> {
    let name = proptest::sample::select(NAMES);
    let leaf = prop_oneof![
        any::<bool>().prop_map(Formula::Bool),
        (name.clone(), name.clone()).prop_map(move |(a, b)| atom(rel, &[a, b])),
        name.clone().prop_map(|a| atom("P", &[a])),
        (name.clone(), name).prop_map(|(a, b)| eq(a, b)),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        let v = proptest::sample::subsequence(NAMES, 1..=2);
        prop_oneof![
            inner.clone().prop_map(not),
            proptest::collection::vec(inner.clone(), 2..=3).prop_map(Formula::And),
            proptest::collection::vec(inner.clone(), 2..=3).prop_map(Formula::Or),
            (v.clone(), inner.clone()).prop_map(|(vs, f)| exists(&vs, f)),
            (v, inner).prop_map(|(vs, f)| forall(&vs, f)),
        ]
    })
}

/// Closes a formula over `x`, `y`, `z` with a leading block.
pub fn close(f: Formula, universal: bool) -> Formula {
    if universal {
        forall(NAMES, f)
    } else {
        exists(NAMES, f)
    }
}
