use std::collections::{BTreeSet, VecDeque};

use super::{EvalBounds, SemanticsError, Truth, Verdict};
use crate::formulas::{omega_vars, Formula, OmegaMatrix};
use crate::structures::{ChainModel, Element, Presentation};

type Env = Vec<(String, Element)>;
type Sets = Vec<(String, BTreeSet<Element>)>;

/// Largest set enumerated by the second-order witness search.
const SO_SEARCH_CAP: usize = 12;

struct Search<'s> {
    vs: &'s [String],
    body: &'s Formula,
    want: bool,
    pool: &'s [Element],
    parts: &'s [(&'s Formula, usize)],
    unknown: &'s mut bool,
    tagged: &'s mut bool,
}

struct Eval<'a> {
    c: &'a ChainModel,
    bounds: &'a EvalBounds,
    window: Vec<Element>,
}

fn mentions_set(f: &Formula, x: &str) -> bool {
    let mut hit = false;
    f.visit(&mut |g| {
        if let Formula::Mem(y, _) = g {
            hit |= y == x;
        }
    });
    hit
}

/// Whether `rel` is irreflexive and transitive on the whole presentation. Three blocks
/// suffice to realize every pattern of templates and block order, so checking the
/// window of `preamble + 3 * cycle` blocks decides it.
pub fn strict_order_certified(pres: &Presentation, rel: &str) -> bool {
    if pres.vocab.arity(rel) != Some(2) {
        return false;
    }
    let win = pres.window(pres.preamble_len() + 3 * pres.cycle_len());
    let r = |x: Element, y: Element| pres.holds(rel, &[x, y]);
    if win.iter().any(|&x| r(x, x)) {
        return false;
    }
    for &x in &win {
        for &y in &win {
            if !r(x, y) {
                continue;
            }
            for &z in &win {
                if r(y, z) && !r(x, z) {
                    return false;
                }
            }
        }
    }
    true
}

impl Eval<'_> {
    fn pres(&self) -> &Presentation {
        &self.c.presentation
    }

    fn term(&self, t: &str, env: &Env) -> Result<Element, SemanticsError> {
        if let Some((_, e)) = env.iter().rev().find(|(v, _)| v == t) {
            return Ok(*e);
        }
        self.pres().constant(t).ok_or_else(|| SemanticsError::Unbound(t.to_string()))
    }

    /// First block past the preamble, the constants and every parameter `f` can see.
    fn pinned(&self, f: &Formula, env: &Env, sets: &Sets) -> usize {
        let free = f.free_names();
        let mut b0 = self.pres().preamble_len().max(1);
        for (v, e) in env {
            if free.contains(v) {
                b0 = b0.max(e.block + 1);
            }
        }
        for (x, s) in sets {
            if mentions_set(f, x) {
                b0 = b0.max(s.iter().map(|e| e.block + 1).max().unwrap_or(0));
            }
        }
        b0
    }

    fn eval(&self, f: &Formula, env: &mut Env, sets: &mut Sets) -> Result<Verdict, SemanticsError> {
        Ok(match f {
            Formula::Bool(b) => Verdict::of(*b),
            Formula::Atom(r, args) => {
                let t: Vec<Element> = args.iter().map(|a| self.term(a, env)).collect::<Result<_, _>>()?;
                Verdict::of(self.pres().holds(r, &t))
            }
            Formula::Eq(a, b) => Verdict::of(self.term(a, env)? == self.term(b, env)?),
            Formula::Mem(x, t) => {
                let e = self.term(t, env)?;
                let set = sets.iter().rev().find(|(y, _)| y == x).ok_or_else(|| SemanticsError::Unbound(x.clone()))?;
                Verdict::of(set.1.contains(&e))
            }
            Formula::Not(g) => self.eval(g, env, sets)?.not(),
            Formula::And(gs) => {
                let mut acc = Verdict::TRUE;
                for g in gs {
                    acc = acc.and(self.eval(g, env, sets)?);
                    if acc.truth == Truth::False && !acc.heuristic {
                        break;
                    }
                }
                acc
            }
            Formula::Or(gs) => {
                let mut acc = Verdict::FALSE;
                for g in gs {
                    acc = acc.or(self.eval(g, env, sets)?);
                    if acc.truth == Truth::True && !acc.heuristic {
                        break;
                    }
                }
                acc
            }
            Formula::Exists(vs, g) => self.witness(vs, g, true, env, sets)?,
            Formula::Forall(vs, g) => self.witness(vs, g, false, env, sets)?.not(),
            Formula::ExistsOmega(s, m) => self.omega(s, m, env, sets)?,
            Formula::SoExists(x, g) => self.so(x, g, env, sets)?,
        })
    }

    /// Three-valued "some tuple in the window gives `body` the value `want`".
    fn witness(
        &self,
        vs: &[String],
        body: &Formula,
        want: bool,
        env: &mut Env,
        sets: &mut Sets,
    ) -> Result<Verdict, SemanticsError> {
        let mut unknown = false;
        let mut tagged = false;
        // Tuples inside one level are exactly the tuples of bounded elements.
        let pool: Vec<Element> = self.window.iter().copied().filter(|&e| self.c.min_level(e).is_some()).collect();
        // Conjuncts (for `want`) or disjuncts (against it) that can refute a partial
        // tuple, keyed by the last variable of `vs` they mention.
        let parts: Vec<(&Formula, usize)> = match (body, want) {
            (Formula::And(gs), true) | (Formula::Or(gs), false) => gs
                .iter()
                .map(|g| {
                    let free = g.free_names();
                    (g, vs.iter().rposition(|v| free.contains(v)).unwrap_or(0))
                })
                .collect(),
            _ => vec![],
        };
        let mut search =
            Search { vs, body, want, pool: &pool, parts: &parts, unknown: &mut unknown, tagged: &mut tagged };
        if !vs.is_empty() {
            if let Some(v) = self.search(&mut search, 0, env, sets)? {
                return Ok(v);
            }
        }
        if unknown {
            return Ok(Verdict::unknown(self.bounds));
        }
        let pres = self.pres();
        let horizon = self.bounds.horizon;
        if pres.is_finite() && horizon >= pres.preamble_len() {
            return Ok(Verdict { truth: Truth::False, heuristic: tagged });
        }
        if self.bounds.heuristic && body.is_quantifier_free() {
            let pump = self.pinned(body, env, sets) + vs.len() * pres.cycle_len();
            if horizon >= pump {
                return Ok(Verdict { truth: Truth::False, heuristic: true });
            }
        }
        Ok(Verdict::unknown(self.bounds))
    }

    /// Depth-first assignment of `vs[depth..]`, skipping partial tuples that a
    /// refuting part already rules out.
    fn search(
        &self,
        st: &mut Search,
        depth: usize,
        env: &mut Env,
        sets: &mut Sets,
    ) -> Result<Option<Verdict>, SemanticsError> {
        for &e in st.pool {
            env.push((st.vs[depth].clone(), e));
            let r = self.extend(st, depth, env, sets);
            env.pop();
            if let Some(v) = r? {
                return Ok(Some(v));
            }
        }
        Ok(None)
    }

    fn extend(
        &self,
        st: &mut Search,
        depth: usize,
        env: &mut Env,
        sets: &mut Sets,
    ) -> Result<Option<Verdict>, SemanticsError> {
        for &(g, last) in st.parts {
            if last == depth {
                let v = self.eval(g, env, sets)?;
                if !v.heuristic && v.as_bool() == Some(!st.want) {
                    return Ok(None);
                }
            }
        }
        if depth + 1 < st.vs.len() {
            return self.search(st, depth + 1, env, sets);
        }
        let v = self.eval(st.body, env, sets)?;
        match v.as_bool() {
            Some(b) if b == st.want => return Ok(Some(Verdict { truth: Truth::True, heuristic: v.heuristic })),
            Some(_) => *st.tagged |= v.heuristic,
            None => *st.unknown = true,
        }
        Ok(None)
    }

    fn omega(&self, scheme: &str, m: &OmegaMatrix, env: &mut Env, sets: &mut Sets) -> Result<Verdict, SemanticsError> {
        let (v0, v1) = omega_vars(scheme);
        let win = &self.window;
        let n = win.len();
        let pb = self.pinned(&m.step, env, sets);
        let mut holds = |f: &Formula, u: Element, v: Option<Element>, env: &mut Env| -> Result<bool, SemanticsError> {
            let base = env.len();
            env.push((v0.clone(), u));
            if let Some(v) = v {
                env.push((v1.clone(), v));
            }
            let r = self.eval(f, env, sets);
            env.truncate(base);
            Ok(r?.as_bool().unwrap_or(false))
        };
        let mut adj = vec![Vec::new(); n];
        for i in 0..n {
            for j in 0..n {
                if holds(&m.step, win[i], Some(win[j]), env)? {
                    adj[i].push(j);
                }
            }
        }
        let mut start = vec![true; n];
        if let Some(side) = &m.side {
            for i in 0..n {
                start[i] = holds(side, win[i], None, env)?;
            }
        }
        // Vertices with an infinite walk inside the window: strip sinks until stable.
        let mut alive = vec![true; n];
        loop {
            let mut changed = false;
            for i in 0..n {
                if alive[i] && !adj[i].iter().any(|&j| alive[j]) {
                    alive[i] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let mut good = alive.clone();
        let pres = self.pres();
        for sel in &self.c.levels.selectors {
            for d in 1..=self.bounds.scheme_period {
                for (i, &e0) in win.iter().enumerate() {
                    if good[i] || self.c.selector_local(sel, e0.block) != Some(e0.local) {
                        continue;
                    }
                    let elem = |j: usize| {
                        let b = e0.block + j * d;
                        self.c.selector_local(sel, b).map(|l| Element::new(b, l))
                    };
                    let j0 = (0..).find(|&j| e0.block + j * d >= pb).unwrap();
                    let mut ok = true;
                    for j in 0..=j0 + pres.cycle_len() {
                        match (elem(j), elem(j + 1)) {
                            (Some(x), Some(y)) if holds(&m.step, x, Some(y), env)? => {}
                            _ => {
                                ok = false;
                                break;
                            }
                        }
                    }
                    good[i] = ok;
                }
            }
        }
        // Reachability from a start vertex to an infinite walk.
        let mut seen = vec![false; n];
        let mut queue: VecDeque<usize> = (0..n).filter(|&i| start[i]).collect();
        for &i in &queue {
            seen[i] = true;
        }
        while let Some(i) = queue.pop_front() {
            if good[i] {
                return Ok(Verdict::TRUE);
            }
            for &j in &adj[i] {
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        let horizon = self.bounds.horizon;
        if pres.is_finite() && horizon >= pres.preamble_len() {
            return Ok(Verdict::FALSE);
        }
        if !self.c.levels.finitary() {
            return Ok(Verdict::unknown(self.bounds));
        }
        // Finitary levels are finite, so an ω-walk inside one of them must run around a cycle.
        if self.step_is_strict_order(&m.step, &v0, &v1) {
            return Ok(Verdict::FALSE);
        }
        let period_elems: usize = pres.block_seq.cycle.iter().map(|&t| pres.templates[t].size()).sum();
        if self.bounds.heuristic && horizon >= pb + (period_elems + 1) * pres.cycle_len() {
            return Ok(Verdict { truth: Truth::False, heuristic: true });
        }
        Ok(Verdict::unknown(self.bounds))
    }

    /// The step implies `R(s0,s1)` or `R(s1,s0)` for a strict partial order `R`, so it has no cycles.
    fn step_is_strict_order(&self, step: &Formula, v0: &str, v1: &str) -> bool {
        let conjuncts: Vec<&Formula> = match step {
            Formula::And(gs) => gs.iter().collect(),
            g => vec![g],
        };
        conjuncts.iter().any(|g| match g {
            Formula::Atom(r, args) if args.len() == 2 => {
                let pair = (args[0].as_str(), args[1].as_str());
                (pair == (v0, v1) || pair == (v1, v0)) && strict_order_certified(self.pres(), r)
            }
            _ => false,
        })
    }

    fn so(&self, x: &str, body: &Formula, env: &mut Env, sets: &mut Sets) -> Result<Verdict, SemanticsError> {
        if !self.c.levels.finitary() {
            return Err(SemanticsError::SoNeedsFiniteLevels);
        }
        if !mentions_set(body, x) {
            return self.eval(body, env, sets);
        }
        if let Some(v) = self.so_certificate(x, body, env, sets)? {
            return Ok(v);
        }
        let horizon = self.bounds.horizon;
        let p = self.c.levels.prefix;
        let level = if p.a > 0 && horizon >= p.b { (horizon - p.b) / p.a } else { 0 };
        let mut elems = self.c.level_window(level, horizon);
        elems.truncate(SO_SEARCH_CAP);
        for mask in 0u32..1 << elems.len() {
            let set: BTreeSet<Element> =
                elems.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
            sets.push((x.to_string(), set));
            let v = self.eval(body, env, sets);
            sets.pop();
            if v?.truth == Truth::True {
                return Ok(Verdict::TRUE);
            }
        }
        Ok(Verdict::unknown(self.bounds))
    }

    /// Exact answer for bodies `∀y (α(y) → X(y)) ∧ rest` with `α` quantifier-free and
    /// `rest` free of `X`: the smallest witness is the realization of `α`, which lies in
    /// some (finite) level iff it meets only finitely many blocks.
    fn so_certificate(
        &self,
        x: &str,
        body: &Formula,
        env: &mut Env,
        sets: &mut Sets,
    ) -> Result<Option<Verdict>, SemanticsError> {
        let conjuncts: Vec<&Formula> = match body {
            Formula::And(gs) => gs.iter().collect(),
            g => vec![g],
        };
        let mut cert = None;
        let mut rest = Vec::new();
        for g in conjuncts {
            let shape = match g {
                Formula::Forall(vs, inner) if vs.len() == 1 => match &**inner {
                    Formula::Or(ds) if ds.len() == 2 => {
                        let y = &vs[0];
                        let is_mem = |f: &Formula| matches!(f, Formula::Mem(z, t) if z == x && t == y);
                        match (&ds[0], &ds[1]) {
                            (Formula::Not(a), m) | (m, Formula::Not(a)) if is_mem(m) => {
                                Some((y.clone(), (**a).clone()))
                            }
                            _ => None,
                        }
                    }
                    _ => None,
                },
                _ => None,
            };
            match shape {
                Some((y, alpha)) if cert.is_none() && alpha.is_quantifier_free() && !mentions_set(&alpha, x) => {
                    cert = Some((y, alpha))
                }
                _ if !mentions_set(g, x) => rest.push(g),
                _ => return Ok(None),
            }
        }
        let Some((y, alpha)) = cert else { return Ok(None) };
        let pres = self.pres();
        let b0 = self.pinned(&Formula::Forall(vec![y.clone()], Box::new(alpha.clone())), env, sets);
        let mut bounded = true;
        'blocks: for b in b0..b0 + pres.cycle_len() {
            for l in 0..pres.block_size(b) {
                env.push((y.clone(), Element::new(b, l)));
                let v = self.eval(&alpha, env, sets);
                env.pop();
                if v?.truth == Truth::True {
                    bounded = false;
                    break 'blocks;
                }
            }
        }
        let mut acc = Verdict::of(bounded);
        for g in rest {
            acc = acc.and(self.eval(g, env, sets)?);
        }
        Ok(Some(acc))
    }
}

fn check_ready(c: &ChainModel, bounds: &EvalBounds) -> Result<(), SemanticsError> {
    bounds.validate()?;
    let v = c.validate();
    if let Some(first) = v.first() {
        return Err(SemanticsError::Invalid(format!("invalid chain model: {first}")));
    }
    Ok(())
}

/// Bounded chain truth of a formula under an assignment of elements.
pub fn eval_chain_with(
    c: &ChainModel,
    f: &Formula,
    env: &[(String, Element)],
    bounds: &EvalBounds,
) -> Result<Verdict, SemanticsError> {
    check_ready(c, bounds)?;
    for (v, e) in env {
        if !c.presentation.is_valid_element(*e) {
            return Err(SemanticsError::Invalid(format!("`{v}` assigned to missing element {e}")));
        }
    }
    let ev = Eval { c, bounds, window: c.presentation.window(bounds.horizon) };
    ev.eval(f, &mut env.to_vec(), &mut Vec::new())
}

/// Bounded chain truth of a sentence.
pub fn eval_chain(c: &ChainModel, f: &Formula, bounds: &EvalBounds) -> Result<Verdict, SemanticsError> {
    let free: Vec<String> = f.free_names().into_iter().filter(|n| c.presentation.constant(n).is_none()).collect();
    if !free.is_empty() {
        return Err(SemanticsError::FreeVariables(free));
    }
    eval_chain_with(c, f, &[], bounds)
}

/// Second-order existential sentence over a family of finite levels.
pub fn so_bounded_eval(c: &ChainModel, f: &Formula, bounds: &EvalBounds) -> Result<Verdict, SemanticsError> {
    if !matches!(f, Formula::SoExists(..)) {
        return Err(SemanticsError::Invalid("expected a second-order existential sentence".into()));
    }
    if !c.levels.finitary() {
        return Err(SemanticsError::SoNeedsFiniteLevels);
    }
    eval_chain(c, f, bounds)
}

/// Whether the realization of the unary symbol `p` lies inside one level.
pub fn p_bounded(c: &ChainModel, p: &str) -> Result<bool, SemanticsError> {
    if c.presentation.vocab.arity(p) != Some(1) {
        return Err(SemanticsError::NotUnary(p.to_string()));
    }
    let pres = &c.presentation;
    if pres.is_finite() {
        return Ok(true);
    }
    let pre = pres.preamble_len();
    for b in pre..pre + pres.cycle_len() {
        let designated = c.designated(b);
        if (0..pres.block_size(b)).any(|l| pres.template(b).holds(p, &[l]) && !designated.contains(&l)) {
            return Ok(false);
        }
    }
    Ok(true)
}
