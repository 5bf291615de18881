use std::collections::{BTreeMap, HashMap, HashSet};

use serde::Serialize;

use super::arena::{check_same_vocabulary, injections, small_subsets, Arena, PartialIso, Side};
use super::{GameError, Illegal, Player};

/// A position of the borrowing game between I's moves or while II is to answer.
///
/// Round `i` challenges the left structure when `i` is even and the right one
/// when odd. An obligation `(side, e) ↦ r` means `e` must be covered by `g`
/// on that side by the end of round `r`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct BgPosition {
    pub g: PartialIso,
    pub due: BTreeMap<(Side, usize), usize>,
    pub round: usize,
    /// I's next clock must lie strictly below this.
    pub clock: usize,
    pub theta: usize,
    /// I's move awaiting II's answer: the clock chosen and the set.
    pub pending: Option<(usize, Vec<usize>)>,
    pub finished: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BgMove {
    /// I: a new clock and a set on the side of the current round.
    Challenge { clock: usize, set: Vec<usize> },
    /// II: due dates for the challenged set and new pairs for `g`.
    Respond { h: BTreeMap<usize, usize>, extend: Vec<(usize, usize)> },
}

impl BgPosition {
    pub fn start(beta: usize, theta: usize) -> Self {
        BgPosition {
            g: PartialIso::empty(),
            due: BTreeMap::new(),
            round: 0,
            clock: beta,
            theta,
            pending: None,
            finished: false,
        }
    }

    pub fn side(&self) -> Side {
        if self.round.is_multiple_of(2) {
            Side::Left
        } else {
            Side::Right
        }
    }

    pub fn to_move(&self) -> Option<Player> {
        match (self.finished, &self.pending) {
            (true, _) => None,
            (false, None) => Some(Player::I),
            (false, Some(_)) => Some(Player::II),
        }
    }

    /// Largest due offset II may assign after I picks `clock`. An offset of 1
    /// at clock 0 never comes due.
    pub fn max_offset(clock: usize) -> usize {
        clock.max(1)
    }
}

fn arena<'g, 'a>(a: &'g Arena<'a>, b: &'g Arena<'a>, side: Side) -> &'g Arena<'a> {
    match side {
        Side::Left => a,
        Side::Right => b,
    }
}

/// Applies one move; the rules are those the solver searches over.
pub fn bg_step(a: &Arena, b: &Arena, pos: &BgPosition, mv: &BgMove) -> Result<BgPosition, Illegal> {
    if pos.finished {
        return Err(Illegal::new("the game is over"));
    }
    match (mv, &pos.pending) {
        (BgMove::Challenge { clock, set }, None) => {
            if *clock >= pos.clock {
                return Err(Illegal::new("clock must strictly descend"));
            }
            let side = pos.side();
            let n = arena(a, b, side).size();
            if set.is_empty() || set.len() > pos.theta {
                return Err(Illegal::new(format!("set must have between 1 and {} elements", pos.theta)));
            }
            let mut s = set.clone();
            s.sort_unstable();
            s.dedup();
            if s.len() != set.len() {
                return Err(Illegal::new("repeated element"));
            }
            if let Some(e) = s.iter().find(|&&e| e >= n) {
                return Err(Illegal::new(format!("no element {e} on the {side} side")));
            }
            Ok(BgPosition { pending: Some((*clock, s)), ..pos.clone() })
        }
        (BgMove::Respond { h, extend }, Some((clock, set))) => respond(a, b, pos, *clock, set, h, extend),
        (BgMove::Challenge { .. }, Some(_)) => Err(Illegal::new("player II is to move")),
        (BgMove::Respond { .. }, None) => Err(Illegal::new("player I is to move")),
    }
}

fn respond(
    a: &Arena,
    b: &Arena,
    pos: &BgPosition,
    clock: usize,
    set: &[usize],
    h: &BTreeMap<usize, usize>,
    extend: &[(usize, usize)],
) -> Result<BgPosition, Illegal> {
    let side = pos.side();
    let top = BgPosition::max_offset(clock);
    for &e in set {
        match h.get(&e) {
            None => return Err(Illegal::new(format!("no due date for {}", arena(a, b, side).name(e)))),
            Some(&v) if v > top => return Err(Illegal::new(format!("due offset {v} exceeds {top}"))),
            _ => {}
        }
    }
    if let Some(e) = h.keys().find(|e| !set.contains(e)) {
        return Err(Illegal::new(format!("due date for unchallenged element {e}")));
    }
    let g = pos.g.extend(extend, a, b).map_err(|v| Illegal::new(v.to_string()))?;
    let mut due = pos.due.clone();
    for (&e, &v) in h {
        let r = pos.round + v;
        due.entry((side, e)).and_modify(|d| *d = (*d).min(r)).or_insert(r);
    }
    for (&(s, e), &r) in &due {
        if r <= pos.round && !g.covers(s, e) {
            let name = arena(a, b, s).name(e);
            return Err(Illegal::new(format!("obligation undischarged: {s} {name} due at round {r}")));
        }
    }
    // Rounds past `round + clock` never happen.
    let last = pos.round + clock;
    due.retain(|&(s, e), r| !g.covers(s, e) && *r <= last);
    Ok(BgPosition { g, due, round: pos.round + 1, clock, theta: pos.theta, pending: None, finished: clock == 0 })
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct Key {
    g: PartialIso,
    due: Vec<((Side, usize), usize)>,
    parity: bool,
    clock: usize,
}

/// Backward-induction solver for `BG^β_θ(A, B)`.
///
/// I's sets have exactly `min(θ, |side|)` elements: a larger set only adds
/// obligations, so this loses nothing for I. II's extensions cover exactly the
/// due elements: extra pairs only constrain her later.
pub struct BgGame<'g, 'a> {
    a: &'g Arena<'a>,
    b: &'g Arena<'a>,
    beta: usize,
    theta: usize,
    sets: [Vec<Vec<usize>>; 2],
    memo: HashMap<Key, bool>,
}

impl<'g, 'a> BgGame<'g, 'a> {
    pub fn new(a: &'g Arena<'a>, b: &'g Arena<'a>, beta: usize, theta: usize) -> Result<Self, GameError> {
        check_same_vocabulary(a.m, b.m)?;
        if beta == 0 || theta == 0 {
            return Err(GameError::Invalid("β and θ must be at least 1".into()));
        }
        let exact = |n: usize| {
            let k = theta.min(n);
            small_subsets(n, k).into_iter().filter(|s| s.len() == k).collect::<Vec<_>>()
        };
        Ok(BgGame { a, b, beta, theta, sets: [exact(a.size()), exact(b.size())], memo: HashMap::new() })
    }

    pub fn start(&self) -> BgPosition {
        BgPosition::start(self.beta, self.theta)
    }

    fn key(pos: &BgPosition) -> Key {
        Key {
            g: pos.g.clone(),
            due: pos.due.iter().map(|(&k, &r)| (k, r - pos.round)).collect(),
            parity: pos.round % 2 == 1,
            clock: pos.clock,
        }
    }

    /// I's moves in canonical order: clocks descending from the largest, then sets.
    pub fn challenges(&self, pos: &BgPosition) -> Vec<BgMove> {
        let sets = &self.sets[if pos.side() == Side::Left { 0 } else { 1 }];
        (0..pos.clock)
            .rev()
            .flat_map(|clock| sets.iter().map(move |s| BgMove::Challenge { clock, set: s.clone() }))
            .collect()
    }

    /// II's answers: most deferral first, then minimal extensions covering what is due.
    pub fn responses(&self, pos: &BgPosition) -> Vec<(BgMove, BgPosition)> {
        let Some((clock, set)) = &pos.pending else { return Vec::new() };
        let side = pos.side();
        let top = BgPosition::max_offset(*clock);
        let open: Vec<usize> = set.iter().copied().filter(|&e| !pos.g.covers(side, e)).collect();
        let mut out = Vec::new();
        let mut offsets = vec![top; open.len()];
        loop {
            let mut h: BTreeMap<usize, usize> = set.iter().map(|&e| (e, 0)).collect();
            for (&e, &v) in open.iter().zip(&offsets) {
                h.insert(e, v);
            }
            let mut due_left = Vec::new();
            let mut due_right = Vec::new();
            let mut push = |s: Side, e: usize| match s {
                Side::Left => due_left.push(e),
                Side::Right => due_right.push(e),
            };
            for (&(s, e), &r) in &pos.due {
                if r <= pos.round {
                    push(s, e);
                }
            }
            for (&e, &v) in open.iter().zip(&offsets) {
                if v == 0 {
                    push(side, e);
                }
            }
            due_left.sort_unstable();
            due_left.dedup();
            due_right.sort_unstable();
            due_right.dedup();
            for extend in self.extensions(&pos.g, &due_left, &due_right) {
                let mv = BgMove::Respond { h: h.clone(), extend };
                if let Ok(next) = bg_step(self.a, self.b, pos, &mv) {
                    out.push((mv, next));
                }
            }
            // Count offsets down, last position fastest.
            let mut i = offsets.len();
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if offsets[i] > 0 {
                    offsets[i] -= 1;
                    for o in &mut offsets[i + 1..] {
                        *o = top;
                    }
                    break;
                }
            }
        }
    }

    fn extensions(&self, g: &PartialIso, left: &[usize], right: &[usize]) -> Vec<Vec<(usize, usize)>> {
        let free_b: Vec<usize> = (0..self.b.size()).filter(|&y| !g.covers(Side::Right, y)).collect();
        let free_a: Vec<usize> = (0..self.a.size()).filter(|&x| !g.covers(Side::Left, x)).collect();
        let mut out = Vec::new();
        for img in injections(left.len(), &free_b) {
            let first: Vec<(usize, usize)> = left.iter().copied().zip(img).collect();
            let pool_a: Vec<usize> = free_a.iter().copied().filter(|x| !left.contains(x)).collect();
            // A due right element may already be hit by one of the new left pairs.
            let right_open: Vec<usize> = right.iter().copied().filter(|y| !first.iter().any(|p| p.1 == *y)).collect();
            for pre in injections(right_open.len(), &pool_a) {
                let mut ext = first.clone();
                ext.extend(pre.into_iter().zip(right_open.iter().copied()));
                if g.extend(&ext, self.a, self.b).is_ok() {
                    out.push(ext);
                }
            }
        }
        out
    }

    pub fn ii_wins(&mut self, pos: &BgPosition) -> bool {
        if pos.finished {
            return true;
        }
        if pos.pending.is_some() {
            return self.responses(pos).into_iter().any(|(_, next)| self.ii_wins(&next));
        }
        let key = Self::key(pos);
        if let Some(&w) = self.memo.get(&key) {
            return w;
        }
        let mut win = true;
        for mv in self.challenges(pos) {
            let next = bg_step(self.a, self.b, pos, &mv).expect("solver challenges are legal");
            if !self.ii_wins(&next) {
                win = false;
                break;
            }
        }
        self.memo.insert(key, win);
        win
    }

    /// II's first winning answer, or her first legal one if none wins.
    pub fn best_response(&mut self, pos: &BgPosition) -> Option<BgMove> {
        let rs = self.responses(pos);
        let first = rs.first().map(|r| r.0.clone());
        rs.into_iter().find(|(_, next)| self.ii_wins(next)).map(|r| r.0).or(first)
    }

    /// I's first winning challenge, if any.
    pub fn winning_challenge(&mut self, pos: &BgPosition) -> Option<BgMove> {
        for mv in self.challenges(pos) {
            let next = bg_step(self.a, self.b, pos, &mv).ok()?;
            if !self.ii_wins(&next) {
                return Some(mv);
            }
        }
        None
    }

    pub fn winner(&mut self) -> Player {
        let start = self.start();
        if self.ii_wins(&start) {
            Player::II
        } else {
            Player::I
        }
    }

    pub fn render_position(&self, pos: &BgPosition) -> String {
        let due: Vec<String> =
            pos.due.iter().map(|(&(s, e), &r)| format!("{s}:{}@{r}", arena(self.a, self.b, s).name(e))).collect();
        format!("round={} clock={} g={} due=[{}]", pos.round, pos.clock, pos.g.render(self.a, self.b), due.join(","))
    }

    pub fn render_move(&self, pos: &BgPosition, mv: &BgMove) -> String {
        let side = pos.side();
        let ar = arena(self.a, self.b, side);
        match mv {
            BgMove::Challenge { clock, set } => {
                let names: Vec<&str> = set.iter().map(|&e| ar.name(e)).collect();
                format!("clock {clock}, {side}{{{}}}", names.join(","))
            }
            BgMove::Respond { h, extend } => {
                let hs: Vec<String> = h.iter().map(|(&e, &v)| format!("{}→{v}", ar.name(e))).collect();
                let ext = PartialIso::from_pairs(extend.clone()).render(self.a, self.b);
                format!("h={{{}}} g+={ext}", hs.join(","))
            }
        }
    }

    pub fn strategy_table(&mut self) -> BTreeMap<String, String> {
        let mut table = BTreeMap::new();
        let mut seen = HashSet::new();
        let start = self.start();
        let winner = self.winner();
        self.fill(&start, winner, &mut table, &mut seen);
        table
    }

    fn fill(
        &mut self,
        pos: &BgPosition,
        winner: Player,
        table: &mut BTreeMap<String, String>,
        seen: &mut HashSet<BgPosition>,
    ) {
        if pos.finished || !seen.insert(pos.clone()) {
            return;
        }
        let here = self.render_position(pos);
        match winner {
            Player::II => {
                for mv in self.challenges(pos) {
                    let mid = bg_step(self.a, self.b, pos, &mv).expect("legal");
                    if let Some(reply) = self.best_response(&mid) {
                        let next = bg_step(self.a, self.b, &mid, &reply).expect("legal");
                        let key = format!("{here}; I plays {}", self.render_move(pos, &mv));
                        table.insert(key, self.render_move(pos, &reply));
                        self.fill(&next, winner, table, seen);
                    }
                }
            }
            Player::I => {
                if let Some(mv) = self.winning_challenge(pos) {
                    table.insert(here, self.render_move(pos, &mv));
                    let mid = bg_step(self.a, self.b, pos, &mv).expect("legal");
                    for (_, next) in self.responses(&mid) {
                        self.fill(&next, winner, table, seen);
                    }
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BgOutcome {
    pub winner: Player,
    pub beta: usize,
    pub theta: usize,
    pub table: BTreeMap<String, String>,
}

pub fn bg_solve(a: &Arena, b: &Arena, beta: usize, theta: usize) -> Result<BgOutcome, GameError> {
    let mut game = BgGame::new(a, b, beta, theta)?;
    let winner = game.winner();
    let table = game.strategy_table();
    Ok(BgOutcome { winner, beta, theta, table })
}

pub fn bg_winner(a: &Arena, b: &Arena, beta: usize, theta: usize) -> Result<Player, GameError> {
    Ok(BgGame::new(a, b, beta, theta)?.winner())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BgClasses {
    /// `sim[i][j]`: II wins `BG(catalog[i], catalog[j])`.
    pub sim: Vec<Vec<bool>>,
    /// Classes of the symmetric-transitive closure, each sorted, ordered by least member.
    pub classes: Vec<Vec<usize>>,
}

pub fn bg_equiv_classes(catalog: &[Arena], beta: usize, theta: usize) -> Result<BgClasses, GameError> {
    let n = catalog.len();
    let mut sim = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            sim[i][j] = bg_winner(&catalog[i], &catalog[j], beta, theta)? == Player::II;
        }
    }
    let mut class_of: Vec<usize> = (0..n).collect();
    fn find(c: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while c[r] != r {
            r = c[r];
        }
        c[x] = r;
        r
    }
    for i in 0..n {
        for j in 0..n {
            if sim[i][j] {
                let (ri, rj) = (find(&mut class_of, i), find(&mut class_of, j));
                class_of[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let r = find(&mut class_of, i);
        groups.entry(r).or_default().push(i);
    }
    Ok(BgClasses { sim, classes: groups.into_values().collect() })
}
