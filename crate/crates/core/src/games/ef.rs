use std::collections::{BTreeMap, HashMap, HashSet};

use serde::Serialize;

use super::arena::{check_same_vocabulary, injections, small_subsets, Arena, PartialIso, Side};
use super::{GameError, Player};

/// The finite chain EF game: each round I picks a bounded set of at most `cap`
/// uncovered elements on one side and II answers with an injective bounded image
/// on the other side keeping the union a partial chain isomorphism.
pub struct EfGame<'g, 'a> {
    left: &'g Arena<'a>,
    right: &'g Arena<'a>,
    cap: usize,
    base: PartialIso,
    /// Bounded subsets I may play, per side.
    moves: [Vec<Vec<usize>>; 2],
    /// Elements II may answer with, per side.
    replies: [Vec<usize>; 2],
    memo: HashMap<(PartialIso, usize), bool>,
}

fn ix(side: Side) -> usize {
    match side {
        Side::Left => 0,
        Side::Right => 1,
    }
}

impl<'g, 'a> EfGame<'g, 'a> {
    pub fn new(left: &'g Arena<'a>, right: &'g Arena<'a>, cap: usize) -> Result<Self, GameError> {
        let all = |a: &Arena| (0..a.size()).collect::<Vec<_>>();
        Self::restricted(left, right, cap, [all(left), all(right)], [all(left), all(right)])
    }

    /// A game where I picks only from `challenge` and II answers only from `reply`.
    pub fn restricted(
        left: &'g Arena<'a>,
        right: &'g Arena<'a>,
        cap: usize,
        challenge: [Vec<usize>; 2],
        reply: [Vec<usize>; 2],
    ) -> Result<Self, GameError> {
        check_same_vocabulary(left.m, right.m)?;
        if cap == 0 {
            return Err(GameError::Invalid("tuple cap must be at least 1".into()));
        }
        let base = PartialIso::base(left, right).map_err(|v| GameError::Invalid(format!("constants: {v}")))?;
        let sets = |arena: &Arena, pool: &[usize]| -> Vec<Vec<usize>> {
            small_subsets(pool.len(), cap)
                .into_iter()
                .map(|s| s.into_iter().map(|i| pool[i]).collect::<Vec<_>>())
                .filter(|s| arena.bounded(s))
                .collect()
        };
        let moves = [sets(left, &challenge[0]), sets(right, &challenge[1])];
        Ok(EfGame { left, right, cap, base, moves, replies: reply, memo: HashMap::new() })
    }

    pub fn base(&self) -> &PartialIso {
        &self.base
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    fn arena(&self, side: Side) -> &'g Arena<'a> {
        match side {
            Side::Left => self.left,
            Side::Right => self.right,
        }
    }

    /// I's moves at `pos`: bounded sets of uncovered elements.
    pub fn challenges(&self, pos: &PartialIso) -> Vec<(Side, Vec<usize>)> {
        let mut out = Vec::new();
        for side in [Side::Left, Side::Right] {
            for s in &self.moves[ix(side)] {
                if s.iter().all(|&e| !pos.covers(side, e)) {
                    out.push((side, s.clone()));
                }
            }
        }
        out
    }

    /// II's legal answers to I playing `set` on `side`.
    pub fn responses(&self, pos: &PartialIso, side: Side, set: &[usize]) -> Vec<PartialIso> {
        let other = side.other();
        let pool: Vec<usize> = self.replies[ix(other)].iter().copied().filter(|&e| !pos.covers(other, e)).collect();
        let target = self.arena(other);
        let mut out = Vec::new();
        for img in injections(set.len(), &pool) {
            if !target.bounded(&img) {
                continue;
            }
            let extra: Vec<(usize, usize)> = match side {
                Side::Left => set.iter().copied().zip(img).collect(),
                Side::Right => img.into_iter().zip(set.iter().copied()).collect(),
            };
            if let Ok(g) = pos.extend(&extra, self.left, self.right) {
                out.push(g);
            }
        }
        out
    }

    /// Whether II survives `rounds` more rounds from `pos`.
    pub fn ii_wins(&mut self, pos: &PartialIso, rounds: usize) -> bool {
        if rounds == 0 {
            return true;
        }
        let key = (pos.clone(), rounds);
        if let Some(&w) = self.memo.get(&key) {
            return w;
        }
        let mut win = true;
        for (side, set) in self.challenges(pos) {
            if self.winning_response(pos, rounds, side, &set).is_none() {
                win = false;
                break;
            }
        }
        self.memo.insert(key, win);
        win
    }

    /// First answer (in canonical order) after which II survives the remaining rounds.
    pub fn winning_response(
        &mut self,
        pos: &PartialIso,
        rounds: usize,
        side: Side,
        set: &[usize],
    ) -> Option<PartialIso> {
        let rs = self.responses(pos, side, set);
        rs.into_iter().find(|g| self.ii_wins(g, rounds - 1))
    }

    /// First challenge (in canonical order) that II cannot survive.
    pub fn winning_challenge(&mut self, pos: &PartialIso, rounds: usize) -> Option<(Side, Vec<usize>)> {
        if rounds == 0 {
            return None;
        }
        let cs = self.challenges(pos);
        cs.into_iter().find(|(side, set)| self.winning_response(pos, rounds, *side, set).is_none())
    }

    pub fn winner(&mut self, rounds: usize) -> Player {
        let base = self.base.clone();
        if self.ii_wins(&base, rounds) {
            Player::II
        } else {
            Player::I
        }
    }

    pub fn render_move(&self, side: Side, set: &[usize]) -> String {
        let names: Vec<&str> = set.iter().map(|&e| self.arena(side).name(e)).collect();
        format!("{side}{{{}}}", names.join(","))
    }

    pub fn render(&self, pos: &PartialIso) -> String {
        pos.render(self.left, self.right)
    }

    /// The winner's strategy on every position reachable against it.
    pub fn strategy_table(&mut self, rounds: usize) -> BTreeMap<String, String> {
        let mut table = BTreeMap::new();
        let mut seen = HashSet::new();
        let base = self.base.clone();
        let winner = self.winner(rounds);
        self.fill(&base, rounds, winner, &mut table, &mut seen);
        table
    }

    fn fill(
        &mut self,
        pos: &PartialIso,
        rounds: usize,
        winner: Player,
        table: &mut BTreeMap<String, String>,
        seen: &mut HashSet<(PartialIso, usize)>,
    ) {
        if rounds == 0 || !seen.insert((pos.clone(), rounds)) {
            return;
        }
        let here = format!("{} rounds={rounds}", self.render(pos));
        match winner {
            Player::II => {
                for (side, set) in self.challenges(pos) {
                    if let Some(g) = self.winning_response(pos, rounds, side, &set) {
                        let key = format!("{here}; I plays {}", self.render_move(side, &set));
                        table.insert(key, self.render(&g));
                        self.fill(&g, rounds - 1, winner, table, seen);
                    }
                }
            }
            Player::I => {
                if let Some((side, set)) = self.winning_challenge(pos, rounds) {
                    table.insert(here, self.render_move(side, &set));
                    for g in self.responses(pos, side, &set) {
                        self.fill(&g, rounds - 1, winner, table, seen);
                    }
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EfOutcome {
    pub winner: Player,
    pub rounds: usize,
    pub cap: usize,
    /// Position (and I's move, for II entries) to the winner's chosen move.
    pub table: BTreeMap<String, String>,
}

/// Exact winner of the `rounds`-round game with tuple cap `cap`, plus the
/// winner's strategy table.
pub fn ef_solve_finite(left: &Arena, right: &Arena, rounds: usize, cap: usize) -> Result<EfOutcome, GameError> {
    let mut game = EfGame::new(left, right, cap)?;
    let winner = game.winner(rounds);
    let table = game.strategy_table(rounds);
    Ok(EfOutcome { winner, rounds, cap, table })
}

/// Winner only; skips the strategy table.
pub fn ef_winner(left: &Arena, right: &Arena, rounds: usize, cap: usize) -> Result<Player, GameError> {
    Ok(EfGame::new(left, right, cap)?.winner(rounds))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InftyOutcome {
    pub winner: Player,
    /// Greatest set of partial isomorphisms closed under forth and back.
    pub j: Vec<PartialIso>,
}

/// Whether every bounded challenge of size at most `cap` from `f` extends inside `family`.
pub(crate) fn extendable(
    left: &Arena,
    right: &Arena,
    f: &PartialIso,
    cap: usize,
    family: &[PartialIso],
) -> Option<(Side, Vec<usize>)> {
    for side in [Side::Left, Side::Right] {
        let arena = if side == Side::Left { left } else { right };
        for set in small_subsets(arena.size(), cap) {
            if !arena.bounded(&set) || set.iter().all(|&e| f.covers(side, e)) {
                continue;
            }
            let ok = family.iter().any(|g| f.is_subset_of(g) && set.iter().all(|&e| g.covers(side, e)));
            if !ok {
                return Some((side, set));
            }
        }
    }
    None
}

/// The unbounded game: II wins iff the base map survives the greatest fixpoint.
pub fn ef_solve_infty_finite(left: &Arena, right: &Arena, cap: usize) -> Result<InftyOutcome, GameError> {
    let game = EfGame::new(left, right, cap)?;
    let base = game.base().clone();
    let mut j = super::arena::all_partial_isos(left, right, &base);
    loop {
        let keep: Vec<PartialIso> =
            j.iter().filter(|f| extendable(left, right, f, cap, &j).is_none()).cloned().collect();
        if keep.len() == j.len() {
            break;
        }
        j = keep;
    }
    let winner = if j.contains(&base) { Player::II } else { Player::I };
    Ok(InftyOutcome { winner, j })
}
