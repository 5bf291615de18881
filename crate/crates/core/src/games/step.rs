use serde::Serialize;

use super::arena::{Arena, PartialIso, Side};
use super::bg::{bg_step, BgMove, BgPosition};
use super::{Illegal, Player};

/// A position of the finite EF game.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct EfPosition {
    pub iso: PartialIso,
    pub rounds: usize,
    pub cap: usize,
    /// I's set awaiting II's answer.
    pub pending: Option<(Side, Vec<usize>)>,
}

impl EfPosition {
    pub fn start(base: PartialIso, rounds: usize, cap: usize) -> Self {
        EfPosition { iso: base, rounds, cap, pending: None }
    }

    pub fn to_move(&self) -> Option<Player> {
        match (&self.pending, self.rounds) {
            (Some(_), _) => Some(Player::II),
            (None, 0) => None,
            (None, _) => Some(Player::I),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EfMove {
    Challenge {
        side: Side,
        set: Vec<usize>,
    },
    /// Images of the challenged elements, in the order they were played.
    Respond {
        images: Vec<usize>,
    },
}

pub fn ef_step(left: &Arena, right: &Arena, pos: &EfPosition, mv: &EfMove) -> Result<EfPosition, Illegal> {
    match (mv, &pos.pending) {
        (EfMove::Challenge { side, set }, None) => {
            if pos.rounds == 0 {
                return Err(Illegal::new("the game is over"));
            }
            if set.is_empty() || set.len() > pos.cap {
                return Err(Illegal::new(format!("tuple must have between 1 and {} elements", pos.cap)));
            }
            let arena = if *side == Side::Left { left } else { right };
            if let Some(e) = set.iter().find(|&&e| e >= arena.size()) {
                return Err(Illegal::new(format!("no element {e} on the {side} side")));
            }
            if !arena.bounded(set) {
                return Err(Illegal::new("level condition violated: tuple is not bounded"));
            }
            Ok(EfPosition { pending: Some((*side, set.clone())), ..pos.clone() })
        }
        (EfMove::Respond { images }, Some((side, set))) => {
            if images.len() != set.len() {
                return Err(Illegal::new(format!("expected {} images", set.len())));
            }
            let mut seen = images.clone();
            seen.sort_unstable();
            seen.dedup();
            if seen.len() != images.len() {
                return Err(Illegal::new("not injective"));
            }
            let target = if *side == Side::Left { right } else { left };
            if let Some(e) = images.iter().find(|&&e| e >= target.size()) {
                return Err(Illegal::new(format!("no element {e} on the {} side", side.other())));
            }
            if !target.bounded(images) {
                return Err(Illegal::new("level condition violated: answer is not bounded"));
            }
            let extra: Vec<(usize, usize)> = match side {
                Side::Left => set.iter().copied().zip(images.iter().copied()).collect(),
                Side::Right => images.iter().copied().zip(set.iter().copied()).collect(),
            };
            let iso = pos.iso.extend(&extra, left, right).map_err(|v| Illegal::new(v.to_string()))?;
            Ok(EfPosition { iso, rounds: pos.rounds - 1, cap: pos.cap, pending: None })
        }
        (EfMove::Challenge { .. }, Some(_)) => Err(Illegal::new("player II is to move")),
        (EfMove::Respond { .. }, None) => Err(Illegal::new("player I is to move")),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Position {
    Ef(EfPosition),
    Bg(BgPosition),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Move {
    Ef(EfMove),
    Bg(BgMove),
}

/// One move of either game; the move kind must match the position kind.
pub fn game_step(left: &Arena, right: &Arena, pos: &Position, mv: &Move) -> Result<Position, Illegal> {
    match (pos, mv) {
        (Position::Ef(p), Move::Ef(m)) => ef_step(left, right, p, m).map(Position::Ef),
        (Position::Bg(p), Move::Bg(m)) => bg_step(left, right, p, m).map(Position::Bg),
        _ => Err(Illegal::new("move does not belong to this game")),
    }
}
