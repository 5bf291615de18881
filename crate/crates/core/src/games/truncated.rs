use std::fmt;

use serde::Serialize;

use super::arena::Arena;
use super::ef::EfGame;
use super::{GameError, Player};
use crate::structures::{ChainModel, Element, FiniteStructure};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum TruncatedVerdict {
    /// I wins the untruncated game; the certificate says why the windows suffice.
    IWins { certificate: String },
    /// I wins inside the windows only.
    IWinsTruncated,
    /// II wins inside the windows; says nothing about the full game.
    IiWinsTruncated,
}

impl fmt::Display for TruncatedVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TruncatedVerdict::IWins { certificate } => write!(f, "IWins({certificate})"),
            TruncatedVerdict::IWinsTruncated => write!(f, "IWinsTruncated"),
            TruncatedVerdict::IiWinsTruncated => write!(f, "IIWinsTruncated"),
        }
    }
}

/// Bounded elements below `horizon`, plus the constants.
fn window(c: &ChainModel, horizon: usize) -> Vec<Element> {
    let pres = &c.presentation;
    let mut out: Vec<Element> = pres.window(horizon).into_iter().filter(|&e| c.min_level(e).is_some()).collect();
    for name in &pres.vocab.constants {
        if let Some(e) = pres.constant(name) {
            if !out.contains(&e) {
                out.push(e);
            }
        }
    }
    out.sort();
    out
}

/// Blocks after which nothing is left, when the presentation is finite.
fn extent(c: &ChainModel) -> Option<usize> {
    c.presentation.is_finite().then(|| c.presentation.preamble_len())
}

/// The chain EF game with I restricted to blocks below `horizon_i` and II to
/// blocks below `horizon_ii`. Every element in play is bounded, and for weak
/// chains the level condition on finite maps then always holds.
pub fn ef_solve_chain_truncated(
    a: &ChainModel,
    b: &ChainModel,
    rounds: usize,
    cap: usize,
    horizon_i: usize,
    horizon_ii: usize,
) -> Result<TruncatedVerdict, GameError> {
    if horizon_ii < horizon_i {
        return Err(GameError::HorizonOrder { horizon_i, horizon_ii });
    }
    for c in [a, b] {
        if let Some(v) = c.validate().into_iter().next() {
            return Err(GameError::Invalid(v.to_string()));
        }
    }
    let (wa, wb) = (window(a, horizon_ii), window(b, horizon_ii));
    let ma: FiniteStructure = a.presentation.induced(&wa);
    let mb: FiniteStructure = b.presentation.induced(&wb);
    let (la, lb) = (Arena::plain(&ma), Arena::plain(&mb));
    let inner = |w: &[Element]| (0..w.len()).filter(|&i| w[i].block < horizon_i).collect::<Vec<_>>();
    let all = |w: &[Element]| (0..w.len()).collect::<Vec<_>>();
    let mut game = EfGame::restricted(&la, &lb, cap, [inner(&wa), inner(&wb)], [all(&wa), all(&wb)])?;
    Ok(match game.winner(rounds) {
        Player::II => TruncatedVerdict::IiWinsTruncated,
        Player::I => match (extent(a), extent(b)) {
            (Some(ea), Some(eb)) if horizon_i >= ea.max(eb) => TruncatedVerdict::IWins {
                certificate: format!("both models end before block {}; the windows are the models", ea.max(eb)),
            },
            _ => TruncatedVerdict::IWinsTruncated,
        },
    })
}
