//! Solvers and verifiers for the chain Ehrenfeucht–Fraïssé game (finite and
//! unbounded), its window-truncated version on presented chain models, the
//! borrowing game, and back-and-forth families.

mod arena;
mod bf;
mod bg;
mod ef;
mod step;
mod truncated;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub use arena::{all_partial_isos, check_same_vocabulary, Arena, IsoViolation, PartialIso, Side};
pub use bf::{bf_extract, bf_maximal_graded, bf_verify, BackAndForthFamily, BfReport, PartialIsoDoc};
pub use bg::{bg_equiv_classes, bg_solve, bg_step, bg_winner, BgClasses, BgGame, BgMove, BgOutcome, BgPosition};
pub use ef::{ef_solve_finite, ef_solve_infty_finite, ef_winner, EfGame, EfOutcome, InftyOutcome};
pub use step::{ef_step, game_step, EfMove, EfPosition, Move, Position};
pub use truncated::{ef_solve_chain_truncated, TruncatedVerdict};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("vocabulary mismatch between the two structures")]
    VocabularyMismatch,
    #[error("horizon for II ({horizon_ii}) is below horizon for I ({horizon_i})")]
    HorizonOrder { horizon_i: usize, horizon_ii: usize },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Player {
    I,
    II,
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::I => "I",
            Player::II => "II",
        })
    }
}

/// Why a move was rejected.
#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize)]
#[error("illegal: {reason}")]
pub struct Illegal {
    pub reason: String,
}

impl Illegal {
    pub fn new(reason: impl Into<String>) -> Self {
        Illegal { reason: reason.into() }
    }
}
