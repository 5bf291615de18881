//! Classical truth on finite structures, chain truth on filtered models and
//! bounded three-valued chain truth on block-presented chain models.

mod chain;
mod classical;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::structures::StructureError;

pub use chain::{eval_chain, eval_chain_with, p_bounded, so_bounded_eval, strict_order_certified};
pub use classical::{eval_chain_finite, eval_classical, eval_filtered, eval_sentence};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("outside finite fragment: {0}")]
    Fragment(&'static str),
    #[error("not a sentence: free variables {0:?}")]
    FreeVariables(Vec<String>),
    #[error("SO requires finite levels")]
    SoNeedsFiniteLevels,
    #[error("symbol `{0}` is not unary")]
    NotUnary(String),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("{0}")]
    Invalid(String),
}

/// Three-valued truth; `Unknown` records the bounds at which search stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Truth {
    True,
    False,
    Unknown { horizon: usize, period: usize },
}

/// A truth value plus whether a definite answer leaned on the completeness heuristic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Verdict {
    pub truth: Truth,
    pub heuristic: bool,
}

impl Verdict {
    pub const TRUE: Verdict = Verdict { truth: Truth::True, heuristic: false };
    pub const FALSE: Verdict = Verdict { truth: Truth::False, heuristic: false };

    pub fn of(b: bool) -> Self {
        if b {
            Self::TRUE
        } else {
            Self::FALSE
        }
    }

    pub fn unknown(bounds: &EvalBounds) -> Self {
        Verdict { truth: Truth::Unknown { horizon: bounds.horizon, period: bounds.scheme_period }, heuristic: false }
    }

    pub fn is_definite(&self) -> bool {
        !matches!(self.truth, Truth::Unknown { .. })
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self.truth {
            Truth::True => Some(true),
            Truth::False => Some(false),
            Truth::Unknown { .. } => None,
        }
    }

    pub fn not(self) -> Self {
        let truth = match self.truth {
            Truth::True => Truth::False,
            Truth::False => Truth::True,
            u => u,
        };
        Verdict { truth, heuristic: self.heuristic }
    }

    /// Kleene conjunction; a definite result keeps the tag of what decided it.
    pub fn and(self, other: Verdict) -> Self {
        match (self.truth, other.truth) {
            (Truth::False, Truth::False) => {
                Verdict { truth: Truth::False, heuristic: self.heuristic && other.heuristic }
            }
            (Truth::False, _) => self,
            (_, Truth::False) => other,
            (Truth::True, Truth::True) => Verdict { truth: Truth::True, heuristic: self.heuristic || other.heuristic },
            (Truth::Unknown { .. }, _) => Verdict { heuristic: false, ..self },
            (_, Truth::Unknown { .. }) => Verdict { heuristic: false, ..other },
        }
    }

    pub fn or(self, other: Verdict) -> Self {
        self.not().and(other.not()).not()
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.truth {
            Truth::True => write!(f, "true")?,
            Truth::False => write!(f, "false")?,
            Truth::Unknown { horizon, period } => write!(f, "unknown(horizon={horizon},period={period})")?,
        }
        if self.heuristic && self.is_definite() {
            write!(f, " (heuristic)")?;
        }
        Ok(())
    }
}

impl Serialize for Verdict {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Search bounds for chain evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EvalBounds {
    /// Blocks with index below `horizon` are searched.
    pub horizon: usize,
    /// Largest stride tried for eventually periodic ω-witnesses.
    pub scheme_period: usize,
    /// Treat quantifier-free witness search over the pumping window as exhaustive.
    pub heuristic: bool,
}

impl Default for EvalBounds {
    fn default() -> Self {
        EvalBounds { horizon: 16, scheme_period: 1, heuristic: true }
    }
}

impl EvalBounds {
    pub fn validate(&self) -> Result<(), SemanticsError> {
        if self.horizon == 0 || self.scheme_period == 0 {
            return Err(SemanticsError::Invalid("horizon and period must be at least 1".into()));
        }
        Ok(())
    }
}
