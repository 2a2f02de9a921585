//! The logics `S4 ∗ S4`, `S4.1 ∗ S4` and `L` as membership problems: frame
//! conditions, filtration, bounded countermodel search and proof checking.

mod filtration;
mod proof;
mod search;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::correspond::{mckinsey_fo, mkduo_fo};
use crate::formula::{Axiom, Formula, Modality};
use crate::kripke::{Condition, Frame, FrameConditionSet, GenerateError, KripkeError, World};

pub use filtration::{
    check_filtration, filtrate, filtrate_with, partition_prior, Cell, FiltrationCheck,
    FiltrationMode, FiltrationResult, Partition3,
};
pub use proof::{
    check_proof, consistency_crosscheck, fixture_proofs, mutate_proof, CrossCheck, Justification,
    ProofLine, ProofScript, ProofVerdict, RejectReason,
};
pub use search::{decide, decide_with, verify_refutation, DecideOptions, Decision};

#[derive(Debug, Error)]
pub enum DecisionError {
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("size cap {cap} is outside 1..={max}")]
    BadCap { cap: usize, max: usize },
    #[error(transparent)]
    Kripke(#[from] KripkeError),
    #[error(transparent)]
    Generate(#[from] GenerateError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LogicId {
    FusionS4S4,
    FusionS41S4,
    LogicL,
}

impl LogicId {
    pub const ALL: [LogicId; 3] = [LogicId::FusionS4S4, LogicId::FusionS41S4, LogicId::LogicL];

    pub fn conditions(self) -> FrameConditionSet {
        let mut c: Vec<Condition> = FrameConditionSet::preorder(Modality::One)
            .into_iter()
            .chain(FrameConditionSet::preorder(Modality::Two))
            .collect();
        if self != LogicId::FusionS4S4 {
            c.push(Condition::McKinsey(Modality::One));
        }
        if self == LogicId::LogicL {
            c.push(Condition::MkDuo);
        }
        FrameConditionSet::new(c)
    }

    /// Axioms besides classical tautologies.
    pub fn axioms(self) -> Vec<Axiom> {
        let mut v = vec![
            Axiom::K1,
            Axiom::K2,
            Axiom::T1,
            Axiom::T2,
            Axiom::Four1,
            Axiom::Four2,
        ];
        if self != LogicId::FusionS4S4 {
            v.push(Axiom::A1One);
        }
        if self == LogicId::LogicL {
            v.push(Axiom::AxL);
        }
        v
    }

    pub fn name(self) -> &'static str {
        match self {
            LogicId::FusionS4S4 => "S4xS4fusion",
            LogicId::FusionS41S4 => "S41xS4fusion",
            LogicId::LogicL => "L",
        }
    }
}

impl fmt::Display for LogicId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LogicId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "L" | "LogicL" => Ok(LogicId::LogicL),
            "S41xS4fusion" | "FusionS41S4" => Ok(LogicId::FusionS41S4),
            "S4xS4fusion" | "FusionS4S4" => Ok(LogicId::FusionS4S4),
            _ => Err(format!(
                "unknown logic {s:?}; expected L, S41xS4fusion or S4xS4fusion"
            )),
        }
    }
}

/// Outcome of [`frame_validates_logic`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum LogicCheck {
    Holds,
    Fails {
        condition: String,
        world: Option<World>,
    },
}

impl LogicCheck {
    pub fn holds(&self) -> bool {
        matches!(self, LogicCheck::Holds)
    }
}

fn failing_world(fr: &Frame, c: Condition) -> Option<World> {
    let rel = |m: Modality| fr.relation(m).ok();
    match c {
        Condition::Reflexive(m) => rel(m).and_then(|r| fr.worlds().find(|&x| !r.contains(x, x))),
        Condition::Transitive(m) => rel(m).and_then(|r| {
            fr.worlds().find(|&x| {
                r.succ(x)
                    .iter()
                    .any(|&y| r.succ(y).iter().any(|&z| !r.contains(x, z)))
            })
        }),
        Condition::McKinsey(m) => match mckinsey_fo(fr, m) {
            Ok(crate::correspond::FoVerdict::Fails { world }) => Some(world),
            _ => None,
        },
        Condition::MkDuo => match mkduo_fo(fr) {
            Ok(crate::correspond::FoVerdict::Fails { world }) => Some(world),
            _ => None,
        },
        Condition::Rooted => None,
    }
}

/// Evaluates the first-order conditions of `lg`, reporting the first that
/// fails and a world where it fails.
pub fn frame_validates_logic(fr: &Frame, lg: LogicId) -> LogicCheck {
    match lg.conditions().first_failure(fr) {
        None => LogicCheck::Holds,
        Some(c) => LogicCheck::Fails {
            condition: c.label(),
            world: failing_world(fr, c),
        },
    }
}

/// `3 · 2^|Sub(a)|`, saturating.
pub fn fmp_bound(a: &Formula) -> u128 {
    let s = a.subformulas().len() as u32;
    1u128
        .checked_shl(s)
        .map_or(u128::MAX, |p| p.saturating_mul(3))
}
