//! Bounded countermodel search over rooted frames, one per isomorphism class.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use super::{fmp_bound, frame_validates_logic, DecisionError, LogicId};
use crate::formula::Formula;
use crate::kripke::{
    holds, labeled_preorders, orbit_minimal, preorder_classes, Frame, KripkeError, Model,
    ModelJson, Program, SmallRel, World, DEFAULT_BIT_CAP, MAX_PREORDER_SIZE,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DecideOptions {
    /// Cap on `vars · size`, the valuation bits per frame.
    pub bit_cap: usize,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions {
            bit_cap: DEFAULT_BIT_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Decision {
    /// A rooted frame of the logic with a valuation falsifying the formula
    /// at `world`. Definitive.
    Refuted {
        size: usize,
        model: ModelJson,
        world: World,
    },
    /// No rooted countermodel with at most `size_cap` worlds. Definitive
    /// only when `size_cap` reaches the finite model bound.
    NoCountermodelUpTo {
        size_cap: usize,
        definitive: bool,
        frames_checked: u64,
    },
}

impl Decision {
    pub fn is_refuted(&self) -> bool {
        matches!(self, Decision::Refuted { .. })
    }
}

pub fn decide(a: &Formula, lg: LogicId, size_cap: usize) -> Result<Decision, DecisionError> {
    decide_with(a, lg, size_cap, DecideOptions::default())
}

fn mckinsey1(r1: &[u64]) -> bool {
    let max = maximal(r1);
    r1.iter().all(|&row| row & max != 0)
}

fn maximal(r1: &[u64]) -> u64 {
    r1.iter()
        .enumerate()
        .filter(|&(y, &row)| row == 1 << y)
        .fold(0, |acc, (y, _)| acc | 1 << y)
}

/// `∀x ∃y (x R₁ y ∧ R₂(y) ⊆ max₁)`.
fn mkduo(r1: &[u64], r2: &[u64]) -> bool {
    let max = maximal(r1);
    let good = r2
        .iter()
        .enumerate()
        .filter(|&(_, &row)| row & !max == 0)
        .fold(0u64, |acc, (y, _)| acc | 1 << y);
    r1.iter().all(|&row| row & good != 0)
}

fn rooted(r1: &[u64], r2: &[u64]) -> bool {
    let n = r1.len();
    let all = (1u64 << n) - 1;
    (0..n).any(|x| {
        let mut reach = 1u64 << x;
        loop {
            let mut next = reach;
            let mut s = reach;
            while s != 0 {
                let y = s.trailing_zeros() as usize;
                next |= r1[y] | r2[y];
                s &= s - 1;
            }
            if next == reach {
                return reach == all;
            }
            reach = next;
        }
    })
}

fn masks(r: &SmallRel) -> Vec<u64> {
    r.rows().iter().map(|&b| u64::from(b)).collect()
}

/// Searches sizes `1..=size_cap` in order; within a size, `R₁` runs over
/// class representatives and `R₂` over labeled preorders minimal in their
/// orbit under the automorphisms of `R₁`. The first refutation in this
/// order is returned.
pub fn decide_with(
    a: &Formula,
    lg: LogicId,
    size_cap: usize,
    opts: DecideOptions,
) -> Result<Decision, DecisionError> {
    if size_cap == 0 || size_cap > MAX_PREORDER_SIZE {
        return Err(DecisionError::BadCap {
            cap: size_cap,
            max: MAX_PREORDER_SIZE,
        });
    }
    let prog = Program::compile(a);
    let bits = prog.vars().len() * size_cap;
    if bits > opts.bit_cap || bits >= 64 {
        return Err(KripkeError::BudgetExceeded {
            bits,
            cap: opts.bit_cap,
        }
        .into());
    }
    let checked = AtomicU64::new(0);
    for n in 1..=size_cap {
        let labeled = labeled_preorders(n);
        for class in preorder_classes(n) {
            let r1 = masks(&class.rel);
            if lg != LogicId::FusionS4S4 && !mckinsey1(&r1) {
                continue;
            }
            let hit = labeled.par_iter().find_map_first(|rel2| {
                if !orbit_minimal(rel2, &class.aut) {
                    return None;
                }
                let r2 = masks(rel2);
                if (lg == LogicId::LogicL && !mkduo(&r1, &r2)) || !rooted(&r1, &r2) {
                    return None;
                }
                checked.fetch_add(1, Ordering::Relaxed);
                prog.counterexample(n, &[&r1, &r2])
                    .map(|(v, w)| (*rel2, v, w))
            });
            if let Some((rel2, v, world)) = hit {
                let frame = Frame::anonymous(vec![class.rel.to_relation(), rel2.to_relation()]);
                let model = Model::with_valuation(frame, prog.decode(n, v))?;
                return Ok(Decision::Refuted {
                    size: n,
                    model: model.to_json(),
                    world,
                });
            }
        }
    }
    Ok(Decision::NoCountermodelUpTo {
        size_cap,
        definitive: size_cap as u128 >= fmp_bound(a),
        frames_checked: checked.into_inner(),
    })
}

/// Re-checks a refutation with the pointwise evaluator and the frame
/// conditions. `NoCountermodelUpTo` verdicts pass trivially.
pub fn verify_refutation(d: &Decision, a: &Formula, lg: LogicId) -> Result<bool, DecisionError> {
    let Decision::Refuted { model, world, .. } = d else {
        return Ok(true);
    };
    let m = model.to_model()?;
    Ok(
        m.frame.is_rooted()
            && frame_validates_logic(&m.frame, lg).holds()
            && !holds(&m, *world, a)?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse, Axiom};

    #[test]
    fn axl_refuted_in_fusion() {
        let a = Axiom::AxL.formula();
        let d = decide(&a, LogicId::FusionS41S4, 6).unwrap();
        let Decision::Refuted { size, .. } = &d else {
            panic!("{d:?}")
        };
        assert_eq!(*size, 2);
        assert!(verify_refutation(&d, &a, LogicId::FusionS41S4).unwrap());
        let again = decide(&a, LogicId::FusionS41S4, 6).unwrap();
        assert_eq!(d, again);
    }

    #[test]
    fn axl_survives_in_l() {
        let d = decide(&Axiom::AxL.formula(), LogicId::LogicL, 5).unwrap();
        assert!(matches!(
            d,
            Decision::NoCountermodelUpTo {
                size_cap: 5,
                definitive: false,
                ..
            }
        ));
    }

    #[test]
    fn reflexivity_holds_and_is_definitive_for_letters() {
        let d = decide(&parse("[]1 p -> p").unwrap(), LogicId::LogicL, 4).unwrap();
        assert!(!d.is_refuted());
        let d = decide(&parse("p -> p").unwrap(), LogicId::FusionS4S4, 4).unwrap();
        // |Sub| = 2 gives bound 12 > 4.
        assert!(matches!(
            d,
            Decision::NoCountermodelUpTo {
                definitive: false,
                ..
            }
        ));
        let d = decide(&parse("true").unwrap(), LogicId::FusionS4S4, 3).unwrap();
        assert!(matches!(
            d,
            Decision::NoCountermodelUpTo {
                definitive: false,
                ..
            }
        ));
    }

    #[test]
    fn mckinsey_refuted_only_without_it() {
        let a = Axiom::A1One.formula();
        let d = decide(&a, LogicId::FusionS4S4, 3).unwrap();
        assert!(d.is_refuted());
        assert!(verify_refutation(&d, &a, LogicId::FusionS4S4).unwrap());
        assert!(!decide(&a, LogicId::FusionS41S4, 4).unwrap().is_refuted());
    }

    #[test]
    fn bad_caps() {
        let a = parse("p").unwrap();
        assert!(matches!(
            decide(&a, LogicId::LogicL, 0),
            Err(DecisionError::BadCap { .. })
        ));
        assert!(matches!(
            decide(&a, LogicId::LogicL, 8),
            Err(DecisionError::BadCap { .. })
        ));
        let many = parse("p & q & r & s & t").unwrap();
        assert!(matches!(
            decide(&many, LogicId::LogicL, 6),
            Err(DecisionError::Kripke(KripkeError::BudgetExceeded { .. }))
        ));
    }

    #[test]
    fn row_filters_agree_with_fo_checks() {
        use crate::correspond::{mckinsey_fo, mkduo_fo};
        use crate::formula::Modality;
        for n in 1..=3 {
            for c in preorder_classes(n) {
                for r2 in labeled_preorders(n) {
                    let fr = Frame::anonymous(vec![c.rel.to_relation(), r2.to_relation()]);
                    let (m1, m2) = (masks(&c.rel), masks(r2));
                    assert_eq!(
                        mckinsey1(&m1),
                        mckinsey_fo(&fr, Modality::One).unwrap().holds()
                    );
                    assert_eq!(mkduo(&m1, &m2), mkduo_fo(&fr).unwrap().holds());
                    assert_eq!(rooted(&m1, &m2), fr.is_rooted());
                }
            }
        }
    }
}
