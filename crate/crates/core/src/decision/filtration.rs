//! Transitive filtration with a prior partition of the worlds.

use std::collections::HashMap;

use serde::Serialize;

use super::{fmp_bound, frame_validates_logic, DecisionError, LogicId};
use crate::correspond::maximal_points;
use crate::formula::{Formula, Modality};
use crate::kripke::{extensions, ClosureMode, Frame, Model, Relation, World, WorldSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Cell {
    /// Maximal, and every `R₂`-successor is maximal.
    C,
    W1MinusC,
    W2,
}

/// `C`, `W₁ ∖ C` and `W₂` where `W₁` is the set of `R₁`-maximal points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition3 {
    pub cell_c: WorldSet,
    pub cell_w1_minus_c: WorldSet,
    pub cell_w2: WorldSet,
}

impl Partition3 {
    pub fn cell(&self, x: World) -> Cell {
        if self.cell_c.contains(x) {
            Cell::C
        } else if self.cell_w1_minus_c.contains(x) {
            Cell::W1MinusC
        } else {
            Cell::W2
        }
    }
}

/// Requires only that both relations are preorders. On frames of `L` the
/// middle cell is empty: a maximal point is its own only mkduo witness.
pub fn partition_prior(m: &Model) -> Result<Partition3, DecisionError> {
    let fr = &m.frame;
    if fr.arity() != 2 || !fr.is_preorder_frame() {
        return Err(DecisionError::PreconditionFailed(
            "both relations must be preorders".into(),
        ));
    }
    let max = maximal_points(fr, Modality::One)?;
    let r2 = fr.rel(1);
    let n = fr.size();
    let mut cell_c = WorldSet::with_capacity(n);
    cell_c.extend(
        max.ones()
            .filter(|&u| r2.succ(u).iter().all(|&v| max.contains(v))),
    );
    let mut cell_w1_minus_c = max.clone();
    cell_w1_minus_c.difference_with(&cell_c);
    let mut cell_w2 = WorldSet::with_capacity(n);
    cell_w2.extend((0..n).filter(|&x| !max.contains(x)));
    Ok(Partition3 {
        cell_c,
        cell_w1_minus_c,
        cell_w2,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FiltrationMode {
    /// `C`, `W₁ ∖ C`, `W₂`.
    #[default]
    ThreeCell,
    /// `W₁`, `W₂`.
    TwoCell,
}

#[derive(Clone, Debug)]
pub struct FiltrationResult {
    pub model: Model,
    /// `class_of[x]` is the class of world `x`.
    pub class_of: Vec<usize>,
    pub size_bound: u128,
    pub mode: FiltrationMode,
    /// Cell of each class.
    pub class_cell: Vec<Cell>,
}

impl FiltrationResult {
    pub fn classes(&self) -> usize {
        self.model.frame.size()
    }
}

pub fn filtrate(m: &Model, a: &Formula) -> Result<FiltrationResult, DecisionError> {
    filtrate_with(m, a, FiltrationMode::ThreeCell)
}

/// Classes are `≡_a` (agreement on every subformula of `a`) refined by the
/// cell; relations are the reflexive-transitive closures of the minimal
/// filtration. Classes are numbered by their least world.
pub fn filtrate_with(
    m: &Model,
    a: &Formula,
    mode: FiltrationMode,
) -> Result<FiltrationResult, DecisionError> {
    if let super::LogicCheck::Fails { condition, .. } =
        frame_validates_logic(&m.frame, LogicId::LogicL)
    {
        return Err(DecisionError::PreconditionFailed(format!(
            "not a frame of L: {condition}"
        )));
    }
    let part = partition_prior(m)?;
    let subs = a.subformulas();
    let ext = extensions(m, &subs)?;
    let fr = &m.frame;
    let cell = |x: World| match (mode, part.cell(x)) {
        (FiltrationMode::TwoCell, Cell::W1MinusC) => Cell::C,
        (_, c) => c,
    };
    let mut index: HashMap<(Vec<bool>, Cell), usize> = HashMap::new();
    let mut class_of = Vec::with_capacity(fr.size());
    let mut class_cell = Vec::new();
    let mut names = Vec::new();
    for x in fr.worlds() {
        let key = (
            ext.iter().map(|e| e.contains(x)).collect::<Vec<_>>(),
            cell(x),
        );
        let next = index.len();
        let c = *index.entry(key).or_insert_with(|| {
            class_cell.push(part.cell(x));
            names.push(format!("[{}]", fr.name(x)));
            next
        });
        class_of.push(c);
    }
    let k = index.len();
    let rels = fr
        .relations()
        .iter()
        .map(|r| {
            Relation::from_edges(k, r.edges().map(|(x, y)| (class_of[x], class_of[y])))
                .closure(ClosureMode::Both)
        })
        .collect();
    let frame = Frame::new(names, rels)?;
    let mut valuation = std::collections::BTreeMap::new();
    for p in a.vars() {
        let mut classes: Vec<World> = m.letter(&p).ones().map(|x| class_of[x]).collect();
        classes.sort_unstable();
        classes.dedup();
        valuation.insert(p, classes);
    }
    Ok(FiltrationResult {
        model: Model::with_valuation(frame, valuation)?,
        class_of,
        size_bound: fmp_bound(a),
        mode,
        class_cell,
    })
}

/// Everything the filtration is supposed to guarantee, checked on one run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiltrationCheck {
    pub classes: usize,
    pub size_bound: u128,
    /// Subformula truth is preserved at every world.
    pub lemma_holds: bool,
    pub validates_l: bool,
    pub within_bound: bool,
    /// Classes of `C` points have singleton `R₁′`-image.
    pub maximality_preserved: bool,
}

impl FiltrationCheck {
    pub fn ok(&self) -> bool {
        self.lemma_holds && self.validates_l && self.within_bound && self.maximality_preserved
    }
}

pub fn check_filtration(
    m: &Model,
    a: &Formula,
    res: &FiltrationResult,
) -> Result<FiltrationCheck, DecisionError> {
    let subs = a.subformulas();
    let before = extensions(m, &subs)?;
    let after = extensions(&res.model, &subs)?;
    let lemma_holds = before.iter().zip(&after).all(|(b, f)| {
        m.frame
            .worlds()
            .all(|x| b.contains(x) == f.contains(res.class_of[x]))
    });
    let r1 = res.model.frame.rel(0);
    let maximality_preserved = res
        .class_cell
        .iter()
        .enumerate()
        .all(|(c, cell)| *cell != Cell::C || r1.succ(c) == [c]);
    Ok(FiltrationCheck {
        classes: res.classes(),
        size_bound: res.size_bound,
        lemma_holds,
        validates_l: frame_validates_logic(&res.model.frame, LogicId::LogicL).holds(),
        within_bound: (res.classes() as u128) <= res.size_bound,
        maximality_preserved,
    })
}
