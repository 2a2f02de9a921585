//! Checking p-morphisms between frames and open continuous surjections
//! between finite spaces.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::formula::Formula;
use crate::kripke::{frame_valid, Frame, KripkeError, Relation, World, WorldSet};
use crate::topo::{alexandrov, TopSpace};

/// Counterexamples kept per report; the boolean verdicts stay exact.
const MAX_WITNESSES: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PmorphError {
    #[error("source has {source_arity} relations, target has {target_arity}")]
    ArityMismatch {
        source_arity: usize,
        target_arity: usize,
    },
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error(transparent)]
    Kripke(#[from] KripkeError),
}

/// A total map between frames. `interior[i][x]`, when present, says whether
/// lifting along relation `i` is required at `x`; the other points are
/// boundary points of a truncation and are only counted.
#[derive(Clone, Debug)]
pub struct FrameMap {
    pub source: Frame,
    pub target: Frame,
    pub mapping: Vec<World>,
    pub interior: Option<Vec<Vec<bool>>>,
}

impl FrameMap {
    pub fn new(source: Frame, target: Frame, mapping: Vec<World>) -> Result<Self, PmorphError> {
        let m = FrameMap {
            source,
            target,
            mapping,
            interior: None,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn identity(fr: &Frame) -> Self {
        FrameMap {
            source: fr.clone(),
            target: fr.clone(),
            mapping: fr.worlds().collect(),
            interior: None,
        }
    }

    /// Reads `{"map": {"src": "tgt", ...}}`-style name pairs.
    pub fn from_names(
        source: Frame,
        target: Frame,
        pairs: &BTreeMap<String, String>,
    ) -> Result<Self, PmorphError> {
        let mut mapping = vec![usize::MAX; source.size()];
        for (s, t) in pairs {
            let x = source
                .world(s)
                .ok_or_else(|| PmorphError::InvalidMap(format!("unknown source world `{s}`")))?;
            let y = target
                .world(t)
                .ok_or_else(|| PmorphError::InvalidMap(format!("unknown target world `{t}`")))?;
            mapping[x] = y;
        }
        if let Some(x) = mapping.iter().position(|&y| y == usize::MAX) {
            return Err(PmorphError::InvalidMap(format!(
                "source world `{}` is not mapped",
                source.name(x)
            )));
        }
        FrameMap::new(source, target, mapping)
    }

    pub fn to_names(&self) -> BTreeMap<String, String> {
        self.source
            .worlds()
            .map(|x| {
                (
                    self.source.name(x).to_string(),
                    self.target.name(self.mapping[x]).to_string(),
                )
            })
            .collect()
    }

    fn validate(&self) -> Result<(), PmorphError> {
        if self.mapping.len() != self.source.size() {
            return Err(PmorphError::InvalidMap(format!(
                "map has {} entries for {} source worlds",
                self.mapping.len(),
                self.source.size()
            )));
        }
        if let Some(&y) = self.mapping.iter().find(|&&y| y >= self.target.size()) {
            return Err(PmorphError::InvalidMap(format!(
                "image {y} outside the target"
            )));
        }
        if let Some(i) = &self.interior {
            check_mask(i, self.source.arity(), self.source.size())?;
        }
        Ok(())
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &FrameMap) -> Result<FrameMap, PmorphError> {
        if self.target != g.source {
            return Err(PmorphError::InvalidMap("maps do not compose".into()));
        }
        Ok(FrameMap {
            source: self.source.clone(),
            target: g.target.clone(),
            mapping: self.mapping.iter().map(|&y| g.mapping[y]).collect(),
            interior: None,
        })
    }
}

/// A map between two finite spaces.
#[derive(Clone, Debug)]
pub struct SpaceMap {
    pub source: TopSpace,
    pub target: TopSpace,
    pub mapping: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Counterexample {
    /// Target point with no preimage.
    NotSurjective { target: String },
    /// `x R y` but not `f(x) S f(y)`.
    NotMonotone {
        relation: usize,
        x: String,
        y: String,
    },
    /// `f(x) S t` with no `y` such that `x R y` and `f(y) = t`.
    NoLift {
        relation: usize,
        x: String,
        target: String,
    },
    /// The image of a basic open is not open.
    NotOpen { topology: usize, base_index: usize },
    /// The preimage of a basic open is not open.
    NotContinuous { topology: usize, base_index: usize },
}

/// Verdicts of a morphism check. Each vector has one entry per relation or
/// topology.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct MorphismReport {
    pub surjective: bool,
    pub monotone: Vec<bool>,
    pub lifting: Vec<bool>,
    pub open: Vec<bool>,
    pub continuous: Vec<bool>,
    pub interior_points: usize,
    pub boundary_points: usize,
    pub counterexamples: Vec<Counterexample>,
}

impl MorphismReport {
    /// All recorded verdicts hold.
    pub fn ok(&self) -> bool {
        self.surjective
            && self.monotone.iter().all(|&b| b)
            && self.lifting.iter().all(|&b| b)
            && self.open.iter().all(|&b| b)
            && self.continuous.iter().all(|&b| b)
    }

    fn witness(&mut self, c: Counterexample) {
        if self.counterexamples.len() < MAX_WITNESSES {
            self.counterexamples.push(c);
        }
    }
}

fn check_mask(mask: &[Vec<bool>], arity: usize, n: usize) -> Result<(), PmorphError> {
    if mask.len() != arity || mask.iter().any(|m| m.len() != n) {
        return Err(PmorphError::InvalidMap(
            "interior mask has the wrong shape".into(),
        ));
    }
    Ok(())
}

fn image_of(mapping: &[usize], n_target: usize, s: impl Iterator<Item = usize>) -> WorldSet {
    let mut out = WorldSet::with_capacity(n_target);
    out.extend(s.map(|x| mapping[x]));
    out
}

/// Surjectivity, monotonicity everywhere, and lifting at interior points.
pub fn check_pmorphism(m: &FrameMap) -> Result<MorphismReport, PmorphError> {
    m.validate()?;
    let (src, tgt, f) = (&m.source, &m.target, &m.mapping);
    if src.arity() != tgt.arity() {
        return Err(PmorphError::ArityMismatch {
            source_arity: src.arity(),
            target_arity: tgt.arity(),
        });
    }
    let mut rep = MorphismReport::default();
    let hit = image_of(f, tgt.size(), src.worlds());
    rep.surjective = hit.count_ones(..) == tgt.size();
    for t in tgt.worlds().filter(|&t| !hit.contains(t)) {
        rep.witness(Counterexample::NotSurjective {
            target: tgt.name(t).into(),
        });
    }
    let interior = |i: usize, x: World| m.interior.as_ref().is_none_or(|mask| mask[i][x]);
    rep.interior_points = src
        .worlds()
        .filter(|&x| (0..src.arity()).all(|i| interior(i, x)))
        .count();
    rep.boundary_points = src.size() - rep.interior_points;
    for i in 0..src.arity() {
        let (r, s): (&Relation, &Relation) = (src.rel(i), tgt.rel(i));
        let mut mono = true;
        for (x, y) in r.edges() {
            if !s.contains(f[x], f[y]) {
                mono = false;
                rep.witness(Counterexample::NotMonotone {
                    relation: i + 1,
                    x: src.name(x).into(),
                    y: src.name(y).into(),
                });
            }
        }
        let mut lift = true;
        for x in src.worlds().filter(|&x| interior(i, x)) {
            let reached = image_of(f, tgt.size(), r.succ(x).iter().copied());
            for &t in s.succ(f[x]) {
                if !reached.contains(t) {
                    lift = false;
                    rep.witness(Counterexample::NoLift {
                        relation: i + 1,
                        x: src.name(x).into(),
                        target: tgt.name(t).into(),
                    });
                }
            }
        }
        rep.monotone.push(mono);
        rep.lifting.push(lift);
    }
    Ok(rep)
}

/// Openness and continuity of a map between finite spaces, decided on the
/// bases: the image of each basic open must be open, and so must the
/// preimage.
pub fn check_open_continuous(m: &SpaceMap) -> Result<MorphismReport, PmorphError> {
    check_spaces(&[(&m.source, &m.target)], &m.mapping)
}

/// The same check for several topologies on shared carriers, one entry per pair.
pub fn check_spaces(
    pairs: &[(&TopSpace, &TopSpace)],
    mapping: &[usize],
) -> Result<MorphismReport, PmorphError> {
    let (src, tgt) = pairs[0];
    if mapping.len() != src.len() || mapping.iter().any(|&y| y >= tgt.len()) {
        return Err(PmorphError::InvalidMap(
            "map is not total into the target".into(),
        ));
    }
    let mut rep = MorphismReport::default();
    let hit = image_of(mapping, tgt.len(), 0..src.len());
    rep.surjective = hit.count_ones(..) == tgt.len();
    for t in (0..tgt.len()).filter(|&t| !hit.contains(t)) {
        rep.witness(Counterexample::NotSurjective {
            target: tgt.label(t).into(),
        });
    }
    rep.interior_points = src.len();
    for (i, (s, t)) in pairs.iter().enumerate() {
        let mut open = true;
        for (bi, b) in s.base().iter().enumerate() {
            if !t.is_open(&image_of(mapping, t.len(), b.ones())) {
                open = false;
                rep.witness(Counterexample::NotOpen {
                    topology: i + 1,
                    base_index: bi,
                });
            }
        }
        let mut cont = true;
        for (bi, b) in t.base().iter().enumerate() {
            let mut pre = WorldSet::with_capacity(s.len());
            pre.extend((0..s.len()).filter(|&x| b.contains(mapping[x])));
            if !s.is_open(&pre) {
                cont = false;
                rep.witness(Counterexample::NotContinuous {
                    topology: i + 1,
                    base_index: bi,
                });
            }
        }
        rep.open.push(open);
        rep.continuous.push(cont);
    }
    Ok(rep)
}

/// A frame whose relations are the reflexive-transitive closures of acyclic
/// generator graphs, such as a truncated tree. `gens[i][x]` lists the
/// generator successors of `x` for relation `i`.
#[derive(Clone, Debug)]
pub struct GeneratedFrame {
    pub names: Vec<String>,
    pub gens: Vec<Vec<Vec<World>>>,
}

impl GeneratedFrame {
    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn arity(&self) -> usize {
        self.gens.len()
    }

    pub fn generator_edges(&self) -> usize {
        self.gens.iter().flatten().map(Vec::len).sum()
    }

    /// The closed relations as an explicit frame.
    pub fn materialize(&self) -> Frame {
        let rels = self
            .gens
            .iter()
            .map(|g| Relation::from_successors(g.clone()).closure(crate::kripke::ClosureMode::Both))
            .collect();
        Frame::new(self.names.clone(), rels).expect("generated frame is well formed")
    }

    /// Points ordered so that generator edges go backwards.
    fn reverse_topological(&self) -> Result<Vec<World>, PmorphError> {
        let n = self.size();
        let mut indeg = vec![0usize; n];
        for g in &self.gens {
            for s in g {
                for &y in s {
                    indeg[y] += 1;
                }
            }
        }
        let mut order: Vec<World> = (0..n).filter(|&x| indeg[x] == 0).collect();
        let mut head = 0;
        while head < order.len() {
            let x = order[head];
            head += 1;
            for g in &self.gens {
                for &y in &g[x] {
                    indeg[y] -= 1;
                    if indeg[y] == 0 {
                        order.push(y);
                    }
                }
            }
        }
        if order.len() != n {
            return Err(PmorphError::PreconditionFailed(
                "generator graph has a cycle".into(),
            ));
        }
        order.reverse();
        Ok(order)
    }
}

/// A map out of a generated frame, with per-relation interior masks.
#[derive(Clone, Debug)]
pub struct GeneratedMap {
    pub source: GeneratedFrame,
    pub target: Frame,
    pub mapping: Vec<World>,
    pub interior: Vec<Vec<bool>>,
}

impl GeneratedMap {
    pub fn to_frame_map(&self) -> FrameMap {
        FrameMap {
            source: self.source.materialize(),
            target: self.target.clone(),
            mapping: self.mapping.clone(),
            interior: Some(self.interior.clone()),
        }
    }
}

/// [`check_pmorphism`] for a generated source without building the closures.
/// The target relations must be preorders, so monotonicity along generator
/// edges is monotonicity of the closure; the set `f(R(x))` is accumulated
/// from the generator successors in reverse topological order.
pub fn check_generated_pmorphism(m: &GeneratedMap) -> Result<MorphismReport, PmorphError> {
    let (src, tgt, f) = (&m.source, &m.target, &m.mapping);
    if src.arity() != tgt.arity() {
        return Err(PmorphError::ArityMismatch {
            source_arity: src.arity(),
            target_arity: tgt.arity(),
        });
    }
    if f.len() != src.size() || f.iter().any(|&y| y >= tgt.size()) {
        return Err(PmorphError::InvalidMap(
            "map is not total into the target".into(),
        ));
    }
    check_mask(&m.interior, src.arity(), src.size())?;
    if tgt.size() > 64 || !tgt.is_preorder_frame() {
        return Err(PmorphError::PreconditionFailed(
            "target must be a preorder frame of at most 64 worlds".into(),
        ));
    }
    let order = src.reverse_topological()?;
    let mut rep = MorphismReport::default();
    let hit = f.iter().fold(0u64, |acc, &y| acc | 1 << y);
    rep.surjective = hit.count_ones() as usize == tgt.size();
    for t in tgt.worlds().filter(|&t| hit >> t & 1 == 0) {
        rep.witness(Counterexample::NotSurjective {
            target: tgt.name(t).into(),
        });
    }
    rep.interior_points = (0..src.size())
        .filter(|&x| m.interior.iter().all(|mask| mask[x]))
        .count();
    rep.boundary_points = src.size() - rep.interior_points;
    let mut reach = vec![0u64; src.size()];
    for i in 0..src.arity() {
        let (gens, s) = (&src.gens[i], tgt.rel(i));
        let rows = s.masks();
        let mut mono = true;
        let mut lift = true;
        for &x in &order {
            let mut acc = 1u64 << f[x];
            for &y in &gens[x] {
                if !s.contains(f[x], f[y]) {
                    mono = false;
                    rep.witness(Counterexample::NotMonotone {
                        relation: i + 1,
                        x: src.names[x].clone(),
                        y: src.names[y].clone(),
                    });
                }
                acc |= reach[y];
            }
            reach[x] = acc;
            if m.interior[i][x] && rows[f[x]] & !acc != 0 {
                lift = false;
                let t = (rows[f[x]] & !acc).trailing_zeros() as usize;
                rep.witness(Counterexample::NoLift {
                    relation: i + 1,
                    x: src.names[x].clone(),
                    target: tgt.name(t).into(),
                });
            }
        }
        rep.monotone.push(mono);
        rep.lifting.push(lift);
    }
    Ok(rep)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransferViolation {
    pub formula: Formula,
    pub target_failure: crate::kripke::Validity,
}

/// Formulas valid on the source but refuted on the target. Requires a
/// verified p-morphism with no boundary points.
pub fn validity_transfer_probe(
    m: &FrameMap,
    formulas: &[Formula],
) -> Result<Vec<TransferViolation>, PmorphError> {
    let rep = check_pmorphism(m)?;
    if !rep.ok() || rep.boundary_points > 0 {
        return Err(PmorphError::PreconditionFailed(
            "map is not a verified p-morphism".into(),
        ));
    }
    let results: Vec<Option<TransferViolation>> = formulas
        .par_iter()
        .map(|f| -> Result<_, PmorphError> {
            if !frame_valid(&m.source, f)?.is_valid() {
                return Ok(None);
            }
            let t = frame_valid(&m.target, f)?;
            Ok((!t.is_valid()).then(|| TransferViolation {
                formula: f.clone(),
                target_failure: t,
            }))
        })
        .collect::<Result<_, _>>()?;
    Ok(results.into_iter().flatten().collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Agreement {
    pub pmorphism: bool,
    pub open_continuous: bool,
    /// Monotone against continuous, lifting against open.
    pub componentwise: bool,
}

impl Agreement {
    pub fn agree(&self) -> bool {
        self.pmorphism == self.open_continuous && self.componentwise
    }
}

/// Compares the relational verdict with the topological one on the
/// up-set topologies of two single-relation preorders.
pub fn alexandrov_agreement(m: &FrameMap) -> Result<Agreement, PmorphError> {
    for fr in [&m.source, &m.target] {
        if fr.arity() != 1 || !fr.rel(0).is_preorder() {
            return Err(PmorphError::PreconditionFailed(
                "both frames must be single preorders".into(),
            ));
        }
    }
    let rel = check_pmorphism(m)?;
    let s = alexandrov(&m.source).expect("preorder checked");
    let t = alexandrov(&m.target).expect("preorder checked");
    let top = check_open_continuous(&SpaceMap {
        source: s,
        target: t,
        mapping: m.mapping.clone(),
    })?;
    Ok(Agreement {
        pmorphism: rel.ok(),
        open_continuous: top.ok(),
        componentwise: rel.monotone[0] == top.continuous[0] && rel.lifting[0] == top.open[0],
    })
}

/// Coarsest partition refining `colouring` that is a bisimulation for every
/// relation, as a block index per world. Blocks are numbered by first
/// occurrence.
pub fn coarsest_bisimulation(fr: &Frame, colouring: &[usize]) -> Vec<usize> {
    let mut block = renumber(colouring);
    loop {
        let sigs: Vec<(usize, Vec<Vec<usize>>)> = fr
            .worlds()
            .map(|x| {
                let succ = fr
                    .relations()
                    .iter()
                    .map(|r| {
                        let mut b: Vec<usize> = r.succ(x).iter().map(|&y| block[y]).collect();
                        b.sort_unstable();
                        b.dedup();
                        b
                    })
                    .collect();
                (block[x], succ)
            })
            .collect();
        let mut ids = HashMap::new();
        let next: Vec<usize> = sigs
            .into_iter()
            .map(|s| {
                let k = ids.len();
                *ids.entry(s).or_insert(k)
            })
            .collect();
        let done = ids.len() == block.iter().max().map_or(0, |m| m + 1);
        block = next;
        if done {
            return block;
        }
    }
}

fn renumber(c: &[usize]) -> Vec<usize> {
    let mut ids = HashMap::new();
    c.iter()
        .map(|&v| {
            let k = ids.len();
            *ids.entry(v).or_insert(k)
        })
        .collect()
}

/// The quotient by [`coarsest_bisimulation`], a p-morphism onto its image.
pub fn bisimulation_quotient(fr: &Frame, colouring: &[usize]) -> FrameMap {
    let block = coarsest_bisimulation(fr, colouring);
    let k = block.iter().max().map_or(0, |m| m + 1);
    let rels = fr
        .relations()
        .iter()
        .map(|r| Relation::from_edges(k, r.edges().map(|(x, y)| (block[x], block[y]))))
        .collect();
    let mut names = vec![String::new(); k];
    for x in fr.worlds().rev() {
        names[block[x]] = format!("[{}]", fr.name(x));
    }
    let target = Frame::new(names, rels).expect("quotient frame");
    FrameMap {
        source: fr.clone(),
        target,
        mapping: block,
        interior: None,
    }
}
