//! Finite Kripke frames with one or two relations, models, the truth
//! relation and frame validity.

mod eval;
mod generate;
mod io;
mod valid;

use std::collections::{BTreeMap, HashMap, VecDeque};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::correspond;
use crate::formula::Modality;

pub use eval::{extension, extensions, holds};
pub use generate::{
    canonical_code, canonical_pair, generate_frames, labeled_preorders, orbit_minimal,
    permutations, preorder_classes, FrameQuery, GenerateError, PreorderClass, SmallRel,
    MAX_DEDUP_SIZE, MAX_PREORDER_SIZE, MAX_RAW_SIZE,
};
pub use io::{FrameJson, ModelJson};
pub(crate) use valid::Program;
pub use valid::{frame_valid, frame_valid_with_cap, Validity, DEFAULT_BIT_CAP};

/// Index of a world inside its frame.
pub type World = usize;
pub type WorldSet = FixedBitSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KripkeError {
    #[error("unknown world {0}")]
    UnknownWorld(String),
    #[error("frame has no relation for modality {0}")]
    MissingRelation(u8),
    #[error("valuation search needs {bits} bits, cap is {cap}")]
    BudgetExceeded { bits: usize, cap: usize },
    #[error("invalid frame: {0}")]
    InvalidFrame(String),
}

pub type Result<T, E = KripkeError> = std::result::Result<T, E>;

/// Successor lists of one binary relation, each sorted and duplicate free.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Relation {
    succ: Vec<Vec<World>>,
}

impl Relation {
    pub fn empty(n: usize) -> Self {
        Relation {
            succ: vec![Vec::new(); n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Relation {
            succ: (0..n).map(|w| vec![w]).collect(),
        }
    }

    /// Builds from an edge list, dropping repeated edges.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (World, World)>) -> Self {
        let mut succ = vec![Vec::new(); n];
        for (x, y) in edges {
            succ[x].push(y);
        }
        for s in &mut succ {
            s.sort_unstable();
            s.dedup();
        }
        Relation { succ }
    }

    pub fn from_successors(mut succ: Vec<Vec<World>>) -> Self {
        for s in &mut succ {
            s.sort_unstable();
            s.dedup();
        }
        Relation { succ }
    }

    pub fn len(&self) -> usize {
        self.succ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.is_empty()
    }

    pub fn succ(&self, x: World) -> &[World] {
        &self.succ[x]
    }

    pub fn contains(&self, x: World, y: World) -> bool {
        self.succ[x].binary_search(&y).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = (World, World)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(x, s)| s.iter().map(move |&y| (x, y)))
    }

    pub fn image(&self, x: World) -> WorldSet {
        let mut s = WorldSet::with_capacity(self.len());
        s.extend(self.succ[x].iter().copied());
        s
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.len()).all(|x| self.contains(x, x))
    }

    pub fn is_transitive(&self) -> bool {
        (0..self.len()).all(|x| {
            self.succ[x]
                .iter()
                .all(|&y| self.succ[y].iter().all(|&z| self.contains(x, z)))
        })
    }

    pub fn is_preorder(&self) -> bool {
        self.is_reflexive() && self.is_transitive()
    }

    /// Worlds reachable from `x` in zero or more steps.
    pub fn reach(&self, x: World) -> Vec<World> {
        let mut seen = vec![false; self.len()];
        let mut stack = vec![x];
        seen[x] = true;
        while let Some(u) = stack.pop() {
            for &v in &self.succ[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        (0..self.len()).filter(|&v| seen[v]).collect()
    }

    pub fn closure(&self, mode: ClosureMode) -> Relation {
        let n = self.len();
        let succ = (0..n)
            .map(|x| {
                let mut s = match mode {
                    ClosureMode::Reflexive => self.succ[x].clone(),
                    ClosureMode::Transitive => {
                        // Strictly reachable: one or more steps.
                        let mut seen = vec![false; n];
                        let mut stack: Vec<World> = self.succ[x].clone();
                        for &y in &stack {
                            seen[y] = true;
                        }
                        while let Some(u) = stack.pop() {
                            for &v in &self.succ[u] {
                                if !seen[v] {
                                    seen[v] = true;
                                    stack.push(v);
                                }
                            }
                        }
                        (0..n).filter(|&v| seen[v]).collect()
                    }
                    ClosureMode::Both => self.reach(x),
                };
                if mode == ClosureMode::Reflexive {
                    s.push(x);
                }
                s
            })
            .collect();
        Relation::from_successors(succ)
    }

    /// Row bitmasks, one `u64` per world. Only for frames of at most 64 worlds.
    pub fn masks(&self) -> Vec<u64> {
        assert!(self.len() <= 64, "mask view needs at most 64 worlds");
        self.succ
            .iter()
            .map(|s| s.iter().fold(0u64, |m, &y| m | (1 << y)))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClosureMode {
    Reflexive,
    Transitive,
    Both,
}

/// A finite frame with named worlds and one or two relations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    names: Vec<String>,
    index: HashMap<String, World>,
    rels: Vec<Relation>,
}

impl Frame {
    /// Validating constructor used for external input.
    pub fn new(names: Vec<String>, rels: Vec<Relation>) -> Result<Self> {
        if names.is_empty() {
            return Err(KripkeError::InvalidFrame("no worlds".into()));
        }
        if rels.is_empty() || rels.len() > 2 {
            return Err(KripkeError::InvalidFrame(format!(
                "expected 1 or 2 relations, got {}",
                rels.len()
            )));
        }
        let mut index = HashMap::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(KripkeError::InvalidFrame(format!("duplicate world `{n}`")));
            }
        }
        for r in &rels {
            if r.len() != names.len() || r.succ.iter().flatten().any(|&y| y >= names.len()) {
                return Err(KripkeError::InvalidFrame("edge outside the carrier".into()));
            }
        }
        Ok(Frame { names, index, rels })
    }

    /// Worlds named `w0, w1, ...`.
    pub fn anonymous(rels: Vec<Relation>) -> Self {
        let n = rels[0].len();
        let names = (0..n).map(|i| format!("w{i}")).collect();
        Frame::new(names, rels).expect("well-formed anonymous frame")
    }

    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn arity(&self) -> usize {
        self.rels.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, w: World) -> &str {
        &self.names[w]
    }

    pub fn world(&self, name: &str) -> Option<World> {
        self.index.get(name).copied()
    }

    pub fn worlds(&self) -> std::ops::Range<World> {
        0..self.size()
    }

    pub fn relations(&self) -> &[Relation] {
        &self.rels
    }

    pub fn relation(&self, m: Modality) -> Result<&Relation> {
        self.rels
            .get(m.rel())
            .ok_or(KripkeError::MissingRelation(m.index()))
    }

    /// Relation by zero-based position; panics when absent.
    pub fn rel(&self, i: usize) -> &Relation {
        &self.rels[i]
    }

    pub fn check_world(&self, x: World) -> Result<()> {
        if x < self.size() {
            Ok(())
        } else {
            Err(KripkeError::UnknownWorld(x.to_string()))
        }
    }

    /// `{y | x R_i y}`.
    pub fn r_image(&self, x: World, m: Modality) -> Result<WorldSet> {
        self.check_world(x)?;
        Ok(self.relation(m)?.image(x))
    }

    /// Minimal superset of relation `m` with the requested property.
    pub fn closure(&self, m: Modality, mode: ClosureMode) -> Result<Frame> {
        let mut out = self.clone();
        let closed = self.relation(m)?.closure(mode);
        out.rels[m.rel()] = closed;
        Ok(out)
    }

    /// Closes every relation to a preorder.
    pub fn preorder_closure(&self) -> Frame {
        let mut out = self.clone();
        for r in &mut out.rels {
            *r = r.closure(ClosureMode::Both);
        }
        out
    }

    pub fn is_preorder_frame(&self) -> bool {
        self.rels.iter().all(Relation::is_preorder)
    }

    /// The first world (in index order) from which every world is reachable
    /// along the union of all relations.
    pub fn root(&self) -> Option<World> {
        let n = self.size();
        let union = Relation::from_successors(
            (0..n)
                .map(|x| {
                    self.rels
                        .iter()
                        .flat_map(|r| r.succ(x).iter().copied())
                        .collect()
                })
                .collect(),
        );
        (0..n).find(|&w| union.reach(w).len() == n)
    }

    pub fn is_rooted(&self) -> bool {
        self.root().is_some()
    }

    /// World indices sorted by name; the tie-break order used by constructions.
    pub fn canonical_order(&self) -> Vec<World> {
        let mut order: Vec<World> = self.worlds().collect();
        order.sort_by(|&a, &b| self.names[a].cmp(&self.names[b]));
        order
    }

    /// Successors of `x` in canonical order.
    pub fn sorted_succ(&self, m: Modality, x: World) -> Result<Vec<World>> {
        let mut s = self.relation(m)?.succ(x).to_vec();
        s.sort_by(|&a, &b| self.names[a].cmp(&self.names[b]));
        Ok(s)
    }

    /// Subframe on `keep` (kept in the given order) together with the
    /// old-to-new index map.
    pub fn restrict(&self, keep: &[World]) -> (Frame, Vec<Option<World>>) {
        let mut map = vec![None; self.size()];
        for (i, &w) in keep.iter().enumerate() {
            map[w] = Some(i);
        }
        let rels = self
            .rels
            .iter()
            .map(|r| {
                Relation::from_successors(
                    keep.iter()
                        .map(|&w| r.succ(w).iter().filter_map(|&y| map[y]).collect())
                        .collect(),
                )
            })
            .collect();
        let names = keep.iter().map(|&w| self.names[w].clone()).collect();
        (Frame::new(names, rels).expect("subframe"), map)
    }

    /// Renames worlds; the relation structure is unchanged.
    pub fn with_names(&self, names: Vec<String>) -> Result<Frame> {
        Frame::new(names, self.rels.clone())
    }

    pub fn to_json(&self) -> FrameJson {
        FrameJson::from_frame(self)
    }

    /// Graphviz rendering: solid edges for the first relation, dashed for the second.
    pub fn to_dot(&self, show_loops: bool) -> String {
        io::to_dot(self, show_loops)
    }
}

/// A frame together with a valuation of propositional letters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model {
    pub frame: Frame,
    pub valuation: BTreeMap<String, WorldSet>,
}

impl Model {
    pub fn new(frame: Frame) -> Self {
        Model {
            frame,
            valuation: BTreeMap::new(),
        }
    }

    pub fn with_valuation(frame: Frame, valuation: BTreeMap<String, Vec<World>>) -> Result<Self> {
        let n = frame.size();
        let mut out = BTreeMap::new();
        for (p, ws) in valuation {
            let mut set = WorldSet::with_capacity(n);
            for w in ws {
                frame.check_world(w)?;
                set.insert(w);
            }
            out.insert(p, set);
        }
        Ok(Model {
            frame,
            valuation: out,
        })
    }

    pub fn set(&mut self, p: &str, worlds: impl IntoIterator<Item = World>) {
        let mut s = WorldSet::with_capacity(self.frame.size());
        s.extend(worlds);
        self.valuation.insert(p.to_string(), s);
    }

    /// Extension of `p`; letters without an entry are false everywhere.
    pub fn letter(&self, p: &str) -> WorldSet {
        self.valuation
            .get(p)
            .cloned()
            .unwrap_or_else(|| WorldSet::with_capacity(self.frame.size()))
    }

    pub fn to_json(&self) -> ModelJson {
        ModelJson::from_model(self)
    }
}

/// Structural frame predicates used to carve out frame classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    Reflexive(Modality),
    Transitive(Modality),
    McKinsey(Modality),
    MkDuo,
    Rooted,
}

impl Condition {
    pub fn holds(self, fr: &Frame) -> bool {
        let rel = |m: Modality| fr.relation(m).ok();
        match self {
            Condition::Reflexive(m) => rel(m).is_some_and(Relation::is_reflexive),
            Condition::Transitive(m) => rel(m).is_some_and(Relation::is_transitive),
            Condition::McKinsey(m) => {
                rel(m).is_some()
                    && correspond::mckinsey_fo(fr, m)
                        .map(|v| v.holds())
                        .unwrap_or(false)
            }
            Condition::MkDuo => correspond::mkduo_fo(fr).map(|v| v.holds()).unwrap_or(false),
            Condition::Rooted => fr.is_rooted(),
        }
    }

    pub fn label(self) -> String {
        match self {
            Condition::Reflexive(m) => format!("reflexive({})", m.index()),
            Condition::Transitive(m) => format!("transitive({})", m.index()),
            Condition::McKinsey(m) => format!("mckinsey({})", m.index()),
            Condition::MkDuo => "mkduo".into(),
            Condition::Rooted => "rooted".into(),
        }
    }
}

/// A conjunction of frame conditions.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FrameConditionSet(pub Vec<Condition>);

impl FrameConditionSet {
    pub fn new(conds: impl IntoIterator<Item = Condition>) -> Self {
        let mut v: Vec<_> = conds.into_iter().collect();
        v.sort();
        v.dedup();
        FrameConditionSet(v)
    }

    pub fn preorder(m: Modality) -> [Condition; 2] {
        [Condition::Reflexive(m), Condition::Transitive(m)]
    }

    pub fn contains(&self, c: Condition) -> bool {
        self.0.contains(&c)
    }

    /// First failing condition, if any.
    pub fn first_failure(&self, fr: &Frame) -> Option<Condition> {
        self.0.iter().copied().find(|c| !c.holds(fr))
    }

    pub fn holds(&self, fr: &Frame) -> bool {
        self.first_failure(fr).is_none()
    }
}

/// Breadth-first distances from `from` along relation `rel`.
pub fn distances(rel: &Relation, from: World) -> Vec<Option<usize>> {
    let mut dist = vec![None; rel.len()];
    dist[from] = Some(0);
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        let du = dist[u].expect("queued worlds have a distance");
        for &v in rel.succ(u) {
            if dist[v].is_none() {
                dist[v] = Some(du + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}
