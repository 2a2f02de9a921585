//! Covering maps from truncated trees onto finite rooted preorder frames.
//!
//! A node carries a state `(w, j₁, j₂)`. For relation `i` the first letter
//! bumps `jᵢ` (modulo `|Rᵢ(w)|`) and clears the other counter; the second
//! letter moves to the `jᵢ`-th element of `Rᵢ(w)` in canonical order and
//! clears both. A node at depth `k` of a tree cut at `d` can reach every
//! `Rᵢ`-successor of its image when `d − k ≥ |Rᵢ(w)|`.

use std::collections::{HashSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use super::{gen_t2, gen_t22, gen_t22p2, BinWord, Top, TreeFrame, TreePoint, Word};
use crate::correspond::{mkduo_fo, FoVerdict};
use crate::formula::Modality;
use crate::kripke::{Frame, KripkeError, World};
use crate::pmorph::{check_generated_pmorphism, GeneratedMap, MorphismReport, PmorphError};

#[derive(Debug, Error)]
pub enum TreeError {
    #[error("target is not rooted at {0}")]
    NotRooted(String),
    #[error("target relations are not preorders")]
    NotPreorder,
    #[error("target has {0} worlds; at most 64 are supported")]
    TooLarge(usize),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error(transparent)]
    Kripke(#[from] KripkeError),
    #[error(transparent)]
    Pmorph(#[from] PmorphError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CoverState {
    pub world: World,
    pub counters: [usize; 2],
}

struct Machine {
    succ: Vec<Vec<Vec<World>>>,
}

impl Machine {
    fn new(target: &Frame) -> Result<Self, TreeError> {
        if !target.is_preorder_frame() {
            return Err(TreeError::NotPreorder);
        }
        if target.size() > 64 {
            return Err(TreeError::TooLarge(target.size()));
        }
        let succ = (0..target.arity())
            .map(|i| {
                let m = Modality::from_index(i as u8 + 1).expect("arity is 1 or 2");
                target
                    .worlds()
                    .map(|w| target.sorted_succ(m, w))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<_, _>>()?;
        Ok(Machine { succ })
    }

    fn start(w: World) -> CoverState {
        CoverState {
            world: w,
            counters: [0, 0],
        }
    }

    /// Relation `i`, letter `count` (first) or move (second).
    fn step(&self, s: CoverState, i: usize, mv: bool) -> CoverState {
        let row = &self.succ[i][s.world];
        if mv {
            Self::start(row[s.counters[i] % row.len()])
        } else {
            let mut counters = [0, 0];
            counters[i] = (s.counters[i] + 1) % row.len();
            CoverState {
                world: s.world,
                counters,
            }
        }
    }

    /// Letters used by the unimodal machine on relation `rel`, or all four.
    fn letters(&self, only: Option<usize>) -> Vec<(usize, bool)> {
        match only {
            Some(i) => vec![(i, false), (i, true)],
            None => vec![(0, false), (0, true), (1, false), (1, true)],
        }
    }

    fn min_depth(&self, root: World, only: Option<usize>, goal: &HashSet<World>) -> Option<usize> {
        let mut seen = HashSet::from([Self::start(root)]);
        let mut hit = HashSet::from([root]);
        let mut frontier = VecDeque::from([Self::start(root)]);
        let mut depth = 0;
        loop {
            if goal.iter().all(|w| hit.contains(w)) {
                return Some(depth);
            }
            let mut next = VecDeque::new();
            for s in frontier {
                for (i, mv) in self.letters(only) {
                    let t = self.step(s, i, mv);
                    if seen.insert(t) {
                        hit.insert(t.world);
                        next.push_back(t);
                    }
                }
            }
            if next.is_empty() {
                return None;
            }
            frontier = next;
            depth += 1;
        }
    }
}

fn check_root(target: &Frame, root: World, only: Option<usize>) -> Result<(), TreeError> {
    target.check_world(root)?;
    if only.is_some() {
        return Ok(());
    }
    let mut seen = HashSet::from([root]);
    let mut stack = vec![root];
    while let Some(x) = stack.pop() {
        for rel in target.relations() {
            for &y in rel.succ(x) {
                if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
    }
    if seen.len() != target.size() {
        return Err(TreeError::NotRooted(target.name(root).into()));
    }
    Ok(())
}

/// Least depth at which the `T₂,₂` machine started at `root` reaches every
/// world. `None` if some world is unreachable.
pub fn min_surjective_depth_t22(target: &Frame, root: World) -> Result<Option<usize>, TreeError> {
    if target.arity() != 2 {
        return Err(TreeError::PreconditionFailed(
            "bimodal target required".into(),
        ));
    }
    let m = Machine::new(target)?;
    check_root(target, root, None)?;
    Ok(m.min_depth(root, None, &target.worlds().collect()))
}

/// Least depth at which the `T₂` machine on relation `rel` started at `root`
/// reaches all of `R(root)`.
pub fn min_surjective_depth_t2(
    target: &Frame,
    rel: usize,
    root: World,
) -> Result<Option<usize>, TreeError> {
    let m = Machine::new(target)?;
    check_root(target, root, Some(rel))?;
    Ok(m.min_depth(
        root,
        Some(rel),
        &target.rel(rel).succ(root).iter().copied().collect(),
    ))
}

/// Runs the machine down a generated tree whose point 0 is the root and
/// whose `gens[i][x]` are `[count child, move child]`.
fn run(
    m: &Machine,
    gens: &[Vec<Vec<World>>],
    letters: &[(usize, usize)],
    root: World,
) -> Vec<CoverState> {
    let n = gens[0].len();
    let mut states = vec![Machine::start(root); n];
    let mut stack = vec![0];
    while let Some(x) = stack.pop() {
        for &(g, rel) in letters {
            for (k, &y) in gens[g][x].iter().enumerate() {
                states[y] = m.step(states[x], rel, k == 1);
                stack.push(y);
            }
        }
    }
    states
}

/// `T₂` cut at `depth` onto the `rel`-cone of `root`, as a map into the
/// unimodal frame on relation `rel` of `target`.
pub fn cover_t2(
    target: &Frame,
    rel: usize,
    root: World,
    depth: usize,
) -> Result<(TreeFrame<BinWord>, GeneratedMap), TreeError> {
    let m = Machine::new(target)?;
    check_root(target, root, Some(rel))?;
    let tree = gen_t2(depth);
    let states = run(&m, &tree.generated.gens, &[(0, rel)], root);
    let unimodal = Frame::new(target.names().to_vec(), vec![target.rel(rel).clone()])?;
    let keep = target.rel(rel).succ(root).to_vec();
    let (sub, back) = unimodal.restrict(&keep);
    let mapping = states
        .iter()
        .map(|s| back[s.world].expect("stays in cone"))
        .collect();
    let interior = vec![tree
        .points
        .iter()
        .zip(&states)
        .map(|(p, s)| depth - p.len() >= m.succ[rel][s.world].len())
        .collect()];
    let map = GeneratedMap {
        source: tree.generated.clone(),
        target: sub,
        mapping,
        interior,
    };
    Ok((tree, map))
}

/// `T₂,₂` cut at `depth` onto a rooted bimodal preorder frame.
pub fn cover_t22(
    target: &Frame,
    root: World,
    depth: usize,
) -> Result<(TreeFrame<Word>, GeneratedMap), TreeError> {
    if target.arity() != 2 {
        return Err(TreeError::PreconditionFailed(
            "bimodal target required".into(),
        ));
    }
    let m = Machine::new(target)?;
    check_root(target, root, None)?;
    let tree = gen_t22(depth);
    let states = run(&m, &tree.generated.gens, &[(0, 0), (1, 1)], root);
    let interior = (0..2)
        .map(|i| {
            tree.points
                .iter()
                .zip(&states)
                .map(|(p, s)| depth - p.len() >= m.succ[i][s.world].len())
                .collect()
        })
        .collect();
    let map = GeneratedMap {
        source: tree.generated.clone(),
        target: target.clone(),
        mapping: states.iter().map(|s| s.world).collect(),
        interior,
    };
    Ok((tree, map))
}

/// Covering map from the tree matching the target's arity (`T₂` or `T₂,₂`),
/// rooted at the target's first root.
pub fn build_covering_map(target: &Frame, depth: usize) -> Result<GeneratedMap, TreeError> {
    let root = target
        .root()
        .ok_or_else(|| TreeError::NotRooted("any world".into()))?;
    if target.arity() == 1 {
        if target.rel(0).succ(root).len() != target.size() {
            return Err(TreeError::NotRooted(target.name(root).into()));
        }
        Ok(cover_t2(target, 0, root, depth)?.1)
    } else {
        Ok(cover_t22(target, root, depth)?.1)
    }
}

/// The witness `μ(w)` for the mkduo condition at every world.
pub fn mu(target: &Frame) -> Result<Vec<World>, TreeError> {
    match mkduo_fo(target)? {
        FoVerdict::Holds { witness } => Ok(witness),
        FoVerdict::Fails { world } => Err(TreeError::PreconditionFailed(format!(
            "no mkduo witness at {}",
            target.name(world)
        ))),
    }
}

/// The map `g` from `T₂,₂₊₂` onto a rooted frame of the logic, together with
/// the tree and its depths.
#[derive(Clone, Debug)]
pub struct GMap {
    pub d1: usize,
    pub d2: usize,
    pub tree: TreeFrame<TreePoint>,
    pub map: GeneratedMap,
}

impl GMap {
    pub fn check(&self) -> Result<MorphismReport, TreeError> {
        Ok(check_generated_pmorphism(&self.map)?)
    }
}

/// Depths at which `g` is surjective: the least `d1` covering the target
/// with the `T₂,₂` machine, and the least `d2` covering every cone
/// `R₂(μ(w))` with the `T₂` machine.
pub fn g_depths(target: &Frame) -> Result<(usize, usize), TreeError> {
    let root = target
        .root()
        .ok_or_else(|| TreeError::NotRooted("any world".into()))?;
    let mu = mu(target)?;
    let d1 = min_surjective_depth_t22(target, root)?
        .ok_or_else(|| TreeError::NotRooted(target.name(root).into()))?;
    let mut d2 = 0;
    for w in target.worlds() {
        let d = min_surjective_depth_t2(target, 1, mu[w])?.expect("cone is reachable");
        d2 = d2.max(d);
    }
    Ok((d1, d2))
}

/// `g(<a,root>) = f(a)` and `g(<a,b>) = h_{f(a)}(b)`, where `f` covers the
/// target from its root and `h_w` covers `R₂(μ(w))` from `μ(w)`.
pub fn build_g_onto_l_frame(target: &Frame, d1: usize, d2: usize) -> Result<GMap, TreeError> {
    if target.arity() != 2 {
        return Err(TreeError::PreconditionFailed(
            "bimodal target required".into(),
        ));
    }
    let m = Machine::new(target)?;
    let root = target
        .root()
        .ok_or_else(|| TreeError::NotRooted("any world".into()))?;
    check_root(target, root, None)?;
    let mu = mu(target)?;
    let t22 = gen_t22(d1);
    let f = run(&m, &t22.generated.gens, &[(0, 0), (1, 1)], root);
    let t2 = gen_t2(d2);
    let h: Vec<Vec<CoverState>> = target
        .worlds()
        .map(|w| run(&m, &t2.generated.gens, &[(0, 1)], mu[w]))
        .collect();
    let tree = gen_t22p2(d1, d2);
    let mut mapping = Vec::with_capacity(tree.size());
    let mut interior = vec![
        Vec::with_capacity(tree.size()),
        Vec::with_capacity(tree.size()),
    ];
    // Points come as <a,root> followed by the copy of T₂ under a, in the
    // same orders as gen_t22 and gen_t2.
    for (x, p) in tree.points.iter().enumerate() {
        let a = x / (1 + t2.size());
        let fa = f[a].world;
        match &p.top {
            Top::Root => {
                mapping.push(fa);
                for (i, mask) in interior.iter_mut().enumerate() {
                    mask.push(d1 - p.base.len() >= m.succ[i][fa].len());
                }
            }
            Top::Copy(b) => {
                let y = h[fa][x % (1 + t2.size()) - 1].world;
                mapping.push(y);
                interior[0].push(true);
                interior[1].push(d2 - b.len() >= m.succ[1][y].len());
            }
        }
    }
    let map = GeneratedMap {
        source: tree.generated.clone(),
        target: target.clone(),
        mapping,
        interior,
    };
    Ok(GMap { d1, d2, tree, map })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::fixtures::{frame, point};
    use crate::kripke::{preorder_classes, Relation};

    fn closed(n: usize, edges: &[(World, World)]) -> Relation {
        Relation::from_edges(n, edges.iter().copied()).closure(crate::kripke::ClosureMode::Both)
    }

    fn unimodal(n: usize, edges: &[(World, World)]) -> Frame {
        Frame::anonymous(vec![closed(n, edges)])
    }

    fn bimodal(n: usize, r1: &[(World, World)], r2: &[(World, World)]) -> Frame {
        Frame::anonymous(vec![closed(n, r1), closed(n, r2)])
    }

    #[test]
    fn t2_cover_onto_chain_and_cluster() {
        for fr in [
            unimodal(2, &[(0, 1)]),
            unimodal(2, &[(0, 1), (1, 0)]),
            unimodal(3, &[(0, 1), (0, 2)]),
        ] {
            let d = min_surjective_depth_t2(&fr, 0, 0).unwrap().unwrap();
            let m = build_covering_map(&fr, d + 2).unwrap();
            let rep = check_generated_pmorphism(&m).unwrap();
            assert!(rep.ok(), "{:?}", rep.counterexamples);
            assert!(rep.interior_points > 0);
        }
    }

    #[test]
    fn t22_cover_onto_small_frames() {
        for fr in [
            point(),
            bimodal(2, &[(0, 1)], &[]),
            bimodal(2, &[(0, 1)], &[(1, 0)]),
            bimodal(3, &[(0, 1)], &[(0, 2)]),
        ] {
            let d = min_surjective_depth_t22(&fr, 0).unwrap().unwrap();
            let m = build_covering_map(&fr, d + 1).unwrap();
            let rep = check_generated_pmorphism(&m).unwrap();
            assert!(rep.ok(), "{:?}", rep.counterexamples);
        }
    }

    #[test]
    fn cover_is_pmorphism_on_all_rooted_three_point_frames() {
        let classes = preorder_classes(3);
        let mut tested = 0;
        for c1 in classes {
            for c2 in classes {
                let fr = frame_from(c1, c2);
                let Some(root) = fr.root() else { continue };
                let d = min_surjective_depth_t22(&fr, root).unwrap().unwrap();
                let m = cover_t22(&fr, root, d).unwrap().1;
                let rep = check_generated_pmorphism(&m).unwrap();
                assert!(rep.ok(), "{:?}", rep.counterexamples);
                tested += 1;
            }
        }
        assert!(tested > 0);
    }

    fn frame_from(c1: &crate::kripke::PreorderClass, c2: &crate::kripke::PreorderClass) -> Frame {
        Frame::anonymous(vec![c1.rel.to_relation(), c2.rel.to_relation()])
    }

    #[test]
    fn g_onto_point() {
        let g = build_g_onto_l_frame(&point(), 1, 1).unwrap();
        assert_eq!(g.tree.size(), 5 * 4);
        let rep = g.check().unwrap();
        assert!(rep.ok(), "{:?}", rep.counterexamples);
    }

    #[test]
    fn g_onto_small_l_frames() {
        // R₁ a chain onto a maximal point, R₂ a two-point cluster on top.
        let fr = bimodal(3, &[(0, 1), (0, 2)], &[(1, 2), (2, 1)]);
        let (d1, d2) = g_depths(&fr).unwrap();
        let g = build_g_onto_l_frame(&fr, d1 + 1, d2 + 1).unwrap();
        let rep = g.check().unwrap();
        assert!(rep.ok(), "{:?}", rep.counterexamples);
        assert!(rep.interior_points > 0);
    }

    #[test]
    fn g_sends_copies_above_x_to_m() {
        let fr = bimodal(2, &[(0, 1)], &[]);
        let g = build_g_onto_l_frame(&fr, 3, 2).unwrap();
        assert!(g.check().unwrap().ok());
        let t22 = super::super::gen_t22(3);
        let f = cover_t22(&fr, 0, 3).unwrap().1;
        for (x, p) in g.tree.points.iter().enumerate() {
            if let Top::Copy(_) = p.top {
                let a = t22.world(&p.base).unwrap();
                if f.mapping[a] == 0 {
                    assert_eq!(g.map.mapping[x], 1);
                }
            }
        }
    }

    #[test]
    fn g_rejects_frames_without_witness() {
        let bad = bimodal(2, &[(0, 1)], &[(1, 0)]);
        assert!(matches!(
            build_g_onto_l_frame(&bad, 1, 1),
            Err(TreeError::PreconditionFailed(_))
        ));
        let unrooted = bimodal(2, &[], &[]);
        assert!(matches!(
            build_g_onto_l_frame(&unrooted, 1, 1),
            Err(TreeError::NotRooted(_))
        ));
        let nonpre = frame(2, &[(0, 1)], Some(&[(0, 0), (1, 1)]));
        assert!(matches!(
            build_g_onto_l_frame(&nonpre, 1, 1),
            Err(TreeError::NotPreorder)
        ));
    }

    #[test]
    fn literal_depth_below_minimum_is_not_surjective() {
        let fr = bimodal(3, &[(0, 1), (0, 2)], &[]);
        let d = min_surjective_depth_t22(&fr, 0).unwrap().unwrap();
        assert!(d > 0);
        let m = cover_t22(&fr, 0, d - 1).unwrap().1;
        assert!(!check_generated_pmorphism(&m).unwrap().surjective);
    }

    #[test]
    fn names_in_tree_points() {
        let g = build_g_onto_l_frame(&point(), 0, 1).unwrap();
        let names: Vec<String> = g.tree.points.iter().map(|p| p.to_string()).collect();
        assert_eq!(names, ["<ε,root>", "<ε,ε>", "<ε,1>", "<ε,2>"]);
    }
}
