//! The trees `T₂`, `T₂,₂` and `T₂,₂₊₂` cut at finite depth, the identities
//! of the primed relations, and covering maps onto finite frames.

mod cover;

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::kripke::{Frame, World};
use crate::pmorph::GeneratedFrame;

pub use cover::{
    build_covering_map, build_g_onto_l_frame, cover_t2, cover_t22, g_depths,
    min_surjective_depth_t2, min_surjective_depth_t22, mu, CoverState, GMap, TreeError,
};

/// Letters of `T₂,₂`. The `a`-letters drive the first relation, the
/// `b`-letters the second.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Letter {
    A1,
    A2,
    B1,
    B2,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::A1, Letter::A2, Letter::B1, Letter::B2];

    /// The two letters for relation `i` (0 or 1).
    pub fn pair(i: usize) -> [Letter; 2] {
        if i == 0 {
            [Letter::A1, Letter::A2]
        } else {
            [Letter::B1, Letter::B2]
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Letter::A1 => "a1",
            Letter::A2 => "a2",
            Letter::B1 => "b1",
            Letter::B2 => "b2",
        }
    }
}

/// A word over `{a1, a2, b1, b2}`.
pub type Word = Vec<Letter>;
/// A word over `{1, 2}`.
pub type BinWord = Vec<u8>;

pub fn render_word(w: &[Letter]) -> String {
    if w.is_empty() {
        "ε".into()
    } else {
        w.iter().map(|l| l.name()).collect()
    }
}

pub fn render_bin(w: &[u8]) -> String {
    if w.is_empty() {
        "ε".into()
    } else {
        w.iter().map(|d| char::from(b'0' + d)).collect()
    }
}

/// Upper part of a point of `T₂,₂₊₂`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Top {
    Root,
    Copy(BinWord),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TreePoint {
    pub base: Word,
    pub top: Top,
}

impl TreePoint {
    pub fn root(base: Word) -> Self {
        TreePoint {
            base,
            top: Top::Root,
        }
    }

    pub fn copy(base: Word, top: BinWord) -> Self {
        TreePoint {
            base,
            top: Top::Copy(top),
        }
    }
}

impl fmt::Display for TreePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.top {
            Top::Root => write!(f, "<{},root>", render_word(&self.base)),
            Top::Copy(b) => write!(f, "<{},{}>", render_word(&self.base), render_bin(b)),
        }
    }
}

/// A truncated tree: its points, an index, and the generator graph.
#[derive(Clone, Debug)]
pub struct TreeFrame<P> {
    pub points: Vec<P>,
    pub index: HashMap<P, World>,
    pub generated: GeneratedFrame,
}

impl<P: std::hash::Hash + Eq> TreeFrame<P> {
    pub fn size(&self) -> usize {
        self.points.len()
    }

    pub fn world(&self, p: &P) -> Option<World> {
        self.index.get(p).copied()
    }

    /// The closed relations as an explicit frame; only for small depths.
    pub fn frame(&self) -> Frame {
        self.generated.materialize()
    }
}

fn build<P: Clone + std::hash::Hash + Eq>(
    points: Vec<P>,
    names: Vec<String>,
    arity: usize,
    children: impl Fn(&P) -> Vec<Vec<P>>,
) -> TreeFrame<P> {
    let index: HashMap<P, World> = points
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, p)| (p, i))
        .collect();
    let mut gens = vec![vec![Vec::new(); points.len()]; arity];
    for (x, p) in points.iter().enumerate() {
        for (i, kids) in children(p).into_iter().enumerate() {
            gens[i][x] = kids.iter().map(|k| index[k]).collect();
        }
    }
    TreeFrame {
        points,
        index,
        generated: GeneratedFrame { names, gens },
    }
}

/// Words of length at most `d` over `alphabet`, by length and then in
/// alphabet order.
pub fn words_upto<T: Copy>(alphabet: &[T], d: usize) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..d {
        layer = layer
            .iter()
            .flat_map(|w: &Vec<T>| {
                alphabet.iter().map(move |&l| {
                    let mut v = w.clone();
                    v.push(l);
                    v
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

fn append<T: Copy>(w: &[T], l: T) -> Vec<T> {
    let mut v = w.to_vec();
    v.push(l);
    v
}

/// `{1,2}^{≤d}` under the prefix order.
pub fn gen_t2(d: usize) -> TreeFrame<BinWord> {
    let points = words_upto(&[1u8, 2], d);
    let names = points.iter().map(|w| render_bin(w)).collect();
    build(points, names, 1, |w| {
        vec![if w.len() < d {
            vec![append(w, 1), append(w, 2)]
        } else {
            vec![]
        }]
    })
}

/// Four-letter words of length at most `d`; the first relation appends
/// `a`-letters, the second `b`-letters.
pub fn gen_t22(d: usize) -> TreeFrame<Word> {
    let points = words_upto(&Letter::ALL, d);
    let names = points.iter().map(|w| render_word(w)).collect();
    build(points, names, 2, |w| {
        (0..2)
            .map(|i| {
                if w.len() < d {
                    Letter::pair(i).iter().map(|&l| append(w, l)).collect()
                } else {
                    vec![]
                }
            })
            .collect()
    })
}

/// `T₂,₂ × {root} ∪ T₂,₂ × T₂` with bases of length at most `d1` and copies of
/// `T₂` of depth `d2`. The first relation is generated by `a`-appends on the
/// root layer and `<a,root> → <a,ε>`; the second by `b`-appends on the root
/// layer and the prefix order inside each copy.
pub fn gen_t22p2(d1: usize, d2: usize) -> TreeFrame<TreePoint> {
    let copies = words_upto(&[1u8, 2], d2);
    let mut points = Vec::new();
    for a in words_upto(&Letter::ALL, d1) {
        points.push(TreePoint::root(a.clone()));
        for b in &copies {
            points.push(TreePoint::copy(a.clone(), b.clone()));
        }
    }
    let names = points.iter().map(|p| p.to_string()).collect();
    build(points, names, 2, |p| match &p.top {
        Top::Root => {
            let grow = |i: usize| -> Vec<TreePoint> {
                if p.base.len() < d1 {
                    Letter::pair(i)
                        .iter()
                        .map(|&l| TreePoint::root(append(&p.base, l)))
                        .collect()
                } else {
                    vec![]
                }
            };
            let mut r1 = grow(0);
            r1.push(TreePoint::copy(p.base.clone(), vec![]));
            vec![r1, grow(1)]
        }
        Top::Copy(b) => {
            let r2 = if b.len() < d2 {
                vec![
                    TreePoint::copy(p.base.clone(), append(b, 1)),
                    TreePoint::copy(p.base.clone(), append(b, 2)),
                ]
            } else {
                vec![]
            };
            vec![vec![], r2]
        }
    })
}

/// `{w·c | c ∈ letters*, |w·c| ≤ d}`.
fn extensions<T: Copy>(w: &[T], letters: &[T], d: usize) -> Vec<Vec<T>> {
    let mut out = vec![w.to_vec()];
    let mut i = 0;
    while i < out.len() {
        if out[i].len() < d {
            for &l in letters {
                let v = append(&out[i], l);
                out.push(v);
            }
        }
        i += 1;
    }
    out
}

/// Which of the four identities a failure belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Identity {
    /// `R′₁(<a,root>) = R₁(a) × {root, ε}`
    R1Root,
    /// `R′₁(<a,b>) = {<a,b>}`
    R1Copy,
    /// `R′₂(<a,root>) = R₂(a) × {root}`
    R2Root,
    /// `R′₂(<a,b>) = {a} × ⊑(b)`
    R2Copy,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityFailure {
    pub point: String,
    pub identity: Identity,
    pub expected: Vec<String>,
    pub found: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub d1: usize,
    pub d2: usize,
    pub interior_checks: usize,
    pub boundary_skipped: usize,
    pub failures: Vec<IdentityFailure>,
}

impl IdentityReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Compares the closed relations of `gen_t22p2(d1, d2)` with the right-hand
/// sides computed from the word definitions. A check is interior when the
/// truncation does not cut the right-hand side at its first step: the base
/// has length below `d1` for root points, the copy word length below `d2`
/// for the second relation on copies. The first relation on copies is never
/// cut.
pub fn check_rprime_identities(d1: usize, d2: usize) -> IdentityReport {
    let tree = gen_t22p2(d1, d2);
    let fr = tree.frame();
    let mut rep = IdentityReport {
        d1,
        d2,
        ..Default::default()
    };
    for (x, p) in tree.points.iter().enumerate() {
        let cases: Vec<(Identity, bool, Vec<TreePoint>)> = match &p.top {
            Top::Root => {
                let r1 = extensions(&p.base, &Letter::pair(0), d1);
                let r2 = extensions(&p.base, &Letter::pair(1), d1);
                let inside = p.base.len() < d1;
                vec![
                    (
                        Identity::R1Root,
                        inside,
                        r1.iter()
                            .flat_map(|a| {
                                [
                                    TreePoint::root(a.clone()),
                                    TreePoint::copy(a.clone(), vec![]),
                                ]
                            })
                            .collect(),
                    ),
                    (
                        Identity::R2Root,
                        inside,
                        r2.into_iter().map(TreePoint::root).collect(),
                    ),
                ]
            }
            Top::Copy(b) => vec![
                (Identity::R1Copy, true, vec![p.clone()]),
                (
                    Identity::R2Copy,
                    b.len() < d2,
                    extensions(b, &[1u8, 2], d2)
                        .into_iter()
                        .map(|c| TreePoint::copy(p.base.clone(), c))
                        .collect(),
                ),
            ],
        };
        for (id, interior, rhs) in cases {
            if !interior {
                rep.boundary_skipped += 1;
                continue;
            }
            rep.interior_checks += 1;
            let rel = fr.rel(matches!(id, Identity::R2Root | Identity::R2Copy) as usize);
            let mut expected: Vec<World> = rhs.iter().map(|q| tree.index[q]).collect();
            expected.sort_unstable();
            if rel.succ(x) != expected.as_slice() {
                let names = |v: &[World]| v.iter().map(|&w| fr.name(w).to_string()).collect();
                rep.failures.push(IdentityFailure {
                    point: p.to_string(),
                    identity: id,
                    expected: names(&expected),
                    found: names(rel.succ(x)),
                });
            }
        }
    }
    rep
}

/// The truncation `gen_t22p2(d1, d2)` as a frame of the logic: both
/// relations preorders, McKinsey on the first, and the mkduo witness at
/// every point. The witness of `<a,root>` is `<a,ε>` and every copy point is
/// its own witness, so no point needs a margin.
pub fn truncation_satisfies_l(d1: usize, d2: usize) -> bool {
    use crate::correspond::{mckinsey_fo, mkduo_fo};
    use crate::formula::Modality;
    let fr = gen_t22p2(d1, d2).frame();
    fr.is_preorder_frame()
        && mckinsey_fo(&fr, Modality::One).is_ok_and(|v| v.holds())
        && mkduo_fo(&fr).is_ok_and(|v| v.holds())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Modality;

    #[test]
    fn truncations_are_l_frames() {
        for (d1, d2) in [(0, 0), (1, 1), (2, 1), (1, 3)] {
            assert!(truncation_satisfies_l(d1, d2), "{d1},{d2}");
        }
    }

    #[test]
    fn t2_examples() {
        let t0 = gen_t2(0).frame();
        assert_eq!(t0.size(), 1);
        assert_eq!(t0.rel(0).edge_count(), 1);
        let t1 = gen_t2(1).frame();
        assert_eq!(t1.size(), 3);
        assert_eq!(t1.rel(0).edge_count(), 5);
        let t2 = gen_t2(2).frame();
        assert_eq!(t2.size(), 7);
        assert_eq!(t2.rel(0).edge_count(), 7 + 2 + 4 + 2 + 2);
    }

    #[test]
    fn t2_edge_count_matches_prefix_pairs() {
        let t = gen_t2(3);
        let fr = t.frame();
        let prefix_pairs = t
            .points
            .iter()
            .flat_map(|u| t.points.iter().map(move |v| (u, v)))
            .filter(|(u, v)| v.starts_with(u))
            .count();
        assert_eq!(fr.rel(0).edge_count(), prefix_pairs);
    }

    #[test]
    fn t22_examples() {
        let t = gen_t22(1);
        let fr = t.frame();
        assert_eq!(fr.size(), 5);
        let name_edges = |i: usize| {
            let mut v: Vec<(String, String)> = fr
                .rel(i)
                .edges()
                .filter(|(x, y)| x != y)
                .map(|(x, y)| (fr.name(x).to_string(), fr.name(y).to_string()))
                .collect();
            v.sort();
            v
        };
        assert_eq!(
            name_edges(0),
            [("ε".into(), "a1".into()), ("ε".into(), "a2".into())]
        );
        assert_eq!(
            name_edges(1),
            [("ε".into(), "b1".into()), ("ε".into(), "b2".into())]
        );
        assert!(fr.rel(0).is_reflexive() && fr.rel(1).is_reflexive());
        let t2 = gen_t22(2);
        let f2 = t2.frame();
        let w = |s: &[Letter]| t2.world(&s.to_vec()).unwrap();
        assert!(f2
            .rel(0)
            .contains(w(&[Letter::A1]), w(&[Letter::A1, Letter::A2])));
        assert!(!f2
            .rel(0)
            .contains(w(&[Letter::A1]), w(&[Letter::A1, Letter::B1])));
        assert!(f2
            .rel(1)
            .contains(w(&[Letter::A1]), w(&[Letter::A1, Letter::B1])));
    }

    #[test]
    fn t22p2_examples() {
        let t = gen_t22p2(0, 0);
        let fr = t.frame();
        assert_eq!(fr.size(), 2);
        assert_eq!(fr.names(), ["<ε,root>", "<ε,ε>"]);
        assert_eq!(
            fr.rel(0).edges().collect::<Vec<_>>(),
            [(0, 0), (0, 1), (1, 1)]
        );
        assert_eq!(fr.rel(1).edges().collect::<Vec<_>>(), [(0, 0), (1, 1)]);
        assert_eq!(gen_t22p2(1, 0).size(), 10);
        let t11 = gen_t22p2(1, 1);
        let f11 = t11.frame();
        let x = t11.world(&TreePoint::copy(vec![], vec![])).unwrap();
        let img: Vec<&str> = f11
            .r_image(x, Modality::Two)
            .unwrap()
            .ones()
            .map(|y| f11.name(y))
            .collect();
        assert_eq!(img, ["<ε,ε>", "<ε,1>", "<ε,2>"]);
    }

    #[test]
    fn literal_generator_items() {
        let t = gen_t22p2(2, 2);
        let fr = t.frame();
        let t22 = gen_t22(2).frame();
        let words = words_upto(&Letter::ALL, 2);
        for (i, a) in words.iter().enumerate() {
            for (j, a2) in words.iter().enumerate() {
                let ra = t.world(&TreePoint::root(a.clone())).unwrap();
                let rb = t.world(&TreePoint::root(a2.clone())).unwrap();
                for r in 0..2 {
                    if t22.rel(r).contains(i, j) {
                        assert!(fr.rel(r).contains(ra, rb));
                    }
                }
            }
            let root = t.world(&TreePoint::root(a.clone())).unwrap();
            let eps = t.world(&TreePoint::copy(a.clone(), vec![])).unwrap();
            assert!(fr.rel(0).contains(root, eps));
        }
        let bins = words_upto(&[1u8, 2], 2);
        for b in &bins {
            for b2 in bins.iter().filter(|b2| b2.starts_with(b)) {
                let x = t
                    .world(&TreePoint::copy(vec![Letter::B1], b.clone()))
                    .unwrap();
                let y = t
                    .world(&TreePoint::copy(vec![Letter::B1], b2.clone()))
                    .unwrap();
                assert!(fr.rel(1).contains(x, y));
            }
        }
    }

    #[test]
    fn identities_hold_at_small_depth() {
        for (d1, d2) in [(1, 1), (2, 2), (3, 2)] {
            assert!(check_rprime_identities(d1, d2).ok());
        }
        let root = check_rprime_identities(2, 2);
        assert!(root.ok(), "{:?}", root.failures);
        let r = check_rprime_identities(1, 1);
        assert!(r.ok());
        assert!(r.interior_checks > 0 && r.boundary_skipped > 0);
    }
}
