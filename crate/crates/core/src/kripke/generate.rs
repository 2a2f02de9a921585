//! Enumeration of small frames, optionally one per isomorphism class.
//!
//! Relations on at most 8 points are packed into [`SmallRel`]. Labeled
//! preorders of size `n` are grown from those of size `n - 1`: the new point
//! sees an up-set `U`, is seen by a down-set `D`, and `D × U` must already be
//! in the relation. Isomorphism classes are grown the same way from class
//! representatives and identified by their minimal code over all relabelings.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use itertools::Itertools;

use super::{Condition, Frame, FrameConditionSet, Relation};
use crate::formula::Modality;

/// Largest size for which arbitrary (non-preorder) relations are enumerated.
pub const MAX_RAW_SIZE: usize = 4;
/// Largest size for which labeled preorders are enumerated.
pub const MAX_PREORDER_SIZE: usize = 7;
/// Largest size with isomorphism dedup.
pub const MAX_DEDUP_SIZE: usize = 7;

const CANDIDATE_BUDGET: u128 = 1 << 28;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenerateError {
    #[error("empty size range")]
    EmptyRange,
    #[error("size {size} exceeds the enumeration limit {limit} for {what}")]
    TooLarge {
        size: usize,
        limit: usize,
        what: &'static str,
    },
    #[error("{0} candidate frames of size {1} exceed the enumeration budget")]
    Budget(u128, usize),
    #[error("arity must be 1 or 2, got {0}")]
    Arity(usize),
}

/// A binary relation on `{0..n}` with `n ≤ 8`, one byte per row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SmallRel {
    n: u8,
    rows: [u8; 8],
}

impl SmallRel {
    pub fn empty(n: usize) -> Self {
        assert!(n <= 8);
        SmallRel {
            n: n as u8,
            rows: [0; 8],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut r = SmallRel::empty(n);
        for i in 0..n {
            r.rows[i] = 1 << i;
        }
        r
    }

    /// Inverse of [`SmallRel::code`].
    pub fn from_code(n: usize, code: u64) -> Self {
        let mut r = SmallRel::empty(n);
        for i in 0..n {
            r.rows[i] = ((code >> (i * n)) & ((1 << n) - 1)) as u8;
        }
        r
    }

    pub fn from_relation(rel: &Relation) -> Option<Self> {
        if rel.len() > 8 {
            return None;
        }
        let mut r = SmallRel::empty(rel.len());
        for (x, y) in rel.edges() {
            r.set(x, y);
        }
        Some(r)
    }

    pub fn to_relation(&self) -> Relation {
        Relation::from_edges(self.len(), self.edges())
    }

    pub fn len(&self) -> usize {
        self.n as usize
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Bit `i·n + j` is set iff `i R j`.
    pub fn code(&self) -> u64 {
        let n = self.len();
        (0..n).fold(0u64, |c, i| c | (self.rows[i] as u64) << (i * n))
    }

    pub fn row(&self, i: usize) -> u8 {
        self.rows[i]
    }

    pub fn rows(&self) -> &[u8] {
        &self.rows[..self.len()]
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.rows[i] >> j & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize) {
        self.rows[i] |= 1 << j;
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.len();
        (0..n).flat_map(move |i| {
            (0..n)
                .filter(move |&j| self.contains(i, j))
                .map(move |j| (i, j))
        })
    }

    /// Image under the relabeling `i ↦ perm[i]`.
    pub fn permute(&self, perm: &[u8]) -> SmallRel {
        let mut out = SmallRel::empty(self.len());
        for i in 0..self.len() {
            let mut row = self.rows[i];
            let mut img = 0u8;
            while row != 0 {
                let j = row.trailing_zeros() as usize;
                img |= 1 << perm[j];
                row &= row - 1;
            }
            out.rows[perm[i] as usize] = img;
        }
        out
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.len()).all(|i| self.contains(i, i))
    }

    pub fn is_transitive(&self) -> bool {
        (0..self.len()).all(|i| {
            let mut row = self.rows[i];
            while row != 0 {
                let j = row.trailing_zeros() as usize;
                if self.rows[j] & !self.rows[i] != 0 {
                    return false;
                }
                row &= row - 1;
            }
            true
        })
    }

    /// `R(i) = {i}`.
    pub fn is_singleton(&self, i: usize) -> bool {
        self.rows[i] == 1 << i
    }

    /// Adds a new last point seeing `up` and seen by `down`.
    fn extend(&self, up: u8, down: u8) -> SmallRel {
        let n = self.len();
        let mut out = *self;
        out.n += 1;
        out.rows[n] = up | 1 << n;
        for i in 0..n {
            if down >> i & 1 == 1 {
                out.rows[i] |= 1 << n;
            }
        }
        out
    }

    /// All preorder extensions by one point.
    fn preorder_extensions(&self) -> impl Iterator<Item = SmallRel> + '_ {
        let n = self.len();
        let full: u16 = 1 << n;
        let up_sets: Vec<u8> = (0..full)
            .map(|m| m as u8)
            .filter(|&m| (0..n).all(|i| m >> i & 1 == 0 || self.rows[i] & !m == 0))
            .collect();
        let down_sets: Vec<u8> = (0..full)
            .map(|m| m as u8)
            .filter(|&m| {
                (0..n).all(|i| {
                    m >> i & 1 == 0 || (0..n).all(|j| !self.contains(j, i) || m >> j & 1 == 1)
                })
            })
            .collect();
        up_sets
            .into_iter()
            .cartesian_product(down_sets)
            .filter(move |&(u, d)| (0..n).all(|i| d >> i & 1 == 0 || self.rows[i] & u == u))
            .map(move |(u, d)| self.extend(u, d))
    }
}

/// All permutations of `0..n` as byte arrays, in lexicographic order.
pub fn permutations(n: usize) -> &'static [Vec<u8>] {
    static CACHE: [OnceLock<Vec<Vec<u8>>>; 9] = [const { OnceLock::new() }; 9];
    CACHE[n].get_or_init(|| (0..n as u8).permutations(n).collect())
}

/// Minimal code over all relabelings.
pub fn canonical_code(r: &SmallRel) -> u64 {
    permutations(r.len())
        .iter()
        .map(|p| r.permute(p).code())
        .min()
        .unwrap_or(0)
}

/// Minimal `(code r1, code r2)` over all relabelings.
pub fn canonical_pair(r1: &SmallRel, r2: &SmallRel) -> (u64, u64) {
    permutations(r1.len())
        .iter()
        .map(|p| (r1.permute(p).code(), r2.permute(p).code()))
        .min()
        .unwrap_or((0, 0))
}

/// Labeled preorders on `n` points in a fixed deterministic order.
pub fn labeled_preorders(n: usize) -> &'static [SmallRel] {
    assert!(
        n <= MAX_PREORDER_SIZE,
        "labeled preorders only up to {MAX_PREORDER_SIZE} points"
    );
    static CACHE: [OnceLock<Vec<SmallRel>>; MAX_PREORDER_SIZE + 1] =
        [const { OnceLock::new() }; MAX_PREORDER_SIZE + 1];
    CACHE[n].get_or_init(|| {
        if n == 0 {
            return vec![SmallRel::empty(0)];
        }
        labeled_preorders(n - 1)
            .iter()
            .flat_map(|r| r.preorder_extensions().collect::<Vec<_>>())
            .collect()
    })
}

/// An isomorphism class of preorders: the canonical representative and its
/// automorphism group.
#[derive(Clone, Debug)]
pub struct PreorderClass {
    pub rel: SmallRel,
    pub aut: Vec<Vec<u8>>,
}

fn automorphisms(r: &SmallRel) -> Vec<Vec<u8>> {
    permutations(r.len())
        .iter()
        .filter(|p| r.permute(p) == *r)
        .cloned()
        .collect()
}

/// Unlabeled preorders on `n` points, sorted by canonical code.
pub fn preorder_classes(n: usize) -> &'static [PreorderClass] {
    assert!(
        n <= MAX_DEDUP_SIZE,
        "preorder classes only up to {MAX_DEDUP_SIZE} points"
    );
    static CACHE: [OnceLock<Vec<PreorderClass>>; MAX_DEDUP_SIZE + 1] =
        [const { OnceLock::new() }; MAX_DEDUP_SIZE + 1];
    CACHE[n].get_or_init(|| {
        if n == 0 {
            return vec![PreorderClass {
                rel: SmallRel::empty(0),
                aut: vec![vec![]],
            }];
        }
        let codes: BTreeSet<u64> = preorder_classes(n - 1)
            .iter()
            .flat_map(|c| c.rel.preorder_extensions().collect::<Vec<_>>())
            .map(|r| canonical_code(&r))
            .collect();
        codes
            .into_iter()
            .map(|c| {
                let rel = SmallRel::from_code(n, c);
                PreorderClass {
                    aut: automorphisms(&rel),
                    rel,
                }
            })
            .collect()
    })
}

/// Whether `r` has the least code in its orbit under `group`.
pub fn orbit_minimal(r: &SmallRel, group: &[Vec<u8>]) -> bool {
    let c = r.code();
    group.iter().all(|p| r.permute(p).code() >= c)
}

/// Parameters of a frame enumeration.
#[derive(Clone, Debug)]
pub struct FrameQuery {
    pub min_size: usize,
    pub max_size: usize,
    pub conditions: FrameConditionSet,
    pub dedup: bool,
    pub arity: usize,
}

impl FrameQuery {
    /// Bimodal frames with `1 ≤ |W| ≤ n`.
    pub fn up_to(n: usize) -> Self {
        FrameQuery {
            min_size: 1,
            max_size: n,
            conditions: FrameConditionSet::default(),
            dedup: false,
            arity: 2,
        }
    }

    /// Bimodal frames with `|W| = n`.
    pub fn exactly(n: usize) -> Self {
        FrameQuery {
            min_size: n,
            ..FrameQuery::up_to(n)
        }
    }

    pub fn conditions(mut self, conds: impl IntoIterator<Item = Condition>) -> Self {
        self.conditions = FrameConditionSet::new(conds);
        self
    }

    pub fn dedup(mut self, dedup: bool) -> Self {
        self.dedup = dedup;
        self
    }

    pub fn arity(mut self, arity: usize) -> Self {
        self.arity = arity;
        self
    }
}

enum Pool {
    Preorders(&'static [SmallRel]),
    Raw(usize),
}

impl Pool {
    fn len(&self) -> u128 {
        match self {
            Pool::Preorders(v) => v.len() as u128,
            Pool::Raw(n) => 1u128 << (n * n),
        }
    }

    fn iter(&self, n: usize) -> Box<dyn Iterator<Item = SmallRel> + '_> {
        match self {
            Pool::Preorders(v) => Box::new(v.iter().copied()),
            Pool::Raw(_) => Box::new((0..1u64 << (n * n)).map(move |c| SmallRel::from_code(n, c))),
        }
    }
}

fn pool(n: usize, conds: &FrameConditionSet, m: Modality) -> Result<Pool, GenerateError> {
    if FrameConditionSet::preorder(m)
        .iter()
        .all(|&c| conds.contains(c))
    {
        if n > MAX_PREORDER_SIZE {
            return Err(GenerateError::TooLarge {
                size: n,
                limit: MAX_PREORDER_SIZE,
                what: "preorders",
            });
        }
        Ok(Pool::Preorders(labeled_preorders(n)))
    } else if n > MAX_RAW_SIZE {
        Err(GenerateError::TooLarge {
            size: n,
            limit: MAX_RAW_SIZE,
            what: "arbitrary relations",
        })
    } else {
        Ok(Pool::Raw(n))
    }
}

fn to_frame(rels: &[SmallRel]) -> Frame {
    Frame::anonymous(rels.iter().map(SmallRel::to_relation).collect())
}

/// Every frame matching the query, in a deterministic order: by size, then
/// by the enumeration order of the first and second relation. With dedup
/// the first relation is a canonical class representative and the second is
/// minimal in its orbit under the automorphisms of the first.
pub fn generate_frames(q: &FrameQuery) -> Result<Vec<Frame>, GenerateError> {
    if q.arity == 0 || q.arity > 2 {
        return Err(GenerateError::Arity(q.arity));
    }
    if q.min_size > q.max_size || q.max_size == 0 {
        return Err(GenerateError::EmptyRange);
    }
    if q.dedup && q.max_size > MAX_DEDUP_SIZE {
        return Err(GenerateError::TooLarge {
            size: q.max_size,
            limit: MAX_DEDUP_SIZE,
            what: "isomorphism dedup",
        });
    }
    let mut out = Vec::new();
    for n in q.min_size.max(1)..=q.max_size {
        let pools: Vec<Pool> = Modality::BOTH[..q.arity]
            .iter()
            .map(|&m| pool(n, &q.conditions, m))
            .collect::<Result<_, _>>()?;
        let total: u128 = pools.iter().map(Pool::len).product();
        if total > CANDIDATE_BUDGET {
            return Err(GenerateError::Budget(total, n));
        }
        let firsts: Vec<(SmallRel, Vec<Vec<u8>>)> = match (&pools[0], q.dedup) {
            (Pool::Preorders(_), true) => preorder_classes(n)
                .iter()
                .map(|c| (c.rel, c.aut.clone()))
                .collect(),
            (p, true) => p
                .iter(n)
                .filter(|r| canonical_code(r) == r.code())
                .map(|r| (r, automorphisms(&r)))
                .collect(),
            (p, false) => p.iter(n).map(|r| (r, vec![])).collect(),
        };
        for (r1, aut) in &firsts {
            if q.arity == 1 {
                let fr = to_frame(&[*r1]);
                if q.conditions.holds(&fr) {
                    out.push(fr);
                }
                continue;
            }
            for r2 in pools[1].iter(n) {
                if q.dedup && !orbit_minimal(&r2, aut) {
                    continue;
                }
                let fr = to_frame(&[*r1, r2]);
                if q.conditions.holds(&fr) {
                    out.push(fr);
                }
            }
        }
    }
    Ok(out)
}
