//! Finite topological and bitopological spaces given by a base, interior
//! semantics, and the path spaces at finite truncation.

mod paths;
mod product;
mod verify;

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::formula::{Formula, Modality};
use crate::kripke::{Frame, WorldSet};

pub use paths::{
    big_f, f_f, f_omega, g_interleave, g_interleave_literal, g_preimage, in_u_k, in_u_prime,
    space_x_truncated, space_y_truncated, st, truncated_paths, truncated_x_points, PseudoPath,
    XPoint,
};
pub use product::{alexandrov_catalogue, product_axl_check, ProductFailure, ProductReport};
pub use verify::{check_g_pmorphism, verify_big_f, Obligation, ObligationReport, SpatialReport};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TopoError {
    #[error("relation is not a preorder")]
    NotPreorder,
    #[error("invalid base: {0}")]
    InvalidBase(String),
    #[error("digit {0} is not in {{0,1,2}}")]
    InvalidDigit(u8),
    #[error("unknown point {0}")]
    UnknownPoint(String),
    #[error("space has no topology for modality {0}")]
    MissingTopology(u8),
}

/// A finite space presented by a base. Points are `0..len`, with labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TopSpace {
    labels: Vec<String>,
    base: Vec<WorldSet>,
    /// Least open neighbourhood of each point.
    nbhd: Vec<WorldSet>,
}

impl TopSpace {
    /// Checks that the sets cover the carrier and form a base.
    pub fn new(labels: Vec<String>, base: Vec<WorldSet>) -> Result<Self, TopoError> {
        let n = labels.len();
        if n == 0 {
            return Err(TopoError::InvalidBase("empty carrier".into()));
        }
        let mut base = base;
        for b in &mut base {
            if b.ones().any(|x| x >= n) {
                return Err(TopoError::InvalidBase(
                    "base element outside the carrier".into(),
                ));
            }
            b.grow(n);
        }
        let mut nbhd = Vec::with_capacity(n);
        for x in 0..n {
            let mut acc: Option<WorldSet> = None;
            for b in base.iter().filter(|b| b.contains(x)) {
                match &mut acc {
                    None => acc = Some(b.clone()),
                    Some(a) => a.intersect_with(b),
                }
            }
            let Some(a) = acc else {
                return Err(TopoError::InvalidBase(format!(
                    "point {} is in no base element",
                    labels[x]
                )));
            };
            let size = a.count_ones(..);
            if !base
                .iter()
                .any(|b| b.contains(x) && b.count_ones(..) == size)
            {
                return Err(TopoError::InvalidBase(format!(
                    "intersection of base elements around {} is not a union of base elements",
                    labels[x]
                )));
            }
            nbhd.push(a);
        }
        Ok(TopSpace { labels, base, nbhd })
    }

    pub fn discrete(labels: Vec<String>) -> Self {
        let n = labels.len();
        let base = (0..n).map(|x| singleton(n, x)).collect();
        TopSpace::new(labels, base).expect("singletons form a base")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn base(&self) -> &[WorldSet] {
        &self.base
    }

    /// The least open set containing `x`.
    pub fn neighbourhood(&self, x: usize) -> &WorldSet {
        &self.nbhd[x]
    }

    pub fn is_open(&self, s: &WorldSet) -> bool {
        s.ones().all(|x| self.nbhd[x].is_subset(s))
    }

    /// Union of the base elements inside `s`.
    pub fn interior(&self, s: &WorldSet) -> WorldSet {
        let mut out = WorldSet::with_capacity(self.len());
        out.extend((0..self.len()).filter(|&x| self.nbhd[x].is_subset(s)));
        out
    }

    pub fn closure(&self, s: &WorldSet) -> WorldSet {
        let mut out = WorldSet::with_capacity(self.len());
        out.extend((0..self.len()).filter(|&x| !self.nbhd[x].is_disjoint(s)));
        out
    }

    /// Whether every two base elements are nested or disjoint.
    pub fn nested_or_disjoint(&self) -> bool {
        self.base.iter().enumerate().all(|(i, a)| {
            self.base[i + 1..]
                .iter()
                .all(|b| a.is_disjoint(b) || a.is_subset(b) || b.is_subset(a))
        })
    }

    /// Truth under the interior reading of `[]1`; `[]2` is an error.
    pub fn holds(
        &self,
        valuation: &BTreeMap<String, WorldSet>,
        x: usize,
        f: &Formula,
    ) -> Result<bool, TopoError> {
        check_point(self.len(), x)?;
        Ok(extension(self.len(), &[self], valuation, f)?.contains(x))
    }
}

fn singleton(n: usize, x: usize) -> WorldSet {
    let mut s = WorldSet::with_capacity(n);
    s.insert(x);
    s
}

fn check_point(n: usize, x: usize) -> Result<(), TopoError> {
    if x < n {
        Ok(())
    } else {
        Err(TopoError::UnknownPoint(x.to_string()))
    }
}

/// A carrier with a horizontal and a vertical topology.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiTopSpace {
    pub h: TopSpace,
    pub v: TopSpace,
}

impl BiTopSpace {
    pub fn new(h: TopSpace, v: TopSpace) -> Result<Self, TopoError> {
        if h.labels != v.labels {
            return Err(TopoError::InvalidBase(
                "topologies on different carriers".into(),
            ));
        }
        Ok(BiTopSpace { h, v })
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    pub fn topology(&self, m: Modality) -> &TopSpace {
        match m {
            Modality::One => &self.h,
            Modality::Two => &self.v,
        }
    }

    pub fn extension(
        &self,
        valuation: &BTreeMap<String, WorldSet>,
        f: &Formula,
    ) -> Result<WorldSet, TopoError> {
        extension(self.len(), &[&self.h, &self.v], valuation, f)
    }
}

fn extension<'a>(
    n: usize,
    tops: &[&TopSpace],
    valuation: &BTreeMap<String, WorldSet>,
    f: &'a Formula,
) -> Result<WorldSet, TopoError> {
    fn go<'a>(
        n: usize,
        tops: &[&TopSpace],
        val: &BTreeMap<String, WorldSet>,
        f: &'a Formula,
        memo: &mut HashMap<&'a Formula, WorldSet>,
    ) -> Result<WorldSet, TopoError> {
        if let Some(s) = memo.get(f) {
            return Ok(s.clone());
        }
        let top = |m: Modality| {
            tops.get(m.rel())
                .copied()
                .ok_or(TopoError::MissingTopology(m.index()))
        };
        let complement = |mut s: WorldSet| {
            s.toggle_range(..);
            s
        };
        let out = match f {
            Formula::Bottom => WorldSet::with_capacity(n),
            Formula::Top => complement(WorldSet::with_capacity(n)),
            Formula::Var(p) => {
                let mut s = val.get(p).cloned().unwrap_or_default();
                s.grow(n);
                s
            }
            Formula::Not(a) => complement(go(n, tops, val, a, memo)?),
            Formula::And(a, b) => {
                let mut s = go(n, tops, val, a, memo)?;
                s.intersect_with(&go(n, tops, val, b, memo)?);
                s
            }
            Formula::Or(a, b) => {
                let mut s = go(n, tops, val, a, memo)?;
                s.union_with(&go(n, tops, val, b, memo)?);
                s
            }
            Formula::Implies(a, b) => {
                let mut s = complement(go(n, tops, val, a, memo)?);
                s.union_with(&go(n, tops, val, b, memo)?);
                s
            }
            Formula::Box(m, a) => top(*m)?.interior(&go(n, tops, val, a, memo)?),
            Formula::Diamond(m, a) => top(*m)?.closure(&go(n, tops, val, a, memo)?),
        };
        memo.insert(f, out.clone());
        Ok(out)
    }
    go(n, tops, valuation, f, &mut HashMap::new())
}

/// `x ⊨ f` where `[]1` is read through the horizontal topology and `[]2`
/// through the vertical one.
pub fn topo_holds(
    space: &BiTopSpace,
    valuation: &BTreeMap<String, WorldSet>,
    x: usize,
    f: &Formula,
) -> Result<bool, TopoError> {
    check_point(space.len(), x)?;
    Ok(space.extension(valuation, f)?.contains(x))
}

/// The up-set topology of a single preorder, with base `{R(x)}` in world order.
pub fn alexandrov(fr: &Frame) -> Result<TopSpace, TopoError> {
    if fr.arity() != 1 || !fr.rel(0).is_preorder() {
        return Err(TopoError::NotPreorder);
    }
    let base = fr.worlds().map(|x| fr.rel(0).image(x)).collect();
    TopSpace::new(fr.names().to_vec(), base)
}

/// Both relations of a birelational preorder frame as up-set topologies.
pub fn alexandrov2(fr: &Frame) -> Result<BiTopSpace, TopoError> {
    if fr.arity() != 2 || !fr.is_preorder_frame() {
        return Err(TopoError::NotPreorder);
    }
    let top = |i: usize| {
        let base = fr.worlds().map(|x| fr.rel(i).image(x)).collect();
        TopSpace::new(fr.names().to_vec(), base)
    };
    BiTopSpace::new(top(0)?, top(1)?)
}

/// Index of `(a, b)` in the product carrier.
pub fn product_index(b_len: usize, a: usize, b: usize) -> usize {
    a * b_len + b
}

/// The bitopological product. The carrier is ordered row-major, `(a, b)` at
/// `a·|X₂| + b`. The horizontal base lists `U × {b}` for each base element
/// `U` of `x1` (outer) and each `b` (inner); the vertical base lists
/// `{a} × V` for each `a` (outer) and each base element `V` of `x2` (inner).
pub fn bitop_product(x1: &TopSpace, x2: &TopSpace) -> BiTopSpace {
    let (n1, n2) = (x1.len(), x2.len());
    let labels: Vec<String> = (0..n1)
        .flat_map(|a| (0..n2).map(move |b| (a, b)))
        .map(|(a, b)| format!("({},{})", x1.label(a), x2.label(b)))
        .collect();
    let n = labels.len();
    let mut hb = Vec::new();
    for u in x1.base() {
        for b in 0..n2 {
            let mut s = WorldSet::with_capacity(n);
            s.extend(u.ones().map(|a| product_index(n2, a, b)));
            hb.push(s);
        }
    }
    let mut vb = Vec::new();
    for a in 0..n1 {
        for v in x2.base() {
            let mut s = WorldSet::with_capacity(n);
            s.extend(v.ones().map(|b| product_index(n2, a, b)));
            vb.push(s);
        }
    }
    let h = TopSpace::new(labels.clone(), hb).expect("product of bases is a base");
    let v = TopSpace::new(labels, vb).expect("product of bases is a base");
    BiTopSpace { h, v }
}

/// `{x | {x} is open}`.
pub fn isolated_points(space: &TopSpace) -> WorldSet {
    let mut out = WorldSet::with_capacity(space.len());
    out.extend((0..space.len()).filter(|&x| space.nbhd[x].count_ones(..) == 1));
    out
}

/// Every nonempty base element meets the isolated points.
pub fn is_weakly_scattered(space: &TopSpace) -> bool {
    let iso = isolated_points(space);
    space
        .base
        .iter()
        .all(|b| b.is_clear() || !b.is_disjoint(&iso))
}

/// Serializable summary of a space.
#[derive(Clone, Debug, Serialize)]
pub struct SpaceSummary {
    pub points: usize,
    pub base_size: usize,
    pub isolated: usize,
    pub weakly_scattered: bool,
    pub nested_or_disjoint: bool,
}

impl SpaceSummary {
    pub fn of(space: &TopSpace) -> Self {
        SpaceSummary {
            points: space.len(),
            base_size: space.base().len(),
            isolated: isolated_points(space).count_ones(..),
            weakly_scattered: is_weakly_scattered(space),
            nested_or_disjoint: space.nested_or_disjoint(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::kripke::fixtures::*;

    fn sets(s: &TopSpace) -> Vec<Vec<usize>> {
        s.base().iter().map(|b| b.ones().collect()).collect()
    }

    #[test]
    fn alexandrov_examples() {
        let p = alexandrov(&frame(1, &[(0, 0)], None)).unwrap();
        assert_eq!(sets(&p), [vec![0]]);
        let c = alexandrov(&chain2()).unwrap();
        assert_eq!(sets(&c), [vec![0, 1], vec![1]]);
        let k = alexandrov(&cluster2()).unwrap();
        assert_eq!(sets(&k), [vec![0, 1], vec![0, 1]]);
        assert_eq!(isolated_points(&k).count_ones(..), 0);
        assert!(matches!(
            alexandrov(&frame(2, &[(0, 1)], None)),
            Err(TopoError::NotPreorder)
        ));
    }

    #[test]
    fn isolated_and_scattered() {
        let d = TopSpace::discrete(vec!["a".into(), "b".into()]);
        assert_eq!(isolated_points(&d).count_ones(..), 2);
        let c = alexandrov(&chain2()).unwrap();
        assert_eq!(isolated_points(&c).ones().collect::<Vec<_>>(), [1]);
        assert!(is_weakly_scattered(&c));
        assert!(!is_weakly_scattered(&alexandrov(&cluster2()).unwrap()));
    }

    #[test]
    fn base_validation() {
        let labels = vec!["a".to_string(), "b".into(), "c".into()];
        let mk = |v: &[usize]| {
            let mut s = WorldSet::with_capacity(3);
            s.extend(v.iter().copied());
            s
        };
        // {a,b} ∩ {b,c} = {b} is not a union of base elements.
        assert!(TopSpace::new(labels.clone(), vec![mk(&[0, 1]), mk(&[1, 2])]).is_err());
        assert!(TopSpace::new(labels.clone(), vec![mk(&[0, 1])]).is_err());
        assert!(TopSpace::new(labels, vec![mk(&[0, 1]), mk(&[1, 2]), mk(&[1])]).is_ok());
    }

    #[test]
    fn product_examples() {
        let pt = TopSpace::discrete(vec!["x".into()]);
        let pp = bitop_product(&pt, &pt);
        assert_eq!(pp.len(), 1);
        assert_eq!(sets(&pp.h), [vec![0]]);
        assert_eq!(sets(&pp.v), [vec![0]]);
        let c = alexandrov(&chain2()).unwrap();
        let cp = bitop_product(&c, &pt);
        assert_eq!(sets(&cp.h), sets(&c));
        assert_eq!(sets(&cp.v), [vec![0], vec![1]]);
        let cc = bitop_product(&c, &c);
        assert_eq!(cc.len(), 4);
    }

    #[test]
    fn interior_semantics() {
        let pt = TopSpace::discrete(vec!["x".into()]);
        let sp = bitop_product(&pt, &pt);
        let mut val = BTreeMap::new();
        let mut p = WorldSet::with_capacity(1);
        p.insert(0);
        val.insert("p".to_string(), p);
        assert!(topo_holds(&sp, &val, 0, &parse("[]1 p").unwrap()).unwrap());
        assert!(topo_holds(&sp, &val, 1, &Formula::Top).is_err());
        assert!(pt.holds(&val, 0, &parse("[]2 p").unwrap()).is_err());
    }
}
