//! Sampled check that AxL holds on products with a weakly scattered first factor.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use super::{alexandrov, bitop_product, is_weakly_scattered, TopSpace};
use crate::formula::Axiom;
use crate::kripke::{preorder_classes, Frame, WorldSet};

/// Up-set topologies of one preorder per isomorphism class, sizes `1..=max`.
pub fn alexandrov_catalogue(max: usize) -> Vec<TopSpace> {
    (1..=max)
        .flat_map(|n| preorder_classes(n).iter())
        .map(|c| {
            alexandrov(&Frame::anonymous(vec![c.rel.to_relation()])).expect("class is a preorder")
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProductFailure {
    pub left: usize,
    pub right: usize,
    pub point: String,
    pub p: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProductReport {
    pub catalogue: usize,
    pub weakly_scattered: usize,
    pub pairs: usize,
    /// `(valuation, point)` evaluations.
    pub checks: u64,
    pub failures: u64,
    pub first_failure: Option<ProductFailure>,
}

impl ProductReport {
    pub fn ok(&self) -> bool {
        self.failures == 0
    }
}

/// Evaluates AxL at every point of `X₁ × X₂` under `valuations` random
/// values of `p`, for every catalogue pair whose first factor passes
/// `left_filter`.
pub fn product_axl_check<R: Rng>(
    rng: &mut R,
    max: usize,
    valuations: usize,
    left_filter: impl Fn(&TopSpace) -> bool,
) -> ProductReport {
    let cat = alexandrov_catalogue(max);
    let axl = Axiom::AxL.formula();
    let mut rep = ProductReport {
        catalogue: cat.len(),
        weakly_scattered: cat.iter().filter(|s| is_weakly_scattered(s)).count(),
        pairs: 0,
        checks: 0,
        failures: 0,
        first_failure: None,
    };
    for (i, x1) in cat.iter().enumerate() {
        if !left_filter(x1) {
            continue;
        }
        for (j, x2) in cat.iter().enumerate() {
            rep.pairs += 1;
            let prod = bitop_product(x1, x2);
            let n = prod.len();
            for _ in 0..valuations {
                let mut p = WorldSet::with_capacity(n);
                p.extend((0..n).filter(|_| rng.random_bool(0.5)));
                let val = BTreeMap::from([("p".to_string(), p.clone())]);
                let ext = prod.extension(&val, &axl).expect("both topologies present");
                rep.checks += n as u64;
                let bad = n - ext.count_ones(..);
                rep.failures += bad as u64;
                if bad > 0 && rep.first_failure.is_none() {
                    let x = (0..n).find(|&x| !ext.contains(x)).expect("bad > 0");
                    rep.first_failure = Some(ProductFailure {
                        left: i,
                        right: j,
                        point: prod.h.label(x).to_string(),
                        p: p.ones().map(|y| prod.h.label(y).to_string()).collect(),
                    });
                }
            }
        }
    }
    rep
}
