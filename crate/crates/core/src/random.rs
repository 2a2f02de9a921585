//! Seeded generators for formulas and rooted models of `L`.

use std::collections::BTreeMap;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::formula::{Formula, Modality};
use crate::kripke::{ClosureMode, Frame, Model, Relation, World};

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn grow<R: Rng>(rng: &mut R, budget: usize, vars: &[&str]) -> Formula {
    let leaf = |rng: &mut R| match rng.random_range(0..10) {
        0 => Formula::Bottom,
        1 => Formula::Top,
        _ => Formula::var(vars.choose(rng).expect("at least one variable")),
    };
    if budget <= 1 {
        return leaf(rng);
    }
    let m = if rng.random_bool(0.5) {
        Modality::One
    } else {
        Modality::Two
    };
    let kinds = if budget >= 3 { 8 } else { 3 };
    match rng.random_range(0..kinds) {
        0 => Formula::not(grow(rng, budget - 1, vars)),
        1 => Formula::boxed(m, grow(rng, budget - 1, vars)),
        2 => Formula::diamond(m, grow(rng, budget - 1, vars)),
        k => {
            let left = rng.random_range(1..=budget - 2);
            let a = grow(rng, left, vars);
            let b = grow(rng, budget - 1 - left, vars);
            match k {
                3 | 4 => Formula::and(a, b),
                5 | 6 => Formula::implies(a, b),
                _ => Formula::or(a, b),
            }
        }
    }
}

/// A formula over `vars` with `1 ≤ |Sub| ≤ max_sub`.
pub fn random_formula<R: Rng>(rng: &mut R, max_sub: usize, vars: &[&str]) -> Formula {
    assert!(max_sub >= 1 && !vars.is_empty());
    loop {
        let budget = rng.random_range(1..=max_sub);
        let f = grow(rng, budget, vars);
        if f.subformulas().len() <= max_sub {
            return f;
        }
    }
}

/// A rooted model whose frame satisfies every condition of `L`.
///
/// Worlds `0..k` are ordinary and `k..n` are `R₁`-maximal with `R₂` closed
/// among them. Every ordinary world gets an `R₁` edge into the maximal part,
/// which supplies both the McKinsey and the mkduo witnesses. World `0` is
/// the root: each later world has an edge from some earlier one.
pub fn random_l_model<R: Rng>(rng: &mut R, max_points: usize, vars: &[&str]) -> Model {
    let n = rng.random_range(1..=max_points.max(1));
    let c = rng.random_range(1..=n);
    let k = n - c;
    let density = rng.random_range(0.0..0.3);
    let (mut e1, mut e2) = (Vec::new(), Vec::new());
    for j in 1..n {
        let i = rng.random_range(0..j);
        if i < k && rng.random_bool(0.5) {
            e1.push((i, j));
        } else {
            e2.push((i, j));
        }
    }
    for x in 0..k {
        e1.push((x, rng.random_range(k..n)));
        for y in 0..n {
            if rng.random_bool(density) {
                e1.push((x, y));
            }
            if rng.random_bool(density) {
                e2.push((x, y));
            }
        }
    }
    for x in k..n {
        for y in k..n {
            if rng.random_bool(density) {
                e2.push((x, y));
            }
        }
    }
    let rel = |e: Vec<(World, World)>| Relation::from_edges(n, e).closure(ClosureMode::Both);
    let frame = Frame::anonymous(vec![rel(e1), rel(e2)]);
    let valuation: BTreeMap<String, Vec<World>> = vars
        .iter()
        .map(|p| {
            (
                p.to_string(),
                (0..n).filter(|_| rng.random_bool(0.5)).collect(),
            )
        })
        .collect();
    Model::with_valuation(frame, valuation).expect("worlds in range")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decision::{frame_validates_logic, LogicId};

    #[test]
    fn formulas_respect_the_bound() {
        let mut rng = seeded(1);
        let mut sizes = [0usize; 7];
        for _ in 0..500 {
            let f = random_formula(&mut rng, 6, &["p", "q"]);
            let s = f.subformulas().len();
            assert!((1..=6).contains(&s));
            sizes[s] += 1;
        }
        assert!(sizes[1..].iter().all(|&c| c > 0), "{sizes:?}");
    }

    #[test]
    fn models_are_rooted_l_models() {
        let mut rng = seeded(2);
        let mut largest = 0;
        for _ in 0..300 {
            let m = random_l_model(&mut rng, 30, &["p", "q"]);
            assert_eq!(m.frame.root(), Some(0));
            assert!(frame_validates_logic(&m.frame, LogicId::LogicL).holds());
            largest = largest.max(m.frame.size());
        }
        assert!(largest > 20);
    }

    #[test]
    fn seeds_reproduce() {
        let a = random_l_model(&mut seeded(9), 12, &["p"]).to_json();
        let b = random_l_model(&mut seeded(9), 12, &["p"]).to_json();
        assert_eq!(a, b);
    }
}
