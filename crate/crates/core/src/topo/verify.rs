//! Open and continuity obligations for `g : 𝒴 × 𝒴 → T₂,₂` and
//! `f : 𝔛 × 𝒴 → T₂,₂₊₂` at finite truncation.
//!
//! The target topologies are the Alexandrov topologies of the trees, so the
//! least open set around `t` is `Rᵢ(t)`. Continuity at `y` asks that some
//! basic open around `y` maps into `Rᵢ(f(y))`; openness asks that every
//! basic open `U ∋ y` has `Rᵢ(f(y)) ⊆ f(U)`. The source is cut at stems of
//! length `d`, so a basic open of index `k` around `y` only reaches
//! successors of `f(y)` that are at most `d − max(k, K(y))` letters longer,
//! where `K(y)` is the stem of `y`. Checks with margin 0 are trivial and
//! counted as boundary.

use std::collections::HashSet;

use serde::Serialize;

use super::paths::{
    big_f, g_interleave, in_u_k, in_u_prime, st, truncated_paths, truncated_x_points, PseudoPath,
};
use super::TopoError;
use crate::trees::{render_word, words_upto, Letter, Top, TreePoint, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Obligation {
    HOpen,
    HContinuous,
    VOpen,
    VContinuous,
    /// Level points `<α,n>`, `n ≥ 1`, land on `R′₁`-singletons.
    HIsolated,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ObligationReport {
    pub obligation: Obligation,
    pub interior_checks: usize,
    pub boundary_skipped: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl ObligationReport {
    fn new(obligation: Obligation) -> Self {
        ObligationReport {
            obligation,
            interior_checks: 0,
            boundary_skipped: 0,
            failures: 0,
            first_failure: None,
        }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.interior_checks += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(what());
            }
        }
    }

    pub fn ok(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpatialReport {
    pub map: String,
    pub depth: usize,
    pub levels: Option<usize>,
    pub source_points: usize,
    pub surjective: bool,
    pub missing: Vec<String>,
    pub obligations: Vec<ObligationReport>,
}

impl SpatialReport {
    pub fn ok(&self) -> bool {
        self.surjective && self.obligations.iter().all(ObligationReport::ok)
    }

    pub fn obligation(&self, o: Obligation) -> Option<&ObligationReport> {
        self.obligations.iter().find(|r| r.obligation == o)
    }
}

/// `q = p · c` with `c` over the letters of relation `rel`.
fn extends(p: &[Letter], q: &[Letter], rel: usize) -> bool {
    q.starts_with(p) && q[p.len()..].iter().all(|l| Letter::pair(rel).contains(l))
}

fn concat<T: Clone>(a: &[T], b: &[T]) -> Vec<T> {
    [a, b].concat()
}

/// `R′₁` on `T₂,₂₊₂` via the identities.
fn r1_prime(p: &TreePoint, q: &TreePoint) -> bool {
    match (&p.top, &q.top) {
        (Top::Root, Top::Root) => extends(&p.base, &q.base, 0),
        (Top::Root, Top::Copy(b)) => b.is_empty() && extends(&p.base, &q.base, 0),
        (Top::Copy(_), _) => p == q,
    }
}

/// `R′₂` on `T₂,₂₊₂` via the identities.
fn r2_prime(p: &TreePoint, q: &TreePoint) -> bool {
    match (&p.top, &q.top) {
        (Top::Root, Top::Root) => extends(&p.base, &q.base, 1),
        (Top::Copy(b), Top::Copy(b2)) => p.base == q.base && b2.starts_with(b),
        _ => false,
    }
}

fn cylinders(paths: &[PseudoPath], d: usize) -> Vec<Vec<Vec<usize>>> {
    (0..=d)
        .map(|k| {
            paths
                .iter()
                .map(|a| {
                    (0..paths.len())
                        .filter(|&j| k > 0 && in_u_k(a, k, &paths[j]))
                        .collect()
                })
                .collect()
        })
        .collect()
}

fn margin(d: usize, k: usize, big_k: usize) -> usize {
    d.saturating_sub(k.max(big_k))
}

/// Checks `g` on `𝒴_d × 𝒴_d` against `T₂,₂`: surjective onto words of
/// length at most `d`, open and continuous in both topologies.
pub fn check_g_pmorphism(d: usize) -> Result<SpatialReport, TopoError> {
    if d == 0 {
        return Err(TopoError::InvalidBase("depth must be at least 1".into()));
    }
    let paths = truncated_paths(d);
    let n = paths.len();
    let cyl = cylinders(&paths, d);
    let g: Vec<Vec<Word>> = paths
        .iter()
        .map(|a| paths.iter().map(|b| g_interleave(a, b)).collect())
        .collect();
    let mut reps = [
        ObligationReport::new(Obligation::HOpen),
        ObligationReport::new(Obligation::HContinuous),
        ObligationReport::new(Obligation::VOpen),
        ObligationReport::new(Obligation::VContinuous),
    ];
    for ai in 0..n {
        for bi in 0..n {
            let gy = &g[ai][bi];
            let big_k = st(&paths[ai]).max(st(&paths[bi])).max(1);
            for rel in 0..2 {
                // Moving along relation `rel` varies the `rel`-th coordinate.
                let at = |j: usize| if rel == 0 { &g[j][bi] } else { &g[ai][j] };
                let centre = if rel == 0 { ai } else { bi };
                let (open_rep, cont_rep) = reps.split_at_mut(2 * rel + 1);
                let (open_rep, cont_rep) = (&mut open_rep[2 * rel], &mut cont_rep[0]);
                let bad = cyl[big_k][centre]
                    .iter()
                    .find(|&&j| !extends(gy, at(j), rel));
                cont_rep.record(bad.is_none(), || {
                    format!(
                        "({},{}) reaches {}",
                        paths[ai],
                        paths[bi],
                        render_word(at(*bad.unwrap()))
                    )
                });
                for k in 1..=d {
                    let m = margin(d, k, big_k);
                    if m == 0 {
                        open_rep.boundary_skipped += 1;
                        continue;
                    }
                    let image: HashSet<&Word> = cyl[k][centre].iter().map(|&j| at(j)).collect();
                    let miss = words_upto(&Letter::pair(rel), m)
                        .into_iter()
                        .map(|c| concat(gy, &c))
                        .find(|w| !image.contains(w));
                    open_rep.record(miss.is_none(), || {
                        format!(
                            "({},{}) k={k} misses {}",
                            paths[ai],
                            paths[bi],
                            render_word(miss.as_ref().unwrap())
                        )
                    });
                }
            }
        }
    }
    let image: HashSet<&Word> = g.iter().flatten().collect();
    let missing: Vec<String> = words_upto(&Letter::ALL, d)
        .iter()
        .filter(|w| !image.contains(w))
        .map(|w| render_word(w))
        .collect();
    Ok(SpatialReport {
        map: "g".into(),
        depth: d,
        levels: None,
        source_points: n * n,
        surjective: missing.is_empty(),
        missing,
        obligations: reps.to_vec(),
    })
}

/// Checks `f` on `𝔛(d, n_max) × 𝒴_d` against `T₂,₂₊₂`: surjective onto root
/// points with `|a| ≤ d` and copy points with `max(|a|,1) + |b| ≤ d`, the
/// four open and continuity obligations, and isolation of level points.
pub fn verify_big_f(d: usize, n_max: usize) -> Result<SpatialReport, TopoError> {
    if d == 0 || n_max < d {
        return Err(TopoError::InvalidBase("need 1 ≤ d ≤ n_max".into()));
    }
    let paths = truncated_paths(d);
    let xs = truncated_x_points(d, n_max);
    let cyl = cylinders(&paths, d);
    // ucyl[k][x]: members of U′_k(x) for level-0 x.
    let ucyl: Vec<Vec<Vec<usize>>> = (0..=d)
        .map(|k| {
            xs.iter()
                .map(|x| {
                    (0..xs.len())
                        .filter(|&j| k > 0 && in_u_prime(x, k, &xs[j]))
                        .collect()
                })
                .collect()
        })
        .collect();
    let f: Vec<Vec<TreePoint>> = xs
        .iter()
        .map(|x| paths.iter().map(|b| big_f(x, b)).collect())
        .collect();
    let mut h_open = ObligationReport::new(Obligation::HOpen);
    let mut h_cont = ObligationReport::new(Obligation::HContinuous);
    let mut v_open = ObligationReport::new(Obligation::VOpen);
    let mut v_cont = ObligationReport::new(Obligation::VContinuous);
    let mut h_iso = ObligationReport::new(Obligation::HIsolated);
    for (xi, x) in xs.iter().enumerate() {
        for (bi, b) in paths.iter().enumerate() {
            let fy = &f[xi][bi];
            let name = || format!("({x},{b})");
            if x.level > 0 {
                // The horizontal neighbourhood of y is {y}.
                h_iso.record(matches!(fy.top, Top::Copy(_)), || {
                    format!("{} maps to {fy}", name())
                });
                h_cont.record(true, String::new);
                h_open.record(true, String::new);
            } else {
                let big_k = st(&x.path).max(st(b)).max(1);
                let bad = ucyl[big_k][xi].iter().find(|&&j| !r1_prime(fy, &f[j][bi]));
                h_cont.record(bad.is_none(), || {
                    format!("{} reaches {}", name(), f[*bad.unwrap()][bi])
                });
                for k in 1..=d {
                    let m = margin(d, k, big_k);
                    if m == 0 {
                        h_open.boundary_skipped += 1;
                        continue;
                    }
                    let image: HashSet<&TreePoint> =
                        ucyl[k][xi].iter().map(|&j| &f[j][bi]).collect();
                    let miss = words_upto(&Letter::pair(0), m)
                        .into_iter()
                        .flat_map(|c| {
                            let a = concat(&fy.base, &c);
                            [TreePoint::root(a.clone()), TreePoint::copy(a, vec![])]
                        })
                        .find(|t| !image.contains(t));
                    h_open.record(miss.is_none(), || {
                        format!("{} k={k} misses {}", name(), miss.as_ref().unwrap())
                    });
                }
            }
            let big_k = if x.level == 0 {
                st(&x.path).max(st(b)).max(1)
            } else {
                x.level.max(st(b)).max(1)
            };
            if big_k > d {
                v_cont.boundary_skipped += 1;
            } else {
                let bad = cyl[big_k][bi].iter().find(|&&j| !r2_prime(fy, &f[xi][j]));
                v_cont.record(bad.is_none(), || {
                    format!("{} reaches {}", name(), f[xi][*bad.unwrap()])
                });
            }
            for k in 1..=d {
                let m = margin(d, k, big_k);
                if m == 0 {
                    v_open.boundary_skipped += 1;
                    continue;
                }
                let image: HashSet<&TreePoint> = cyl[k][bi].iter().map(|&j| &f[xi][j]).collect();
                let required: Vec<TreePoint> = match &fy.top {
                    Top::Root => words_upto(&Letter::pair(1), m)
                        .into_iter()
                        .map(|c| TreePoint::root(concat(&fy.base, &c)))
                        .collect(),
                    Top::Copy(w) => words_upto(&[1u8, 2], m)
                        .into_iter()
                        .map(|c| TreePoint::copy(fy.base.clone(), concat(w, &c)))
                        .collect(),
                };
                let miss = required.iter().find(|t| !image.contains(t));
                v_open.record(miss.is_none(), || {
                    format!("{} k={k} misses {}", name(), miss.unwrap())
                });
            }
        }
    }
    let image: HashSet<&TreePoint> = f.iter().flatten().collect();
    let mut missing = Vec::new();
    for a in words_upto(&Letter::ALL, d) {
        let root = TreePoint::root(a.clone());
        if !image.contains(&root) {
            missing.push(root.to_string());
        }
        for c in words_upto(&[1u8, 2], d.saturating_sub(a.len().max(1))) {
            if a.len().max(1) + c.len() > d {
                continue;
            }
            let t = TreePoint::copy(a.clone(), c);
            if !image.contains(&t) {
                missing.push(t.to_string());
            }
        }
    }
    Ok(SpatialReport {
        map: "big_f".into(),
        depth: d,
        levels: Some(n_max),
        source_points: xs.len() * paths.len(),
        surjective: missing.is_empty(),
        missing,
        obligations: vec![h_open, h_cont, v_open, v_cont, h_iso],
    })
}
