//! First-order correspondents of the McKinsey axiom and of AxL, and sweeps
//! comparing them with frame validity.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::formula::{Axiom, Formula, Modality};
use crate::kripke::{
    frame_valid, generate_frames, Condition, Frame, FrameConditionSet, FrameJson, FrameQuery,
    GenerateError, KripkeError, Relation, Validity, World, WorldSet,
};

/// Outcome of a `∀x ∃y` frame condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum FoVerdict {
    /// `witness[x]` is the chosen `y` for `x`.
    Holds { witness: Vec<World> },
    /// No `y` exists for this `x`.
    Fails { world: World },
}

impl FoVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, FoVerdict::Holds { .. })
    }

    pub fn witness(&self, x: World) -> Option<World> {
        match self {
            FoVerdict::Holds { witness } => witness.get(x).copied(),
            FoVerdict::Fails { .. } => None,
        }
    }
}

fn search(fr: &Frame, m: Modality, good: impl Fn(World) -> bool) -> Result<FoVerdict, KripkeError> {
    let mut witness = Vec::with_capacity(fr.size());
    for x in fr.worlds() {
        match fr.sorted_succ(m, x)?.into_iter().find(|&y| good(y)) {
            Some(y) => witness.push(y),
            None => return Ok(FoVerdict::Fails { world: x }),
        }
    }
    Ok(FoVerdict::Holds { witness })
}

/// `R(u) = {u}` for relation `m`.
pub fn is_maximal(fr: &Frame, m: Modality, u: World) -> Result<bool, KripkeError> {
    Ok(fr.relation(m)?.succ(u) == [u])
}

/// `∀w ∃u (w R u ∧ R(u) = {u})`. Witnesses are the first in name order.
pub fn mckinsey_fo(fr: &Frame, m: Modality) -> Result<FoVerdict, KripkeError> {
    let rel = fr.relation(m)?;
    search(fr, m, |u| rel.succ(u) == [u])
}

/// `∀x ∃y (x R₁ y ∧ ∀z (y R₂ z ⇒ R₁(z) = {z}))`.
pub fn mkduo_fo(fr: &Frame) -> Result<FoVerdict, KripkeError> {
    let r1 = fr.relation(Modality::One)?;
    let r2 = fr.relation(Modality::Two)?;
    search(fr, Modality::One, |y| {
        r2.succ(y).iter().all(|&z| r1.succ(z) == [z])
    })
}

/// `{u | R(u) = {u}}`.
pub fn maximal_points(fr: &Frame, m: Modality) -> Result<WorldSet, KripkeError> {
    let rel: &Relation = fr.relation(m)?;
    let mut out = WorldSet::with_capacity(fr.size());
    out.extend(fr.worlds().filter(|&u| rel.succ(u) == [u]));
    Ok(out)
}

/// Which correspondence a sweep checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Correspondence {
    /// McKinsey for index 1 on single-relation preorders.
    A1,
    /// AxL against mkduo on frames with two preorders and the McKinsey
    /// condition for index 1.
    AxL,
}

impl Correspondence {
    pub fn formula(self) -> Formula {
        match self {
            Correspondence::A1 => Axiom::A1One.formula(),
            Correspondence::AxL => Axiom::AxL.formula(),
        }
    }

    /// The frame class the correspondence is stated for.
    pub fn query(self, min: usize, max: usize) -> FrameQuery {
        let mut q = match self {
            Correspondence::A1 => FrameQuery::up_to(max)
                .arity(1)
                .conditions(FrameConditionSet::preorder(Modality::One)),
            Correspondence::AxL => FrameQuery::up_to(max).conditions(
                FrameConditionSet::preorder(Modality::One)
                    .into_iter()
                    .chain(FrameConditionSet::preorder(Modality::Two))
                    .chain([Condition::McKinsey(Modality::One)]),
            ),
        };
        q.min_size = min;
        q
    }

    pub fn fo(self, fr: &Frame) -> Result<FoVerdict, KripkeError> {
        match self {
            Correspondence::A1 => mckinsey_fo(fr, Modality::One),
            Correspondence::AxL => mkduo_fo(fr),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorrespondenceReport {
    pub frame: FrameJson,
    pub fo_holds: bool,
    pub modal_valid: bool,
    pub fo: FoVerdict,
    pub modal: Validity,
}

impl CorrespondenceReport {
    pub fn mismatch(&self) -> bool {
        self.fo_holds != self.modal_valid
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SweepError {
    #[error(transparent)]
    Generate(#[from] GenerateError),
    #[error(transparent)]
    Kripke(#[from] KripkeError),
}

/// Both sides of the correspondence on one frame.
pub fn compare(fr: &Frame, which: Correspondence) -> Result<CorrespondenceReport, KripkeError> {
    let fo = which.fo(fr)?;
    let modal = frame_valid(fr, &which.formula())?;
    Ok(CorrespondenceReport {
        frame: fr.to_json(),
        fo_holds: fo.holds(),
        modal_valid: modal.is_valid(),
        fo,
        modal,
    })
}

/// Exhaustive sweep over every labeled frame of the class with `1 ≤ |W| ≤ n`,
/// in generation order.
pub fn check_correspondence_sweep(
    n: usize,
    which: Correspondence,
) -> Result<Vec<CorrespondenceReport>, SweepError> {
    let frames = generate_frames(&which.query(1, n))?;
    Ok(frames
        .par_iter()
        .map(|fr| compare(fr, which))
        .collect::<Result<Vec<_>, _>>()?)
}

/// A uniformly random preorder: random edges with probability `density`,
/// then reflexive-transitive closure.
pub fn random_preorder<R: Rng>(rng: &mut R, n: usize, density: f64) -> Relation {
    let edges = (0..n)
        .flat_map(|x| (0..n).map(move |y| (x, y)))
        .filter(|_| rng.random_bool(density))
        .collect::<Vec<_>>();
    Relation::from_edges(n, edges).closure(crate::kripke::ClosureMode::Both)
}

/// Sampled sweep at a single size, for sizes beyond exhaustive reach. Random
/// frames outside the class (for AxL: failing McKinsey) are redrawn.
pub fn sampled_correspondence_sweep<R: Rng>(
    rng: &mut R,
    n: usize,
    which: Correspondence,
    samples: usize,
) -> Result<Vec<CorrespondenceReport>, KripkeError> {
    let mut out = Vec::with_capacity(samples);
    while out.len() < samples {
        let density = rng.random_range(0.05..0.5);
        let fr = match which {
            Correspondence::A1 => Frame::anonymous(vec![random_preorder(rng, n, density)]),
            Correspondence::AxL => {
                let fr = Frame::anonymous(vec![
                    random_preorder(rng, n, density),
                    random_preorder(rng, n, density),
                ]);
                if !mckinsey_fo(&fr, Modality::One)?.holds() {
                    continue;
                }
                fr
            }
        };
        out.push(compare(&fr, which)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::fixtures::*;
    use crate::kripke::holds;
    use crate::kripke::Model;

    #[test]
    fn mckinsey_examples() {
        let p = frame(1, &[(0, 0)], None);
        assert!(mckinsey_fo(&p, Modality::One).unwrap().holds());
        assert_eq!(
            mckinsey_fo(&cluster2(), Modality::One).unwrap(),
            FoVerdict::Fails { world: 0 }
        );
        assert_eq!(
            mckinsey_fo(&chain2(), Modality::One).unwrap(),
            FoVerdict::Holds {
                witness: vec![1, 1]
            }
        );
    }

    #[test]
    fn maximal_point_examples() {
        assert_eq!(
            maximal_points(&cluster2(), Modality::One)
                .unwrap()
                .count_ones(..),
            0
        );
        assert_eq!(
            maximal_points(&chain2(), Modality::One)
                .unwrap()
                .ones()
                .collect::<Vec<_>>(),
            [1]
        );
        let discrete = frame(3, &[(0, 0), (1, 1), (2, 2)], None);
        assert_eq!(
            maximal_points(&discrete, Modality::One)
                .unwrap()
                .count_ones(..),
            3
        );
    }

    /// x R₁ m with m maximal; R₂ the identity.
    fn x_m() -> Frame {
        frame(2, &[(0, 0), (0, 1), (1, 1)], Some(&[(0, 0), (1, 1)]))
    }

    /// R₁ = {aa, bb, ab}, R₂ = {aa, bb, ba}. Both R₁-successors of a R₂-see a,
    /// which is not R₁-maximal.
    fn two_point_failure() -> Frame {
        frame(
            2,
            &[(0, 0), (1, 1), (0, 1)],
            Some(&[(0, 0), (1, 1), (1, 0)]),
        )
    }

    #[test]
    fn mkduo_examples() {
        assert!(mkduo_fo(&point()).unwrap().holds());
        assert_eq!(
            mkduo_fo(&x_m()).unwrap(),
            FoVerdict::Holds {
                witness: vec![1, 1]
            }
        );
        let f = two_point_failure();
        assert!(mckinsey_fo(&f, Modality::One).unwrap().holds());
        assert_eq!(mkduo_fo(&f).unwrap(), FoVerdict::Fails { world: 0 });
    }

    #[test]
    fn smallest_failure_has_two_points() {
        let q = Correspondence::AxL.query(1, 2).dedup(true);
        let fails: Vec<Frame> = generate_frames(&q)
            .unwrap()
            .into_iter()
            .filter(|f| !mkduo_fo(f).unwrap().holds())
            .collect();
        // Two classes: R₁ a chain under an R₂-cluster, and R₁, R₂ opposite chains.
        assert_eq!(fails.len(), 2);
        assert!(fails.iter().all(|f| f.size() == 2));
        let r1 = |f: &Frame| f.rel(0).edge_count();
        let r2 = |f: &Frame| f.rel(1).edge_count();
        let mut shapes: Vec<_> = fails.iter().map(|f| (r1(f), r2(f))).collect();
        shapes.sort();
        assert_eq!(shapes, [(3, 3), (3, 4)]);
        for f in &fails {
            let modal = frame_valid(f, &Axiom::AxL.formula()).unwrap();
            let Validity::CounterExample { valuation, world } = modal else {
                panic!("AxL valid on a frame failing mkduo");
            };
            let m = Model::with_valuation(f.clone(), valuation).unwrap();
            assert!(!holds(&m, world, &Axiom::AxL.formula()).unwrap());
        }
    }

    #[test]
    fn sweeps_have_no_mismatch_at_small_size() {
        for which in [Correspondence::A1, Correspondence::AxL] {
            let reports = check_correspondence_sweep(3, which).unwrap();
            assert!(!reports.is_empty());
            assert!(reports.iter().all(|r| !r.mismatch()), "{which:?}");
        }
        let one = check_correspondence_sweep(1, Correspondence::A1).unwrap();
        assert_eq!(one.len(), 1);
        assert!(one[0].fo_holds && one[0].modal_valid);
    }

    #[test]
    fn mkduo_implies_mckinsey_when_r2_reflexive() {
        let both = FrameConditionSet::preorder(Modality::One)
            .into_iter()
            .chain(FrameConditionSet::preorder(Modality::Two));
        for f in generate_frames(&FrameQuery::up_to(3).conditions(both)).unwrap() {
            if mkduo_fo(&f).unwrap().holds() {
                assert!(mckinsey_fo(&f, Modality::One).unwrap().holds());
            }
        }
    }
}
