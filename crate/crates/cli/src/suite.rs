//! `verify`: fixed-parameter sweeps, one JSON line per check.

use anyhow::Result;
use clap::ValueEnum;
use serde_json::{json, Value};

use bimodal::correspond::{
    check_correspondence_sweep, mckinsey_fo, sampled_correspondence_sweep, Correspondence,
};
use bimodal::decision::{
    check_filtration, check_proof, consistency_crosscheck, decide, filtrate_with, fixture_proofs,
    mutate_proof, verify_refutation, Decision, FiltrationMode, LogicId,
};
use bimodal::formula::{Axiom, Modality};
use bimodal::kripke::{generate_frames, Condition, Frame, FrameQuery};
use bimodal::pmorph::check_generated_pmorphism;
use bimodal::random::{random_formula, random_l_model, seeded};
use bimodal::topo::{
    alexandrov, check_g_pmorphism, is_weakly_scattered, product_axl_check, space_x_truncated,
    verify_big_f,
};
use bimodal::trees::{
    build_covering_map, build_g_onto_l_frame, check_rprime_identities, g_depths,
    min_surjective_depth_t22, truncation_satisfies_l,
};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    Correspondence,
    Filtration,
    Decision,
    Trees,
    Topology,
}

struct Out {
    failed: usize,
    checks: usize,
}

impl Out {
    fn emit(&mut self, suite: &str, check: &str, ok: bool, detail: Value) {
        self.checks += 1;
        if !ok {
            self.failed += 1;
        }
        crate::line(json!({ "suite": suite, "check": check, "ok": ok, "detail": detail }));
    }
}

fn rooted_l_classes(n: usize) -> Result<Vec<Frame>> {
    let conds = LogicId::LogicL
        .conditions()
        .0
        .into_iter()
        .chain([Condition::Rooted]);
    Ok(generate_frames(
        &FrameQuery::up_to(n).conditions(conds).dedup(true),
    )?)
}

fn correspondence(out: &mut Out, seed: u64) -> Result<()> {
    for (name, n, which) in [
        ("a1-exhaustive", 4, Correspondence::A1),
        ("axl-exhaustive", 3, Correspondence::AxL),
    ] {
        let reps = check_correspondence_sweep(n, which)?;
        let bad = reps.iter().filter(|r| r.mismatch()).count();
        out.emit(
            "correspondence",
            name,
            bad == 0,
            json!({ "max_size": n, "frames": reps.len(), "mismatches": bad }),
        );
    }
    let mut rng = seeded(seed);
    for (name, n, which) in [
        ("a1-sampled", 6, Correspondence::A1),
        ("axl-sampled", 5, Correspondence::AxL),
    ] {
        let reps = sampled_correspondence_sweep(&mut rng, n, which, 30)?;
        let bad = reps.iter().filter(|r| r.mismatch()).count();
        out.emit(
            "correspondence",
            name,
            bad == 0,
            json!({ "size": n, "frames": reps.len(), "mismatches": bad }),
        );
    }
    Ok(())
}

fn filtration(out: &mut Out, seed: u64) -> Result<()> {
    let mut rng = seeded(seed);
    let (mut failures, mut diverged, mut max_classes) = (0, 0, 0);
    let runs = 200;
    for _ in 0..runs {
        let m = random_l_model(&mut rng, 30, &["p", "q"]);
        let f = random_formula(&mut rng, 6, &["p", "q"]);
        let three = filtrate_with(&m, &f, FiltrationMode::ThreeCell)?;
        let two = filtrate_with(&m, &f, FiltrationMode::TwoCell)?;
        if !check_filtration(&m, &f, &three)?.ok() {
            failures += 1;
        }
        if three.classes() != two.classes() || !check_filtration(&m, &f, &two)?.ok() {
            diverged += 1;
        }
        max_classes = max_classes.max(three.classes());
    }
    out.emit(
        "filtration",
        "random-l-models",
        failures == 0,
        json!({ "runs": runs, "failures": failures, "max_classes": max_classes }),
    );
    out.emit(
        "filtration",
        "two-cell-comparison",
        true,
        json!({ "runs": runs, "diverged": diverged }),
    );
    Ok(())
}

fn decision(out: &mut Out) -> Result<()> {
    let axl = Axiom::AxL.formula();
    let d = decide(&axl, LogicId::FusionS41S4, 4)?;
    let ok = d.is_refuted() && verify_refutation(&d, &axl, LogicId::FusionS41S4)?;
    out.emit(
        "decision",
        "axl-not-in-fusion",
        ok,
        serde_json::to_value(&d)?,
    );
    let d = decide(&axl, LogicId::LogicL, 4)?;
    out.emit(
        "decision",
        "axl-in-l",
        !d.is_refuted(),
        serde_json::to_value(&d)?,
    );
    for ax in [Axiom::Com, Axiom::Chr] {
        let f = ax.formula();
        let d = decide(&f, LogicId::LogicL, 5)?;
        let size = match &d {
            Decision::Refuted { size, .. } => Some(*size),
            Decision::NoCountermodelUpTo { .. } => None,
        };
        out.emit(
            "decision",
            &format!("{}-under-l", ax.name().to_lowercase()),
            verify_refutation(&d, &f, LogicId::LogicL)?,
            json!({ "refuted": d.is_refuted(), "size": size }),
        );
    }
    let (mut accepted, mut total, mut rejected, mut mutants, mut conflicts) = (0, 0, 0, 0, 0);
    for (_, ps) in fixture_proofs(LogicId::LogicL) {
        total += 1;
        if check_proof(&ps, LogicId::LogicL).accepted().is_some() {
            accepted += 1;
        }
        if consistency_crosscheck(&ps, LogicId::LogicL, 3)?.conflict {
            conflicts += 1;
        }
        for kind in 0..4 {
            mutants += 1;
            if check_proof(&mutate_proof(&ps, kind), LogicId::LogicL)
                .accepted()
                .is_none()
            {
                rejected += 1;
            }
        }
    }
    out.emit(
        "decision",
        "proof-fixtures",
        accepted == total && rejected == mutants && conflicts == 0,
        json!({ "fixtures": total, "accepted": accepted, "mutants": mutants, "rejected": rejected, "conflicts": conflicts }),
    );
    Ok(())
}

fn trees(out: &mut Out) -> Result<()> {
    for (d1, d2) in [(1, 1), (2, 2), (3, 2)] {
        let r = check_rprime_identities(d1, d2);
        out.emit(
            "trees",
            &format!("identities-{d1}-{d2}"),
            r.ok(),
            json!({ "interior": r.interior_checks, "boundary": r.boundary_skipped, "failures": r.failures.len() }),
        );
    }
    out.emit(
        "trees",
        "truncation-is-l",
        truncation_satisfies_l(2, 2),
        json!({ "d1": 2, "d2": 2 }),
    );
    let frames = rooted_l_classes(3)?;
    let (mut t22_bad, mut g_bad) = (0, 0);
    for fr in &frames {
        let root = fr.root().expect("rooted");
        let d = min_surjective_depth_t22(fr, root)?.expect("rooted preorder frames are covered");
        let gm = build_covering_map(fr, d)?;
        if !check_generated_pmorphism(&gm)?.ok() {
            t22_bad += 1;
        }
        let (d1, d2) = g_depths(fr)?;
        if !build_g_onto_l_frame(fr, d1 + 1, d2 + 1)?.check()?.ok() {
            g_bad += 1;
        }
    }
    out.emit(
        "trees",
        "t22-covers",
        t22_bad == 0,
        json!({ "targets": frames.len(), "failures": t22_bad }),
    );
    out.emit(
        "trees",
        "g-onto-l-frames",
        g_bad == 0,
        json!({ "targets": frames.len(), "failures": g_bad }),
    );
    Ok(())
}

fn topology(out: &mut Out, seed: u64) -> Result<()> {
    for d in 1..=2 {
        let r = check_g_pmorphism(d)?;
        out.emit(
            "topology",
            &format!("g-pmorphism-{d}"),
            r.ok(),
            serde_json::to_value(&r)?,
        );
    }
    for (d, n) in [(1, 1), (1, 2), (2, 2), (2, 3)] {
        let r = verify_big_f(d, n)?;
        out.emit(
            "topology",
            &format!("big-f-{d}-{n}"),
            r.ok(),
            serde_json::to_value(&r)?,
        );
        let x = space_x_truncated(d, n)?;
        out.emit(
            "topology",
            &format!("x-weakly-scattered-{d}-{n}"),
            is_weakly_scattered(&x),
            json!({ "points": x.len() }),
        );
    }
    let frames = generate_frames(
        &FrameQuery::up_to(4)
            .arity(1)
            .conditions(bimodal::kripke::FrameConditionSet::preorder(Modality::One)),
    )?;
    let mut bad = 0;
    for fr in &frames {
        if is_weakly_scattered(&alexandrov(fr)?) != mckinsey_fo(fr, Modality::One)?.holds() {
            bad += 1;
        }
    }
    out.emit(
        "topology",
        "scattered-iff-mckinsey",
        bad == 0,
        json!({ "frames": frames.len(), "mismatches": bad }),
    );
    let r = product_axl_check(&mut seeded(seed), 3, 20, is_weakly_scattered);
    out.emit("topology", "product-axl", r.ok(), serde_json::to_value(&r)?);
    Ok(())
}

/// True when every check passed.
pub fn run(suite: Suite, seed: u64) -> Result<bool> {
    let mut out = Out {
        failed: 0,
        checks: 0,
    };
    let all = suite == Suite::All;
    if all || suite == Suite::Correspondence {
        correspondence(&mut out, seed)?;
    }
    if all || suite == Suite::Filtration {
        filtration(&mut out, seed)?;
    }
    if all || suite == Suite::Decision {
        decision(&mut out)?;
    }
    if all || suite == Suite::Trees {
        trees(&mut out)?;
    }
    if all || suite == Suite::Topology {
        topology(&mut out, seed)?;
    }
    crate::line(json!({ "summary": { "seed": seed, "checks": out.checks, "failed": out.failed } }));
    Ok(out.failed == 0)
}
