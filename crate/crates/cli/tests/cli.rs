use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use bimodal::formula::parse;
use bimodal::kripke::{holds, ModelJson};
use serde_json::Value;

const AXL: &str = "<>1 []2 (<>1 p -> []1 p)";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bimodal"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn decide_axiom_of_l() {
    let o = run(&[
        "decide",
        "--logic",
        "L",
        "--formula",
        AXL,
        "--max-size",
        "4",
    ]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["verdict"], "no_countermodel_up_to");
    assert_eq!(v["size_cap"], 4);
}

#[test]
fn decide_refutes_in_fusion_and_the_witness_rechecks() {
    let dir = tempfile::tempdir().unwrap();
    let dot = path(dir.path(), "c.dot");
    let o = run(&[
        "decide",
        "--logic",
        "S41xS4fusion",
        "--formula",
        AXL,
        "--max-size",
        "6",
        "--emit-dot",
        &dot,
    ]);
    assert_eq!(code(&o), 10);
    let v = json(&o);
    assert_eq!(v["verdict"], "refuted");
    let m: ModelJson = serde_json::from_value(v["model"].clone()).unwrap();
    let world = v["world"].as_u64().unwrap() as usize;
    assert!(!holds(&m.to_model().unwrap(), world, &parse(AXL).unwrap()).unwrap());
    assert!(fs::read_to_string(dot).unwrap().starts_with("digraph"));
}

#[test]
fn error_exit_codes() {
    let budget = run(&[
        "decide",
        "--logic",
        "L",
        "--formula",
        "p & q & r & s & t",
        "--max-size",
        "6",
    ]);
    assert_eq!(code(&budget), 3);
    assert!(String::from_utf8_lossy(&budget.stderr).contains("bits"));
    assert_eq!(
        code(&run(&[
            "decide",
            "--logic",
            "K",
            "--formula",
            "p",
            "--max-size",
            "2"
        ])),
        2
    );
    assert_eq!(
        code(&run(&[
            "decide",
            "--logic",
            "L",
            "--formula",
            "p ->",
            "--max-size",
            "2"
        ])),
        2
    );
    assert_eq!(
        code(&run(&[
            "decide",
            "--logic",
            "L",
            "--formula",
            "p",
            "--max-size",
            "0"
        ])),
        2
    );
    assert_eq!(code(&run(&["check-frame", "/nonexistent/frame.json"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
}

#[test]
fn parse_reports_normal_form() {
    let v = json(&run(&["parse", "<>1 p"]));
    assert_eq!(v["normalized"], "[]1 (p -> false) -> false");
    assert_eq!(v["modal_depth"], 1);
}

#[test]
fn prove_check_accepts_and_rejects() {
    let dir = tempfile::tempdir().unwrap();
    let good = path(dir.path(), "good.jsonl");
    fs::write(
        &good,
        concat!(
            r#"{"formula": "p -> p", "just": {"kind": "taut"}}"#,
            "\n",
            r#"{"formula": "[]1 (p -> p)", "just": {"kind": "nec", "from": 1, "index": 1}}"#,
            "\n"
        ),
    )
    .unwrap();
    let o = run(&["prove-check", "--logic", "L", &good, "--crosscheck", "3"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["conflict"], false);

    let bad = path(dir.path(), "bad.jsonl");
    fs::write(
        &bad,
        r#"{"formula": "q", "just": {"kind": "mp", "from": [1, 2]}}"#,
    )
    .unwrap();
    let o = run(&["prove-check", "--logic", "L", &bad]);
    assert_eq!(code(&o), 10);
    let v = json(&o);
    assert_eq!(v["line"], 1);
    assert_eq!(v["reason"]["reason"], "bad_reference");

    let axl = path(dir.path(), "axl.jsonl");
    fs::write(
        &axl,
        format!(r#"{{"formula": "{AXL}", "just": {{"kind": "axiom", "name": "AxL"}}}}"#),
    )
    .unwrap();
    assert_eq!(code(&run(&["prove-check", "--logic", "L", &axl])), 0);
    assert_eq!(
        code(&run(&["prove-check", "--logic", "S41xS4fusion", &axl])),
        10
    );
}

#[test]
fn correspond_summary_line() {
    let o = run(&[
        "correspond",
        "--axiom",
        "A1",
        "--max-size",
        "3",
        "--exhaustive",
    ]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let last: Value = serde_json::from_str(text.lines().last().unwrap()).unwrap();
    assert_eq!(last["summary"]["mismatches"], 0);
    assert_eq!(last["summary"]["frames"], text.lines().count() - 1);
}

#[test]
fn trees_cover_and_pmorph_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let target = path(dir.path(), "target.json");
    fs::write(
        &target,
        r#"{"worlds": ["r", "m"], "r1": [["r", "r"], ["r", "m"], ["m", "m"]], "r2": [["r", "r"], ["m", "m"]]}"#,
    )
    .unwrap();
    let map = path(dir.path(), "map.json");
    let o = run(&["cover", "--target", &target, "--depth", "2", "--out", &map]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let tree = path(dir.path(), "tree.json");
    assert_eq!(
        code(&run(&[
            "gen-tree", "--kind", "T22", "--depth", "2", "--out", &tree
        ])),
        0
    );
    // Without interior masks the truncation's leaves count as failures, and
    // the relational and topological verdicts agree on where.
    let rel = run(&["pmorph", "--src", &tree, "--tgt", &target, "--map", &map]);
    assert_eq!(code(&rel), 10);
    let rel = json(&rel);
    assert_eq!(rel["surjective"], true);
    assert_eq!(rel["monotone"], serde_json::json!([true, true]));
    let top = json(&run(&[
        "pmorph",
        "--src",
        &tree,
        "--tgt",
        &target,
        "--map",
        &map,
        "--topological",
    ]));
    assert_eq!(top["open"], rel["lifting"]);
    assert_eq!(top["continuous"], rel["monotone"]);

    let o = run(&["cover", "--target", &target, "--g"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["report"]["surjective"], true);
}

#[test]
fn pmorph_reports_failures() {
    let dir = tempfile::tempdir().unwrap();
    let two = path(dir.path(), "two.json");
    let pt = path(dir.path(), "pt.json");
    let map = path(dir.path(), "map.json");
    fs::write(
        &two,
        r#"{"worlds": ["a", "b"], "r1": [["a", "a"], ["b", "b"]]}"#,
    )
    .unwrap();
    fs::write(
        &pt,
        r#"{"worlds": ["x", "y"], "r1": [["x", "x"], ["x", "y"], ["y", "y"]]}"#,
    )
    .unwrap();
    fs::write(&map, r#"{"map": {"a": "x", "b": "y"}}"#).unwrap();
    let o = run(&["pmorph", "--src", &two, "--tgt", &pt, "--map", &map]);
    assert_eq!(code(&o), 10);
    assert_eq!(json(&o)["lifting"][0], false);
}

#[test]
fn filtrate_writes_a_model_of_l() {
    let dir = tempfile::tempdir().unwrap();
    let model = path(dir.path(), "m.json");
    let out = path(dir.path(), "q.json");
    fs::write(
        &model,
        r#"{"worlds": ["w0", "w1", "w2"], "r1": [["w0", "w0"], ["w0", "w1"], ["w0", "w2"], ["w1", "w1"], ["w2", "w2"]],
            "r2": [["w0", "w0"], ["w1", "w1"], ["w2", "w2"]], "valuation": {"p": ["w1", "w2"]}}"#,
    )
    .unwrap();
    let o = run(&[
        "filtrate",
        "--model",
        &model,
        "--formula",
        "[]1 p",
        "--out",
        &out,
    ]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["check"]["lemma_holds"], true);
    assert_eq!(v["class_of"]["w2"], "[w1]");
    let q: ModelJson = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(q.worlds.len(), 2);
}

#[test]
fn product_check_big_f() {
    let o = run(&[
        "product-check",
        "--lemma",
        "big-f",
        "--depth",
        "1",
        "--levels",
        "2",
    ]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["obligations"].as_array().unwrap().len(), 5);
    let o = run(&[
        "product-check",
        "--lemma",
        "product-ax",
        "--seed",
        "1",
        "--valuations",
        "5",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["report"]["failures"], 0);
}

#[test]
fn verify_is_deterministic() {
    let a = run(&["verify", "all", "--seed", "7"]);
    let b = run(&["verify", "all", "--seed", "7"]);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stdout));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let last: Value = serde_json::from_str(text.lines().last().unwrap()).unwrap();
    assert_eq!(last["summary"]["failed"], 0);
    for suite in ["correspondence", "trees"] {
        assert_eq!(code(&run(&["verify", suite])), 0);
    }
}
