//! `bimodal`: command-line front end.
//!
//! Exit codes: 0 success, 10 refuted or counterexample found, 2 usage or
//! input error, 3 budget exceeded.

mod suite;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use bimodal::correspond::{
    check_correspondence_sweep, sampled_correspondence_sweep, Correspondence,
};
use bimodal::decision::{
    check_filtration, check_proof, consistency_crosscheck, decide, filtrate_with,
    frame_validates_logic, verify_refutation, Decision, DecisionError, FiltrationMode, LogicId,
    ProofScript,
};
use bimodal::formula::{parse, Formula};
use bimodal::kripke::{Frame, FrameJson, KripkeError, ModelJson};
use bimodal::pmorph::{check_generated_pmorphism, check_pmorphism, check_spaces, FrameMap};
use bimodal::random::seeded;
use bimodal::topo::{
    alexandrov, alexandrov2, check_g_pmorphism, is_weakly_scattered, product_axl_check,
    verify_big_f,
};
use bimodal::trees::{
    build_covering_map, build_g_onto_l_frame, g_depths, gen_t2, gen_t22, gen_t22p2,
};

const REFUTED: u8 = 10;

#[derive(Parser)]
#[command(
    name = "bimodal",
    version,
    about = "Workbench for S4.1 * S4 + <>1 []2 (<>1 p -> []1 p)"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxiomArg {
    #[value(name = "A1")]
    A1,
    #[value(name = "AxL")]
    AxL,
}

#[derive(Clone, Copy, ValueEnum)]
enum TreeKind {
    #[value(name = "T2")]
    T2,
    #[value(name = "T22")]
    T22,
    #[value(name = "T22p2")]
    T22p2,
}

#[derive(Clone, Copy, ValueEnum)]
enum Lemma {
    ProductAx,
    GPmorphism,
    BigF,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a formula and print its normal form and measures.
    Parse { formula: String },
    /// Bounded countermodel search.
    Decide {
        #[arg(long)]
        logic: LogicId,
        #[arg(long)]
        formula: String,
        #[arg(long)]
        max_size: usize,
        #[arg(long)]
        emit_dot: Option<PathBuf>,
    },
    /// Check a JSON-lines proof script.
    ProveCheck {
        #[arg(long)]
        logic: LogicId,
        file: PathBuf,
        /// Also search for a countermodel to the conclusion up to this size.
        #[arg(long)]
        crosscheck: Option<usize>,
    },
    /// Evaluate the frame conditions of every logic, or of one.
    CheckFrame {
        frame: PathBuf,
        #[arg(long)]
        logic: Option<LogicId>,
    },
    /// Compare modal validity with the first-order condition frame by frame.
    Correspond {
        #[arg(long, value_enum)]
        axiom: AxiomArg,
        #[arg(long)]
        max_size: usize,
        /// Every labeled frame up to the size; otherwise random frames of that size.
        #[arg(long)]
        exhaustive: bool,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Filtrate a model of L through a formula.
    Filtrate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        formula: String,
        #[arg(long)]
        two_cell: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a map between frames.
    Pmorph {
        #[arg(long)]
        src: PathBuf,
        #[arg(long)]
        tgt: PathBuf,
        #[arg(long)]
        map: PathBuf,
        /// Check openness and continuity of the up-set topologies instead.
        #[arg(long)]
        topological: bool,
    },
    /// Write a truncated tree frame.
    GenTree {
        #[arg(long, value_enum)]
        kind: TreeKind,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        top_depth: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a covering map from a truncated tree onto a rooted frame.
    Cover {
        #[arg(long)]
        target: PathBuf,
        /// Required unless --g is given.
        #[arg(long)]
        depth: Option<usize>,
        /// Map the two-level tree onto a frame of L instead.
        #[arg(long)]
        g: bool,
        #[arg(long)]
        top_depth: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify one of the spatial lemmas at finite scope.
    ProductCheck {
        #[arg(long, value_enum)]
        lemma: Lemma,
        #[arg(long, default_value_t = 1)]
        depth: usize,
        #[arg(long)]
        levels: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        valuations: usize,
        /// Catalogue size for product-ax.
        #[arg(long, default_value_t = 3)]
        max_points: usize,
    },
    /// Run a verification suite at desk-scale parameters.
    Verify {
        #[arg(value_enum, default_value_t = suite::Suite::All)]
        suite: suite::Suite,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

/// Writes one line to stdout; a closed pipe ends the process quietly.
pub(crate) fn line(text: impl std::fmt::Display) {
    use std::io::Write;
    if let Err(e) = writeln!(std::io::stdout().lock(), "{text}") {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: writing output: {e}");
        std::process::exit(2);
    }
}

fn print<T: Serialize>(v: &T) -> Result<()> {
    line(serde_json::to_string_pretty(v)?);
    Ok(())
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_json<T: Serialize>(path: &Path, v: &T) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(v)? + "\n")
        .with_context(|| format!("writing {}", path.display()))
}

fn read_frame(path: &Path) -> Result<Frame> {
    Ok(read_json::<FrameJson>(path)?.to_frame()?)
}

fn formula(text: &str) -> Result<Formula> {
    parse(text).with_context(|| format!("parsing formula {text:?}"))
}

fn status(ok: bool) -> u8 {
    if ok {
        0
    } else {
        REFUTED
    }
}

#[derive(Serialize, Deserialize)]
struct MapFile {
    map: BTreeMap<String, String>,
}

fn run(cmd: Cmd) -> Result<u8> {
    match cmd {
        Cmd::Parse { formula: text } => {
            let f = formula(&text)?;
            print(&serde_json::json!({
                "formula": f.render(),
                "normalized": f.normalize().render(),
                "size": f.size(),
                "subformulas": f.subformulas().len(),
                "modal_depth": f.modal_depth(),
                "vars": f.vars(),
            }))?;
            Ok(0)
        }
        Cmd::Decide {
            logic,
            formula: text,
            max_size,
            emit_dot,
        } => {
            let f = formula(&text)?;
            let d = decide(&f, logic, max_size)?;
            if let Decision::Refuted { model, .. } = &d {
                if !verify_refutation(&d, &f, logic)? {
                    bail!("internal error: countermodel failed re-verification");
                }
                if let Some(path) = emit_dot {
                    fs::write(&path, model.to_model()?.frame.to_dot(false))
                        .with_context(|| format!("writing {}", path.display()))?;
                }
            }
            print(&d)?;
            Ok(status(!d.is_refuted()))
        }
        Cmd::ProveCheck {
            logic,
            file,
            crosscheck,
        } => {
            let text =
                fs::read_to_string(&file).with_context(|| format!("reading {}", file.display()))?;
            let ps = ProofScript::from_json_lines(&text)?;
            match crosscheck {
                Some(cap) => {
                    let c = consistency_crosscheck(&ps, logic, cap)?;
                    print(&c)?;
                    if c.conflict {
                        bail!("a certified theorem was refuted");
                    }
                    Ok(status(c.verdict.accepted().is_some()))
                }
                None => {
                    let v = check_proof(&ps, logic);
                    print(&v)?;
                    Ok(status(v.accepted().is_some()))
                }
            }
        }
        Cmd::CheckFrame { frame, logic } => {
            let fr = read_frame(&frame)?;
            let logics = logic.map_or(LogicId::ALL.to_vec(), |l| vec![l]);
            let out: BTreeMap<String, _> = logics
                .iter()
                .map(|&l| (l.name().to_string(), frame_validates_logic(&fr, l)))
                .collect();
            let ok = out.values().all(|c| c.holds());
            print(&serde_json::json!({ "rooted": fr.is_rooted(), "logics": out }))?;
            Ok(status(ok))
        }
        Cmd::Correspond {
            axiom,
            max_size,
            exhaustive,
            samples,
            seed,
        } => {
            if max_size == 0 {
                bail!("--max-size must be positive");
            }
            let which = match axiom {
                AxiomArg::A1 => Correspondence::A1,
                AxiomArg::AxL => Correspondence::AxL,
            };
            let reports = if exhaustive {
                check_correspondence_sweep(max_size, which)?
            } else {
                sampled_correspondence_sweep(&mut seeded(seed), max_size, which, samples)?
            };
            for r in &reports {
                line(serde_json::to_string(r)?);
            }
            let mismatches = reports.iter().filter(|r| r.mismatch()).count();
            line(serde_json::json!({
                "summary": {
                    "frames": reports.len(),
                    "valid": reports.iter().filter(|r| r.modal_valid).count(),
                    "mismatches": mismatches,
                    "exhaustive": exhaustive,
                    "seed": (!exhaustive).then_some(seed),
                }
            }));
            Ok(status(mismatches == 0))
        }
        Cmd::Filtrate {
            model,
            formula: text,
            two_cell,
            out,
        } => {
            let m = read_json::<ModelJson>(&model)?.to_model()?;
            let f = formula(&text)?;
            let mode = if two_cell {
                FiltrationMode::TwoCell
            } else {
                FiltrationMode::ThreeCell
            };
            let res = filtrate_with(&m, &f, mode)?;
            let check = check_filtration(&m, &f, &res)?;
            if let Some(path) = out {
                write_json(&path, &res.model.to_json())?;
            }
            let class_of: BTreeMap<&str, &str> = m
                .frame
                .worlds()
                .map(|x| (m.frame.name(x), res.model.frame.name(res.class_of[x])))
                .collect();
            print(&serde_json::json!({
                "mode": mode,
                "check": check,
                "class_of": class_of,
                "model": res.model.to_json(),
            }))?;
            Ok(status(check.ok()))
        }
        Cmd::Pmorph {
            src,
            tgt,
            map,
            topological,
        } => {
            let (s, t) = (read_frame(&src)?, read_frame(&tgt)?);
            let pairs = read_json::<MapFile>(&map)?.map;
            let m = FrameMap::from_names(s, t, &pairs)?;
            let rep = if topological {
                if m.source.arity() == 1 {
                    let (a, b) = (alexandrov(&m.source)?, alexandrov(&m.target)?);
                    check_spaces(&[(&a, &b)], &m.mapping)?
                } else {
                    let (a, b) = (alexandrov2(&m.source)?, alexandrov2(&m.target)?);
                    check_spaces(&[(&a.h, &b.h), (&a.v, &b.v)], &m.mapping)?
                }
            } else {
                check_pmorphism(&m)?
            };
            print(&rep)?;
            Ok(status(rep.ok()))
        }
        Cmd::GenTree {
            kind,
            depth,
            top_depth,
            out,
        } => {
            let fr = match kind {
                TreeKind::T2 => gen_t2(depth).frame(),
                TreeKind::T22 => gen_t22(depth).frame(),
                TreeKind::T22p2 => gen_t22p2(depth, top_depth.unwrap_or(depth)).frame(),
            };
            write_json(&out, &fr.to_json())?;
            print(&serde_json::json!({ "points": fr.size(), "out": out }))?;
            Ok(0)
        }
        Cmd::Cover {
            target,
            depth,
            g,
            top_depth,
            out,
        } => {
            let fr = read_frame(&target)?;
            let (names, rep, depths) = if g {
                let (d1, d2) = match (depth, top_depth) {
                    (Some(d1), Some(d2)) => (d1, d2),
                    _ => {
                        let (d1, d2) = g_depths(&fr)?;
                        (depth.unwrap_or(d1), top_depth.unwrap_or(d2))
                    }
                };
                let gm = build_g_onto_l_frame(&fr, d1, d2)?;
                (gm.map.to_frame_map().to_names(), gm.check()?, vec![d1, d2])
            } else {
                let Some(d) = depth else {
                    bail!("--depth is required without --g")
                };
                let gm = build_covering_map(&fr, d)?;
                (
                    gm.to_frame_map().to_names(),
                    check_generated_pmorphism(&gm)?,
                    vec![d],
                )
            };
            if let Some(path) = out {
                write_json(&path, &MapFile { map: names })?;
            }
            print(&serde_json::json!({ "depths": depths, "report": rep }))?;
            Ok(status(rep.ok()))
        }
        Cmd::ProductCheck {
            lemma,
            depth,
            levels,
            seed,
            valuations,
            max_points,
        } => match lemma {
            Lemma::ProductAx => {
                let rep = product_axl_check(
                    &mut seeded(seed),
                    max_points,
                    valuations,
                    is_weakly_scattered,
                );
                print(&serde_json::json!({ "seed": seed, "report": rep }))?;
                Ok(status(rep.ok()))
            }
            Lemma::GPmorphism => {
                let rep = check_g_pmorphism(depth)?;
                print(&rep)?;
                Ok(status(rep.ok()))
            }
            Lemma::BigF => {
                let rep = verify_big_f(depth, levels.unwrap_or(depth))?;
                print(&rep)?;
                Ok(status(rep.ok()))
            }
        },
        Cmd::Verify { suite, seed } => {
            let ok = suite::run(suite, seed)?;
            Ok(status(ok))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    let budget = e.chain().any(|c| {
        matches!(c.downcast_ref(), Some(KripkeError::BudgetExceeded { .. }))
            || matches!(
                c.downcast_ref(),
                Some(DecisionError::Kripke(KripkeError::BudgetExceeded { .. }))
            )
    });
    if budget {
        3
    } else {
        2
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
