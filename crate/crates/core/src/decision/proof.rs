//! Hilbert-style proof scripts and their checker.
//!
//! A script is JSON lines, one `{"formula": ..., "just": ...}` object per
//! line. Lines are numbered from 1 and may only cite earlier lines. Formulas
//! are compared after rewriting into `{false, ->, []1, []2}`, so `<>` and
//! `~[]~` are interchangeable.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{decide, Decision, DecisionError, LogicId};
use crate::formula::{parse, Axiom, Formula, Modality};

/// Truth tables are only built up to this many atoms.
pub const MAX_TAUT_ATOMS: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Justification {
    /// An instance of a named axiom; without `subst` the instance is found
    /// by matching.
    Axiom {
        name: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        subst: Option<BTreeMap<String, Formula>>,
    },
    /// A substitution instance of a classical tautology.
    Taut,
    /// `from = [i, j]` with line `j` of the form `A -> B` and line `i` equal to `A`.
    Mp {
        from: [usize; 2],
    },
    Nec {
        from: usize,
        index: u8,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofLine {
    pub formula: Formula,
    pub just: Justification,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProofScript {
    pub lines: Vec<ProofLine>,
}

#[derive(Debug, Error)]
#[error("line {line}: {source}")]
pub struct ScriptParseError {
    pub line: usize,
    pub source: serde_json::Error,
}

impl ProofScript {
    pub fn from_json_lines(text: &str) -> Result<Self, ScriptParseError> {
        let mut lines = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            if raw.trim().is_empty() {
                continue;
            }
            let line = serde_json::from_str(raw).map_err(|source| ScriptParseError {
                line: i + 1,
                source,
            })?;
            lines.push(line);
        }
        Ok(ProofScript { lines })
    }

    pub fn to_json_lines(&self) -> String {
        self.lines
            .iter()
            .map(|l| serde_json::to_string(l).expect("proof lines serialize") + "\n")
            .collect()
    }

    fn push(&mut self, text: &str, just: Justification) -> usize {
        self.lines.push(ProofLine {
            formula: parse(text).expect("fixture formula"),
            just,
        });
        self.lines.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum RejectReason {
    EmptyScript,
    BadReference { reference: usize },
    UnknownAxiom { name: String },
    AxiomNotInLogic { name: String },
    NotAnInstance { name: String },
    NotTautology,
    TooManyAtoms { count: usize },
    MpMismatch,
    NecMismatch,
    BadModality { index: u8 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ProofVerdict {
    Accepted { formula: Formula },
    Rejected { line: usize, reason: RejectReason },
}

impl ProofVerdict {
    pub fn accepted(&self) -> Option<&Formula> {
        match self {
            ProofVerdict::Accepted { formula } => Some(formula),
            ProofVerdict::Rejected { .. } => None,
        }
    }
}

/// Binds schema letters to subformulas, consistently.
fn matches<'a>(pat: &Formula, f: &'a Formula, sigma: &mut HashMap<String, &'a Formula>) -> bool {
    match (pat, f) {
        (Formula::Var(p), _) => match sigma.get(p) {
            Some(g) => *g == f,
            None => {
                sigma.insert(p.clone(), f);
                true
            }
        },
        (Formula::Bottom, Formula::Bottom) => true,
        (Formula::Implies(a, b), Formula::Implies(c, d)) => {
            matches(a, c, sigma) && matches(b, d, sigma)
        }
        (Formula::Box(m, a), Formula::Box(n, c)) => m == n && matches(a, c, sigma),
        _ => false,
    }
}

fn atoms<'a>(f: &'a Formula, out: &mut HashMap<&'a Formula, usize>) {
    match f {
        Formula::Bottom => {}
        Formula::Implies(a, b) => {
            atoms(a, out);
            atoms(b, out);
        }
        _ => {
            let k = out.len();
            out.entry(f).or_insert(k);
        }
    }
}

fn eval_prop(f: &Formula, idx: &HashMap<&Formula, usize>, row: u32) -> bool {
    match f {
        Formula::Bottom => false,
        Formula::Implies(a, b) => !eval_prop(a, idx, row) || eval_prop(b, idx, row),
        _ => row >> idx[f] & 1 == 1,
    }
}

/// Tautology test on a normalized formula, with `Var` and `Box` subterms as atoms.
fn tautology(f: &Formula) -> Result<bool, RejectReason> {
    let mut idx = HashMap::new();
    atoms(f, &mut idx);
    if idx.len() > MAX_TAUT_ATOMS {
        return Err(RejectReason::TooManyAtoms { count: idx.len() });
    }
    Ok((0..1u32 << idx.len()).all(|row| eval_prop(f, &idx, row)))
}

fn check_line(
    lg: LogicId,
    done: &[Formula],
    i: usize,
    f: &Formula,
    just: &Justification,
) -> Result<(), RejectReason> {
    let earlier = |r: usize| {
        if r >= 1 && r <= i {
            Ok(&done[r - 1])
        } else {
            Err(RejectReason::BadReference { reference: r })
        }
    };
    match just {
        Justification::Axiom { name, subst } => {
            let ax = Axiom::from_name(name)
                .ok_or_else(|| RejectReason::UnknownAxiom { name: name.clone() })?;
            if !lg.axioms().contains(&ax) {
                return Err(RejectReason::AxiomNotInLogic { name: name.clone() });
            }
            let schema = ax.formula();
            let ok = match subst {
                Some(s) => schema.substitute_all(s).normalize() == *f,
                None => matches(&schema.normalize(), f, &mut HashMap::new()),
            };
            if ok {
                Ok(())
            } else {
                Err(RejectReason::NotAnInstance { name: name.clone() })
            }
        }
        Justification::Taut => {
            if tautology(f)? {
                Ok(())
            } else {
                Err(RejectReason::NotTautology)
            }
        }
        Justification::Mp { from: [a, b] } => {
            let (pa, pb) = (earlier(*a)?, earlier(*b)?);
            match pb {
                Formula::Implies(x, y) if **x == *pa && **y == *f => Ok(()),
                _ => Err(RejectReason::MpMismatch),
            }
        }
        Justification::Nec { from, index } => {
            let m =
                Modality::from_index(*index).ok_or(RejectReason::BadModality { index: *index })?;
            let prev = earlier(*from)?;
            if Formula::boxed(m, prev.clone()) == *f {
                Ok(())
            } else {
                Err(RejectReason::NecMismatch)
            }
        }
    }
}

/// Accepts when every line is justified; the verdict carries the last line.
pub fn check_proof(ps: &ProofScript, lg: LogicId) -> ProofVerdict {
    if ps.lines.is_empty() {
        return ProofVerdict::Rejected {
            line: 0,
            reason: RejectReason::EmptyScript,
        };
    }
    let mut done = Vec::with_capacity(ps.lines.len());
    for (i, line) in ps.lines.iter().enumerate() {
        let f = line.formula.normalize();
        if let Err(reason) = check_line(lg, &done, i, &f, &line.just) {
            return ProofVerdict::Rejected {
                line: i + 1,
                reason,
            };
        }
        done.push(f);
    }
    ProofVerdict::Accepted {
        formula: ps.lines.last().expect("nonempty").formula.clone(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossCheck {
    pub verdict: ProofVerdict,
    pub decision: Option<Decision>,
    /// A certified theorem was refuted by the search.
    pub conflict: bool,
}

/// Runs the search on the conclusion of every accepted proof.
pub fn consistency_crosscheck(
    ps: &ProofScript,
    lg: LogicId,
    size_cap: usize,
) -> Result<CrossCheck, DecisionError> {
    let verdict = check_proof(ps, lg);
    let decision = match verdict.accepted() {
        Some(f) => Some(decide(f, lg, size_cap)?),
        None => None,
    };
    let conflict = decision.as_ref().is_some_and(Decision::is_refuted);
    Ok(CrossCheck {
        verdict,
        decision,
        conflict,
    })
}

fn axiom(name: &str) -> Justification {
    Justification::Axiom {
        name: name.into(),
        subst: None,
    }
}

fn axiom_with(name: &str, pairs: &[(&str, &str)]) -> Justification {
    Justification::Axiom {
        name: name.into(),
        subst: Some(
            pairs
                .iter()
                .map(|(p, t)| (p.to_string(), parse(t).expect("fixture formula")))
                .collect(),
        ),
    }
}

const FIXTURE_BODIES: [&str; 8] = [
    "p",
    "q",
    "p & q",
    "~p",
    "[]2 p",
    "<>1 q",
    "p -> q",
    "[]1 (p | q)",
];

/// Named proofs accepted under `lg`.
pub fn fixture_proofs(lg: LogicId) -> Vec<(String, ProofScript)> {
    let mut out = Vec::new();
    for (k, phi) in FIXTURE_BODIES.iter().enumerate() {
        let phi = format!("({phi})");
        for i in [1u8, 2] {
            let mut ps = ProofScript::default();
            ps.push(&format!("[]{i} {phi} -> {phi}"), axiom(&format!("T{i}")));
            out.push((format!("t{i}-{k}"), ps));

            let mut ps = ProofScript::default();
            let l1 = ps.push(&format!("{phi} -> {phi}"), Justification::Taut);
            ps.push(
                &format!("[]{i} ({phi} -> {phi})"),
                Justification::Nec { from: l1, index: i },
            );
            out.push((format!("nec{i}-{k}"), ps));

            let mut ps = ProofScript::default();
            let conj = format!("({phi} & r)");
            let l1 = ps.push(&format!("{conj} -> {phi}"), Justification::Taut);
            let l2 = ps.push(
                &format!("[]{i} ({conj} -> {phi})"),
                Justification::Nec { from: l1, index: i },
            );
            let l3 = ps.push(
                &format!("[]{i} ({conj} -> {phi}) -> []{i} {conj} -> []{i} {phi}"),
                axiom_with(&format!("K{i}"), &[("p", &conj), ("q", &phi)]),
            );
            ps.push(
                &format!("[]{i} {conj} -> []{i} {phi}"),
                Justification::Mp { from: [l2, l3] },
            );
            out.push((format!("mono{i}-{k}"), ps));
        }

        let mut ps = ProofScript::default();
        let l1 = ps.push(&format!("[]1 {phi} -> {phi}"), axiom("T1"));
        let l2 = ps.push(&format!("{phi} -> {phi} | r"), Justification::Taut);
        let l3 = ps.push(
            &format!("([]1 {phi} -> {phi}) -> ({phi} -> {phi} | r) -> []1 {phi} -> {phi} | r"),
            Justification::Taut,
        );
        let l4 = ps.push(
            &format!("({phi} -> {phi} | r) -> []1 {phi} -> {phi} | r"),
            Justification::Mp { from: [l1, l3] },
        );
        ps.push(
            &format!("[]1 {phi} -> {phi} | r"),
            Justification::Mp { from: [l2, l4] },
        );
        out.push((format!("weaken-{k}"), ps));

        let mut ps = ProofScript::default();
        ps.push(
            &format!("[]2 {phi} -> []2 []2 {phi}"),
            axiom_with("Four2", &[("p", &phi)]),
        );
        out.push((format!("four2-{k}"), ps));

        if lg != LogicId::FusionS4S4 {
            let mut ps = ProofScript::default();
            ps.push(&format!("[]1 <>1 {phi} -> <>1 []1 {phi}"), axiom("A1_1"));
            out.push((format!("mckinsey-{k}"), ps));
        }
        if lg == LogicId::LogicL {
            let mut ps = ProofScript::default();
            ps.push(
                &format!("<>1 []2 (<>1 {phi} -> []1 {phi})"),
                axiom_with("AxL", &[("p", &phi)]),
            );
            out.push((format!("axl-{k}"), ps));
        }
    }
    if lg == LogicId::LogicL {
        let mut ps = ProofScript::default();
        ps.push("<>1 []2 (<>1 p -> []1 p)", axiom("AxL"));
        out.push(("axl".into(), ps));
    }
    out
}

/// A corrupted copy of `ps`; `kind` picks the corruption. Every kind yields
/// a script that [`check_proof`] must reject.
pub fn mutate_proof(ps: &ProofScript, kind: usize) -> ProofScript {
    let mut out = ps.clone();
    let append_conjunct = |out: &mut ProofScript| {
        let last = out.lines.last_mut().expect("nonempty");
        last.formula = Formula::and(last.formula.clone(), Formula::var("zz"));
    };
    match kind % 4 {
        1 => {
            // Cite the line itself.
            match out.lines.iter_mut().enumerate().find(|(_, l)| {
                matches!(l.just, Justification::Mp { .. } | Justification::Nec { .. })
            }) {
                Some((i, l)) => match &mut l.just {
                    Justification::Mp { from } => from[1] = i + 1,
                    Justification::Nec { from, .. } => *from = i + 1,
                    _ => unreachable!(),
                },
                None => append_conjunct(&mut out),
            }
        }
        2 => {
            // Swap the axiom for one outside every logic, or the modality of a necessitation.
            match out.lines.iter_mut().find(|l| {
                matches!(
                    l.just,
                    Justification::Axiom { .. } | Justification::Nec { .. }
                )
            }) {
                Some(l) => match &mut l.just {
                    Justification::Axiom { name, .. } => *name = "Com".into(),
                    Justification::Nec { index, .. } => *index = 3 - *index,
                    _ => unreachable!(),
                },
                None => append_conjunct(&mut out),
            }
        }
        3 => {
            // Claim a non-tautology as a tautology.
            out.lines.insert(
                0,
                ProofLine {
                    formula: parse("p -> zz").expect("formula"),
                    just: Justification::Taut,
                },
            );
        }
        _ => append_conjunct(&mut out),
    }
    out
}
