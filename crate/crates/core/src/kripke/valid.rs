//! Frame validity by exhaustive valuation search.
//!
//! Valuations of the `k` letters of a formula over `n` worlds are numbered
//! `0..2^(k·n)`; bit `j·n + x` of the number says whether letter `j` is true
//! at world `x`. The evaluator runs 64 consecutive valuations at once, one
//! per bit lane of a `u64`.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use super::{extension, Frame, KripkeError, Model, Result, World};
use crate::formula::Formula;

/// Default cap on `k·n`, the number of valuation bits searched.
pub const DEFAULT_BIT_CAP: usize = 24;

const LANES: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Validity {
    Valid,
    CounterExample {
        valuation: BTreeMap<String, Vec<World>>,
        world: World,
    },
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid)
    }
}

#[derive(Clone, Copy, Debug)]
enum Op {
    Bot,
    Top,
    Var(usize),
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Imp(usize, usize),
    Box(usize, usize),
    Dia(usize, usize),
}

/// A formula flattened into a post-order instruction list with shared subterms.
#[derive(Clone, Debug)]
pub(crate) struct Program {
    ops: Vec<Op>,
    vars: Vec<String>,
    max_rel: Option<usize>,
}

impl Program {
    pub fn compile(f: &Formula) -> Program {
        let vars: Vec<String> = f.vars().into_iter().collect();
        let mut p = Program {
            ops: Vec::new(),
            vars,
            max_rel: None,
        };
        let mut memo = HashMap::new();
        p.emit(f, &mut memo);
        p
    }

    fn emit<'a>(&mut self, f: &'a Formula, memo: &mut HashMap<&'a Formula, usize>) -> usize {
        if let Some(&i) = memo.get(f) {
            return i;
        }
        let op = match f {
            Formula::Bottom => Op::Bot,
            Formula::Top => Op::Top,
            Formula::Var(p) => Op::Var(self.vars.binary_search(p).expect("collected letter")),
            Formula::Not(a) => Op::Not(self.emit(a, memo)),
            Formula::And(a, b) => Op::And(self.emit(a, memo), self.emit(b, memo)),
            Formula::Or(a, b) => Op::Or(self.emit(a, memo), self.emit(b, memo)),
            Formula::Implies(a, b) => Op::Imp(self.emit(a, memo), self.emit(b, memo)),
            Formula::Box(m, a) => {
                self.max_rel = self.max_rel.max(Some(m.rel()));
                Op::Box(m.rel(), self.emit(a, memo))
            }
            Formula::Diamond(m, a) => {
                self.max_rel = self.max_rel.max(Some(m.rel()));
                Op::Dia(m.rel(), self.emit(a, memo))
            }
        };
        self.ops.push(op);
        memo.insert(f, self.ops.len() - 1);
        self.ops.len() - 1
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    /// Highest relation position the formula mentions.
    pub fn max_rel(&self) -> Option<usize> {
        self.max_rel
    }

    fn eval_chunk(&self, n: usize, rows: &[&[u64]], chunk: u64, buf: &mut [u64]) {
        for (i, op) in self.ops.iter().enumerate() {
            for x in 0..n {
                let v = match *op {
                    Op::Bot => 0,
                    Op::Top => !0,
                    Op::Var(j) => {
                        let b = j * n + x;
                        if b < 6 {
                            LANES[b]
                        } else if (chunk >> (b - 6)) & 1 == 1 {
                            !0
                        } else {
                            0
                        }
                    }
                    Op::Not(a) => !buf[a * n + x],
                    Op::And(a, c) => buf[a * n + x] & buf[c * n + x],
                    Op::Or(a, c) => buf[a * n + x] | buf[c * n + x],
                    Op::Imp(a, c) => !buf[a * n + x] | buf[c * n + x],
                    Op::Box(r, a) => {
                        let mut acc = !0u64;
                        let mut succ = rows[r][x];
                        while succ != 0 {
                            let y = succ.trailing_zeros() as usize;
                            acc &= buf[a * n + y];
                            succ &= succ - 1;
                        }
                        acc
                    }
                    Op::Dia(r, a) => {
                        let mut acc = 0u64;
                        let mut succ = rows[r][x];
                        while succ != 0 {
                            let y = succ.trailing_zeros() as usize;
                            acc |= buf[a * n + y];
                            succ &= succ - 1;
                        }
                        acc
                    }
                };
                buf[i * n + x] = v;
            }
        }
    }

    /// Smallest falsifying `(valuation number, world)` over a range of chunks.
    fn scan(
        &self,
        n: usize,
        rows: &[&[u64]],
        chunks: std::ops::Range<u64>,
        lane_mask: u64,
    ) -> Option<(u64, World)> {
        let mut buf = vec![0u64; self.ops.len() * n];
        let root = (self.ops.len() - 1) * n;
        for chunk in chunks {
            self.eval_chunk(n, rows, chunk, &mut buf);
            let mut best: Option<(u32, World)> = None;
            for x in 0..n {
                let fail = !buf[root + x] & lane_mask;
                if fail != 0 {
                    let lane = fail.trailing_zeros();
                    if best.is_none_or(|(l, _)| lane < l) {
                        best = Some((lane, x));
                    }
                }
            }
            if let Some((lane, x)) = best {
                return Some((chunk * 64 + lane as u64, x));
            }
        }
        None
    }

    /// First falsifying valuation and world on a frame given by row masks,
    /// or `None` when the formula is valid there. `n ≤ 64` and `k·n < 64`.
    pub fn counterexample(&self, n: usize, rows: &[&[u64]]) -> Option<(u64, World)> {
        let bits = self.vars.len() * n;
        let (chunks, lane_mask) = if bits >= 6 {
            (1u64 << (bits - 6), !0u64)
        } else {
            (
                1,
                (1u64 << (1u64 << bits)).wrapping_sub(1) | if bits == 6 { !0 } else { 0 },
            )
        };
        if chunks <= 256 {
            return self.scan(n, rows, 0..chunks, lane_mask);
        }
        let block = 256u64;
        (0..chunks.div_ceil(block))
            .into_par_iter()
            .find_map_first(|b| {
                self.scan(n, rows, b * block..((b + 1) * block).min(chunks), lane_mask)
            })
    }

    /// Unpacks a valuation number into letter extensions.
    pub fn decode(&self, n: usize, valuation: u64) -> BTreeMap<String, Vec<World>> {
        self.vars
            .iter()
            .enumerate()
            .map(|(j, p)| {
                let ws = (0..n)
                    .filter(|&x| (valuation >> (j * n + x)) & 1 == 1)
                    .collect();
                (p.clone(), ws)
            })
            .collect()
    }
}

/// Exhaustive frame validity with the default bit cap.
pub fn frame_valid(fr: &Frame, f: &Formula) -> Result<Validity> {
    frame_valid_with_cap(fr, f, DEFAULT_BIT_CAP)
}

/// Exhaustive frame validity; fails with `BudgetExceeded` when
/// `vars(f) · |W|` exceeds `cap`.
pub fn frame_valid_with_cap(fr: &Frame, f: &Formula, cap: usize) -> Result<Validity> {
    let prog = Program::compile(f);
    if let Some(r) = prog.max_rel() {
        if r >= fr.arity() {
            return Err(KripkeError::MissingRelation(r as u8 + 1));
        }
    }
    let n = fr.size();
    let bits = prog.vars().len() * n;
    if bits > cap || bits >= 64 {
        return Err(KripkeError::BudgetExceeded { bits, cap });
    }
    if n > 64 {
        // Only closed formulas reach here: a single valuation.
        let ext = extension(&Model::new(fr.clone()), f)?;
        return Ok(match fr.worlds().find(|&x| !ext.contains(x)) {
            None => Validity::Valid,
            Some(world) => Validity::CounterExample {
                valuation: BTreeMap::new(),
                world,
            },
        });
    }
    let masks: Vec<Vec<u64>> = fr.relations().iter().map(|r| r.masks()).collect();
    let rows: Vec<&[u64]> = masks.iter().map(Vec::as_slice).collect();
    Ok(match prog.counterexample(n, &rows) {
        None => Validity::Valid,
        Some((v, world)) => Validity::CounterExample {
            valuation: prog.decode(n, v),
            world,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse, Axiom};
    use crate::kripke::fixtures::*;
    use crate::kripke::holds;

    #[test]
    fn reflexive_point_validates_mckinsey() {
        let p = frame(1, &[(0, 0)], None);
        assert_eq!(
            frame_valid(&p, &Axiom::A1One.formula()).unwrap(),
            Validity::Valid
        );
    }

    #[test]
    fn cluster_refutes_mckinsey() {
        // Brute force over the four valuations of p on {w0, w1}:
        // {} and {w0,w1} validate A1 everywhere; {w0} and {w1} falsify it at
        // both worlds. Valuation number 1 is V(p) = {w0}.
        let k = cluster2();
        let a1 = Axiom::A1One.formula();
        let mut falsifying = vec![];
        for v in 0u32..4 {
            let mut m = Model::new(k.clone());
            m.set("p", (0..2).filter(|&x| v >> x & 1 == 1));
            for x in 0..2 {
                if !holds(&m, x, &a1).unwrap() {
                    falsifying.push((v, x));
                }
            }
        }
        assert_eq!(falsifying, [(1, 0), (1, 1), (2, 0), (2, 1)]);
        match frame_valid(&k, &a1).unwrap() {
            Validity::CounterExample { valuation, world } => {
                assert_eq!(valuation["p"], vec![0]);
                assert_eq!(world, 0);
            }
            Validity::Valid => panic!("cluster validates A1"),
        }
    }

    #[test]
    fn tautology_is_valid_everywhere() {
        let f = parse("p -> p").unwrap();
        for fr in [point(), chain2(), cluster2()] {
            assert!(frame_valid(&fr, &f).unwrap().is_valid());
        }
    }

    #[test]
    fn budget_is_enforced() {
        let fr = frame(9, &[(0, 0)], None);
        let f = parse("p & q & r -> p").unwrap();
        assert_eq!(
            frame_valid(&fr, &f),
            Err(KripkeError::BudgetExceeded { bits: 27, cap: 24 })
        );
        assert!(frame_valid_with_cap(&fr, &f, 27).unwrap().is_valid());
    }

    #[test]
    fn agrees_with_pointwise_evaluation() {
        // Internal consistency: a counterexample falsifies under `holds`, and
        // Valid means no valuation with up to 2 letters falsifies anywhere.
        let fr = frame(
            3,
            &[(0, 0), (0, 1), (1, 1), (1, 2), (2, 2), (0, 2)],
            Some(&[(0, 0), (1, 1), (2, 2), (2, 0)]),
        );
        let formulas = [
            "[]1 p -> []2 p",
            "<>1 []1 p -> []1 <>1 p",
            "[]1 (p | q) -> []1 p | <>1 q",
            "[]1 p -> []1 []1 p",
        ];
        for text in formulas {
            let f = parse(text).unwrap();
            let verdict = frame_valid(&fr, &f).unwrap();
            let mut any_fail = false;
            for v in 0u32..64 {
                let mut m = Model::new(fr.clone());
                m.set("p", (0..3).filter(|&x| v >> x & 1 == 1));
                m.set("q", (0..3).filter(|&x| v >> (x + 3) & 1 == 1));
                any_fail |= (0..3).any(|x| !holds(&m, x, &f).unwrap());
            }
            assert_eq!(verdict.is_valid(), !any_fail, "{text}");
            if let Validity::CounterExample { valuation, world } = verdict {
                let m = Model::with_valuation(fr.clone(), valuation).unwrap();
                assert!(!holds(&m, world, &f).unwrap());
            }
        }
    }

    #[test]
    fn closed_formulas_on_large_frames() {
        let n = 70;
        let fr = frame(n, &(0..n).map(|x| (x, x)).collect::<Vec<_>>(), None);
        assert!(frame_valid(&fr, &parse("[]1 true").unwrap())
            .unwrap()
            .is_valid());
        assert!(!frame_valid(&fr, &parse("[]1 false").unwrap())
            .unwrap()
            .is_valid());
    }
}
