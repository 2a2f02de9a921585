use std::collections::HashMap;

use super::{Frame, Model, Result, World, WorldSet};
use crate::formula::{Formula, Modality};

fn full(n: usize) -> WorldSet {
    let mut s = WorldSet::with_capacity(n);
    s.insert_range(..);
    s
}

fn complement(s: &WorldSet) -> WorldSet {
    let mut c = s.clone();
    c.toggle_range(..);
    c
}

/// `{x | R(x) ⊆ s}`.
fn box_of(fr: &Frame, m: Modality, s: &WorldSet) -> Result<WorldSet> {
    let rel = fr.relation(m)?;
    let mut out = WorldSet::with_capacity(fr.size());
    out.extend(
        fr.worlds()
            .filter(|&x| rel.succ(x).iter().all(|&y| s.contains(y))),
    );
    Ok(out)
}

/// `{x | R(x) ∩ s ≠ ∅}`.
fn diamond_of(fr: &Frame, m: Modality, s: &WorldSet) -> Result<WorldSet> {
    let rel = fr.relation(m)?;
    let mut out = WorldSet::with_capacity(fr.size());
    out.extend(
        fr.worlds()
            .filter(|&x| rel.succ(x).iter().any(|&y| s.contains(y))),
    );
    Ok(out)
}

fn eval<'a>(
    m: &Model,
    f: &'a Formula,
    memo: &mut HashMap<&'a Formula, WorldSet>,
) -> Result<WorldSet> {
    if let Some(s) = memo.get(f) {
        return Ok(s.clone());
    }
    let n = m.frame.size();
    let out = match f {
        Formula::Bottom => WorldSet::with_capacity(n),
        Formula::Top => full(n),
        Formula::Var(p) => m.letter(p),
        Formula::Not(a) => complement(&eval(m, a, memo)?),
        Formula::And(a, b) => {
            let mut s = eval(m, a, memo)?;
            s.intersect_with(&eval(m, b, memo)?);
            s
        }
        Formula::Or(a, b) => {
            let mut s = eval(m, a, memo)?;
            s.union_with(&eval(m, b, memo)?);
            s
        }
        Formula::Implies(a, b) => {
            let mut s = complement(&eval(m, a, memo)?);
            s.union_with(&eval(m, b, memo)?);
            s
        }
        Formula::Box(i, a) => box_of(&m.frame, *i, &eval(m, a, memo)?)?,
        Formula::Diamond(i, a) => diamond_of(&m.frame, *i, &eval(m, a, memo)?)?,
    };
    memo.insert(f, out.clone());
    Ok(out)
}

/// The set of worlds where `f` is true.
pub fn extension(m: &Model, f: &Formula) -> Result<WorldSet> {
    eval(m, f, &mut HashMap::new())
}

/// Extensions of several formulas sharing one memo table.
pub fn extensions(m: &Model, fs: &[Formula]) -> Result<Vec<WorldSet>> {
    let mut memo = HashMap::new();
    fs.iter().map(|f| eval(m, f, &mut memo)).collect()
}

/// `M, x ⊨ f`.
pub fn holds(m: &Model, x: World, f: &Formula) -> Result<bool> {
    m.frame.check_world(x)?;
    Ok(extension(m, f)?.contains(x))
}
