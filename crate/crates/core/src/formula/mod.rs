//! Bimodal formulas over the basis `false`, `->`, `[]1`, `[]2`, with the usual
//! classical and diamond abbreviations kept as first-class cases.

mod axioms;
mod parse;

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

pub use axioms::{Axiom, AXIOMS};
pub use parse::{parse, SyntaxError};

/// One of the two modal operators. Serialized as its index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Modality {
    One,
    Two,
}

impl Modality {
    pub const BOTH: [Modality; 2] = [Modality::One, Modality::Two];

    /// The surface index, 1 or 2.
    pub fn index(self) -> u8 {
        match self {
            Modality::One => 1,
            Modality::Two => 2,
        }
    }

    /// Zero-based position of the matching relation in a frame.
    pub fn rel(self) -> usize {
        self.index() as usize - 1
    }

    pub fn from_index(i: u8) -> Option<Self> {
        match i {
            1 => Some(Modality::One),
            2 => Some(Modality::Two),
            _ => None,
        }
    }
}

impl From<Modality> for u8 {
    fn from(m: Modality) -> u8 {
        m.index()
    }
}

impl TryFrom<u8> for Modality {
    type Error = String;

    fn try_from(i: u8) -> Result<Self, String> {
        Modality::from_index(i).ok_or_else(|| format!("modal index must be 1 or 2, got {i}"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Bottom,
    Top,
    Var(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Box(Modality, Box<Formula>),
    Diamond(Modality, Box<Formula>),
}

impl Formula {
    pub fn var(name: &str) -> Self {
        Formula::Var(name.to_string())
    }

    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn boxed(m: Modality, f: Formula) -> Self {
        Formula::Box(m, Box::new(f))
    }

    pub fn diamond(m: Modality, f: Formula) -> Self {
        Formula::Diamond(m, Box::new(f))
    }

    /// Immediate subformulas, left to right.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Bottom | Formula::Top | Formula::Var(_) => vec![],
            Formula::Not(a) | Formula::Box(_, a) | Formula::Diamond(_, a) => vec![a],
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => vec![a, b],
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        1 + self
            .children()
            .into_iter()
            .map(Formula::size)
            .sum::<usize>()
    }

    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Box(_, a) | Formula::Diamond(_, a) => 1 + a.modal_depth(),
            _ => self
                .children()
                .into_iter()
                .map(Formula::modal_depth)
                .max()
                .unwrap_or(0),
        }
    }

    /// Propositional letters occurring in the formula, sorted.
    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        if let Formula::Var(p) = self {
            out.insert(p.clone());
        }
        for c in self.children() {
            c.collect_vars(out);
        }
    }

    /// Modalities that occur in the formula.
    pub fn modalities(&self) -> BTreeSet<Modality> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            if let Formula::Box(m, _) | Formula::Diamond(m, _) = f {
                out.insert(*m);
            }
            stack.extend(f.children());
        }
        out
    }

    /// Rewrite into the core basis `{false, ->, []1, []2}`.
    pub fn normalize(&self) -> Formula {
        let bot = || Formula::Bottom;
        match self {
            Formula::Bottom => Formula::Bottom,
            Formula::Var(p) => Formula::Var(p.clone()),
            Formula::Top => Formula::implies(bot(), bot()),
            Formula::Not(a) => Formula::implies(a.normalize(), bot()),
            Formula::And(a, b) => Formula::implies(
                Formula::implies(a.normalize(), Formula::implies(b.normalize(), bot())),
                bot(),
            ),
            Formula::Or(a, b) => {
                Formula::implies(Formula::implies(a.normalize(), bot()), b.normalize())
            }
            Formula::Implies(a, b) => Formula::implies(a.normalize(), b.normalize()),
            Formula::Box(m, a) => Formula::boxed(*m, a.normalize()),
            Formula::Diamond(m, a) => Formula::implies(
                Formula::boxed(*m, Formula::implies(a.normalize(), bot())),
                bot(),
            ),
        }
    }

    pub fn is_normalized(&self) -> bool {
        match self {
            Formula::Bottom | Formula::Var(_) => true,
            Formula::Implies(a, b) => a.is_normalized() && b.is_normalized(),
            Formula::Box(_, a) => a.is_normalized(),
            _ => false,
        }
    }

    /// Subformula closure of the AST as written, children before parents,
    /// each subformula listed once at its first post-order position.
    pub fn subformulas(&self) -> Vec<Formula> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        self.collect_subformulas(&mut seen, &mut out);
        out
    }

    fn collect_subformulas<'a>(&'a self, seen: &mut HashSet<&'a Formula>, out: &mut Vec<Formula>) {
        if seen.contains(self) {
            return;
        }
        for c in self.children() {
            c.collect_subformulas(seen, out);
        }
        seen.insert(self);
        out.push(self.clone());
    }

    /// Replace every occurrence of `var` by `g`.
    pub fn substitute(&self, var: &str, g: &Formula) -> Formula {
        self.map_vars(&mut |p| (p == var).then(|| g.clone()))
    }

    /// Simultaneous substitution; letters without an entry are left alone.
    pub fn substitute_all(&self, sigma: &std::collections::BTreeMap<String, Formula>) -> Formula {
        self.map_vars(&mut |p| sigma.get(p).cloned())
    }

    fn map_vars(&self, f: &mut impl FnMut(&str) -> Option<Formula>) -> Formula {
        match self {
            Formula::Bottom => Formula::Bottom,
            Formula::Top => Formula::Top,
            Formula::Var(p) => f(p).unwrap_or_else(|| Formula::Var(p.clone())),
            Formula::Not(a) => Formula::not(a.map_vars(f)),
            Formula::And(a, b) => Formula::and(a.map_vars(f), b.map_vars(f)),
            Formula::Or(a, b) => Formula::or(a.map_vars(f), b.map_vars(f)),
            Formula::Implies(a, b) => Formula::implies(a.map_vars(f), b.map_vars(f)),
            Formula::Box(m, a) => Formula::boxed(*m, a.map_vars(f)),
            Formula::Diamond(m, a) => Formula::diamond(*m, a.map_vars(f)),
        }
    }
}

/// Binding strength used by the printer; mirrors the grammar levels.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Imp,
    Or,
    And,
    Unary,
}

impl Formula {
    fn prec(&self) -> Prec {
        match self {
            Formula::Implies(..) => Prec::Imp,
            Formula::Or(..) => Prec::Or,
            Formula::And(..) => Prec::And,
            _ => Prec::Unary,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, ctx: Prec) -> fmt::Result {
        if self.prec() < ctx {
            write!(f, "(")?;
            self.write_at(f, Prec::Imp)?;
            return write!(f, ")");
        }
        match self {
            Formula::Bottom => write!(f, "false"),
            Formula::Top => write!(f, "true"),
            Formula::Var(p) => write!(f, "{p}"),
            Formula::Not(a) => {
                write!(f, "~")?;
                a.write_at(f, Prec::Unary)
            }
            Formula::Box(m, a) => {
                write!(f, "[]{} ", m.index())?;
                a.write_at(f, Prec::Unary)
            }
            Formula::Diamond(m, a) => {
                write!(f, "<>{} ", m.index())?;
                a.write_at(f, Prec::Unary)
            }
            Formula::And(a, b) => {
                a.write_at(f, Prec::And)?;
                write!(f, " & ")?;
                b.write_at(f, Prec::Unary)
            }
            Formula::Or(a, b) => {
                a.write_at(f, Prec::Or)?;
                write!(f, " | ")?;
                b.write_at(f, Prec::And)
            }
            Formula::Implies(a, b) => {
                a.write_at(f, Prec::Or)?;
                write!(f, " -> ")?;
                b.write_at(f, Prec::Imp)
            }
        }
    }

    /// Canonical ASCII rendering; `parse(render(f)) == f`.
    pub fn render(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, Prec::Imp)
    }
}

impl std::str::FromStr for Formula {
    type Err = SyntaxError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

impl Serialize for Formula {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.render())
    }
}

impl<'de> Deserialize<'de> for Formula {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Formula {
        Formula::var("p")
    }

    #[test]
    fn render_basics() {
        assert_eq!(Formula::Bottom.render(), "false");
        assert_eq!(Formula::boxed(Modality::One, p()).render(), "[]1 p");
        assert_eq!(Axiom::AxL.formula().render(), "<>1 []2 (<>1 p -> []1 p)");
    }

    #[test]
    fn render_parenthesizes_by_associativity() {
        let q = Formula::var("q");
        let r = Formula::var("r");
        let left_imp = Formula::implies(Formula::implies(p(), q.clone()), r.clone());
        assert_eq!(left_imp.render(), "(p -> q) -> r");
        let right_or = Formula::or(p(), Formula::or(q.clone(), r.clone()));
        assert_eq!(right_or.render(), "p | (q | r)");
        let neg_and = Formula::not(Formula::and(p(), q));
        assert_eq!(neg_and.render(), "~(p & q)");
    }

    #[test]
    fn normalize_examples() {
        let dia = Formula::diamond(Modality::One, p()).normalize();
        assert_eq!(
            dia,
            Formula::implies(
                Formula::boxed(Modality::One, Formula::implies(p(), Formula::Bottom)),
                Formula::Bottom
            )
        );
        assert_eq!(p().normalize(), p());
        let and = Formula::and(p(), Formula::var("q")).normalize();
        assert_eq!(and.render(), "(p -> q -> false) -> false");
        assert!(and.is_normalized());
    }

    #[test]
    fn subformula_examples() {
        let t1 = Axiom::T1.formula();
        let subs = t1.subformulas();
        assert_eq!(
            subs.iter().map(Formula::render).collect::<Vec<_>>(),
            ["p", "[]1 p", "[]1 p -> p"]
        );
        assert_eq!(p().subformulas(), vec![p()]);
        // AxL has 7 AST nodes but p occurs twice, so the closure has 6 members.
        let axl = Axiom::AxL.formula();
        assert_eq!(axl.size(), 7);
        let rendered: Vec<_> = axl.subformulas().iter().map(Formula::render).collect();
        assert_eq!(
            rendered,
            [
                "p",
                "<>1 p",
                "[]1 p",
                "<>1 p -> []1 p",
                "[]2 (<>1 p -> []1 p)",
                "<>1 []2 (<>1 p -> []1 p)"
            ]
        );
    }

    #[test]
    fn substitution_examples() {
        let t1 = Axiom::T1.formula();
        let qq = Formula::and(Formula::var("q"), Formula::var("q"));
        assert_eq!(t1.substitute("p", &qq).render(), "[]1 (q & q) -> q & q");
        assert_eq!(
            Formula::Bottom.substitute("p", &Formula::var("q")),
            Formula::Bottom
        );
        let a1 = Axiom::A1One.formula();
        let d2p = Formula::diamond(Modality::Two, p());
        assert_eq!(
            a1.substitute("p", &d2p).render(),
            "[]1 <>1 <>2 p -> <>1 []1 <>2 p"
        );
    }
}
