use super::{parse, Formula};
use serde::{Deserialize, Serialize};

/// Named axiom schemata. Each is stored as surface text and parsed on demand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axiom {
    K1,
    K2,
    T1,
    T2,
    Four1,
    Four2,
    #[serde(rename = "A1_1")]
    A1One,
    #[serde(rename = "A1_2")]
    A1Two,
    AxL,
    Com,
    Chr,
}

pub const AXIOMS: [Axiom; 11] = [
    Axiom::K1,
    Axiom::K2,
    Axiom::T1,
    Axiom::T2,
    Axiom::Four1,
    Axiom::Four2,
    Axiom::A1One,
    Axiom::A1Two,
    Axiom::AxL,
    Axiom::Com,
    Axiom::Chr,
];

impl Axiom {
    pub fn name(self) -> &'static str {
        match self {
            Axiom::K1 => "K1",
            Axiom::K2 => "K2",
            Axiom::T1 => "T1",
            Axiom::T2 => "T2",
            Axiom::Four1 => "Four1",
            Axiom::Four2 => "Four2",
            Axiom::A1One => "A1_1",
            Axiom::A1Two => "A1_2",
            Axiom::AxL => "AxL",
            Axiom::Com => "Com",
            Axiom::Chr => "Chr",
        }
    }

    pub fn from_name(name: &str) -> Option<Axiom> {
        AXIOMS.into_iter().find(|a| a.name() == name)
    }

    pub fn text(self) -> &'static str {
        match self {
            Axiom::K1 => "[]1 (p -> q) -> []1 p -> []1 q",
            Axiom::K2 => "[]2 (p -> q) -> []2 p -> []2 q",
            Axiom::T1 => "[]1 p -> p",
            Axiom::T2 => "[]2 p -> p",
            Axiom::Four1 => "[]1 p -> []1 []1 p",
            Axiom::Four2 => "[]2 p -> []2 []2 p",
            Axiom::A1One => "[]1 <>1 p -> <>1 []1 p",
            Axiom::A1Two => "[]2 <>2 p -> <>2 []2 p",
            Axiom::AxL => "<>1 []2 (<>1 p -> []1 p)",
            Axiom::Com => "[]1 []2 p -> []2 []1 p",
            Axiom::Chr => "<>1 []2 p -> []2 <>1 p",
        }
    }

    pub fn formula(self) -> Formula {
        parse(self.text()).expect("catalogue entries are well-formed")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalogue_parses_and_round_trips() {
        for ax in AXIOMS {
            let f = ax.formula();
            assert_eq!(f.render(), ax.text(), "{}", ax.name());
            assert_eq!(Axiom::from_name(ax.name()), Some(ax));
        }
    }

    #[test]
    fn mckinsey_uses_one_variable() {
        assert_eq!(Axiom::A1One.formula().vars().len(), 1);
        assert_eq!(Axiom::A1Two.formula().vars().len(), 1);
        assert_eq!(Axiom::K1.formula().vars().len(), 2);
    }
}
