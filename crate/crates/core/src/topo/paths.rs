//! Paths with stops over `{0,1,2}` and the truncated path spaces.

use std::fmt;

use serde::{Serialize, Serializer};

use super::{TopSpace, TopoError};
use crate::kripke::WorldSet;
use crate::trees::{BinWord, Letter, TreePoint, Word};

/// `stem · 0^ω` with the stem in canonical form (no trailing zeros).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PseudoPath {
    stem: Vec<u8>,
}

impl PseudoPath {
    pub fn new(mut digits: Vec<u8>) -> Result<Self, TopoError> {
        if let Some(&d) = digits.iter().find(|&&d| d > 2) {
            return Err(TopoError::InvalidDigit(d));
        }
        while digits.last() == Some(&0) {
            digits.pop();
        }
        Ok(PseudoPath { stem: digits })
    }

    /// `0^ω`.
    pub fn zero() -> Self {
        PseudoPath::default()
    }

    pub fn stem(&self) -> &[u8] {
        &self.stem
    }

    /// The `i`-th digit, counting from 1.
    pub fn digit(&self, i: usize) -> u8 {
        if i == 0 {
            0
        } else {
            self.stem.get(i - 1).copied().unwrap_or(0)
        }
    }

    /// `α⌈k` as a word of length exactly `k`.
    pub fn prefix(&self, k: usize) -> Vec<u8> {
        (1..=k).map(|i| self.digit(i)).collect()
    }

    /// `α⌈k · 0^ω`.
    pub fn cut(&self, k: usize) -> PseudoPath {
        PseudoPath::new(self.prefix(k)).expect("digits of a path")
    }

    /// `γ` with `α = α⌈n · γ`.
    pub fn tail(&self, n: usize) -> PseudoPath {
        PseudoPath {
            stem: self.stem.iter().skip(n).copied().collect(),
        }
    }
}

impl fmt::Display for PseudoPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.stem {
            write!(f, "{d}·")?;
        }
        write!(f, "0^ω")
    }
}

impl Serialize for PseudoPath {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A point `<α, n>` of the space 𝔛.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct XPoint {
    pub path: PseudoPath,
    pub level: usize,
}

impl fmt::Display for XPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{},{}>", self.path, self.level)
    }
}

pub fn st(a: &PseudoPath) -> usize {
    a.stem.len()
}

/// Deletes the zeros of `w`.
pub fn f_f(w: &[u8]) -> BinWord {
    w.iter().copied().filter(|&d| d != 0).collect()
}

pub fn f_omega(a: &PseudoPath) -> BinWord {
    f_f(&a.stem)
}

/// `β ∈ U_k(α)`: `α⌈k = β⌈k` and `f_F(α⌈k) ⊑ f_ω(β)`.
pub fn in_u_k(a: &PseudoPath, k: usize, b: &PseudoPath) -> bool {
    let pa = a.prefix(k);
    pa == b.prefix(k) && f_omega(b).starts_with(&f_f(&pa))
}

/// All paths with `st ≤ d`, in lexicographic order of their length-`d`
/// prefixes.
pub fn truncated_paths(d: usize) -> Vec<PseudoPath> {
    let mut words: Vec<Vec<u8>> = vec![vec![]];
    for _ in 0..d {
        words = words
            .into_iter()
            .flat_map(|w| (0..3u8).map(move |x| [w.as_slice(), &[x]].concat()))
            .collect();
    }
    words
        .into_iter()
        .map(|w| PseudoPath::new(w).expect("digits"))
        .collect()
}

fn base_sets<P>(points: &[P], members: impl Fn(&P, usize, &P) -> bool, d: usize) -> Vec<WorldSet> {
    let mut out: Vec<WorldSet> = Vec::new();
    for k in 1..=d {
        for a in points {
            let mut s = WorldSet::with_capacity(points.len());
            s.extend((0..points.len()).filter(|&j| members(a, k, &points[j])));
            if !out.contains(&s) {
                out.push(s);
            }
        }
    }
    out
}

/// The space 𝒴 on `truncated_paths(d)` with base `U_k(α)`, `1 ≤ k ≤ d`.
pub fn space_y_truncated(d: usize) -> Result<TopSpace, TopoError> {
    if d == 0 {
        return Err(TopoError::InvalidBase("depth must be at least 1".into()));
    }
    let pts = truncated_paths(d);
    let base = base_sets(&pts, in_u_k, d);
    TopSpace::new(pts.iter().map(|p| p.to_string()).collect(), base)
}

/// Carrier of `space_x_truncated(d, n_max)`: each path with levels
/// `0..=n_max`, path-major.
pub fn truncated_x_points(d: usize, n_max: usize) -> Vec<XPoint> {
    truncated_paths(d)
        .into_iter()
        .flat_map(|path| {
            (0..=n_max).map(move |level| XPoint {
                path: path.clone(),
                level,
            })
        })
        .collect()
}

/// `y ∈ U′_k(x)`.
pub fn in_u_prime(x: &XPoint, k: usize, y: &XPoint) -> bool {
    if x.level > 0 {
        x == y
    } else {
        in_u_k(&x.path, k, &y.path) && (y.level == 0 || y.level >= k)
    }
}

/// The space 𝔛 cut at paths with `st ≤ d` and levels `≤ n_max`, with base
/// `U′_k(α,0) = U_k(α) × ({0} ∪ [k, n_max])` and singletons at levels `≥ 1`.
pub fn space_x_truncated(d: usize, n_max: usize) -> Result<TopSpace, TopoError> {
    if d == 0 || n_max < d {
        return Err(TopoError::InvalidBase("need 1 ≤ d ≤ n_max".into()));
    }
    let pts = truncated_x_points(d, n_max);
    let base = base_sets(&pts, in_u_prime, d);
    TopSpace::new(pts.iter().map(|p| p.to_string()).collect(), base)
}

fn letter(rel: usize, digit: u8) -> Letter {
    Letter::pair(rel)[usize::from(digit) - 1]
}

/// `a_{x₁} b_{y₁} a_{x₂} b_{y₂} …` with zeros deleted, up to the joint stem.
pub fn g_interleave(a: &PseudoPath, b: &PseudoPath) -> Word {
    let mut out = Vec::new();
    for i in 1..=st(a).max(st(b)) {
        for (rel, x) in [(0, a.digit(i)), (1, b.digit(i))] {
            if x != 0 {
                out.push(letter(rel, x));
            }
        }
    }
    out
}

/// The interleaving as printed, `a_{x₁} b_{x₁} …`, which ignores `β`.
pub fn g_interleave_literal(a: &PseudoPath, _b: &PseudoPath) -> Word {
    let mut out = Vec::new();
    for i in 1..=st(a) {
        let x = a.digit(i);
        if x != 0 {
            out.push(letter(0, x));
            out.push(letter(1, x));
        }
    }
    out
}

/// `f(<α,0>, β) = <g(α,β), root>` and
/// `f(<α,n>, β) = <g(α⌈n, β⌈n), f_ω(γ)>` where `β = β⌈n · γ`.
pub fn big_f(x: &XPoint, b: &PseudoPath) -> TreePoint {
    if x.level == 0 {
        TreePoint::root(g_interleave(&x.path, b))
    } else {
        let n = x.level;
        TreePoint::copy(g_interleave(&x.path.cut(n), &b.cut(n)), f_omega(&b.tail(n)))
    }
}

/// A preimage of `w` under [`g_interleave`]: one position per letter.
pub fn g_preimage(w: &[Letter]) -> (PseudoPath, PseudoPath) {
    let digit = |l: Letter| {
        if matches!(l, Letter::A1 | Letter::B1) {
            1
        } else {
            2
        }
    };
    let a = w
        .iter()
        .map(|&l| {
            if matches!(l, Letter::A1 | Letter::A2) {
                digit(l)
            } else {
                0
            }
        })
        .collect();
    let b = w
        .iter()
        .map(|&l| {
            if matches!(l, Letter::B1 | Letter::B2) {
                digit(l)
            } else {
                0
            }
        })
        .collect();
    (
        PseudoPath::new(a).expect("digits"),
        PseudoPath::new(b).expect("digits"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topo::is_weakly_scattered;
    use crate::trees::{render_word, words_upto};
    use Letter::*;

    fn p(d: &[u8]) -> PseudoPath {
        PseudoPath::new(d.to_vec()).unwrap()
    }

    #[test]
    fn stems() {
        assert_eq!(st(&PseudoPath::zero()), 0);
        assert_eq!(st(&p(&[1, 2])), 2);
        assert_eq!(st(&p(&[1, 0, 2])), 3);
        assert_eq!(st(&p(&[1, 0, 0])), 1);
        assert!(PseudoPath::new(vec![3]).is_err());
        assert_eq!(p(&[1, 2]).to_string(), "1·2·0^ω");
    }

    #[test]
    fn f_f_and_f_omega() {
        assert_eq!(f_f(&[]), Vec::<u8>::new());
        assert_eq!(f_f(&[1, 0, 2]), [1, 2]);
        assert_eq!(f_f(&[0, 0, 0]), Vec::<u8>::new());
        assert_eq!(f_omega(&PseudoPath::zero()), Vec::<u8>::new());
        assert_eq!(f_omega(&p(&[1, 2])), [1, 2]);
        assert_eq!(f_omega(&p(&[2, 0, 0, 1])), [2, 1]);
    }

    #[test]
    fn u_k_membership() {
        for a in truncated_paths(2) {
            for k in 1..=3 {
                assert!(in_u_k(&a, k, &a));
            }
        }
        assert!(in_u_k(&PseudoPath::zero(), 1, &p(&[0, 1])));
        assert!(!in_u_k(&p(&[1]), 1, &p(&[2])));
    }

    #[test]
    fn y_space_examples() {
        assert_eq!(space_y_truncated(1).unwrap().len(), 3);
        let y2 = space_y_truncated(2).unwrap();
        assert_eq!(y2.len(), 9);
        assert!(y2.nested_or_disjoint());
        assert!(space_y_truncated(3).unwrap().nested_or_disjoint());
    }

    #[test]
    fn x_space_examples() {
        for (d, n) in [(1, 1), (1, 2), (2, 2), (2, 3)] {
            let x = space_x_truncated(d, n).unwrap();
            assert_eq!(x.len(), 3usize.pow(d as u32) * (n + 1));
            assert!(x.nested_or_disjoint());
            assert!(is_weakly_scattered(&x));
            let iso = crate::topo::isolated_points(&x);
            for (i, pt) in truncated_x_points(d, n).iter().enumerate() {
                if pt.level >= 1 {
                    assert!(iso.contains(i));
                }
            }
        }
        assert!(space_x_truncated(2, 1).is_err());
    }

    #[test]
    fn interleave_examples() {
        let z = PseudoPath::zero();
        assert!(g_interleave(&z, &z).is_empty());
        assert_eq!(g_interleave(&p(&[1]), &p(&[2])), [A1, B2]);
        assert_eq!(g_interleave(&p(&[1, 2]), &z), [A1, A2]);
    }

    #[test]
    fn interleave_is_onto_short_words() {
        for w in words_upto(&Letter::ALL, 3) {
            let (a, b) = g_preimage(&w);
            assert_eq!(g_interleave(&a, &b), w, "{}", render_word(&w));
        }
    }

    #[test]
    fn literal_interleave_misses_words() {
        let paths = truncated_paths(2);
        let image: std::collections::HashSet<Word> = paths
            .iter()
            .flat_map(|a| paths.iter().map(move |b| g_interleave_literal(a, b)))
            .collect();
        assert!(!image.contains(&vec![A1]));
        assert!(!image.contains(&vec![B2]));
        assert!(!image.contains(&vec![A1, B2]));
    }

    #[test]
    fn big_f_examples() {
        let z = PseudoPath::zero();
        let x0 = XPoint {
            path: z.clone(),
            level: 0,
        };
        assert_eq!(big_f(&x0, &z), TreePoint::root(vec![]));
        let a = p(&[1, 0, 2]);
        let b = p(&[2]);
        let x = XPoint {
            path: a.clone(),
            level: 3,
        };
        assert_eq!(big_f(&x, &b), TreePoint::copy(g_interleave(&a, &b), vec![]));
        let x1 = XPoint {
            path: p(&[1]),
            level: 1,
        };
        assert_eq!(
            big_f(&x1, &p(&[2, 1])),
            TreePoint::copy(vec![A1, B2], vec![1])
        );
    }
}
