use super::{Formula, Modality};
use std::fmt;

/// Parse failure with the byte offset of the offending token.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub struct SyntaxError {
    pub offset: usize,
    pub expected: Vec<&'static str>,
    pub found: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "syntax error at byte {}: expected one of {}, found {}",
            self.offset,
            self.expected.join(", "),
            self.found
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Digits(String),
    False,
    True,
    Arrow,
    Bar,
    Amp,
    Tilde,
    BoxOp,
    DiaOp,
    LParen,
    RParen,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Digits(s) => format!("`{s}`"),
            Tok::False => "`false`".into(),
            Tok::True => "`true`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::BoxOp => "`[]`".into(),
            Tok::DiaOp => "`<>`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

const ATOM_START: &[&str] = &[
    "`~`",
    "`[]`",
    "`<>`",
    "`false`",
    "`true`",
    "identifier",
    "`(`",
];

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, SyntaxError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let two = bytes.get(i..i + 2);
        let tok = match (c, two) {
            (_, Some(b"->")) => {
                i += 2;
                Tok::Arrow
            }
            (_, Some(b"[]")) => {
                i += 2;
                Tok::BoxOp
            }
            (_, Some(b"<>")) => {
                i += 2;
                Tok::DiaOp
            }
            (b'|', _) => {
                i += 1;
                Tok::Bar
            }
            (b'&', _) => {
                i += 1;
                Tok::Amp
            }
            (b'~', _) => {
                i += 1;
                Tok::Tilde
            }
            (b'(', _) => {
                i += 1;
                Tok::LParen
            }
            (b')', _) => {
                i += 1;
                Tok::RParen
            }
            (c, _) if c.is_ascii_digit() => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                Tok::Digits(text[start..i].to_string())
            }
            (c, _) if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                match &text[start..i] {
                    "false" => Tok::False,
                    "true" => Tok::True,
                    s => Tok::Ident(s.to_string()),
                }
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(SyntaxError {
                    offset: start,
                    expected: ATOM_START.to_vec(),
                    found: format!("character `{ch}`"),
                });
            }
        };
        out.push((start, tok));
    }
    out.push((text.len(), Tok::Eof));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&'static str]) -> SyntaxError {
        SyntaxError {
            offset: self.offset(),
            expected: expected.to_vec(),
            found: self.peek().describe(),
        }
    }

    fn formula(&mut self) -> Result<Formula, SyntaxError> {
        let left = self.or()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let right = self.formula()?;
            return Ok(Formula::implies(left, right));
        }
        Ok(left)
    }

    fn or(&mut self) -> Result<Formula, SyntaxError> {
        let mut acc = self.and()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            acc = Formula::or(acc, self.and()?);
        }
        Ok(acc)
    }

    fn and(&mut self) -> Result<Formula, SyntaxError> {
        let mut acc = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            acc = Formula::and(acc, self.unary()?);
        }
        Ok(acc)
    }

    fn modality(&mut self) -> Result<Modality, SyntaxError> {
        match self.peek() {
            Tok::Digits(d) if d == "1" || d == "2" => {
                let m = Modality::from_index(d.as_bytes()[0] - b'0');
                self.bump();
                Ok(m.expect("digit checked"))
            }
            _ => Err(self.error(&["`1`", "`2`"])),
        }
    }

    fn unary(&mut self) -> Result<Formula, SyntaxError> {
        match self.peek() {
            Tok::Tilde => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::BoxOp => {
                self.bump();
                let m = self.modality()?;
                Ok(Formula::boxed(m, self.unary()?))
            }
            Tok::DiaOp => {
                self.bump();
                let m = self.modality()?;
                Ok(Formula::diamond(m, self.unary()?))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, SyntaxError> {
        match self.peek().clone() {
            Tok::False => {
                self.bump();
                Ok(Formula::Bottom)
            }
            Tok::True => {
                self.bump();
                Ok(Formula::Top)
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(Formula::Var(name))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.formula()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.error(&["`)`", "`->`", "`|`", "`&`"]));
                }
                self.bump();
                Ok(inner)
            }
            _ => Err(self.error(ATOM_START)),
        }
    }
}

/// Parse the ASCII surface syntax. `->` is right-associative, `|` and `&`
/// associate to the left, and prefix operators bind tightest.
pub fn parse(text: &str) -> Result<Formula, SyntaxError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        return Err(p.error(&["`->`", "`|`", "`&`", "end of input"]));
    }
    Ok(f)
}
