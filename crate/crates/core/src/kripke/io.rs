use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::{Frame, KripkeError, Model, Relation, Result, World};

/// `{"worlds": [...], "r1": [[x, y], ...], "r2": [...]}`; `r2` is absent on
/// unimodal frames.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameJson {
    pub worlds: Vec<String>,
    pub r1: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r2: Option<Vec<(String, String)>>,
}

impl FrameJson {
    pub fn from_frame(fr: &Frame) -> Self {
        let edges = |r: &Relation| {
            r.edges()
                .map(|(x, y)| (fr.name(x).to_string(), fr.name(y).to_string()))
                .collect()
        };
        FrameJson {
            worlds: fr.names().to_vec(),
            r1: edges(fr.rel(0)),
            r2: (fr.arity() > 1).then(|| edges(fr.rel(1))),
        }
    }

    pub fn to_frame(&self) -> Result<Frame> {
        let probe = Frame::new(
            self.worlds.clone(),
            vec![Relation::empty(self.worlds.len())],
        )?;
        let resolve = |edges: &[(String, String)]| -> Result<Relation> {
            let mut seen = BTreeSet::new();
            for (x, y) in edges {
                let a = lookup(&probe, x)?;
                let b = lookup(&probe, y)?;
                if !seen.insert((a, b)) {
                    return Err(KripkeError::InvalidFrame(format!(
                        "duplicate edge ({x}, {y})"
                    )));
                }
            }
            Ok(Relation::from_edges(self.worlds.len(), seen))
        };
        let mut rels = vec![resolve(&self.r1)?];
        if let Some(r2) = &self.r2 {
            rels.push(resolve(r2)?);
        }
        Frame::new(self.worlds.clone(), rels)
    }
}

fn lookup(fr: &Frame, name: &str) -> Result<World> {
    fr.world(name)
        .ok_or_else(|| KripkeError::UnknownWorld(name.to_string()))
}

/// A frame JSON object with an extra `"valuation": {"p": [worlds]}` field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelJson {
    pub worlds: Vec<String>,
    pub r1: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r2: Option<Vec<(String, String)>>,
    #[serde(default)]
    pub valuation: BTreeMap<String, Vec<String>>,
}

impl ModelJson {
    pub fn from_model(m: &Model) -> Self {
        let f = FrameJson::from_frame(&m.frame);
        ModelJson {
            worlds: f.worlds,
            r1: f.r1,
            r2: f.r2,
            valuation: m
                .valuation
                .iter()
                .map(|(p, s)| {
                    (
                        p.clone(),
                        s.ones().map(|w| m.frame.name(w).to_string()).collect(),
                    )
                })
                .collect(),
        }
    }

    pub fn frame_json(&self) -> FrameJson {
        FrameJson {
            worlds: self.worlds.clone(),
            r1: self.r1.clone(),
            r2: self.r2.clone(),
        }
    }

    pub fn to_model(&self) -> Result<Model> {
        let frame = self.frame_json().to_frame()?;
        let mut val = BTreeMap::new();
        for (p, ws) in &self.valuation {
            let ids = ws
                .iter()
                .map(|w| lookup(&frame, w))
                .collect::<Result<Vec<_>>>()?;
            val.insert(p.clone(), ids);
        }
        Model::with_valuation(frame, val)
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub(super) fn to_dot(fr: &Frame, show_loops: bool) -> String {
    let mut out = String::from("digraph frame {\n");
    for w in fr.worlds() {
        let _ = writeln!(out, "  {};", quote(fr.name(w)));
    }
    for (i, rel) in fr.relations().iter().enumerate() {
        let style = if i == 0 { "solid" } else { "dashed" };
        for (x, y) in rel.edges() {
            if x == y && !show_loops {
                continue;
            }
            let _ = writeln!(
                out,
                "  {} -> {} [style={style}, label=\"R{}\"];",
                quote(fr.name(x)),
                quote(fr.name(y)),
                i + 1
            );
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::fixtures::*;

    #[test]
    fn frame_json_round_trip() {
        let fr = frame(2, &[(0, 0), (0, 1), (1, 1)], Some(&[(1, 0)]));
        let text = serde_json::to_string(&fr.to_json()).unwrap();
        assert_eq!(
            text,
            r#"{"worlds":["w0","w1"],"r1":[["w0","w0"],["w0","w1"],["w1","w1"]],"r2":[["w1","w0"]]}"#
        );
        let back: FrameJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_frame().unwrap(), fr);
        let uni = chain2().to_json();
        assert!(uni.r2.is_none());
        assert!(!serde_json::to_string(&uni).unwrap().contains("r2"));
    }

    #[test]
    fn rejects_bad_input() {
        let bad: FrameJson = serde_json::from_str(r#"{"worlds":["w"],"r1":[["w","u"]]}"#).unwrap();
        assert_eq!(bad.to_frame(), Err(KripkeError::UnknownWorld("u".into())));
        let dup: FrameJson =
            serde_json::from_str(r#"{"worlds":["w"],"r1":[["w","w"],["w","w"]]}"#).unwrap();
        assert!(matches!(dup.to_frame(), Err(KripkeError::InvalidFrame(_))));
        let empty: FrameJson = serde_json::from_str(r#"{"worlds":[],"r1":[]}"#).unwrap();
        assert!(empty.to_frame().is_err());
    }

    #[test]
    fn model_json_round_trip() {
        let mut m = Model::new(chain2());
        m.set("p", [1]);
        let j = m.to_json();
        assert_eq!(j.valuation["p"], vec!["w1".to_string()]);
        assert_eq!(j.to_model().unwrap(), m);
    }

    #[test]
    fn dot_styles_and_loops() {
        let fr = frame(2, &[(0, 0), (0, 1)], Some(&[(1, 0)]));
        let dot = fr.to_dot(false);
        assert!(dot.contains("\"w0\" -> \"w1\" [style=solid"));
        assert!(dot.contains("\"w1\" -> \"w0\" [style=dashed"));
        assert!(!dot.contains("\"w0\" -> \"w0\""));
        assert!(fr.to_dot(true).contains("\"w0\" -> \"w0\""));
    }
}
