//! JSON descriptions of families:
//! `{"family": "ladder", "lengths": "nst", "params": {...}}`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::family::{FiniteFamily, GraphFamily};
use super::ladders::{Ladder, LengthScheme, Strip};
use crate::error::{Error, Result};
use crate::graph::{Graph, GraphDocument, VertexId};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub family: String,
    #[serde(default = "default_lengths")]
    pub lengths: String,
    #[serde(default)]
    pub params: serde_json::Value,
}

fn default_lengths() -> String {
    "unit".into()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FiniteParams {
    graph: GraphDocument,
    #[serde(default)]
    root: Option<VertexId>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StripParams {
    width: u64,
}

impl FamilySpec {
    pub fn new(family: &str, lengths: &str) -> Self {
        FamilySpec { family: family.into(), lengths: lengths.into(), params: serde_json::Value::Null }
    }

    pub fn from_json(text: &str) -> Result<FamilySpec> {
        serde_json::from_str(text).map_err(|e| Error::input(format!("family spec: {e}")))
    }

    fn scheme(&self) -> Result<LengthScheme> {
        match self.lengths.as_str() {
            "unit" => Ok(LengthScheme::Unit),
            "nst" => Ok(LengthScheme::Nst),
            "dyadic_harmonic" => Ok(LengthScheme::DyadicHarmonic),
            other => Err(Error::input(format!("length scheme {other:?} does not apply to {}", self.family))),
        }
    }

    /// The ladder this spec names, for ladder-specific streams.
    pub fn ladder(&self) -> Result<Ladder> {
        match self.family.as_str() {
            "ladder" => Ok(Ladder::new(self.scheme()?)),
            "subdivided_ladder" => Ladder::subdivided(self.scheme()?),
            other => Err(Error::input(format!("{other} is not a ladder family"))),
        }
    }

    pub fn build(&self) -> Result<Arc<dyn GraphFamily>> {
        let params = |what: &str| -> Result<serde_json::Value> {
            if self.params.is_null() {
                return Err(Error::input(format!("{what} family needs params")));
            }
            Ok(self.params.clone())
        };
        match self.family.as_str() {
            "ladder" | "subdivided_ladder" => Ok(Arc::new(self.ladder()?)),
            "strip" => {
                if self.lengths != "unit" {
                    return Err(Error::input("strip supports unit lengths only"));
                }
                let p: StripParams = serde_json::from_value(params("strip")?)
                    .map_err(|e| Error::input(format!("strip params: {e}")))?;
                Ok(Arc::new(Strip::new(p.width)?))
            }
            "finite" => {
                let p: FiniteParams = serde_json::from_value(params("finite")?)
                    .map_err(|e| Error::input(format!("finite params: {e}")))?;
                let mut graph = p.graph.into_graph()?;
                match self.lengths.as_str() {
                    "explicit" => {}
                    "unit" => graph = unit_lengths(&graph)?,
                    other => return Err(Error::input(format!("length scheme {other:?} does not apply to finite"))),
                }
                let root = match p.root {
                    Some(r) => r,
                    None => graph.vertices().first().cloned().ok_or_else(|| Error::input("finite graph is empty"))?,
                };
                Ok(Arc::new(FiniteFamily::new(graph, root)?))
            }
            other => Err(Error::input(format!("unknown family {other:?}"))),
        }
    }
}

fn unit_lengths(g: &Graph) -> Result<Graph> {
    let ones = g.edges().iter().map(|e| (e.id.clone(), crate::Length::one())).collect();
    g.with_lengths(&ones)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_ladder_spec() {
        let s = FamilySpec::from_json(r#"{"family":"subdivided_ladder","lengths":"nst"}"#).unwrap();
        assert_eq!(s.build().unwrap().name(), "subdivided_ladder/nst");
    }

    #[test]
    fn rejects_unknown_family_and_scheme() {
        assert!(FamilySpec::new("torus", "unit").build().is_err());
        assert!(FamilySpec::new("ladder", "explicit").build().is_err());
        assert!(FamilySpec::new("subdivided_ladder", "dyadic_harmonic").build().is_err());
    }

    #[test]
    fn finite_spec_with_unit_override() {
        let s = FamilySpec::from_json(
            r#"{"family":"finite","lengths":"unit","params":{"graph":{"vertices":["a","b"],
                "edges":[{"id":"e","u":"a","v":"b","len":"7/2"}]}}}"#,
        )
        .unwrap();
        let f = s.build().unwrap();
        assert_eq!(f.root().as_str(), "a");
        assert_eq!(f.neighbors(&"a".into())[0].length, crate::Length::one());
    }
}
