//! TOML model files.
//!
//! ```toml
//! kind = "sft"
//! alphabet = ["0", "1"]
//! window = [[0, 0], [1, 0], [0, 1]]
//! allowed = [["0", "0", "0"], ["0", "1", "1"], ["1", "0", "1"], ["1", "1", "0"]]
//! ```
//!
//! Other kinds use `degrees = [p1, p2]` (circle), `alphabet` with optional `weights`
//! (fullshift), or `vertices`, `h_edges`, `v_edges` and `rho` (kgraph). An optional `[measure]`
//! table sets per-direction product weights.

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::scalar::{parse_rational, Rational};
use crate::shift::{FiberMeasureSystem, FiberMode};
use crate::symbolic::kgraph::Rank2Graph;
use crate::symbolic::model::{build_model, ModelHandle, ModelSpec};
use crate::symbolic::sft::SftSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpecKind {
    Sft,
    Kgraph,
    Circle,
    Fullshift,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeEntry {
    pub name: String,
    pub source: String,
    pub range: String,
}

/// `(h, v) ↦ (v_out, h_out)`.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RhoEntry {
    pub h: String,
    pub v: String,
    pub v_out: String,
    pub h_out: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureEntry {
    pub horizontal: Option<Vec<String>>,
    pub vertical: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpecFile {
    pub kind: SpecKind,
    pub name: Option<String>,
    pub alphabet: Option<Vec<String>>,
    pub window: Option<Vec<(usize, usize)>>,
    pub allowed: Option<Vec<Vec<String>>>,
    pub weights: Option<Vec<String>>,
    pub degrees: Option<(i64, i64)>,
    pub vertices: Option<Vec<String>>,
    pub h_edges: Option<Vec<EdgeEntry>>,
    pub v_edges: Option<Vec<EdgeEntry>>,
    pub rho: Option<Vec<RhoEntry>>,
    pub measure: Option<MeasureEntry>,
}

fn required<T>(field: Option<T>, name: &str, kind: &str) -> Result<T> {
    field.ok_or_else(|| Error::Parse(format!("kind `{kind}` requires field `{name}`")))
}

fn unused(present: bool, name: &str, kind: &str) -> Result<()> {
    if present {
        return Err(Error::Parse(format!("field `{name}` is not used by kind `{kind}`")));
    }
    Ok(())
}

fn rationals(list: &[String], field: &str) -> Result<Vec<Rational>> {
    list.iter()
        .map(|s| parse_rational(s).map_err(|e| Error::Parse(format!("field `{field}`: {e}"))))
        .collect()
}

impl ModelSpecFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string().trim_end().to_string()))
    }

    pub fn to_spec(&self) -> Result<ModelSpec> {
        let f = self;
        match f.kind {
            SpecKind::Sft => {
                let k = "sft";
                unused(f.weights.is_some(), "weights", k)?;
                unused(f.degrees.is_some(), "degrees", k)?;
                self.no_graph_fields(k)?;
                Ok(ModelSpec::Sft(SftSpec {
                    alphabet: required(f.alphabet.clone(), "alphabet", k)?,
                    window: required(f.window.clone(), "window", k)?,
                    allowed: required(f.allowed.clone(), "allowed", k)?,
                }))
            }
            SpecKind::Fullshift => {
                let k = "fullshift";
                unused(f.window.is_some(), "window", k)?;
                unused(f.allowed.is_some(), "allowed", k)?;
                unused(f.degrees.is_some(), "degrees", k)?;
                self.no_graph_fields(k)?;
                Ok(ModelSpec::Fullshift {
                    alphabet: required(f.alphabet.clone(), "alphabet", k)?,
                    weights: f.weights.as_deref().map(|w| rationals(w, "weights")).transpose()?,
                })
            }
            SpecKind::Circle => {
                let k = "circle";
                unused(f.alphabet.is_some(), "alphabet", k)?;
                unused(f.window.is_some(), "window", k)?;
                unused(f.allowed.is_some(), "allowed", k)?;
                unused(f.weights.is_some(), "weights", k)?;
                unused(f.measure.is_some(), "measure", k)?;
                self.no_graph_fields(k)?;
                let (p1, p2) = required(f.degrees, "degrees", k)?;
                Ok(ModelSpec::Circle { p1, p2 })
            }
            SpecKind::Kgraph => {
                let k = "kgraph";
                unused(f.alphabet.is_some(), "alphabet", k)?;
                unused(f.window.is_some(), "window", k)?;
                unused(f.allowed.is_some(), "allowed", k)?;
                unused(f.weights.is_some(), "weights", k)?;
                unused(f.degrees.is_some(), "degrees", k)?;
                let vertices = required(f.vertices.as_ref(), "vertices", k)?;
                let h = required(f.h_edges.as_ref(), "h_edges", k)?;
                let v = required(f.v_edges.as_ref(), "v_edges", k)?;
                let rho = required(f.rho.as_ref(), "rho", k)?;
                let vs: Vec<&str> = vertices.iter().map(String::as_str).collect();
                let edges = |list: &'_ [EdgeEntry]| -> Vec<(String, String, String)> {
                    list.iter()
                        .map(|e| (e.name.clone(), e.source.clone(), e.range.clone()))
                        .collect()
                };
                let (he, ve) = (edges(h), edges(v));
                let hs: Vec<(&str, &str, &str)> =
                    he.iter().map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str())).collect();
                let vv: Vec<(&str, &str, &str)> =
                    ve.iter().map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str())).collect();
                let r: Vec<((&str, &str), (&str, &str))> = rho
                    .iter()
                    .map(|e| ((e.h.as_str(), e.v.as_str()), (e.v_out.as_str(), e.h_out.as_str())))
                    .collect();
                Ok(ModelSpec::Kgraph(Rank2Graph::new(&vs, &hs, &vv, &r)?))
            }
        }
    }

    fn no_graph_fields(&self, kind: &str) -> Result<()> {
        unused(self.vertices.is_some(), "vertices", kind)?;
        unused(self.h_edges.is_some(), "h_edges", kind)?;
        unused(self.v_edges.is_some(), "v_edges", kind)?;
        unused(self.rho.is_some(), "rho", kind)
    }

    /// Builds and validates the model, applying the name and measure overrides.
    pub fn build(&self) -> Result<ModelHandle> {
        let mut model = build_model(self.to_spec()?)?;
        if let Some(name) = &self.name {
            model = model.with_name(name.clone());
        }
        if let Some(m) = &self.measure {
            let k = model
                .alphabet()
                .ok_or_else(|| Error::Parse("field `measure` needs a symbolic model".into()))?
                .len();
            let current = model.default_measure().clone();
            let mode = |w: &Option<Vec<String>>, field: &str, dir| -> Result<FiberMode> {
                match w {
                    Some(w) => FiberMode::product(rationals(w, field)?, k),
                    None => Ok(current.mode(dir).clone()),
                }
            };
            let h = mode(&m.horizontal, "measure.horizontal", crate::geom::Direction::Horizontal)?;
            let v = mode(&m.vertical, "measure.vertical", crate::geom::Direction::Vertical)?;
            model = model.with_measure(FiberMeasureSystem::new(h, v));
        }
        Ok(model)
    }
}

pub fn parse_model_spec(text: &str) -> Result<ModelHandle> {
    ModelSpecFile::parse(text)?.build()
}

pub fn load_model_spec(path: &std::path::Path) -> Result<ModelHandle> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_model_spec(&text).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::model::ModelKind;

    #[test]
    fn parses_each_kind() {
        let sft = r#"
kind = "sft"
alphabet = ["0", "1"]
window = [[0, 0], [1, 0], [0, 1]]
allowed = [["0", "0", "0"], ["0", "1", "1"], ["1", "0", "1"], ["1", "1", "0"]]
"#;
        assert_eq!(parse_model_spec(sft).unwrap().kind(), ModelKind::Sft);
        let c = parse_model_spec("kind = \"circle\"\ndegrees = [2, 3]\n").unwrap();
        assert_eq!(c.name(), "circle-2-3");
        let f = parse_model_spec("kind = \"fullshift\"\nalphabet = [\"0\", \"1\"]\nweights = [\"1/3\", \"2/3\"]\n").unwrap();
        assert_eq!(f.kind(), ModelKind::Fullshift);
        let g = r#"
kind = "kgraph"
vertices = ["v"]
h_edges = [{ name = "e", source = "v", range = "v" }]
v_edges = [{ name = "f", source = "v", range = "v" }]
rho = [{ h = "e", v = "f", v_out = "f", h_out = "e" }]
"#;
        assert_eq!(parse_model_spec(g).unwrap().kind(), ModelKind::Kgraph);
    }

    #[test]
    fn unknown_and_misplaced_fields() {
        let e = parse_model_spec("kind = \"circle\"\ndegrees = [2, 3]\ncolour = 1\n").unwrap_err();
        assert!(e.to_string().contains("colour"), "{e}");
        let e = parse_model_spec("kind = \"circle\"\ndegrees = [2, 3]\nalphabet = [\"a\"]\n").unwrap_err();
        assert!(e.to_string().contains("alphabet"), "{e}");
        let e = parse_model_spec("kind = \"circle\"\n").unwrap_err();
        assert!(e.to_string().contains("degrees"), "{e}");
    }

    #[test]
    fn measure_override() {
        let m = parse_model_spec(
            "kind = \"fullshift\"\nalphabet = [\"0\", \"1\"]\n[measure]\nhorizontal = [\"1/3\", \"2/3\"]\n",
        )
        .unwrap();
        assert!(!m.default_measure().is_counting());
    }
}
