//! Browser bindings. Every export takes a bundled model name or TOML text and returns a JSON
//! string; errors come back as `{"error": "..."}`.

use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

use r2d_core::ktheory::{bratteli_build, dimension_group_report, BratteliMode};
use r2d_core::modelspec::parse_model_spec;
use r2d_core::shift::{check_local_injectivity, find_injectivity_window, revalidate_witness};
use r2d_core::symbolic::model::Cell;
use r2d_core::{Direction, ModelHandle, Result, Shape};

const MODELS: [(&str, &str); 5] = [
    ("ledrappier", include_str!("../../cli/models/ledrappier.toml")),
    ("circle-2-3", include_str!("../../cli/models/circle-2-3.toml")),
    ("fullshift", include_str!("../../cli/models/fullshift.toml")),
    ("kgraph-2-3", include_str!("../../cli/models/kgraph-2-3.toml")),
    ("reducible-kgraph", include_str!("../../cli/models/reducible-kgraph.toml")),
];

/// Largest basis the page will draw.
const MAX_GRIDS: usize = 512;

fn model(src: &str) -> Result<ModelHandle> {
    let text = MODELS.iter().find(|(n, _)| *n == src).map_or(src, |(_, t)| t);
    parse_model_spec(text)
}

fn respond(r: Result<Value>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e.to_string() }).to_string(),
    }
}

#[wasm_bindgen]
pub fn bundled_models() -> String {
    json!(MODELS.iter().map(|(n, _)| *n).collect::<Vec<_>>()).to_string()
}

/// Patterns as symbol grids (rows top to bottom) plus the alphabet; circle arcs as labels.
#[wasm_bindgen]
pub fn pattern_grids(src: &str, m: usize, n: usize) -> String {
    respond((|| {
        let model = model(src)?;
        let basis = model.basis(Shape(m, n))?;
        let mut grids = Vec::new();
        let mut labels = Vec::new();
        for c in basis.cells().iter().take(MAX_GRIDS) {
            match c {
                Cell::Pattern(p) => {
                    let rows: Vec<Vec<u16>> = (0..n).rev().map(|j| (0..m).map(|i| p.get(i, j)).collect()).collect();
                    grids.push(rows);
                }
                other => labels.push(model.render(other)),
            }
        }
        Ok(json!({
            "count": basis.len(),
            "shown": grids.len().max(labels.len()),
            "alphabet": model.alphabet(),
            "grids": grids,
            "labels": labels,
        }))
    })())
}

/// Matched diagonal chain `(0,0) … (levels−1, levels−1)`.
#[wasm_bindgen]
pub fn bratteli_k0(src: &str, levels: usize) -> String {
    respond((|| {
        let model = model(src)?;
        let chain: Vec<Shape> = (0..levels).map(|t| Shape(t, t)).collect();
        let d = bratteli_build(&model, &chain, BratteliMode::Matched)?;
        let r = dimension_group_report(&d)?;
        let sizes: Vec<Vec<u64>> = (0..d.levels.len()).map(|t| d.sizes(t)).collect();
        let edges: Vec<Vec<Vec<u64>>> = d.edges.iter().map(|e| e.rows()).collect();
        Ok(json!({
            "sizes": sizes,
            "edges": edges,
            "k0": r.k0,
            "supernatural": r.supernatural_text,
            "stationary": r.stationary,
        }))
    })())
}

/// `window` is `"i,j;i,j;…"`; empty scans for the smallest verified window.
#[wasm_bindgen]
pub fn injectivity(src: &str, dir: u8, window: &str, m: usize, n: usize) -> String {
    respond((|| {
        let model = model(src)?;
        let d = Direction::from_index(dir)?;
        let depth = Shape(m, n);
        let cells: Vec<(usize, usize)> = window
            .split(';')
            .filter(|s| !s.trim().is_empty())
            .map(|s| s.trim().parse::<Shape>().map(|c| (c.0, c.1)))
            .collect::<Result<_>>()?;
        let v = if cells.is_empty() {
            find_injectivity_window(&model, d, Shape(2, 2).min(depth), depth)?
        } else {
            check_local_injectivity(&model, d, &cells, depth)?
        };
        let witness = v.witness.as_ref().map(|w| {
            let render = |p: &r2d_core::symbolic::pattern::RectPattern| match model.alphabet() {
                Some(a) => p.render(a),
                None => p.to_string(),
            };
            json!({
                "first": render(&w.0),
                "second": render(&w.1),
                "revalidates": revalidate_witness(&model, d, &v.window, w),
            })
        });
        Ok(json!({
            "status": format!("{:?}", v.status),
            "window": v.window,
            "depth": v.depth.to_string(),
            "witness": witness,
            "note": v.note,
        }))
    })())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: String) -> Value {
        serde_json::from_str(&s).unwrap()
    }

    #[test]
    fn ledrappier_grids() {
        let v = parse(pattern_grids("ledrappier", 2, 2));
        assert_eq!(v["count"], 8);
        assert_eq!(v["grids"].as_array().unwrap().len(), 8);
    }

    #[test]
    fn circle_k0() {
        let v = parse(bratteli_k0("circle-2-3", 4));
        assert_eq!(v["supernatural"], "2^∞·3^∞");
        assert_eq!(v["k0"], "Z[1/6]");
    }

    #[test]
    fn verdicts() {
        assert_eq!(parse(injectivity("ledrappier", 1, "0,0", 4, 4))["status"], "VerifiedAtDepth");
        let f = parse(injectivity("fullshift", 1, "0,0", 4, 4));
        assert_eq!(f["status"], "RefutedWithWitness");
        assert_eq!(f["witness"]["revalidates"], true);
        assert!(parse(injectivity("nope", 1, "", 2, 2)).get("error").is_some());
    }
}
