//! One function per subcommand, each a thin wrapper around a library operation.

use serde::Serialize;
use serde_json::{json, Value};

use r2d_core::bimodule::{
    check_commuting_expectations, check_reconstruction, compactness_growth_diagnostic,
    convolution_check, convolution_check_laurent, expectation_matrix, flip_unitary_check,
    frame_compute, lemma_check, operator_identities, transfer_matrix, BasisTag, OperatorMatrix,
    Resolution,
};
use r2d_core::groupoid::{rn_algebra_description, rn_classes};
use r2d_core::ktheory::{
    bratteli_build, bratteli_from_kgraph, dimension_group_report, simplicity_report,
    BratteliDiagram, BratteliMode,
};
use r2d_core::scalar::fmt_scalar;
use r2d_core::shift::{
    check_local_injectivity, find_injectivity_window, revalidate_witness, FiberMeasureSystem,
};
use r2d_core::symbolic::kgraph::validate_rank2_graph;
use r2d_core::symbolic::pattern::RectPattern;
use r2d_core::symbolic::sft::validate_sft;
use r2d_core::{Direction, Error, ModelHandle, Result, Shape};

use crate::models::LoadedModel;
use crate::report::{ReportDocument, Section, Verdict};
use crate::{ChainArgs, ChainMode, Command, DepthArg, OperatorArgs, ResolutionArg};

pub const DEFAULT_DEPTH: Shape = Shape(3, 3);
pub const DEFAULT_SPAN: i64 = 6;
/// Default for the pairwise checks (`prodsys-check`, `convolve-check`), whose cost grows with the
/// square of the tensor or kernel basis.
pub const PAIRWISE_DEFAULT_DEPTH: Shape = Shape(2, 2);
const WINDOW_SCAN_MAX: Shape = Shape(2, 2);
const COMPACTNESS_DEPTHS: [usize; 4] = [1, 2, 3, 4];

fn value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("library reports serialize")
}

fn shape_value(s: Shape) -> Value {
    json!(s.to_string())
}

fn parse_shape(s: &str, what: &str) -> Result<Shape> {
    s.parse()
        .map_err(|e| Error::Parse(format!("--{what} `{s}`: {e}")))
}

fn parse_shapes(items: &[String], what: &str) -> Result<Vec<Shape>> {
    items
        .iter()
        .flat_map(|s| s.split(';'))
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_shape(s.trim(), what))
        .collect()
}

fn direction(d: u8) -> Result<Direction> {
    Direction::from_index(d)
}

fn depth_param(sec: &mut Section, arg: &Option<String>) -> Result<Shape> {
    depth_param_or(sec, arg, DEFAULT_DEPTH)
}

fn depth_param_or(sec: &mut Section, arg: &Option<String>, default: Shape) -> Result<Shape> {
    let d = match arg {
        Some(s) => parse_shape(s, "depth")?,
        None => default,
    };
    sec.param("depth", shape_value(d), arg.is_none());
    Ok(d)
}

/// Circle models work on Laurent spans unless a depth is asked for; symbolic models on depths.
fn resolution_param(sec: &mut Section, model: &ModelHandle, arg: &ResolutionArg) -> Result<Resolution> {
    resolution_param_or(sec, model, arg, DEFAULT_DEPTH)
}

fn resolution_param_or(
    sec: &mut Section,
    model: &ModelHandle,
    arg: &ResolutionArg,
    default: Shape,
) -> Result<Resolution> {
    if model.circle().is_some() && arg.depth.is_none() {
        let span = arg.span.unwrap_or(DEFAULT_SPAN);
        sec.param("span", json!(span), arg.span.is_none());
        return Ok(Resolution::LaurentSpan(span));
    }
    if arg.span.is_some() {
        return Err(Error::Parse("--span applies to circle models only".into()));
    }
    Ok(Resolution::Depth(depth_param_or(sec, &arg.depth, default)?))
}

fn pattern_value(model: &ModelHandle, p: &RectPattern) -> Value {
    let rendered = match model.alphabet() {
        Some(a) => p.render(a),
        None => p.to_string(),
    };
    json!({ "shape": shape_value(p.shape()), "cells": p.cells(), "rendered": rendered })
}

fn basis_labels(model: &ModelHandle, tag: BasisTag) -> Result<Vec<String>> {
    Ok(match tag {
        BasisTag::Cylinders(d) => model.basis(d)?.cells().iter().map(|c| model.render(c)).collect(),
        BasisTag::Laurent(lo, hi) => (lo..=hi).map(|k| format!("z^{k}")).collect(),
    })
}

fn matrix_value(model: &ModelHandle, m: &OperatorMatrix) -> Result<Value> {
    let mut entries = Vec::new();
    for r in 0..m.rows() {
        for (c, v) in m.row(r) {
            entries.push(json!([r, c, fmt_scalar(v)]));
        }
    }
    Ok(json!({
        "tag": value(&m.tag),
        "domain": value(&m.domain),
        "codomain": value(&m.codomain),
        "rows": m.rows(),
        "cols": m.cols(),
        "nonzeros": m.nonzeros(),
        "entries": entries,
        "row_labels": basis_labels(model, m.codomain)?,
        "col_labels": basis_labels(model, m.domain)?,
    }))
}

pub fn validate(model: &ModelHandle, arg: &DepthArg) -> Result<Section> {
    let mut sec = Section::default();
    let depth = depth_param(&mut sec, &arg.depth)?;
    let basis = model.basis(depth)?.len();
    let (details, ok) = if let Some(g) = model.graph() {
        let r = validate_rank2_graph(g)?;
        (value(&r), r.matrices_commute)
    } else if let Some(spec) = model.sft() {
        let r = validate_sft(spec, depth, model.bound())?;
        let stuck = r.stuck_pattern.as_ref().map(|(d, p)| json!({ "direction": d.index(), "pattern": pattern_value(model, p) }));
        let v = json!({
            "depth": shape_value(r.depth),
            "pattern_count": r.pattern_count.to_string(),
            "nonempty": r.nonempty,
            "extends_horizontally": r.extends_horizontally,
            "extends_vertically": r.extends_vertically,
            "stuck_pattern": stuck,
        });
        (v, r.nonempty && r.extendable())
    } else if let Some(c) = model.circle() {
        (json!({ "degrees": [c.degree(Direction::Horizontal), c.degree(Direction::Vertical)] }), true)
    } else {
        (Value::Null, true)
    };
    sec.results = json!({ "basis_size": basis, "details": details });
    sec.verdicts.push(Verdict::new("validation", if ok { "valid" } else { "invalid" }));
    Ok(sec)
}

pub fn patterns(model: &ModelHandle, shape: &str) -> Result<Section> {
    let mut sec = Section::default();
    let shape = parse_shape(shape, "shape")?;
    sec.param("shape", shape_value(shape), false);
    let basis = model.basis(shape)?;
    let listed: Vec<String> = basis.cells().iter().map(|c| model.render(c)).collect();
    sec.results = json!({ "count": listed.len(), "patterns": listed });
    Ok(sec)
}

pub fn localhomeo(model: &ModelHandle, dir: u8, window: &[String], arg: &DepthArg) -> Result<Section> {
    let mut sec = Section::default();
    let d = direction(dir)?;
    sec.param("dir", json!(dir), false);
    let depth = depth_param(&mut sec, &arg.depth)?;
    let cells: Vec<(usize, usize)> = parse_shapes(window, "window")?.into_iter().map(|s| (s.0, s.1)).collect();
    let verdict = if cells.is_empty() {
        sec.param("window", json!("scan"), true);
        sec.param("window_scan_max", shape_value(WINDOW_SCAN_MAX.min(depth)), true);
        find_injectivity_window(model, d, WINDOW_SCAN_MAX.min(depth), depth)?
    } else {
        sec.param("window", json!(cells), false);
        check_local_injectivity(model, d, &cells, depth)?
    };
    let witness = verdict.witness.as_ref().map(|w| {
        json!({
            "first": pattern_value(model, &w.0),
            "second": pattern_value(model, &w.1),
            "revalidates": revalidate_witness(model, d, &verdict.window, w),
        })
    });
    let status = value(&verdict.status);
    sec.results = json!({
        "status": status,
        "direction": dir,
        "window": verdict.window,
        "depth": shape_value(verdict.depth),
        "witness": witness,
        "note": verdict.note,
    });
    sec.verdicts.push(Verdict::new("local-injectivity", status.as_str().unwrap_or_default()));
    Ok(sec)
}

pub fn operator(model: &ModelHandle, transfer: bool, args: &OperatorArgs) -> Result<Section> {
    let mut sec = Section::default();
    let d = direction(args.dir)?;
    sec.param("dir", json!(args.dir), false);
    let res = resolution_param(&mut sec, model, &args.res)?;
    let mu = model.default_measure();
    let m = if transfer {
        transfer_matrix(model, mu, d, res)?
    } else {
        expectation_matrix(model, mu, d, res)?
    };
    let ids = operator_identities(model, mu, d, res)?;
    sec.results = json!({ "matrix": matrix_value(model, &m)?, "identities": value(&ids) });
    sec.verdicts.push(Verdict::holds("operator-identities", ids.all_hold()));
    Ok(sec)
}

pub fn frame(model: &ModelHandle, args: &OperatorArgs) -> Result<Section> {
    let mut sec = Section::default();
    let d = direction(args.dir)?;
    sec.param("dir", json!(args.dir), false);
    let res = resolution_param(&mut sec, model, &args.res)?;
    let mu = model.default_measure();
    let fr = frame_compute(model, mu, d, res)?;
    let check = check_reconstruction(model, mu, &fr, res)?;
    let elements: Vec<Value> = fr
        .elements
        .iter()
        .map(|e| json!({ "label": e.label, "indicator": e.indicator.render(), "weight_squared": e.weight_squared.render() }))
        .collect();
    sec.results = json!({
        "window": fr.window,
        "size": fr.len(),
        "elements": elements,
        "reconstruction": value(&check),
    });
    sec.verdicts.push(Verdict::holds("reconstruction", check.exact()));
    Ok(sec)
}

pub fn prodsys(model: &ModelHandle, arg: &ResolutionArg) -> Result<Section> {
    let mut sec = Section::default();
    let res = resolution_param_or(&mut sec, model, arg, PAIRWISE_DEFAULT_DEPTH)?;
    let mu = model.default_measure();
    let commute = check_commuting_expectations(model, mu, res)?;
    let lemma = lemma_check(model, mu, res)?;
    let flip = flip_unitary_check(model, mu, res)?;
    let mut c = value(&commute);
    c["witness"] = match &commute.witness {
        Some((r, col, a, b)) => json!([r, col, fmt_scalar(a), fmt_scalar(b)]),
        None => Value::Null,
    };
    sec.results = json!({ "commuting_expectations": c, "lemma": value(&lemma), "flip": value(&flip) });
    sec.verdicts.push(Verdict::holds("expectations-commute", commute.commute && commute.transfers_commute));
    sec.verdicts.push(Verdict::holds("phi-isomorphism", lemma.holds()));
    sec.verdicts.push(Verdict::holds("flip-unitary", flip.holds()));
    Ok(sec)
}

pub fn groupoid(model: &ModelHandle, n: &str, arg: &DepthArg) -> Result<Section> {
    let mut sec = Section::default();
    let n = parse_shape(n, "n")?;
    sec.param("n", shape_value(n), false);
    let depth = depth_param(&mut sec, &arg.depth)?;
    let classes = rn_classes(model, n, depth)?;
    let desc = rn_algebra_description(model, n, depth)?;
    let basis = model.basis(depth)?;
    let listed: Vec<Value> = classes
        .classes
        .iter()
        .map(|c| {
            let members: Vec<String> = c.members.iter().map(|&i| model.render(basis.cell(i))).collect();
            json!({ "key": model.render(&c.key), "members": members })
        })
        .collect();
    sec.results = json!({
        "classes": listed,
        "class_sizes": classes.sizes(),
        "description": value(&desc),
        "algebra": desc.render(),
    });
    Ok(sec)
}

pub fn convolve(model: &ModelHandle, n: &str, dir: u8, arg: &ResolutionArg) -> Result<Section> {
    let mut sec = Section::default();
    let mu = model.default_measure();
    let report = match resolution_param_or(&mut sec, model, arg, PAIRWISE_DEFAULT_DEPTH)? {
        Resolution::LaurentSpan(span) => {
            sec.param("dir", json!(dir), false);
            convolution_check_laurent(model, mu, direction(dir)?, span)?
        }
        Resolution::Depth(depth) => {
            let n = parse_shape(n, "n")?;
            sec.param("n", shape_value(n), false);
            convolution_check(model, mu, n, depth)?
        }
    };
    sec.results = value(&report);
    sec.verdicts.push(Verdict::holds("convolution-paths-agree", report.agree()));
    Ok(sec)
}

fn chain_diagram(model: &ModelHandle, sec: &mut Section, args: &ChainArgs) -> Result<BratteliDiagram> {
    let mut chain = parse_shapes(&args.chain, "chain")?;
    let defaulted = chain.is_empty();
    if defaulted {
        chain = (0..args.levels).map(|t| Shape(t, t)).collect();
    }
    sec.param("chain", json!(chain.iter().map(|s| s.to_string()).collect::<Vec<_>>()), defaulted);
    let resolved = match args.mode {
        ChainMode::Auto if model.graph().is_some() => ChainMode::Kgraph,
        ChainMode::Auto => ChainMode::Matched,
        m => m,
    };
    let name = match resolved {
        ChainMode::Common => "common",
        ChainMode::Kgraph => "kgraph",
        _ => "matched",
    };
    sec.param("mode", json!(name), args.mode == ChainMode::Auto);
    match resolved {
        ChainMode::Auto | ChainMode::Matched => bratteli_build(model, &chain, BratteliMode::Matched),
        ChainMode::Common => {
            let last = *chain.last().ok_or_else(|| Error::Parse("empty chain".into()))?;
            let depth = last.add(Shape(1, 1));
            sec.param("depth", shape_value(depth), true);
            bratteli_build(model, &chain, BratteliMode::CommonDepth(depth))
        }
        ChainMode::Kgraph => {
            let g = model
                .graph()
                .ok_or_else(|| Error::Unsupported("--mode kgraph needs a rank-2 graph model".into()))?;
            bratteli_from_kgraph(g, &chain)
        }
    }
}

fn diagram_value(d: &BratteliDiagram) -> Value {
    let sizes: Vec<Vec<u64>> = (0..d.levels.len()).map(|t| d.sizes(t)).collect();
    let totals: Vec<u64> = (0..d.levels.len()).map(|t| d.total_dimension(t)).collect();
    json!({
        "chain": d.chain.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
        "levels": value(&d.levels),
        "edges": value(&d.edges),
        "sizes": sizes,
        "total_dimensions": totals,
    })
}

pub fn bratteli(model: &ModelHandle, args: &ChainArgs) -> Result<Section> {
    let mut sec = Section::default();
    let d = chain_diagram(model, &mut sec, args)?;
    sec.results = diagram_value(&d);
    sec.diagram = Some(d.to_dot());
    Ok(sec)
}

pub fn k0(model: &ModelHandle, args: &ChainArgs) -> Result<Section> {
    let mut sec = Section::default();
    let d = chain_diagram(model, &mut sec, args)?;
    let r = dimension_group_report(&d)?;
    sec.results = json!({ "diagram": diagram_value(&d), "dimension_group": value(&r) });
    sec.verdicts.push(Verdict::new("k0", r.k0.clone()));
    if let Some(s) = &r.supernatural_text {
        sec.verdicts.push(Verdict::new("supernatural", s.clone()));
    }
    sec.diagram = Some(d.to_dot());
    Ok(sec)
}

pub fn simplicity(model: &ModelHandle, budget: usize) -> Result<Section> {
    let mut sec = Section::default();
    sec.param("budget", json!(budget), false);
    let r = simplicity_report(model, budget)?;
    let verdict = value(&r.verdict);
    sec.results = value(&r);
    sec.verdicts.push(Verdict::new("simplicity", verdict.as_str().unwrap_or_default()));
    Ok(sec)
}

/// The full-shape minimal Θ-count of `φ(1)` over depths `(d,d)`.
pub fn compactness(model: &ModelHandle, mu: &FiberMeasureSystem) -> Result<Section> {
    let mut sec = Section::default();
    sec.param("depths", json!(COMPACTNESS_DEPTHS), true);
    sec.param("dir", json!(1), true);
    let r = compactness_growth_diagnostic(model, mu, Direction::Horizontal, None, &COMPACTNESS_DEPTHS)?;
    sec.results = value(&r);
    let status = if r.strictly_increasing {
        "strictly-increasing"
    } else if r.bounded {
        "bounded"
    } else {
        "neither"
    };
    sec.verdicts.push(Verdict::new("theta-count-growth", status));
    Ok(sec)
}

fn sections(model: &ModelHandle, all: bool) -> Vec<(String, Result<Section>)> {
    let no_depth = DepthArg { depth: None };
    let no_res = ResolutionArg { depth: None, span: None };
    let op = |dir| OperatorArgs { dir, res: no_res.clone() };
    let chain = ChainArgs { chain: Vec::new(), levels: 4, mode: ChainMode::Auto };
    let mut out = vec![("validate".to_string(), validate(model, &no_depth))];
    for dir in [1, 2] {
        out.push((format!("localhomeo-{dir}"), localhomeo(model, dir, &[], &no_depth)));
    }
    out.push(("k0".into(), k0(model, &chain)));
    out.push(("simplicity".into(), simplicity(model, 2)));
    if all {
        for dir in [1, 2] {
            out.push((format!("expectation-{dir}"), operator(model, false, &op(dir))));
            out.push((format!("frame-{dir}"), frame(model, &op(dir))));
        }
        out.push(("prodsys-check".into(), prodsys(model, &no_res)));
        out.push(("groupoid".into(), groupoid(model, "1,1", &no_depth)));
        out.push(("convolve-check".into(), convolve(model, "1,0", 1, &no_res)));
        out.push(("compactness".into(), compactness(model, model.default_measure())));
    }
    out
}

/// Sections the model does not support are reported as skipped; any other failure is an error.
pub fn report(model: &ModelHandle, all: bool) -> Section {
    let mut sec = Section::default();
    sec.param("all", json!(all), !all);
    let mut results = serde_json::Map::new();
    for (name, r) in sections(model, all) {
        let entry = match r {
            Ok(s) => {
                for v in &s.verdicts {
                    sec.verdicts.push(Verdict::new(format!("{name}/{}", v.check), v.status.clone()));
                }
                let mut defaults = s.defaults.clone();
                defaults.sort();
                json!({ "parameters": s.parameters, "defaults": defaults, "results": s.results })
            }
            Err(e @ (Error::Unsupported(_) | Error::NotLocallyInjective)) => json!({ "skipped": e.to_string() }),
            Err(e) => {
                sec.verdicts.push(Verdict::new(name.clone(), "error"));
                json!({ "error": e.to_string() })
            }
        };
        results.insert(name, entry);
    }
    sec.results = Value::Object(results);
    sec
}

/// Runs one parsed command against a loaded model.
pub fn run_command(command: &Command, argv: Vec<String>, model: &LoadedModel) -> Result<ReportDocument> {
    let m = &model.handle;
    let section = match command {
        Command::Validate(a) => validate(m, a)?,
        Command::Patterns { shape } => patterns(m, shape)?,
        Command::Localhomeo { dir, window, depth } => localhomeo(m, *dir, window, depth)?,
        Command::Expectation(a) => operator(m, false, a)?,
        Command::Transfer(a) => operator(m, true, a)?,
        Command::Frame(a) => frame(m, a)?,
        Command::ProdsysCheck(a) => prodsys(m, a)?,
        Command::Groupoid { n, depth } => groupoid(m, n, depth)?,
        Command::ConvolveCheck { n, dir, res } => convolve(m, n, *dir, res)?,
        Command::Bratteli(a) => bratteli(m, a)?,
        Command::K0(a) => k0(m, a)?,
        Command::Simplicity { budget } => simplicity(m, *budget)?,
        Command::Report { all } => report(m, *all),
    };
    Ok(ReportDocument::new(argv, model, section))
}
