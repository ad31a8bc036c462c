//! A single handle over every supported dynamical model, exposing cylinder bases, the shift
//! action and refinement uniformly.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{Direction, Shape};
use crate::scalar::{fmt_rational, Rational};
use crate::shift::{FiberMeasureSystem, FiberMode};
use crate::symbolic::kgraph::{validate_rank2_graph, Rank2Graph};
use crate::symbolic::pattern::{PatternSystem, RectPattern};
use crate::symbolic::sft::{validate_system, SftSpec};

pub const DEFAULT_CANDIDATE_BOUND: u128 = 1 << 24;

/// `R2D_CANDIDATE_BOUND` when set and parseable, else the default.
pub fn candidate_bound_from_env() -> u128 {
    std::env::var("R2D_CANDIDATE_BOUND")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_CANDIDATE_BOUND)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Sft,
    Kgraph,
    Circle,
    Fullshift,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Sft => "sft",
            ModelKind::Kgraph => "kgraph",
            ModelKind::Circle => "circle",
            ModelKind::Fullshift => "fullshift",
        })
    }
}

/// Two commuting covering maps `x ↦ p₁x`, `x ↦ p₂x` of `T = R/Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CircleModel {
    pub p1: i64,
    pub p2: i64,
}

impl CircleModel {
    pub fn new(p1: i64, p2: i64) -> Result<Self> {
        if p1.abs() < 2 || p2.abs() < 2 {
            return Err(Error::InvalidModel(format!(
                "covering degrees must satisfy |p| ≥ 2, got ({p1},{p2})"
            )));
        }
        Ok(CircleModel { p1, p2 })
    }

    pub fn degree(&self, dir: Direction) -> i64 {
        match dir {
            Direction::Horizontal => self.p1,
            Direction::Vertical => self.p2,
        }
    }

    /// `p₁^{k₁} p₂^{k₂}`.
    pub fn multiplier(&self, k: Shape) -> Result<i64> {
        let a = self
            .p1
            .checked_pow(k.0 as u32)
            .ok_or(Error::Overflow("circle multiplier"))?;
        let b = self
            .p2
            .checked_pow(k.1 as u32)
            .ok_or(Error::Overflow("circle multiplier"))?;
        a.checked_mul(b).ok_or(Error::Overflow("circle multiplier"))
    }

    /// Number of arcs at subdivision depth `(a,b)`: `|p₁|^a |p₂|^b`.
    pub fn arcs(&self, depth: Shape) -> Result<u64> {
        Ok(self.multiplier(depth)?.unsigned_abs())
    }
}

/// The arc `[index/N, (index+1)/N)` with `N = |p₁|^a |p₂|^b` at depth `(a,b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ArcCell {
    pub depth: Shape,
    pub index: u64,
}

/// A point of `Q/Z`, normalized into `[0,1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Angle(Rational);

impl Angle {
    pub fn new(r: Rational) -> Self {
        let f = r.clone() - r.floor();
        Angle(f)
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_rational(&self.0))
    }
}

/// A finite-depth cylinder (pattern or arc) or, for circle models, an exact point.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cell {
    Pattern(RectPattern),
    Arc(ArcCell),
    Angle(Angle),
}

impl Cell {
    pub fn pattern(&self) -> Option<&RectPattern> {
        match self {
            Cell::Pattern(p) => Some(p),
            _ => None,
        }
    }
}

/// The admissible cylinders of one depth, in deterministic order, with reverse lookup.
#[derive(Debug)]
pub struct Basis {
    depth: Shape,
    cells: Vec<Cell>,
    index: HashMap<Cell, usize>,
}

impl Basis {
    fn new(depth: Shape, cells: Vec<Cell>) -> Self {
        let index = cells.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
        Basis {
            depth,
            cells,
            index,
        }
    }

    pub fn depth(&self) -> Shape {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, i: usize) -> &Cell {
        &self.cells[i]
    }

    pub fn index_of(&self, c: &Cell) -> Option<usize> {
        self.index.get(c).copied()
    }
}

/// Input accepted by [`build_model`].
#[derive(Debug, Clone)]
pub enum ModelSpec {
    Sft(SftSpec),
    Kgraph(Rank2Graph),
    Circle { p1: i64, p2: i64 },
    Fullshift {
        alphabet: Vec<String>,
        /// Per-symbol Bernoulli weights; uniform when absent.
        weights: Option<Vec<Rational>>,
    },
}

#[derive(Debug, Clone)]
enum Dynamics {
    Patterns {
        system: PatternSystem,
        transposed: PatternSystem,
    },
    Circle(CircleModel),
}

pub struct ModelHandle {
    kind: ModelKind,
    name: String,
    dynamics: Dynamics,
    graph: Option<Rank2Graph>,
    sft: Option<SftSpec>,
    measure: FiberMeasureSystem,
    bound: u128,
    bases: Mutex<HashMap<Shape, Arc<Basis>>>,
}

impl Clone for ModelHandle {
    fn clone(&self) -> Self {
        ModelHandle {
            kind: self.kind,
            name: self.name.clone(),
            dynamics: self.dynamics.clone(),
            graph: self.graph.clone(),
            sft: self.sft.clone(),
            measure: self.measure.clone(),
            bound: self.bound,
            bases: Mutex::new(HashMap::new()),
        }
    }
}

impl fmt::Debug for ModelHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModelHandle")
            .field("kind", &self.kind)
            .field("name", &self.name)
            .finish()
    }
}

/// Validates the underlying spec and wraps it in a [`ModelHandle`].
pub fn build_model(spec: ModelSpec) -> Result<ModelHandle> {
    let bound = candidate_bound_from_env();
    let (kind, dynamics, graph, sft, measure) = match spec {
        ModelSpec::Sft(s) => {
            let system = s.system()?;
            validate_system(&system, system.window_bbox(), bound)?;
            (
                ModelKind::Sft,
                patterns(system),
                None,
                Some(s),
                FiberMeasureSystem::counting(),
            )
        }
        ModelSpec::Kgraph(g) => {
            validate_rank2_graph(&g)?;
            let system = g.square_system()?;
            (
                ModelKind::Kgraph,
                patterns(system),
                Some(g),
                None,
                FiberMeasureSystem::counting(),
            )
        }
        ModelSpec::Circle { p1, p2 } => (
            ModelKind::Circle,
            Dynamics::Circle(CircleModel::new(p1, p2)?),
            None,
            None,
            FiberMeasureSystem::counting(),
        ),
        ModelSpec::Fullshift { alphabet, weights } => {
            let names: Vec<&str> = alphabet.iter().map(String::as_str).collect();
            let s = SftSpec::full_shift(&names);
            let system = s.system()?;
            let k = alphabet.len() as i64;
            let weights = weights.unwrap_or_else(|| {
                vec![Rational::new(BigInt::one(), BigInt::from(k)); alphabet.len()]
            });
            let mode = FiberMode::product(weights, alphabet.len())?;
            (
                ModelKind::Fullshift,
                patterns(system),
                None,
                Some(s),
                FiberMeasureSystem::uniform(mode),
            )
        }
    };
    let name = match kind {
        ModelKind::Circle => match &dynamics {
            Dynamics::Circle(c) => format!("circle-{}-{}", c.p1, c.p2),
            _ => unreachable!(),
        },
        other => other.to_string(),
    };
    Ok(ModelHandle {
        kind,
        name,
        dynamics,
        graph,
        sft,
        measure,
        bound,
        bases: Mutex::new(HashMap::new()),
    })
}

fn patterns(system: PatternSystem) -> Dynamics {
    let transposed = system.transpose();
    Dynamics::Patterns { system, transposed }
}

impl ModelHandle {
    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_bound(mut self, bound: u128) -> Self {
        self.bound = bound;
        self.bases = Mutex::new(HashMap::new());
        self
    }

    /// Replaces the default fiber measures.
    pub fn with_measure(mut self, measure: FiberMeasureSystem) -> Self {
        self.measure = measure;
        self
    }

    pub fn bound(&self) -> u128 {
        self.bound
    }

    /// The measure system the model was built with (counting, or Bernoulli for full shifts).
    pub fn default_measure(&self) -> &FiberMeasureSystem {
        &self.measure
    }

    pub fn graph(&self) -> Option<&Rank2Graph> {
        self.graph.as_ref()
    }

    pub fn sft(&self) -> Option<&SftSpec> {
        self.sft.as_ref()
    }

    pub fn system(&self) -> Option<&PatternSystem> {
        match &self.dynamics {
            Dynamics::Patterns { system, .. } => Some(system),
            Dynamics::Circle(_) => None,
        }
    }

    /// The pattern system seen with `dir` as the horizontal direction.
    pub fn oriented_system(&self, dir: Direction) -> Option<&PatternSystem> {
        match &self.dynamics {
            Dynamics::Patterns { system, transposed } => Some(match dir {
                Direction::Horizontal => system,
                Direction::Vertical => transposed,
            }),
            Dynamics::Circle(_) => None,
        }
    }

    pub fn circle(&self) -> Option<&CircleModel> {
        match &self.dynamics {
            Dynamics::Circle(c) => Some(c),
            Dynamics::Patterns { .. } => None,
        }
    }

    pub fn alphabet(&self) -> Option<&[String]> {
        self.system().map(PatternSystem::alphabet)
    }

    /// Smallest depth at which every window fits.
    pub fn min_depth(&self) -> Shape {
        self.system().map_or(Shape(0, 0), PatternSystem::window_bbox)
    }

    /// Admissible patterns (or arcs) of `depth`, cached.
    pub fn basis(&self, depth: Shape) -> Result<Arc<Basis>> {
        if let Some(b) = self.bases.lock().expect("basis cache").get(&depth) {
            return Ok(Arc::clone(b));
        }
        let cells = match &self.dynamics {
            Dynamics::Patterns { system, .. } => system
                .enumerate(depth, self.bound)?
                .into_iter()
                .map(Cell::Pattern)
                .collect(),
            Dynamics::Circle(c) => {
                let n = c.arcs(depth)?;
                if n as u128 > self.bound {
                    return Err(Error::ShapeOverflow {
                        shape: depth,
                        bound: self.bound,
                    });
                }
                (0..n).map(|index| Cell::Arc(ArcCell { depth, index })).collect()
            }
        };
        let basis = Arc::new(Basis::new(depth, cells));
        self.bases
            .lock()
            .expect("basis cache")
            .insert(depth, Arc::clone(&basis));
        Ok(basis)
    }

    pub fn is_admissible(&self, cell: &Cell) -> bool {
        match (&self.dynamics, cell) {
            (Dynamics::Patterns { system, .. }, Cell::Pattern(p)) => system.is_admissible(p),
            (Dynamics::Circle(c), Cell::Arc(a)) => {
                c.arcs(a.depth).map(|n| a.index < n).unwrap_or(false)
            }
            (Dynamics::Circle(_), Cell::Angle(_)) => true,
            _ => false,
        }
    }

    /// Depth of a cylinder; angles have none.
    pub fn depth_of(&self, cell: &Cell) -> Option<Shape> {
        match cell {
            Cell::Pattern(p) => Some(p.shape()),
            Cell::Arc(a) => Some(a.depth),
            Cell::Angle(_) => None,
        }
    }

    /// `σᵏ` on a cylinder or point. Cylinders of depth `d` map to depth `d − k`, which may have a
    /// zero component.
    pub fn shift_cell(&self, cell: &Cell, k: Shape) -> Result<Cell> {
        match (&self.dynamics, cell) {
            (Dynamics::Patterns { .. }, Cell::Pattern(p)) => Ok(Cell::Pattern(p.shifted(k)?)),
            (Dynamics::Circle(c), Cell::Arc(a)) => {
                let depth = a.depth.checked_sub(k).ok_or(Error::ShapeUnderflow {
                    shape: a.depth,
                    by: k,
                })?;
                let mut index = a.index;
                let mut at = a.depth;
                for (dir, times) in [(Direction::Horizontal, k.0), (Direction::Vertical, k.1)] {
                    for _ in 0..times {
                        at = at.checked_sub(dir.unit()).expect("checked above");
                        let n = c.arcs(at)?;
                        index = if c.degree(dir) > 0 {
                            index % n
                        } else {
                            (n - 1 - index % n) % n
                        };
                    }
                }
                Ok(Cell::Arc(ArcCell { depth, index }))
            }
            (Dynamics::Circle(c), Cell::Angle(x)) => {
                let m = c.multiplier(k)?;
                Ok(Cell::Angle(Angle::new(x.value() * Rational::from_integer(m.into()))))
            }
            _ => Err(Error::Unsupported("cell does not belong to this model".into())),
        }
    }

    /// The cylinder of `depth` containing `cell` (coarsening).
    pub fn restrict_cell(&self, cell: &Cell, depth: Shape) -> Result<Cell> {
        match (&self.dynamics, cell) {
            (Dynamics::Patterns { .. }, Cell::Pattern(p)) => {
                if !depth.le(p.shape()) {
                    return Err(Error::DepthMismatch(format!(
                        "cannot restrict {} to {depth}",
                        p.shape()
                    )));
                }
                Ok(Cell::Pattern(p.restrict(depth)))
            }
            (Dynamics::Circle(c), Cell::Arc(a)) => {
                if !depth.le(a.depth) {
                    return Err(Error::DepthMismatch(format!(
                        "cannot restrict {} to {depth}",
                        a.depth
                    )));
                }
                let big = c.arcs(a.depth)?;
                let small = c.arcs(depth)?;
                Ok(Cell::Arc(ArcCell {
                    depth,
                    index: a.index / (big / small),
                }))
            }
            (Dynamics::Circle(c), Cell::Angle(x)) => {
                let n = c.arcs(depth)?;
                let scaled = x.value() * Rational::from_integer(BigInt::from(n));
                let index: u64 = scaled
                    .floor()
                    .to_integer()
                    .try_into()
                    .map_err(|_| Error::Overflow("arc index"))?;
                Ok(Cell::Arc(ArcCell { depth, index }))
            }
            _ => Err(Error::Unsupported("cell does not belong to this model".into())),
        }
    }

    /// Preimages of a point under `σ_dir` (circle models only).
    pub fn angle_preimages(&self, dir: Direction, x: &Angle) -> Result<Vec<Angle>> {
        let c = self
            .circle()
            .ok_or_else(|| Error::Unsupported("angles exist only on circle models".into()))?;
        let p = c.degree(dir);
        let mut out: Vec<Angle> = (0..p.abs())
            .map(|j| {
                Angle::new(
                    (x.value() + Rational::from_integer(j.into()))
                        / Rational::from_integer(p.into()),
                )
            })
            .collect();
        out.sort();
        Ok(out)
    }

    pub fn render(&self, cell: &Cell) -> String {
        match cell {
            Cell::Pattern(p) => match self.alphabet() {
                Some(a) => p.render(a),
                None => p.to_string(),
            },
            Cell::Arc(a) => {
                let n = self
                    .circle()
                    .and_then(|c| c.arcs(a.depth).ok())
                    .unwrap_or(0);
                format!("[{}/{n})", a.index)
            }
            Cell::Angle(x) => x.to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn builds_every_kind() {
        assert_eq!(
            build_model(ModelSpec::Sft(SftSpec::ledrappier())).unwrap().kind(),
            ModelKind::Sft
        );
        let c = build_model(ModelSpec::Circle { p1: 2, p2: 3 }).unwrap();
        assert_eq!(c.kind(), ModelKind::Circle);
        assert_eq!(c.name(), "circle-2-3");
        let f = build_model(ModelSpec::Fullshift {
            alphabet: vec!["0".into(), "1".into()],
            weights: None,
        })
        .unwrap();
        assert_eq!(f.kind(), ModelKind::Fullshift);
        assert!(build_model(ModelSpec::Circle { p1: 1, p2: 3 }).is_err());
        let g = build_model(ModelSpec::Kgraph(Rank2Graph::single_vertex(2, 3))).unwrap();
        assert_eq!(g.basis(Shape(1, 1)).unwrap().len(), 6);
    }

    #[test]
    fn arc_shift_and_restrict() {
        let c = build_model(ModelSpec::Circle { p1: 2, p2: 3 }).unwrap();
        // arc 5 of 6 at depth (1,1): [5/6, 1) ↦ ×2 ↦ [4/6, 6/6) = arc 2 of 3
        let arc = Cell::Arc(ArcCell {
            depth: Shape(1, 1),
            index: 5,
        });
        assert_eq!(
            c.shift_cell(&arc, Shape(1, 0)).unwrap(),
            Cell::Arc(ArcCell {
                depth: Shape(0, 1),
                index: 2
            })
        );
        assert_eq!(
            c.restrict_cell(&arc, Shape(1, 0)).unwrap(),
            Cell::Arc(ArcCell {
                depth: Shape(1, 0),
                index: 1
            })
        );
        let x = Cell::Angle(Angle::new(rat(5, 12)));
        assert_eq!(c.shift_cell(&x, Shape(1, 1)).unwrap(), Cell::Angle(Angle::new(rat(1, 2))));
        assert_eq!(
            c.restrict_cell(&x, Shape(1, 1)).unwrap(),
            Cell::Arc(ArcCell {
                depth: Shape(1, 1),
                index: 2
            })
        );
    }

    #[test]
    fn negative_degree_arcs_commute() {
        let c = build_model(ModelSpec::Circle { p1: -2, p2: 3 }).unwrap();
        let basis = c.basis(Shape(2, 2)).unwrap();
        for cell in basis.cells() {
            let a = c
                .shift_cell(&c.shift_cell(cell, Shape(1, 0)).unwrap(), Shape(0, 1))
                .unwrap();
            let b = c
                .shift_cell(&c.shift_cell(cell, Shape(0, 1)).unwrap(), Shape(1, 0))
                .unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn angle_preimages_of_zero() {
        let c = build_model(ModelSpec::Circle { p1: 3, p2: 2 }).unwrap();
        let pre = c
            .angle_preimages(Direction::Horizontal, &Angle::new(rat(0, 1)))
            .unwrap();
        let vals: Vec<_> = pre.iter().map(|a| a.value().clone()).collect();
        assert_eq!(vals, vec![rat(0, 1), rat(1, 3), rat(2, 3)]);
    }
}
