//! The two commuting shifts on finite-depth data: fibers and their weights, local injectivity,
//! surjectivity/openness, orbit reach and periodicity.

use std::collections::{BTreeSet, HashMap, HashSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{Direction, Shape};
use crate::scalar::Rational;
use crate::symbolic::model::{Angle, Cell, ModelHandle};
use crate::symbolic::pattern::{PatternSystem, RectPattern, Symbol};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FiberMode {
    /// Every preimage in a fiber of size `ν` weighs `1/ν`.
    CountingNormalized,
    /// Weight proportional to the product of per-symbol weights over the freshly exposed
    /// column (direction 1) or row (direction 2), normalized over the fiber.
    ProductWeights(Vec<Rational>),
}

impl FiberMode {
    pub fn product(weights: Vec<Rational>, alphabet_len: usize) -> Result<Self> {
        if weights.len() != alphabet_len {
            return Err(Error::InvalidModel(format!(
                "{} weights for {alphabet_len} symbols",
                weights.len()
            )));
        }
        if weights.iter().any(|w| !w.is_positive()) {
            return Err(Error::InvalidModel("weights must be positive".into()));
        }
        let total: Rational = weights.iter().cloned().sum();
        if !total.is_one() {
            return Err(Error::InvalidModel(format!(
                "weights sum to {}, not 1",
                crate::scalar::fmt_rational(&total)
            )));
        }
        Ok(FiberMode::ProductWeights(weights))
    }

    pub fn label(&self) -> &'static str {
        match self {
            FiberMode::CountingNormalized => "counting-normalized",
            FiberMode::ProductWeights(_) => "product-weights",
        }
    }
}

/// One fiber mode per direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberMeasureSystem {
    modes: [FiberMode; 2],
}

impl FiberMeasureSystem {
    pub fn counting() -> Self {
        Self::uniform(FiberMode::CountingNormalized)
    }

    pub fn uniform(mode: FiberMode) -> Self {
        FiberMeasureSystem {
            modes: [mode.clone(), mode],
        }
    }

    pub fn new(horizontal: FiberMode, vertical: FiberMode) -> Self {
        FiberMeasureSystem {
            modes: [horizontal, vertical],
        }
    }

    pub fn mode(&self, dir: Direction) -> &FiberMode {
        &self.modes[dir.index() as usize - 1]
    }

    pub fn is_counting(&self) -> bool {
        self.modes
            .iter()
            .all(|m| matches!(m, FiberMode::CountingNormalized))
    }

    /// Weights of the members of one fiber of `σ_dir`; they sum to 1.
    pub fn fiber_weights(&self, dir: Direction, members: &[&Cell]) -> Vec<Rational> {
        let n = members.len();
        if n == 0 {
            return Vec::new();
        }
        let uniform = || vec![Rational::new(BigInt::one(), BigInt::from(n)); n];
        let FiberMode::ProductWeights(w) = self.mode(dir) else {
            return uniform();
        };
        let mut raw = Vec::with_capacity(n);
        for m in members {
            let Some(p) = m.pattern() else {
                return uniform();
            };
            let fresh: Vec<Symbol> = match dir {
                Direction::Horizontal => (0..p.shape().1).map(|j| p.get(0, j)).collect(),
                Direction::Vertical => (0..p.shape().0).map(|i| p.get(i, 0)).collect(),
            };
            let mut r = Rational::one();
            for s in fresh {
                match w.get(s as usize) {
                    Some(ws) => r *= ws,
                    None => return uniform(),
                }
            }
            raw.push(r);
        }
        let total: Rational = raw.iter().cloned().sum();
        raw.into_iter().map(|r| r / &total).collect()
    }
}

/// `σᵏ` on an admissible cylinder whose shape exceeds `k` in both components.
pub fn apply_shift(model: &ModelHandle, k: Shape, cell: &Cell) -> Result<Cell> {
    if let Some(d) = model.depth_of(cell) {
        if !k.lt_both(d) {
            return Err(Error::ShapeUnderflow { shape: d, by: k });
        }
    }
    if !model.is_admissible(cell) {
        return Err(Error::NotAdmissible(model.render(cell)));
    }
    model.shift_cell(cell, k)
}

/// Preimages of `target` under `σ_dir`, one step deeper in `dir`, with their weights. When
/// `extra` is nonzero only preimages admitting an admissible extension by `extra` are kept.
/// An empty result signals non-surjectivity.
pub fn fiber_decomposition(
    model: &ModelHandle,
    measure: &FiberMeasureSystem,
    dir: Direction,
    target: &Cell,
    extra: Shape,
) -> Result<Vec<(Cell, Rational)>> {
    if !model.is_admissible(target) {
        return Err(Error::NotAdmissible(model.render(target)));
    }
    let members: Vec<Cell> = match target {
        Cell::Pattern(t) => {
            let sys = model
                .oriented_system(dir)
                .ok_or_else(|| Error::Unsupported("pattern target on a circle model".into()))?;
            let t = orient(t, dir);
            let found = pattern_preimages(sys, &t);
            let full = model.system().expect("pattern model");
            found
                .into_iter()
                .map(|y| orient(&y, dir))
                .filter(|y| {
                    extra == Shape::ZERO || full.has_extension(y, y.shape().add(extra))
                })
                .map(Cell::Pattern)
                .collect()
        }
        Cell::Arc(a) => {
            let c = model.circle().expect("arc cell on circle model");
            let deeper = a.depth.add(dir.unit());
            let n_small = c.arcs(a.depth)?;
            let base = if c.degree(dir) > 0 {
                a.index
            } else {
                n_small - 1 - a.index
            };
            (0..c.degree(dir).unsigned_abs())
                .map(|r| {
                    Cell::Arc(crate::symbolic::model::ArcCell {
                        depth: deeper,
                        index: base + r * n_small,
                    })
                })
                .collect()
        }
        Cell::Angle(x) => model
            .angle_preimages(dir, x)?
            .into_iter()
            .map(Cell::Angle)
            .collect(),
    };
    let refs: Vec<&Cell> = members.iter().collect();
    let w = measure.fiber_weights(dir, &refs);
    Ok(members.into_iter().zip(w).collect())
}

fn orient(p: &RectPattern, dir: Direction) -> RectPattern {
    match dir {
        Direction::Horizontal => p.clone(),
        Direction::Vertical => p.transpose(),
    }
}

/// Patterns one column wider than `t` whose columns `1..` equal `t`.
fn pattern_preimages(sys: &PatternSystem, t: &RectPattern) -> Vec<RectPattern> {
    let Shape(m, n) = t.shape();
    let shape = Shape(m + 1, n);
    let mut fixed = vec![None; shape.cells()];
    for (i, j) in t.shape().points() {
        fixed[j * (m + 1) + i + 1] = Some(t.get(i, j));
    }
    let mut out = Vec::new();
    sys.for_each_completion(shape, &fixed, |v| {
        out.push(RectPattern::new(shape, v.to_vec()).expect("shape matches"));
        true
    });
    out
}

/// `σ_dir` on the whole depth basis: for every `y` the index of `σ_dir(y)` in the basis one
/// step shallower, and the weight of `y` in its fiber.
#[derive(Debug, Clone)]
pub struct ShiftTable {
    pub depth: Shape,
    pub target_depth: Shape,
    pub image: Vec<usize>,
    pub weight: Vec<Rational>,
}

impl ShiftTable {
    /// Sizes of the fibers over every target cell.
    pub fn fiber_sizes(&self, targets: usize) -> Vec<usize> {
        let mut sizes = vec![0; targets];
        for &t in &self.image {
            sizes[t] += 1;
        }
        sizes
    }
}

pub fn shift_table(
    model: &ModelHandle,
    measure: &FiberMeasureSystem,
    dir: Direction,
    depth: Shape,
) -> Result<ShiftTable> {
    let target_depth = depth
        .checked_sub(dir.unit())
        .ok_or(Error::DepthTooSmall {
            depth,
            needed: dir.unit(),
        })?;
    let basis = model.basis(depth)?;
    let targets = model.basis(target_depth)?;
    let mut image = Vec::with_capacity(basis.len());
    for c in basis.cells() {
        let t = model.shift_cell(c, dir.unit())?;
        let idx = targets
            .index_of(&t)
            .ok_or_else(|| Error::NotAdmissible(model.render(&t)))?;
        image.push(idx);
    }
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for (y, &t) in image.iter().enumerate() {
        groups.entry(t).or_default().push(y);
    }
    let mut weight = vec![Rational::zero(); basis.len()];
    for members in groups.values() {
        let refs: Vec<&Cell> = members.iter().map(|&y| basis.cell(y)).collect();
        for (&y, w) in members.iter().zip(measure.fiber_weights(dir, &refs)) {
            weight[y] = w;
        }
    }
    Ok(ShiftTable {
        depth,
        target_depth,
        image,
        weight,
    })
}

/// `σⁿ = σ₂^{n₂}σ₁^{n₁}` on the depth basis with the composed weights `wₙ(y)`, the entries of
/// `Lₙ = L₂^{n₂}L₁^{n₁}`.
pub fn n_step_table(
    model: &ModelHandle,
    measure: &FiberMeasureSystem,
    n: Shape,
    depth: Shape,
) -> Result<ShiftTable> {
    let size = model.basis(depth)?.len();
    let mut image: Vec<usize> = (0..size).collect();
    let mut weight = vec![Rational::one(); size];
    let mut at = depth;
    for (dir, steps) in [(Direction::Horizontal, n.0), (Direction::Vertical, n.1)] {
        for _ in 0..steps {
            let t = shift_table(model, measure, dir, at)?;
            for (img, w) in image.iter_mut().zip(weight.iter_mut()) {
                *w *= &t.weight[*img];
                *img = t.image[*img];
            }
            at = t.target_depth;
        }
    }
    Ok(ShiftTable {
        depth,
        target_depth: at,
        image,
        weight,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum InjectivityStatus {
    VerifiedAtDepth,
    RefutedWithWitness,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalInjectivityVerdict {
    pub status: InjectivityStatus,
    pub direction: Direction,
    pub window: Vec<(usize, usize)>,
    pub depth: Shape,
    pub witness: Option<(RectPattern, RectPattern)>,
    pub note: String,
}

/// Three-valued depth-stamped check that `σ_dir` is injective on each cylinder fixed by
/// `window`.
///
/// Direction 1 (direction 2 is the transpose): the base search looks for distinct admissible
/// `y, z` of shape `(D₁+1, D₂)` agreeing on columns `≥ 1` and on the window. The closure search
/// looks, at shape `(D₁+1, D₂+1)`, for a pair agreeing everywhere except the top cell of column
/// 0; if none exists, column 0 is forced upward row by row. A pair found by either search is
/// reported as a refutation only if it extends to such a pair one step larger in both
/// directions.
pub fn check_local_injectivity(
    model: &ModelHandle,
    dir: Direction,
    window: &[(usize, usize)],
    depth: Shape,
) -> Result<LocalInjectivityVerdict> {
    let mut window: Vec<(usize, usize)> = window.to_vec();
    window.sort_by_key(|&(i, j)| (j, i));
    window.dedup();
    let outer = depth.add(dir.unit());
    if let Some(&(i, j)) = window.iter().find(|&&(i, j)| i >= outer.0 || j >= outer.1) {
        return Err(Error::WindowOutsideDepth(i, j));
    }
    if window.is_empty() {
        return Err(Error::Precondition("window is empty".into()));
    }
    let verdict = |status, witness, note: &str| LocalInjectivityVerdict {
        status,
        direction: dir,
        window: window.clone(),
        depth,
        witness,
        note: note.to_string(),
    };
    if let Some(c) = model.circle() {
        return circle_injectivity(model, c.degree(dir), dir, depth)
            .map(|ok| {
                if ok {
                    verdict(
                        InjectivityStatus::VerifiedAtDepth,
                        None,
                        "arcs of one level in this direction meet each fiber at most once",
                    )
                } else {
                    verdict(InjectivityStatus::Inconclusive, None, "arc depth too small")
                }
            });
    }
    let sys = model.oriented_system(dir).expect("pattern model");
    let tw: Vec<(usize, usize)> = match dir {
        Direction::Horizontal => window.clone(),
        Direction::Vertical => window.iter().map(|&(i, j)| (j, i)).collect(),
    };
    let d = match dir {
        Direction::Horizontal => depth,
        Direction::Vertical => depth.transpose(),
    };
    let back = |(y, z): (RectPattern, RectPattern)| (orient(&y, dir), orient(&z, dir));

    let base = Shape(d.0 + 1, d.1);
    let mut tied = column_tie(base, &tw);
    let base_pairs = find_pairs(sys, base, &tied, &vec![None; base.cells()], 64);
    if !base_pairs.is_empty() {
        for w in &base_pairs {
            if persists(sys, w, &tw) {
                return Ok(verdict(
                    InjectivityStatus::RefutedWithWitness,
                    Some(back(w.clone())),
                    "distinct preimages agree on the window",
                ));
            }
        }
        return Ok(verdict(
            InjectivityStatus::Inconclusive,
            None,
            "non-injective at this depth but no witness persists",
        ));
    }

    let closure = Shape(d.0 + 1, d.1 + 1);
    tied = vec![true; closure.cells()];
    tied[d.1 * closure.0] = false;
    let closure_pairs = find_pairs(sys, closure, &tied, &vec![None; closure.cells()], 64);
    if closure_pairs.is_empty() {
        return Ok(verdict(
            InjectivityStatus::VerifiedAtDepth,
            None,
            "base injective and column 0 forced upward",
        ));
    }
    for w in &closure_pairs {
        if persists(sys, w, &tw) {
            return Ok(verdict(
                InjectivityStatus::RefutedWithWitness,
                Some(back(w.clone())),
                "column 0 is not forced above the window",
            ));
        }
    }
    Ok(verdict(
        InjectivityStatus::Inconclusive,
        None,
        "injective at this depth but propagation does not close",
    ))
}

/// Cells tied in a direction-1 injectivity search: columns `≥ 1` and the window.
fn column_tie(shape: Shape, window: &[(usize, usize)]) -> Vec<bool> {
    let mut tied = vec![false; shape.cells()];
    for (i, j) in shape.points() {
        tied[j * shape.0 + i] = i >= 1;
    }
    for &(i, j) in window {
        if i < shape.0 && j < shape.1 {
            tied[j * shape.0 + i] = true;
        }
    }
    tied
}

fn find_pairs(
    sys: &PatternSystem,
    shape: Shape,
    tied: &[bool],
    fixed: &[Option<(Symbol, Symbol)>],
    limit: usize,
) -> Vec<(RectPattern, RectPattern)> {
    let mut out = Vec::new();
    sys.for_each_pair(shape, tied, fixed, |y, z| {
        if y != z {
            out.push((
                RectPattern::new(shape, y.to_vec()).expect("shape"),
                RectPattern::new(shape, z.to_vec()).expect("shape"),
            ));
        }
        out.len() < limit
    });
    out
}

/// Does the pair extend by one in both directions while still agreeing on columns `≥ 1` and
/// on the window?
fn persists(sys: &PatternSystem, w: &(RectPattern, RectPattern), window: &[(usize, usize)]) -> bool {
    let s = w.0.shape();
    let big = s.add(Shape(1, 1));
    let tied = column_tie(big, window);
    let mut fixed = vec![None; big.cells()];
    for (i, j) in s.points() {
        fixed[j * big.0 + i] = Some((w.0.get(i, j), w.1.get(i, j)));
    }
    !find_pairs(sys, big, &tied, &fixed, 1).is_empty()
}

/// Arcs one level deeper than `depth` in `dir` meet each fiber at most once when grouped by
/// their level-`e_dir` arc.
fn circle_injectivity(model: &ModelHandle, p: i64, dir: Direction, depth: Shape) -> Result<bool> {
    if p.abs() < 2 {
        return Ok(false);
    }
    let deeper = depth.add(dir.unit());
    let basis = model.basis(deeper)?;
    let mut seen = HashSet::new();
    for c in basis.cells() {
        let key = (
            model.shift_cell(c, dir.unit())?,
            model.restrict_cell(c, dir.unit())?,
        );
        if !seen.insert(key) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Re-checks a reported witness against the model from scratch.
pub fn revalidate_witness(
    model: &ModelHandle,
    dir: Direction,
    window: &[(usize, usize)],
    witness: &(RectPattern, RectPattern),
) -> bool {
    let Some(sys) = model.system() else {
        return false;
    };
    let (y, z) = witness;
    y.shape() == z.shape()
        && sys.is_admissible(y)
        && sys.is_admissible(z)
        && y != z
        && window.iter().all(|&(i, j)| {
            i < y.shape().0 && j < y.shape().1 && y.get(i, j) == z.get(i, j)
        })
        && matches!(
            (y.shifted(dir.unit()), z.shifted(dir.unit())),
            (Ok(a), Ok(b)) if a == b
        )
}

/// Scans rectangular windows `[0,a)×[0,b)` with `(a,b) ≤ max`, smallest area first, and returns
/// the first verified verdict, or the verdict of the largest window if none verifies.
pub fn find_injectivity_window(
    model: &ModelHandle,
    dir: Direction,
    max: Shape,
    depth: Shape,
) -> Result<LocalInjectivityVerdict> {
    let mut sizes: Vec<Shape> = (1..=max.0)
        .flat_map(|a| (1..=max.1).map(move |b| Shape(a, b)))
        .collect();
    sizes.sort_by_key(|s| (s.cells(), s.1, s.0));
    let mut last = None;
    for s in sizes {
        let cells: Vec<(usize, usize)> = s.points().collect();
        let v = match check_local_injectivity(model, dir, &cells, depth) {
            Err(Error::WindowOutsideDepth(..)) => continue,
            other => other?,
        };
        if v.status == InjectivityStatus::VerifiedAtDepth {
            return Ok(v);
        }
        last = Some(v);
    }
    last.ok_or_else(|| Error::Precondition("no window fits the depth".into()))
}

#[derive(Debug, Clone)]
pub struct SurjectivityReport {
    pub direction: Direction,
    pub depth: Shape,
    pub checked: usize,
    pub surjective: bool,
    pub fiber_sizes: Vec<usize>,
    pub orphan: Option<Cell>,
    /// `σ(Z[y]) = Z[σy]` one level deeper for every `y`.
    pub images_are_cylinders: bool,
    pub open_witness: Option<Cell>,
}

pub fn check_open_surjective(
    model: &ModelHandle,
    dir: Direction,
    depth: Shape,
) -> Result<SurjectivityReport> {
    let measure = FiberMeasureSystem::counting();
    let deeper = depth.add(dir.unit());
    let table = shift_table(model, &measure, dir, deeper)?;
    let targets = model.basis(depth)?;
    let sizes = table.fiber_sizes(targets.len());
    let orphan = sizes.iter().position(|&s| s == 0).map(|t| targets.cell(t).clone());
    let distinct: BTreeSet<usize> = sizes.iter().copied().collect();

    // openness: every extension of σ(y) one level up is the image of an extension of y
    let up = Shape(1, 1);
    let big = model.basis(deeper.add(up))?;
    let big_table = shift_table(model, &measure, dir, deeper.add(up))?;
    let big_targets = model.basis(depth.add(up))?;
    let mut reached: HashSet<(usize, usize)> = HashSet::new();
    for (yi, &ti) in big_table.image.iter().enumerate() {
        let y = model.restrict_cell(big.cell(yi), deeper)?;
        let y = model.basis(deeper)?.index_of(&y).expect("restriction admissible");
        reached.insert((y, ti));
    }
    let mut open_witness = None;
    'outer: for (yi, &t) in table.image.iter().enumerate() {
        for (ti, tc) in big_targets.cells().iter().enumerate() {
            let r = model.restrict_cell(tc, depth)?;
            if targets.index_of(&r) == Some(t) && !reached.contains(&(yi, ti)) {
                open_witness = Some(model.basis(deeper)?.cell(yi).clone());
                break 'outer;
            }
        }
    }
    Ok(SurjectivityReport {
        direction: dir,
        depth,
        checked: targets.len(),
        surjective: orphan.is_none(),
        fiber_sizes: distinct.into_iter().collect(),
        orphan,
        images_are_cylinders: open_witness.is_none(),
        open_witness,
    })
}

/// Cylinders of `depth` contained in the cylinder (or containing the point) `seed`.
pub(crate) fn cylinders_within(model: &ModelHandle, seed: &Cell, depth: Shape) -> Result<Vec<Cell>> {
    match seed {
        Cell::Pattern(p) => {
            let sys = model.system().expect("pattern model");
            if p.shape().le(depth) {
                Ok(sys
                    .extensions(p, depth)
                    .into_iter()
                    .map(Cell::Pattern)
                    .collect())
            } else {
                Ok(vec![Cell::Pattern(p.restrict(depth))])
            }
        }
        Cell::Arc(a) => {
            if !a.depth.le(depth) {
                return Ok(vec![model.restrict_cell(seed, depth)?]);
            }
            let c = model.circle().expect("circle");
            let ratio = c.arcs(depth)? / c.arcs(a.depth)?;
            Ok((0..ratio)
                .map(|r| {
                    Cell::Arc(crate::symbolic::model::ArcCell {
                        depth,
                        index: a.index * ratio + r,
                    })
                })
                .collect())
        }
        Cell::Angle(_) => Ok(vec![model.restrict_cell(seed, depth)?]),
    }
}

#[derive(Debug, Clone)]
pub struct ReachReport {
    pub depth: Shape,
    pub k_bound: Shape,
    /// Indices into the depth basis, ascending.
    pub reached: Vec<usize>,
    pub total: usize,
}

impl ReachReport {
    pub fn minimal(&self) -> bool {
        self.reached.len() == self.total
    }
}

/// Depth cylinders met by `⋃_{k ≤ kBound} σ⁻ᵏ(σᵏ Z)`, `Z` the seed cylinder (or point).
pub fn orbit_reach(
    model: &ModelHandle,
    seed: &Cell,
    k_bound: Shape,
    depth: Shape,
) -> Result<ReachReport> {
    if !model.is_admissible(seed) {
        return Err(Error::NotAdmissible(model.render(seed)));
    }
    let basis = model.basis(depth)?;
    let mut reached = BTreeSet::new();
    for k in Shape(k_bound.0 + 1, k_bound.1 + 1).points() {
        let k = Shape(k.0, k.1);
        let deep = k.add(depth);
        let wide = match model.depth_of(seed) {
            Some(s) => deep.max(s),
            None => deep,
        };
        let mut images = HashSet::new();
        for z in cylinders_within(model, seed, wide)? {
            let img = model.shift_cell(&z, k)?;
            images.insert(model.restrict_cell(&img, depth)?);
        }
        for y in model.basis(deep)?.cells() {
            if images.contains(&model.shift_cell(y, k)?) {
                let r = model.restrict_cell(y, depth)?;
                reached.insert(basis.index_of(&r).expect("restriction admissible"));
            }
        }
    }
    Ok(ReachReport {
        depth,
        k_bound,
        reached: reached.into_iter().collect(),
        total: basis.len(),
    })
}

#[derive(Debug, Clone)]
pub struct PeriodicityReport {
    pub p: Shape,
    pub q: Shape,
    pub depth: Shape,
    /// Symbolic models: depth patterns with `σᵖx = σ^q x` on the overlap.
    pub consistent: Vec<Cell>,
    /// Those among `consistent` with no periodicity-breaking extension one level deeper.
    pub unbroken: Vec<Cell>,
    /// Circle models: the exact solutions of `σᵖx = σ^q x`, or `None` if every point solves it.
    pub periodic_points: Option<Vec<Angle>>,
    pub evidence_free: bool,
}

pub fn periodicity_diagnostic(
    model: &ModelHandle,
    p: Shape,
    q: Shape,
    depth: Shape,
) -> Result<PeriodicityReport> {
    if p == q {
        return Err(Error::Precondition("p and q must differ".into()));
    }
    let mut report = PeriodicityReport {
        p,
        q,
        depth,
        consistent: Vec::new(),
        unbroken: Vec::new(),
        periodic_points: None,
        evidence_free: false,
    };
    if let Some(c) = model.circle() {
        let diff = c.multiplier(p)? - c.multiplier(q)?;
        if diff != 0 {
            let n = diff.unsigned_abs();
            report.periodic_points = Some(
                (0..n)
                    .map(|j| Angle::new(Rational::new(BigInt::from(j), BigInt::from(n))))
                    .collect(),
            );
            report.evidence_free = true;
        }
        return Ok(report);
    }
    let top = p.max(q);
    let overlap = depth.checked_sub(top).filter(|s| !s.is_empty()).ok_or(
        Error::DepthTooSmall {
            depth,
            needed: top.add(Shape(1, 1)),
        },
    )?;
    let periodic_at = |x: &Cell, s: Shape| -> Result<bool> {
        let a = model.restrict_cell(&model.shift_cell(x, p)?, s)?;
        let b = model.restrict_cell(&model.shift_cell(x, q)?, s)?;
        Ok(a == b)
    };
    for x in model.basis(depth)?.cells() {
        if !periodic_at(x, overlap)? {
            continue;
        }
        report.consistent.push(x.clone());
        let up = depth.add(Shape(1, 1));
        let mut broken = false;
        for y in cylinders_within(model, x, up)? {
            if !periodic_at(&y, overlap.add(Shape(1, 1)))? {
                broken = true;
                break;
            }
        }
        if !broken {
            report.unbroken.push(x.clone());
        }
    }
    report.evidence_free = report.unbroken.is_empty();
    Ok(report)
}
