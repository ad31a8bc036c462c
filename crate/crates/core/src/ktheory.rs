//! Bratteli diagrams of the AF cores and their dimension-group fingerprints.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geom::Shape;
use crate::groupoid::{rn_classes, rn_inclusion_multiplicity};
use crate::shift::{orbit_reach, periodicity_diagnostic};
use crate::symbolic::kgraph::Rank2Graph;
use crate::symbolic::model::{Angle, Cell, ModelHandle};
use crate::scalar::rat;

/// Dense matrix of nonnegative integers with overflow-checked arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::ShapeMismatch("ragged matrix rows".into()));
        }
        Ok(IntMatrix {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn scalar(v: u64) -> Self {
        IntMatrix {
            rows: 1,
            cols: 1,
            data: vec![v],
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.data.chunks(self.cols.max(1)).map(<[u64]>::to_vec).take(self.rows).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "{}×{} · {}×{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let p = a
                        .checked_mul(other[(k, j)])
                        .ok_or(Error::Overflow("integer matrix product"))?;
                    let e = &mut out[(i, j)];
                    *e = e.checked_add(p).ok_or(Error::Overflow("integer matrix product"))?;
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Result<IntMatrix> {
        if self.rows != self.cols {
            return Err(Error::ShapeMismatch("power of a non-square matrix".into()));
        }
        let mut acc = Self::identity(self.rows);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    pub fn row_sum(&self, r: usize) -> Result<u64> {
        if r >= self.rows {
            return Err(Error::ShapeMismatch(format!("row {r} of {}", self.rows)));
        }
        self.data[r * self.cols..(r + 1) * self.cols]
            .iter()
            .try_fold(0u64, |a, &b| a.checked_add(b))
            .ok_or(Error::Overflow("row sum"))
    }

    /// `Mᵀ v`.
    pub fn transpose_apply(&self, v: &[u64]) -> Result<Vec<u64>> {
        if v.len() != self.rows {
            return Err(Error::ShapeMismatch("vector length".into()));
        }
        let mut out = vec![0u64; self.cols];
        for i in 0..self.rows {
            for (j, o) in out.iter_mut().enumerate() {
                let p = self[(i, j)]
                    .checked_mul(v[i])
                    .ok_or(Error::Overflow("matrix-vector product"))?;
                *o = o.checked_add(p).ok_or(Error::Overflow("matrix-vector product"))?;
            }
        }
        Ok(out)
    }

    pub fn is_positive(&self) -> bool {
        !self.data.is_empty() && self.data.iter().all(|&x| x > 0)
    }

    fn pattern_mul(&self, other: &IntMatrix) -> IntMatrix {
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self[(i, k)] == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    if other[(k, j)] != 0 {
                        out[(i, j)] = 1;
                    }
                }
            }
        }
        out
    }

    /// Smallest `k ≤ limit` with `Mᵏ` entrywise positive, via boolean powers.
    pub fn primitivity_exponent(&self, limit: u32) -> Option<u32> {
        if self.rows != self.cols || self.rows == 0 {
            return None;
        }
        let base = self.pattern_mul(&Self::identity(self.rows));
        let mut acc = base.clone();
        for k in 1..=limit {
            if acc.is_positive() {
                return Some(k);
            }
            acc = acc.pattern_mul(&base);
        }
        None
    }

    /// Coefficients `[1, c₁, …, c_n]` of `det(tI − M)`, by Faddeev–LeVerrier.
    pub fn characteristic_polynomial(&self) -> Result<Vec<BigInt>> {
        if self.rows != self.cols {
            return Err(Error::ShapeMismatch("characteristic polynomial of a non-square matrix".into()));
        }
        let n = self.rows;
        let a: Vec<Vec<BigInt>> = (0..n)
            .map(|i| (0..n).map(|j| BigInt::from(self[(i, j)])).collect())
            .collect();
        let mut coeffs = vec![BigInt::one()];
        let mut m = vec![vec![BigInt::zero(); n]; n];
        for k in 1..=n {
            // M_k = A M_{k-1} + c_{k-1} I
            let mut next = vec![vec![BigInt::zero(); n]; n];
            for i in 0..n {
                for j in 0..n {
                    let mut s = BigInt::zero();
                    for l in 0..n {
                        s += &a[i][l] * &m[l][j];
                    }
                    if i == j {
                        s += &coeffs[k - 1];
                    }
                    next[i][j] = s;
                }
            }
            m = next;
            let mut tr = BigInt::zero();
            for i in 0..n {
                for l in 0..n {
                    tr += &a[i][l] * &m[l][i];
                }
            }
            coeffs.push(-tr / BigInt::from(k));
        }
        Ok(coeffs)
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = u64;
    fn index(&self, (r, c): (usize, usize)) -> &u64 {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of bounds");
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut u64 {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of bounds");
        &mut self.data[r * self.cols + c]
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BratteliVertex {
    pub label: String,
    pub size: u64,
}

/// `edges[t][(a, b)]` is the multiplicity of level-`t` vertex `a` inside level-`t+1` vertex `b`,
/// so that sizes at level `t+1` are `edges[t]ᵀ` times sizes at level `t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BratteliDiagram {
    pub chain: Vec<Shape>,
    pub levels: Vec<Vec<BratteliVertex>>,
    pub edges: Vec<IntMatrix>,
}

impl BratteliDiagram {
    pub fn sizes(&self, level: usize) -> Vec<u64> {
        self.levels[level].iter().map(|v| v.size).collect()
    }

    pub fn total_dimension(&self, level: usize) -> u64 {
        self.levels[level].iter().map(|v| v.size).sum()
    }

    /// Unitality at every step.
    pub fn check_consistency(&self) -> Result<()> {
        if self.edges.len() + 1 != self.levels.len() {
            return Err(Error::InconsistentDiagram(format!(
                "{} levels but {} edge sets",
                self.levels.len(),
                self.edges.len()
            )));
        }
        for (t, e) in self.edges.iter().enumerate() {
            if e.nrows() != self.levels[t].len() || e.ncols() != self.levels[t + 1].len() {
                return Err(Error::InconsistentDiagram(format!("edge set {t} has the wrong shape")));
            }
            if e.transpose_apply(&self.sizes(t))? != self.sizes(t + 1) {
                return Err(Error::InconsistentDiagram(format!(
                    "sizes at level {} are not the image of level {t}",
                    t + 1
                )));
            }
        }
        Ok(())
    }

    /// Merges runs of `stride` consecutive steps.
    pub fn telescope(&self, stride: usize) -> Result<BratteliDiagram> {
        if stride == 0 {
            return Err(Error::Precondition("stride must be positive".into()));
        }
        let keep: Vec<usize> = (0..self.levels.len()).step_by(stride).collect();
        let mut edges = Vec::new();
        for w in keep.windows(2) {
            let mut m = self.edges[w[0]].clone();
            for t in w[0] + 1..w[1] {
                m = m.mul(&self.edges[t])?;
            }
            edges.push(m);
        }
        Ok(BratteliDiagram {
            chain: keep.iter().filter_map(|&t| self.chain.get(t).copied()).collect(),
            levels: keep.iter().map(|&t| self.levels[t].clone()).collect(),
            edges,
        })
    }

    /// Graphviz rendering: one rank per level, edges labelled with multiplicities.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph bratteli {\n  rankdir=TB;\n  node [shape=circle];\n");
        for (t, level) in self.levels.iter().enumerate() {
            let _ = write!(s, "  {{ rank=same;");
            for (a, v) in level.iter().enumerate() {
                let _ = write!(s, " \"L{t}_{a}\" [label=\"{}\"];", v.size);
            }
            s.push_str(" }\n");
        }
        for (t, e) in self.edges.iter().enumerate() {
            for a in 0..e.nrows() {
                for b in 0..e.ncols() {
                    let m = e[(a, b)];
                    if m > 0 {
                        let _ = writeln!(s, "  \"L{t}_{a}\" -> \"L{}_{b}\" [label=\"{m}\"];", t + 1);
                    }
                }
            }
        }
        s.push_str("}\n");
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BratteliMode {
    /// Every level is `C*(R_{n(t)})` on the same depth basis: one vertex per class.
    CommonDepth(Shape),
    /// Level `t` is `C*(R_{n(t)})` on depth `n(t)` itself, a single full matrix block.
    Matched,
}

/// The inclusion chain `C*(R_{n(0)}) ⊂ C*(R_{n(1)}) ⊂ …`. Circle models always give one vertex
/// per level of size `|p₁|^{n₁}|p₂|^{n₂}`.
pub fn bratteli_build(
    model: &ModelHandle,
    chain: &[Shape],
    mode: BratteliMode,
) -> Result<BratteliDiagram> {
    check_chain(chain)?;
    let diagram = if let Some(c) = model.circle() {
        let sizes: Vec<u64> = chain
            .iter()
            .map(|&n| c.arcs(n))
            .collect::<Result<_>>()?;
        single_vertex_chain(chain, &sizes)?
    } else {
        match mode {
            BratteliMode::Matched => {
                let mut sizes = Vec::new();
                for (t, &n) in chain.iter().enumerate() {
                    let count = model.basis(n)?.len() as u64;
                    if t > 0 {
                        let prev = chain[t - 1];
                        uniform_refinement(model, prev, n)?;
                    }
                    sizes.push(count);
                }
                single_vertex_chain(chain, &sizes)?
            }
            BratteliMode::CommonDepth(depth) => {
                let mut levels = Vec::new();
                for &n in chain {
                    let classes = rn_classes(model, n, depth)?;
                    levels.push(
                        classes
                            .classes
                            .iter()
                            .map(|cl| BratteliVertex {
                                label: model.render(&cl.key),
                                size: cl.members.len() as u64,
                            })
                            .collect(),
                    );
                }
                let mut edges = Vec::new();
                for w in chain.windows(2) {
                    edges.push(rn_inclusion_multiplicity(model, w[0], w[1], depth)?.transpose());
                }
                BratteliDiagram {
                    chain: chain.to_vec(),
                    levels,
                    edges,
                }
            }
        }
    };
    diagram.check_consistency()?;
    Ok(diagram)
}

fn check_chain(chain: &[Shape]) -> Result<()> {
    if chain.is_empty() {
        return Err(Error::Precondition("chain is empty".into()));
    }
    for w in chain.windows(2) {
        if !w[0].le(w[1]) {
            return Err(Error::NonComparable { n: w[0], m: w[1] });
        }
    }
    Ok(())
}

/// Every pattern of depth `small` has the same number of extensions to depth `big`.
fn uniform_refinement(model: &ModelHandle, small: Shape, big: Shape) -> Result<u64> {
    let a = model.basis(small)?;
    let b = model.basis(big)?;
    let mut counts = vec![0u64; a.len()];
    for c in b.cells() {
        let r = model.restrict_cell(c, small)?;
        counts[a.index_of(&r).expect("restriction admissible")] += 1;
    }
    let first = counts[0];
    if counts.iter().any(|&c| c != first) {
        return Err(Error::InconsistentDiagram(format!(
            "depth {small} patterns extend non-uniformly to {big}"
        )));
    }
    Ok(first)
}

fn single_vertex_chain(chain: &[Shape], sizes: &[u64]) -> Result<BratteliDiagram> {
    let mut edges = Vec::new();
    for w in sizes.windows(2) {
        if w[0] == 0 || w[1] % w[0] != 0 {
            return Err(Error::InconsistentDiagram(format!(
                "block size {} does not divide {}",
                w[0], w[1]
            )));
        }
        edges.push(IntMatrix::scalar(w[1] / w[0]));
    }
    Ok(BratteliDiagram {
        chain: chain.to_vec(),
        levels: chain
            .iter()
            .zip(sizes)
            .map(|(n, &size)| {
                vec![BratteliVertex {
                    label: format!("R({n})"),
                    size,
                }]
            })
            .collect(),
        edges,
    })
}

/// Levels are copies of the vertex set; the step `n → n + (a,b)` has edges `(M₁ᵀ)ᵃ(M₂ᵀ)ᵇ` and
/// level `0` has unit sizes.
pub fn bratteli_from_kgraph(g: &Rank2Graph, chain: &[Shape]) -> Result<BratteliDiagram> {
    check_chain(chain)?;
    let m1t = g.m1().transpose();
    let m2t = g.m2().transpose();
    let k = g.vertices().len();
    let mut levels = vec![g
        .vertices()
        .iter()
        .map(|v| BratteliVertex {
            label: v.clone(),
            size: 1,
        })
        .collect::<Vec<_>>()];
    let mut edges = Vec::new();
    let mut sizes = vec![1u64; k];
    for w in chain.windows(2) {
        let d = w[1].checked_sub(w[0]).expect("chain checked");
        let e = m1t.pow(d.0 as u32)?.mul(&m2t.pow(d.1 as u32)?)?;
        sizes = e.transpose_apply(&sizes)?;
        levels.push(
            g.vertices()
                .iter()
                .zip(&sizes)
                .map(|(v, &size)| BratteliVertex {
                    label: v.clone(),
                    size,
                })
                .collect(),
        );
        edges.push(e);
    }
    let d = BratteliDiagram {
        chain: chain.to_vec(),
        levels,
        edges,
    };
    d.check_consistency()?;
    Ok(d)
}

/// Prime → exponent, `None` meaning `∞`.
pub type Supernatural = BTreeMap<u64, Option<u32>>;

pub fn factorize(mut n: u64) -> BTreeMap<u64, u32> {
    let mut out = BTreeMap::new();
    let mut p = 2;
    while p * p <= n {
        while n % p == 0 {
            *out.entry(p).or_insert(0) += 1;
            n /= p;
        }
        p += 1;
    }
    if n > 1 {
        *out.entry(n).or_insert(0) += 1;
    }
    out
}

pub fn format_supernatural(s: &Supernatural) -> String {
    if s.is_empty() {
        return "1".into();
    }
    s.iter()
        .map(|(p, e)| match e {
            None => format!("{p}^∞"),
            Some(1) => p.to_string(),
            Some(k) => format!("{p}^{k}"),
        })
        .collect::<Vec<_>>()
        .join("·")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DimensionGroupReport {
    pub levels: usize,
    pub stationary: bool,
    /// First step from which all connecting matrices coincide.
    pub stationary_from: Option<usize>,
    pub stationary_matrix: Option<IntMatrix>,
    pub supernatural: Option<Supernatural>,
    pub supernatural_text: Option<String>,
    pub k0: String,
    pub characteristic_polynomial: Option<Vec<String>>,
    pub primitive: bool,
    pub primitivity_exponent: Option<u32>,
}

const PRIMITIVITY_LIMIT: u32 = 32;

pub fn dimension_group_report(d: &BratteliDiagram) -> Result<DimensionGroupReport> {
    d.check_consistency()?;
    let steps = d.edges.len();
    let stationary_from = (0..steps).find(|&s| d.edges[s..].iter().all(|e| *e == d.edges[s]));
    let stationary_matrix = stationary_from.map(|s| d.edges[s].clone());
    let stationary = stationary_from == Some(0) && steps > 0;
    let single = d.levels.iter().all(|l| l.len() == 1);

    let mut supernatural = None;
    if single && d.edges.iter().any(|e| e[(0, 0)] > 1) {
        let mut s: Supernatural = BTreeMap::new();
        let tail = stationary_from.filter(|_| steps > 0);
        for (t, e) in d.edges.iter().enumerate() {
            let infinite = tail.is_some_and(|from| t >= from);
            for (p, k) in factorize(e[(0, 0)]) {
                let slot = s.entry(p).or_insert(Some(0));
                *slot = if infinite {
                    None
                } else {
                    slot.map(|x| x + k)
                };
            }
        }
        supernatural = Some(s);
    }

    let characteristic_polynomial = match &stationary_matrix {
        Some(m) if m.nrows() == m.ncols() => Some(
            m.characteristic_polynomial()?
                .iter()
                .map(ToString::to_string)
                .collect(),
        ),
        _ => None,
    };
    let primitivity_exponent = stationary_matrix
        .as_ref()
        .and_then(|m| m.primitivity_exponent(PRIMITIVITY_LIMIT));

    let vertices = d.levels.last().map_or(0, Vec::len);
    let k0 = match (&supernatural, &stationary_matrix) {
        (Some(s), _) if s.values().all(Option::is_none) => {
            let base: u64 = s.keys().product();
            format!("Z[1/{base}]")
        }
        (Some(s), _) => format!("UHF type {}", format_supernatural(s)),
        (None, Some(m)) if *m == IntMatrix::identity(m.nrows()) => format!("Z^{vertices}"),
        (None, Some(m)) => format!("lim(Z^{} → Z^{} by {:?})", m.nrows(), m.ncols(), m.rows()),
        (None, None) if single => "Z".into(),
        (None, None) => format!("Z^{vertices} at the last level"),
    };

    Ok(DimensionGroupReport {
        levels: d.levels.len(),
        stationary,
        stationary_from,
        stationary_matrix,
        supernatural_text: supernatural.as_ref().map(format_supernatural),
        supernatural,
        k0,
        characteristic_polynomial,
        primitive: primitivity_exponent.is_some(),
        primitivity_exponent,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimplicityVerdict {
    EvidenceForSimple,
    Inconclusive,
    ObstructionFound,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReachEvidence {
    pub depth: Shape,
    pub k_bound: Shape,
    pub seeds: usize,
    pub minimal_seeds: usize,
    pub positive: bool,
    /// A seed whose reach misses part of the depth basis.
    pub failing_seed: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FreenessEvidence {
    pub p: Shape,
    pub q: Shape,
    pub depth: Shape,
    pub periodic_count: Option<usize>,
    pub positive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SimplicityReport {
    pub budget: usize,
    pub minimality: Vec<ReachEvidence>,
    pub essential_freeness: Vec<FreenessEvidence>,
    pub verdict: SimplicityVerdict,
    pub skipped: Vec<String>,
}

const MAX_SEEDS: usize = 64;

/// Orbit reach from every cylinder (circle models: from a few rational points as well) at
/// depths `(t,t)`, `t ≤ budget`, with `k ≤ (budget, budget)`, plus periodicity checks for
/// `σᵖ = σ^q` over the unit steps.
pub fn simplicity_report(model: &ModelHandle, budget: usize) -> Result<SimplicityReport> {
    if budget == 0 {
        return Err(Error::Precondition("budget must be positive".into()));
    }
    let k_bound = Shape(budget, budget);
    let mut minimality = Vec::new();
    let mut skipped = Vec::new();
    for t in 1..=budget {
        let depth = Shape(t, t);
        let basis = match model.basis(depth) {
            Ok(b) => b,
            Err(Error::ShapeOverflow { .. }) => {
                skipped.push(format!("reach at depth {depth}: too many cylinders"));
                continue;
            }
            Err(e) => return Err(e),
        };
        let mut seeds: Vec<Cell> = basis.cells().iter().take(MAX_SEEDS).cloned().collect();
        if model.circle().is_some() {
            seeds.extend(
                [rat(0, 1), rat(1, 5), rat(3, 7)]
                    .into_iter()
                    .map(|r| Cell::Angle(Angle::new(r))),
            );
        }
        let mut ok = 0;
        let mut failing = None;
        for s in &seeds {
            match orbit_reach(model, s, k_bound, depth) {
                Ok(r) if r.minimal() => ok += 1,
                Ok(_) => {
                    failing.get_or_insert_with(|| model.render(s));
                }
                Err(Error::ShapeOverflow { .. }) => {
                    skipped.push(format!("reach at depth {depth}: enumeration bound"));
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        minimality.push(ReachEvidence {
            depth,
            k_bound,
            seeds: seeds.len(),
            minimal_seeds: ok,
            positive: ok == seeds.len(),
            failing_seed: failing,
        });
    }

    let depth = Shape(budget.max(2), budget.max(2));
    let mut essential_freeness = Vec::new();
    for (p, q) in [
        (Shape(1, 0), Shape(0, 0)),
        (Shape(0, 1), Shape(0, 0)),
        (Shape(1, 1), Shape(0, 0)),
        (Shape(1, 0), Shape(0, 1)),
    ] {
        match periodicity_diagnostic(model, p, q, depth) {
            Ok(r) => essential_freeness.push(FreenessEvidence {
                p,
                q,
                depth,
                periodic_count: match &r.periodic_points {
                    Some(v) => Some(v.len()),
                    None if model.circle().is_some() => None,
                    None => Some(r.consistent.len()),
                },
                positive: r.evidence_free,
            }),
            Err(Error::ShapeOverflow { .. }) => {
                skipped.push(format!("periodicity {p}/{q}: enumeration bound"))
            }
            Err(e) => return Err(e),
        }
    }

    let any_negative = minimality.iter().any(|m| !m.positive)
        || essential_freeness.iter().any(|f| !f.positive);
    let verdict = if any_negative {
        SimplicityVerdict::ObstructionFound
    } else if skipped.is_empty() && !minimality.is_empty() {
        SimplicityVerdict::EvidenceForSimple
    } else {
        SimplicityVerdict::Inconclusive
    };
    Ok(SimplicityReport {
        budget,
        minimality,
        essential_freeness,
        verdict,
        skipped,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CuntzCoreReport {
    pub n1: u64,
    pub n2: u64,
    /// Matrix sizes of `K(E_(m,m))`, `m = 1..=levels`.
    pub sizes: Vec<u64>,
    pub multiplicities: Vec<u64>,
    pub consistent: bool,
    pub flip_unitary: bool,
    pub supernatural: String,
}

/// The core of the trivial-flip product system over scalars with `E_i = C^{n_i}`: level `m` is
/// `M_{n₁ᵐn₂ᵐ}`, included into the next level by `x ↦ x ⊗ 1`.
pub fn cuntz_tensor_core_check(n1: u64, n2: u64, levels: usize) -> Result<CuntzCoreReport> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::Precondition("dimensions must be positive".into()));
    }
    let mut sizes = Vec::new();
    for m in 1..=levels as u32 {
        // dim E_(m,m) computed as a tensor product of m copies of each factor
        let mut dim = 1u64;
        for _ in 0..m {
            dim = dim
                .checked_mul(n1)
                .and_then(|d| d.checked_mul(n2))
                .ok_or(Error::Overflow("core size"))?;
        }
        sizes.push(dim);
    }
    let chain: Vec<Shape> = (1..=levels).map(|m| Shape(m, m)).collect();
    let d = single_vertex_chain(&chain, &sizes)?;
    let consistent = d.check_consistency().is_ok();
    let multiplicities = d.edges.iter().map(|e| e[(0, 0)]).collect();
    let flip_unitary = crate::bimodule::scalar_flip_unitary(n1 as usize, n2 as usize);
    let mut s: Supernatural = BTreeMap::new();
    for p in factorize(n1 * n2).into_keys() {
        s.insert(p, None);
    }
    Ok(CuntzCoreReport {
        n1,
        n2,
        sizes,
        multiplicities,
        consistent,
        flip_unitary,
        supernatural: format_supernatural(&s),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_basics() {
        let a = IntMatrix::from_rows(&[vec![1, 1], vec![1, 0]]).unwrap();
        assert_eq!(a.pow(5).unwrap().rows(), vec![vec![8, 5], vec![5, 3]]);
        assert_eq!(a.primitivity_exponent(32), Some(2));
        let cp: Vec<String> = a
            .characteristic_polynomial()
            .unwrap()
            .iter()
            .map(ToString::to_string)
            .collect();
        assert_eq!(cp, vec!["1", "-1", "-1"]);
        assert_eq!(IntMatrix::identity(2).primitivity_exponent(32), None);
        assert!(IntMatrix::scalar(u64::MAX).mul(&IntMatrix::scalar(2)).is_err());
    }

    #[test]
    fn supernatural_formatting() {
        let mut s = Supernatural::new();
        s.insert(2, None);
        s.insert(3, None);
        assert_eq!(format_supernatural(&s), "2^∞·3^∞");
        s.insert(5, Some(2));
        assert_eq!(format_supernatural(&s), "2^∞·3^∞·5^2");
        assert_eq!(factorize(360), BTreeMap::from([(2, 3), (3, 2), (5, 1)]));
    }

    #[test]
    fn stationary_scalar_diagram() {
        let chain: Vec<Shape> = (0..4).map(|t| Shape(t, t)).collect();
        let d = single_vertex_chain(&chain, &[1, 6, 36, 216]).unwrap();
        let r = dimension_group_report(&d).unwrap();
        assert!(r.stationary);
        assert_eq!(r.supernatural_text.as_deref(), Some("2^∞·3^∞"));
        assert_eq!(r.k0, "Z[1/6]");
        let t = d.telescope(2).unwrap();
        let rt = dimension_group_report(&t).unwrap();
        assert_eq!(rt.supernatural, r.supernatural);
        assert_eq!(t.edges[0], IntMatrix::scalar(36));
    }

    #[test]
    fn identity_diagram() {
        let d = BratteliDiagram {
            chain: vec![Shape(0, 0), Shape(1, 1), Shape(2, 2)],
            levels: vec![
                vec![
                    BratteliVertex { label: "a".into(), size: 1 },
                    BratteliVertex { label: "b".into(), size: 1 },
                ];
                3
            ],
            edges: vec![IntMatrix::identity(2); 2],
        };
        let r = dimension_group_report(&d).unwrap();
        assert_eq!(r.k0, "Z^2");
        assert!(r.supernatural.is_none());
        let mut bad = d.clone();
        bad.levels[1][0].size = 2;
        assert!(matches!(
            dimension_group_report(&bad),
            Err(Error::InconsistentDiagram(_))
        ));
    }

    #[test]
    fn cuntz_core_sizes() {
        assert_eq!(cuntz_tensor_core_check(2, 2, 3).unwrap().sizes, vec![4, 16, 64]);
        let r = cuntz_tensor_core_check(2, 3, 3).unwrap();
        assert_eq!(r.sizes, vec![6, 36, 216]);
        assert!(r.consistent && r.flip_unitary);
        assert_eq!(cuntz_tensor_core_check(1, 3, 3).unwrap().sizes, vec![3, 9, 27]);
    }

    #[test]
    fn kgraph_diagram() {
        let g = Rank2Graph::single_vertex(2, 3);
        let chain: Vec<Shape> = (0..4).map(|t| Shape(t, t)).collect();
        let d = bratteli_from_kgraph(&g, &chain).unwrap();
        assert!(d.edges.iter().all(|e| *e == IntMatrix::scalar(6)));
        assert_eq!(d.sizes(3), vec![216]);
        let h = bratteli_from_kgraph(&g, &[Shape(0, 0), Shape(1, 0), Shape(2, 0)]).unwrap();
        assert!(h.edges.iter().all(|e| *e == IntMatrix::scalar(2)));
        assert!(d.to_dot().contains("\"L0_0\" -> \"L1_0\" [label=\"6\"]"));
    }
}
