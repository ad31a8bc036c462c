//! Finite-depth shadows of the relations `Rₙ = {(x,y) : σⁿx = σⁿy}` and of the groupoid of
//! triples `(x, p−q, y)`.

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{Degree, Shape};
use crate::ktheory::IntMatrix;
use crate::scalar::{real, Scalar};
use crate::shift::{n_step_table, FiberMeasureSystem};
use crate::symbolic::model::{Cell, ModelHandle};

/// A triple `(x, p−q, y)` with `σᵖx = σ^q y` checked on the overlap rectangle.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupoidElement {
    pub x: Cell,
    pub p: Shape,
    pub q: Shape,
    pub y: Cell,
    pub overlap: Shape,
}

impl GroupoidElement {
    pub fn degree(&self) -> Degree {
        self.p.diff(self.q)
    }

    pub fn is_unit(&self) -> bool {
        self.x == self.y && self.degree() == Degree(0, 0)
    }

    /// Same arrow `(x, p−q, y)`, ignoring the particular `(p, q)` representing the degree.
    pub fn same_arrow(&self, other: &GroupoidElement) -> bool {
        self.x == other.x && self.y == other.y && self.degree() == other.degree()
    }
}

fn shifted_on(model: &ModelHandle, c: &Cell, k: Shape, s: Shape) -> Result<Cell> {
    model.restrict_cell(&model.shift_cell(c, k)?, s)
}

fn common_depth(model: &ModelHandle, x: &Cell, y: &Cell) -> Result<Shape> {
    match (model.depth_of(x), model.depth_of(y)) {
        (Some(a), Some(b)) if a == b => Ok(a),
        _ => Err(Error::IncompatiblePair("x and y need a common depth".into())),
    }
}

pub fn make_element(
    model: &ModelHandle,
    p: Shape,
    q: Shape,
    x: &Cell,
    y: &Cell,
) -> Result<GroupoidElement> {
    let depth = common_depth(model, x, y)?;
    for c in [x, y] {
        if !model.is_admissible(c) {
            return Err(Error::NotAdmissible(model.render(c)));
        }
    }
    let overlap = depth
        .checked_sub(p.max(q))
        .filter(|s| !s.is_empty())
        .ok_or_else(|| Error::IncompatiblePair(format!("depth {depth} leaves no overlap")))?;
    if shifted_on(model, x, p, overlap)? != shifted_on(model, y, q, overlap)? {
        return Err(Error::IncompatiblePair(format!(
            "σ^{p} x ≠ σ^{q} y on {overlap}"
        )));
    }
    Ok(GroupoidElement {
        x: x.clone(),
        p,
        q,
        y: y.clone(),
        overlap,
    })
}

/// `(x,p,q,y)·(y,p',q',z) = (x, p+p', q+q', z)` on the overlap the two identities imply.
pub fn compose_elements(
    model: &ModelHandle,
    g: &GroupoidElement,
    h: &GroupoidElement,
) -> Result<GroupoidElement> {
    if g.y != h.x {
        return Err(Error::NonComposable(format!(
            "source {} ≠ range {}",
            model.render(&g.y),
            model.render(&h.x)
        )));
    }
    let depth = common_depth(model, &g.x, &h.y)?;
    let (p, q) = (g.p.add(h.p), g.q.add(h.q));
    let implied = [
        g.overlap.checked_sub(h.p),
        h.overlap.checked_sub(g.q),
        depth.checked_sub(p.max(q)),
    ];
    let overlap = implied
        .iter()
        .try_fold(Shape(usize::MAX, usize::MAX), |acc, s| s.map(|s| acc.min(s)))
        .filter(|s| !s.is_empty())
        .ok_or_else(|| Error::NonComposable("the implied overlap is empty".into()))?;
    let out = GroupoidElement {
        x: g.x.clone(),
        p,
        q,
        y: h.y.clone(),
        overlap,
    };
    if shifted_on(model, &out.x, p, overlap)? != shifted_on(model, &out.y, q, overlap)? {
        return Err(Error::NonComposable("composite identity fails".into()));
    }
    Ok(out)
}

pub fn invert_element(g: &GroupoidElement) -> GroupoidElement {
    GroupoidElement {
        x: g.y.clone(),
        p: g.q,
        q: g.p,
        y: g.x.clone(),
        overlap: g.overlap,
    }
}

#[derive(Debug, Clone)]
pub struct RnClass {
    /// The common image `σⁿx`.
    pub key: Cell,
    /// Indices into the depth basis, ascending.
    pub members: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct RnClasses {
    pub n: Shape,
    pub depth: Shape,
    /// Ordered by least member.
    pub classes: Vec<RnClass>,
    /// For every basis index, its class.
    pub class_of: Vec<usize>,
}

impl RnClasses {
    pub fn sizes(&self) -> Vec<usize> {
        self.classes.iter().map(|c| c.members.len()).collect()
    }
}

pub fn rn_classes(model: &ModelHandle, n: Shape, depth: Shape) -> Result<RnClasses> {
    if !n.lt_both(depth) {
        return Err(Error::DepthTooSmall {
            depth,
            needed: n.add(Shape(1, 1)),
        });
    }
    let basis = model.basis(depth)?;
    let mut index: HashMap<Cell, usize> = HashMap::new();
    let mut classes: Vec<RnClass> = Vec::new();
    let mut class_of = Vec::with_capacity(basis.len());
    for (i, c) in basis.cells().iter().enumerate() {
        let key = model.shift_cell(c, n)?;
        let k = *index.entry(key.clone()).or_insert_with(|| {
            classes.push(RnClass {
                key,
                members: Vec::new(),
            });
            classes.len() - 1
        });
        classes[k].members.push(i);
        class_of.push(k);
    }
    Ok(RnClasses {
        n,
        depth,
        classes,
        class_of,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaseSpace {
    Finite,
    Circle,
    /// Class sizes keep growing with depth: the classes are not discrete.
    NonDiscrete,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RnAlgebraDescription {
    pub n: Shape,
    pub depth: Shape,
    pub base: BaseSpace,
    /// `size → number of blocks M_size`.
    pub blocks: BTreeMap<usize, usize>,
    pub total: usize,
    /// Circle models: the matrix size `k` in `C(T) ⊗ M_k`.
    pub circle_matrix_size: Option<u64>,
}

impl RnAlgebraDescription {
    pub fn render(&self) -> String {
        match (self.base, self.circle_matrix_size) {
            (BaseSpace::Circle, Some(k)) => format!("C(T)⊗M_{k}"),
            _ => {
                let parts: Vec<String> = self
                    .blocks
                    .iter()
                    .map(|(s, c)| {
                        if *c == 1 {
                            format!("M_{s}")
                        } else {
                            format!("{c}×M_{s}")
                        }
                    })
                    .collect();
                let tail = if self.base == BaseSpace::NonDiscrete {
                    " (non-discrete classes)"
                } else {
                    ""
                };
                format!("{}{tail}", parts.join(" ⊕ "))
            }
        }
    }
}

pub fn rn_algebra_description(
    model: &ModelHandle,
    n: Shape,
    depth: Shape,
) -> Result<RnAlgebraDescription> {
    let classes = rn_classes(model, n, depth)?;
    let mut blocks = BTreeMap::new();
    for s in classes.sizes() {
        *blocks.entry(s).or_insert(0) += 1;
    }
    let (base, circle_matrix_size) = if let Some(c) = model.circle() {
        (BaseSpace::Circle, Some(c.arcs(n)?))
    } else {
        let deeper = rn_classes(model, n, depth.add(Shape(1, 1)));
        let grows = match deeper {
            Ok(d) => d.sizes().iter().max() != classes.sizes().iter().max(),
            Err(Error::ShapeOverflow { .. }) => false,
            Err(e) => return Err(e),
        };
        let base = if grows {
            BaseSpace::NonDiscrete
        } else {
            BaseSpace::Finite
        };
        (base, None)
    };
    Ok(RnAlgebraDescription {
        n,
        depth,
        base,
        blocks,
        total: classes.class_of.len(),
        circle_matrix_size,
    })
}

/// 0/1 matrix with rows the `R_m`-classes and columns the `Rₙ`-classes: entry 1 when the
/// `Rₙ`-class lies in the `R_m`-class.
pub fn rn_inclusion_multiplicity(
    model: &ModelHandle,
    n: Shape,
    m: Shape,
    depth: Shape,
) -> Result<IntMatrix> {
    if !n.le(m) {
        return Err(Error::NonComparable { n, m });
    }
    let small = rn_classes(model, n, depth)?;
    let big = rn_classes(model, m, depth)?;
    let mut out = IntMatrix::zeros(big.classes.len(), small.classes.len());
    for (a, cl) in small.classes.iter().enumerate() {
        let b = big.class_of[cl.members[0]];
        if cl.members.iter().any(|&x| big.class_of[x] != b) {
            return Err(Error::InconsistentDiagram(format!(
                "an R({n}) class straddles R({m}) classes"
            )));
        }
        out[(b, a)] = 1;
    }
    Ok(out)
}

/// A kernel on `Rₙ` at a fixed depth, keyed by basis indices.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelFunction {
    pub n: Shape,
    pub depth: Shape,
    pub values: BTreeMap<(usize, usize), Scalar>,
}

impl KernelFunction {
    pub fn zero(n: Shape, depth: Shape) -> Self {
        KernelFunction {
            n,
            depth,
            values: BTreeMap::new(),
        }
    }

    pub fn get(&self, x: usize, y: usize) -> Scalar {
        self.values.get(&(x, y)).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Drops explicit zeros so that equal kernels compare equal.
    pub fn normalized(mut self) -> Self {
        self.values.retain(|_, v| !v.is_zero());
        self
    }

    pub fn check_support(&self, classes: &RnClasses) -> Result<()> {
        for &(x, y) in self.values.keys() {
            if classes.class_of.get(x).is_none()
                || classes.class_of.get(y).is_none()
                || classes.class_of[x] != classes.class_of[y]
            {
                return Err(Error::SupportViolation(format!("({x},{y}) is not in R({})", self.n)));
            }
        }
        Ok(())
    }
}

/// Per-class dense blocks `B[x][y] = k(x,y)·wₙ(y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMatrix {
    pub n: Shape,
    pub depth: Shape,
    pub classes: Vec<Vec<usize>>,
    pub blocks: Vec<Vec<Vec<Scalar>>>,
}

impl BlockMatrix {
    pub fn mul(&self, other: &BlockMatrix) -> Result<BlockMatrix> {
        if self.classes != other.classes {
            return Err(Error::ShapeMismatch("block structures differ".into()));
        }
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| {
                let k = a.len();
                (0..k)
                    .map(|i| {
                        (0..k)
                            .map(|j| {
                                (0..k).fold(Scalar::zero(), |acc, l| acc + &a[i][l] * &b[l][j])
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Ok(BlockMatrix {
            n: self.n,
            depth: self.depth,
            classes: self.classes.clone(),
            blocks,
        })
    }
}

/// Class structure and `wₙ` weights shared by kernel computations at one `(n, depth)`.
#[derive(Debug, Clone)]
pub struct KernelContext {
    pub classes: RnClasses,
    pub weight: Vec<Scalar>,
}

impl KernelContext {
    pub fn new(
        model: &ModelHandle,
        measure: &FiberMeasureSystem,
        n: Shape,
        depth: Shape,
    ) -> Result<Self> {
        let classes = rn_classes(model, n, depth)?;
        let table = n_step_table(model, measure, n, depth)?;
        Ok(KernelContext {
            classes,
            weight: table.weight.into_iter().map(real).collect(),
        })
    }
}

pub fn kernel_to_block_matrix(ctx: &KernelContext, k: &KernelFunction) -> Result<BlockMatrix> {
    k.check_support(&ctx.classes)?;
    let classes: Vec<Vec<usize>> = ctx.classes.classes.iter().map(|c| c.members.clone()).collect();
    let blocks = classes
        .iter()
        .map(|members| {
            members
                .iter()
                .map(|&x| {
                    members
                        .iter()
                        .map(|&y| k.get(x, y) * &ctx.weight[y])
                        .collect()
                })
                .collect()
        })
        .collect();
    Ok(BlockMatrix {
        n: k.n,
        depth: k.depth,
        classes,
        blocks,
    })
}

pub fn block_matrix_to_kernel(ctx: &KernelContext, b: &BlockMatrix) -> Result<KernelFunction> {
    let mut out = KernelFunction::zero(b.n, b.depth);
    for (members, block) in b.classes.iter().zip(&b.blocks) {
        for (i, &x) in members.iter().enumerate() {
            for (j, &y) in members.iter().enumerate() {
                let w = &ctx.weight[y];
                if w.is_zero() {
                    return Err(Error::SupportViolation(format!("zero weight at {y}")));
                }
                let v = &block[i][j] / w;
                if !v.is_zero() {
                    out.values.insert((x, y), v);
                }
            }
        }
    }
    Ok(out)
}
