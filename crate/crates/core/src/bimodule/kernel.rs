//! `Θ`-kernels on `Rₙ`, their convolution, and the left action `φ(f)` measured against
//! `Θ`-sums.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{Direction, Shape};
use crate::groupoid::{block_matrix_to_kernel, kernel_to_block_matrix, KernelContext, KernelFunction};
use crate::scalar::{real, rat, Scalar};
use crate::shift::{n_step_table, FiberMeasureSystem};
use crate::symbolic::model::ModelHandle;

use super::function::{CellFunction, CylinderFunction, LaurentPoly};
use super::operator::{alpha_n, inner_product_n};

fn cells<'a>(f: &'a CylinderFunction, what: &str) -> Result<&'a CellFunction> {
    f.cells()
        .ok_or_else(|| Error::Unsupported(format!("{what} must be a cylinder function")))
}

/// `k(x,y) = ξ(x)·conj(η(y))` on `Rₙ` at the context depth.
pub fn theta_kernel(
    model: &ModelHandle,
    ctx: &KernelContext,
    xi: &CylinderFunction,
    eta: &CylinderFunction,
) -> Result<KernelFunction> {
    let depth = ctx.classes.depth;
    let xi = cells(xi, "ξ")?.refine(model, depth)?;
    let eta = cells(eta, "η")?.refine(model, depth)?;
    let mut k = KernelFunction::zero(ctx.classes.n, depth);
    for class in &ctx.classes.classes {
        for &x in &class.members {
            for &y in &class.members {
                let v = xi.value(x) * eta.value(y).conj();
                if !v.is_zero() {
                    k.values.insert((x, y), v);
                }
            }
        }
    }
    Ok(k)
}

/// `(Kζ)(x) = Σ_{y ~ x} wₙ(y)·k(x,y)·ζ(y)`.
pub fn apply_kernel(
    model: &ModelHandle,
    ctx: &KernelContext,
    k: &KernelFunction,
    zeta: &CylinderFunction,
) -> Result<CylinderFunction> {
    let zeta = cells(zeta, "ζ")?.refine(model, ctx.classes.depth)?;
    let mut out = vec![Scalar::zero(); ctx.weight.len()];
    for (&(x, y), v) in &k.values {
        out[x] += v * &ctx.weight[y] * zeta.value(y);
    }
    Ok(CellFunction::raw(ctx.classes.depth, out).into())
}

/// `(k₁∗k₂)(x,y) = Σ_z wₙ(z)·k₁(x,z)·k₂(z,y)`.
pub fn kernel_convolve(
    ctx: &KernelContext,
    k1: &KernelFunction,
    k2: &KernelFunction,
) -> Result<KernelFunction> {
    if k1.n != k2.n || k1.depth != k2.depth {
        return Err(Error::ShapeMismatch(format!(
            "kernels at n={} depth {} and n={} depth {}",
            k1.n, k1.depth, k2.n, k2.depth
        )));
    }
    k1.check_support(&ctx.classes)?;
    k2.check_support(&ctx.classes)?;
    let mut by_row: BTreeMap<usize, Vec<(usize, &Scalar)>> = BTreeMap::new();
    for (&(z, y), v) in &k2.values {
        by_row.entry(z).or_default().push((y, v));
    }
    let mut out = KernelFunction::zero(k1.n, k1.depth);
    for (&(x, z), a) in &k1.values {
        if let Some(row) = by_row.get(&z) {
            let az = a * &ctx.weight[z];
            for &(y, b) in row {
                *out.values.entry((x, y)).or_insert_with(Scalar::zero) += &az * b;
            }
        }
    }
    Ok(out.normalized())
}

/// `ξ·αₙ(⟨η, ξ′⟩ₙ)`, the left leg of `Θ_{ξ,η}Θ_{ξ′,η′}`.
pub fn theta_rule_leg(
    model: &ModelHandle,
    measure: &FiberMeasureSystem,
    n: Shape,
    xi: &CylinderFunction,
    eta: &CylinderFunction,
    xi2: &CylinderFunction,
) -> Result<CylinderFunction> {
    let ip = inner_product_n(model, measure, n, eta, xi2)?;
    xi.mul(model, &alpha_n(model, n, &ip)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConvolutionReport {
    pub n: Shape,
    /// Cylinder depth, or the Laurent exponent bound for circle kernels.
    pub depth: Option<Shape>,
    pub laurent_span: Option<i64>,
    pub kernels: usize,
    pub pairs_checked: usize,
    pub formula_vs_second_path: bool,
    pub formula_vs_theta_rule: bool,
    /// Kernels agree with the definition `Θ_{ξ,η}ζ = ξ·⟨η,ζ⟩` on the basis.
    pub kernels_act_as_theta: bool,
    /// Name of the second path: block products or operator composition.
    pub second_path: &'static str,
    pub first_failure: Option<(usize, usize)>,
}

impl ConvolutionReport {
    pub fn agree(&self) -> bool {
        self.formula_vs_second_path && self.formula_vs_theta_rule && self.kernels_act_as_theta
    }
}

/// Largest kernel basis for which `convolution_check` runs; it visits every ordered pair.
pub const KERNEL_LIMIT: usize = 1024;

/// Three-way convolution check over all pairs of `Θ_{eₓ,e_y}` for `(x,y) ∈ Rₙ`.
pub fn convolution_check(
    model: &ModelHandle,
    measure: &FiberMeasureSystem,
    n: Shape,
    depth: Shape,
) -> Result<ConvolutionReport> {
    let ctx = KernelContext::new(model, measure, n, depth)?;
    let count: usize = ctx.classes.classes.iter().map(|c| c.members.len().pow(2)).sum();
    if count > KERNEL_LIMIT {
        return Err(Error::Precondition(format!(
            "{count} basis kernels; the pairwise check stops at {KERNEL_LIMIT}"
        )));
    }
    let e = |i: usize| -> Result<CylinderFunction> { Ok(CellFunction::basis_vector(model, depth, i)?.into()) };
    let mut legs = Vec::new();
    for class in &ctx.classes.classes {
        for &x in &class.members {
            for &y in &class.members {
                legs.push((e(x)?, e(y)?));
            }
        }
    }
    let kernels: Vec<KernelFunction> = legs
        .iter()
        .map(|(a, b)| theta_kernel(model, &ctx, a, b))
        .collect::<Result<_>>()?;
    let blocks = kernels
        .iter()
        .map(|k| kernel_to_block_matrix(&ctx, k))
        .collect::<Result<Vec<_>>>()?;

    let mut acts = true;
    for ((xi, eta), k) in legs.iter().zip(&kernels) {
        for z in 0..ctx.weight.len() {
            let zeta = e(z)?;
            let via_kernel = apply_kernel(model, &ctx, k, &zeta)?;
            let direct = xi.mul(model, &alpha_n(model, n, &inner_product_n(model, measure, n, eta, &zeta)?)?)?;
            if !via_kernel.same_function(model, &direct)? {
                acts = false;
            }
        }
    }

    let mut vs_block = true;
    let mut vs_rule = true;
    let mut first_failure = None;
    let mut pairs = 0;
    for i in 0..kernels.len() {
        for j in 0..kernels.len() {
            pairs += 1;
            let formula = kernel_convolve(&ctx, &kernels[i], &kernels[j])?;
            let block = block_matrix_to_kernel(&ctx, &blocks[i].mul(&blocks[j])?)?.normalized();
            let (xi, eta) = &legs[i];
            let (xi2, eta2) = &legs[j];
            let leg = theta_rule_leg(model, measure, n, xi, eta, xi2)?;
            let rule = theta_kernel(model, &ctx, &leg, eta2)?.normalized();
            let (b_ok, r_ok) = (formula == block, formula == rule);
            vs_block &= b_ok;
            vs_rule &= r_ok;
            if !(b_ok && r_ok) {
                first_failure.get_or_insert((i, j));
            }
        }
    }
    Ok(ConvolutionReport {
        n,
        depth: Some(depth),
        laurent_span: None,
        kernels: kernels.len(),
        pairs_checked: pairs,
        formula_vs_second_path: vs_block,
        formula_vs_theta_rule: vs_rule,
        kernels_act_as_theta: acts,
        second_path: "block-matrix product",
        first_failure,
    })
}

/// A kernel on `R_{e_dir}` of the circle: `k(x, x + j/p) = parts[j](x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentKernel {
    pub direction: Direction,
    pub p: i64,
    pub parts: Vec<LaurentPoly>,
}

fn circle_degree(model: &ModelHandle, measure: &FiberMeasureSystem, dir: Direction) -> Result<i64> {
    let c = model
        .circle()
        .ok_or_else(|| Error::Unsupported("Laurent kernels need a circle model".into()))?;
    if !measure.is_counting() {
        return Err(Error::Unsupported("Laurent kernels use counting measures".into()));
    }
    Ok(c.degree(dir))
}

fn laurent(f: &CylinderFunction) -> Result<&LaurentPoly> {
    f.laurent()
        .ok_or_else(|| Error::Unsupported("expected a Laurent polynomial".into()))
}

pub fn theta_kernel_laurent(
    model: &ModelHandle,
    measure: &FiberMeasureSystem,
    dir: Direction,
    xi: &CylinderFunction,
    eta: &CylinderFunction,
) -> Result<LaurentKernel> {
    let p = circle_degree(model, measure, dir)?;
    let (xi, eta) = (laurent(xi)?, laurent(eta)?.conj());
    let parts = (0..p.abs())
        .map(|j| Ok(xi.mul(&eta.rotate(p, j)?)))
        .collect::<Result<_>>()?;
    Ok(LaurentKernel {
        direction: dir,
        p,
        parts,
    })
}

/// `(Kζ)(x) = (1/|p|) Σ_j k_j(x)·ζ(x + j/p)`.
pub fn apply_laurent_kernel(k: &LaurentKernel, zeta: &LaurentPoly) -> Result<LaurentPoly> {
    let w = real(rat(1, k.p.abs()));
    let mut acc = LaurentPoly::zero();
    for (j, part) in k.parts.iter().enumerate() {
        acc = acc.add(&part.mul(&zeta.rotate(k.p, j as i64)?).scale(&w));
    }
    Ok(acc)
}

/// `(k∗k′)_j = (1/|p|) Σ_i k_i · (k′_{j−i} rotated by i)`.
pub fn kernel_convolve_laurent(a: &LaurentKernel, b: &LaurentKernel) -> Result<LaurentKernel> {
    if a.p != b.p || a.direction != b.direction {
        return Err(Error::ShapeMismatch("Laurent kernels over different relations".into()));
    }
    let q = a.p.abs();
    let w = real(rat(1, q));
    let mut parts = vec![LaurentPoly::zero(); q as usize];
    for (j, out) in parts.iter_mut().enumerate() {
        for i in 0..q {
            let r = (j as i64 - i).rem_euclid(q) as usize;
            let term = a.parts[i as usize].mul(&b.parts[r].rotate(a.p, i)?).scale(&w);
            *out = out.add(&term);
        }
    }
    Ok(LaurentKernel {
        direction: a.direction,
        p: a.p,
        parts,
    })
}

/// Three-way check for circle kernels `Θ_{z^a, z^b}` with `|a| ≤ span`, `0 ≤ b < |p|`; the
/// second path composes the operators on monomials `z^k`, `|k| ≤ span`.
pub fn convolution_check_laurent(
    model: &ModelHandle,
    measure: &FiberMeasureSystem,
    dir: Direction,
    span: i64,
) -> Result<ConvolutionReport> {
    let p = circle_degree(model, measure, dir)?;
    let n = dir.unit();
    let mut legs = Vec::new();
    for a in -span..=span {
        for b in 0..p.abs() {
            legs.push((
                CylinderFunction::from(LaurentPoly::monomial(a)),
                CylinderFunction::from(LaurentPoly::monomial(b)),
            ));
        }
    }
    let kernels: Vec<LaurentKernel> = legs
        .iter()
        .map(|(a, b)| theta_kernel_laurent(model, measure, dir, a, b))
        .collect::<Result<_>>()?;
    let probes: Vec<LaurentPoly> = (-span..=span).map(LaurentPoly::monomial).collect();

    let mut acts = true;
    for ((xi, eta), k) in legs.iter().zip(&kernels) {
        for z in &probes {
            let via_kernel = apply_laurent_kernel(k, z)?;
            let direct = xi.mul(
                model,
                &alpha_n(model, n, &inner_product_n(model, measure, n, eta, &z.clone().into())?)?,
            )?;
            if !CylinderFunction::from(via_kernel).same_function(model, &direct)? {
                acts = false;
            }
        }
    }

    let mut vs_ops = true;
    let mut vs_rule = true;
    let mut first_failure = None;
    let mut pairs = 0;
    for i in 0..kernels.len() {
        for j in 0..kernels.len() {
            pairs += 1;
            let formula = kernel_convolve_laurent(&kernels[i], &kernels[j])?;
            let mut o_ok = true;
            for z in &probes {
                let composed = apply_laurent_kernel(&kernels[i], &apply_laurent_kernel(&kernels[j], z)?)?;
                o_ok &= composed == apply_laurent_kernel(&formula, z)?;
            }
            let (xi, eta) = &legs[i];
            let (xi2, eta2) = &legs[j];
            let leg = theta_rule_leg(model, measure, n, xi, eta, xi2)?;
            let rule = theta_kernel_laurent(model, measure, dir, &leg, eta2)?;
            let r_ok = rule == formula;
            vs_ops &= o_ok;
            vs_rule &= r_ok;
            if !(o_ok && r_ok) {
                first_failure.get_or_insert((i, j));
            }
        }
    }
    Ok(ConvolutionReport {
        n,
        depth: None,
        laurent_span: Some(span),
        kernels: kernels.len(),
        pairs_checked: pairs,
        formula_vs_second_path: vs_ops,
        formula_vs_theta_rule: vs_rule,
        kernels_act_as_theta: acts,
        second_path: "operator composition",
        first_failure,
    })
}

/// Exact rank by Gaussian elimination.
pub fn rank(mut m: Vec<Vec<Scalar>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, piv);
        let inv = Scalar::one() / &m[r][c];
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = &m[i][c] * &inv;
                for k in c..cols {
                    let d = &f * &m[r][k];
                    m[i][k] -= d;
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompactnessRow {
    pub depth: Shape,
    pub basis_size: usize,
    pub classes: usize,
    pub largest_class: usize,
    /// Fewest `Θ`-kernels summing to `φ(f)`: the largest rank of a class block.
    pub min_theta_count: usize,
    /// An explicit sum of that many `Θ`-kernels was built and compared to `φ(f)`.
    pub certified: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompactnessReport {
    pub direction: u8,
    pub rows: Vec<CompactnessRow>,
    /// `min_theta_count` stays constant over the scanned depths.
    pub bounded: bool,
    pub strictly_increasing: bool,
}

/// Basis size up to which an explicit `Θ`-decomposition is built.
pub const CERTIFICATE_LIMIT: usize = 4096;

/// Matrix of `φ(f)ξ = f·ξ` on `E_{e_dir}` at `depth`: per `σ_dir`-class, the diagonal block of
/// `f`, together with the class partition.
pub fn left_action_blocks(
    model: &ModelHandle,
    measure: &FiberMeasureSystem,
    dir: Direction,
    f: &CellFunction,
    depth: Shape,
) -> Result<(Vec<Vec<usize>>, Vec<Vec<Vec<Scalar>>>)> {
    let f = f.refine(model, depth)?;
    let t = n_step_table(model, measure, dir.unit(), depth)?;
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (y, &img) in t.image.iter().enumerate() {
        groups.entry(img).or_default().push(y);
    }
    let classes: Vec<Vec<usize>> = groups.into_values().collect();
    let blocks = classes
        .iter()
        .map(|members| {
            members
                .iter()
                .map(|&x| {
                    members
                        .iter()
                        .map(|&y| if x == y { f.value(x).clone() } else { Scalar::zero() })
                        .collect()
                })
                .collect()
        })
        .collect();
    Ok((classes, blocks))
}

/// Minimal number of `Θ`-kernels reproducing `φ(f)` at depths `(d,d)` for each `d`.
pub fn compactness_growth_diagnostic(
    model: &ModelHandle,
    measure: &FiberMeasureSystem,
    dir: Direction,
    f: Option<&CellFunction>,
    depths: &[usize],
) -> Result<CompactnessReport> {
    let mut rows = Vec::new();
    for &d in depths {
        let depth = Shape(d, d);
        let func = match f {
            Some(f) => f.refine(model, depth)?,
            None => CellFunction::constant(model, depth, Scalar::one())?,
        };
        let (classes, blocks) = left_action_blocks(model, measure, dir, &func, depth)?;
        let min_theta_count = blocks.iter().map(|b| rank(b.clone())).max().unwrap_or(0);
        let basis_size = func.values().len();
        let certified = (basis_size <= CERTIFICATE_LIMIT)
            .then(|| certify(model, measure, dir, &func, &classes, min_theta_count))
            .transpose()?;
        rows.push(CompactnessRow {
            depth,
            basis_size,
            classes: classes.len(),
            largest_class: classes.iter().map(Vec::len).max().unwrap_or(0),
            min_theta_count,
            certified,
        });
    }
    let counts: Vec<usize> = rows.iter().map(|r| r.min_theta_count).collect();
    Ok(CompactnessReport {
        direction: dir.index(),
        bounded: counts.windows(2).all(|w| w[0] == w[1]),
        strictly_increasing: counts.windows(2).all(|w| w[0] < w[1]),
        rows,
    })
}

/// Builds `Σ_{i<count} Θ_{ξᵢ,ηᵢ}` with `ξᵢ = Σ_C f·1_{cᵢ}`, `ηᵢ = Σ_C 1_{cᵢ}/w(cᵢ)` over the
/// `i`-th support point `cᵢ` of each class, and compares it with the kernel of `φ(f)`.
fn certify(
    model: &ModelHandle,
    measure: &FiberMeasureSystem,
    dir: Direction,
    f: &CellFunction,
    classes: &[Vec<usize>],
    count: usize,
) -> Result<bool> {
    let depth = f.depth();
    let t = n_step_table(model, measure, dir.unit(), depth)?;
    let weight: Vec<Scalar> = t.weight.iter().cloned().map(real).collect();
    let size = weight.len();
    let mut target = BTreeMap::new();
    for x in 0..size {
        if !f.value(x).is_zero() {
            target.insert((x, x), f.value(x) / &weight[x]);
        }
    }
    let mut sum: BTreeMap<(usize, usize), Scalar> = BTreeMap::new();
    for i in 0..count {
        let mut xi = vec![Scalar::zero(); size];
        let mut eta = vec![Scalar::zero(); size];
        for members in classes {
            let support: Vec<usize> = members.iter().copied().filter(|&x| !f.value(x).is_zero()).collect();
            if let Some(&c) = support.get(i) {
                xi[c] = f.value(c).clone();
                eta[c] = Scalar::one() / &weight[c];
            }
        }
        for members in classes {
            for &x in members {
                for &y in members {
                    let v = &xi[x] * eta[y].conj();
                    if !v.is_zero() {
                        *sum.entry((x, y)).or_insert_with(Scalar::zero) += v;
                    }
                }
            }
        }
    }
    sum.retain(|_, v| !v.is_zero());
    Ok(sum == target)
}
