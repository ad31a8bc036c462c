//! The product system `E_(m,n)`: tensor products over `A`, the isomorphism
//! `Φ(ξ₁⊗ξ₂) = ξ₁·α₁(ξ₂)` and the flip `E₁⊗E₂ → E₂⊗E₁`.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{Direction, Shape};
use crate::scalar::Scalar;
use crate::shift::FiberMeasureSystem;
use crate::symbolic::model::ModelHandle;

use super::function::CylinderFunction;
use super::operator::{
    alpha, basis_functions, check_commuting_expectations, inner_product_n,
    transfer, unit_function, Resolution,
};

/// `E_(m,n)`, realized as functions with inner product `L₂ⁿL₁ᵐ(ξ*η)`. Shape `(0,0)` is `A`.
#[derive(Debug, Clone)]
pub struct BimoduleHandle {
    pub model: ModelHandle,
    pub shape: Shape,
    pub measure: FiberMeasureSystem,
}

impl BimoduleHandle {
    pub fn new(model: ModelHandle, shape: Shape, measure: FiberMeasureSystem) -> Self {
        BimoduleHandle {
            model,
            shape,
            measure,
        }
    }

    pub fn is_coefficient_algebra(&self) -> bool {
        self.shape == Shape::ZERO
    }

    pub fn inner(&self, xi: &CylinderFunction, eta: &CylinderFunction) -> Result<CylinderFunction> {
        inner_product_n(&self.model, &self.measure, self.shape, xi, eta)
    }
}

/// A finite sum of simple tensors `Σ aₖ⊗bₖ` in `E_first ⊗_A E_second`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    pub first: Direction,
    pub terms: Vec<(CylinderFunction, CylinderFunction)>,
}

impl Tensor {
    pub fn simple(first: Direction, a: CylinderFunction, b: CylinderFunction) -> Self {
        Tensor {
            first,
            terms: vec![(a, b)],
        }
    }

    pub fn minus(&self, model: &ModelHandle, other: &Tensor) -> Result<Tensor> {
        let mut terms = self.terms.clone();
        for (a, b) in &other.terms {
            let zero = a.sub(model, a)?;
            terms.push((zero.sub(model, a)?, b.clone()));
        }
        Ok(Tensor {
            first: self.first,
            terms,
        })
    }
}

/// `⟨a⊗b, c⊗d⟩ = ⟨b, ⟨a,c⟩·d⟩`, extended sesquilinearly.
pub fn tensor_inner(
    model: &ModelHandle,
    measure: &FiberMeasureSystem,
    x: &Tensor,
    y: &Tensor,
) -> Result<CylinderFunction> {
    let (d1, d2) = (x.first, x.first.other());
    let mut acc: Option<CylinderFunction> = None;
    for (a, b) in &x.terms {
        for (c, d) in &y.terms {
            // terms may sit at different depths; the product refines them to a common one
            let ac = transfer(model, measure, d1, &a.conj().mul(model, c)?)?;
            let inner = transfer(model, measure, d2, &b.conj().mul(model, &ac)?.mul(model, d)?)?;
            acc = Some(match acc {
                None => inner,
                Some(s) => s.add(model, &inner)?,
            });
        }
    }
    Ok(acc.expect("tensors have at least one term"))
}

/// `Φ(a⊗b) = a·α_first(b)` into `E_(1,1)`.
pub fn phi_iso(model: &ModelHandle, t: &Tensor) -> Result<CylinderFunction> {
    let mut acc: Option<CylinderFunction> = None;
    for (a, b) in &t.terms {
        let v = a.mul(model, &alpha(model, t.first, b)?)?;
        acc = Some(match acc {
            None => v,
            Some(s) => s.add(model, &v)?,
        });
    }
    Ok(acc.expect("tensors have at least one term"))
}

/// `Φ⁻¹(ξ) = ξ⊗1`.
pub fn phi_iso_inv(model: &ModelHandle, first: Direction, xi: &CylinderFunction) -> Result<Tensor> {
    let one = match xi {
        CylinderFunction::Cells(c) => unit_function(model, Resolution::Depth(c.depth()))?,
        CylinderFunction::Laurent(_) => unit_function(model, Resolution::LaurentSpan(0))?,
    };
    Ok(Tensor::simple(first, xi.clone(), one))
}

/// `⟨ζ, ζ′⟩` on `E_(1,1)`: `L₂L₁(ζ*ζ′)`.
pub fn inner_11(
    model: &ModelHandle,
    measure: &FiberMeasureSystem,
    z: &CylinderFunction,
    w: &CylinderFunction,
) -> Result<CylinderFunction> {
    inner_product_n(model, measure, Shape(1, 1), z, w)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    pub resolution: Resolution,
    pub simple_tensors: usize,
    pub pairs_checked: usize,
    /// Pairs where both sides vanish because `āc = 0` or `b̄d = 0`.
    pub pairs_vanishing: usize,
    pub inner_products_preserved: bool,
    /// `Φ(Φ⁻¹(ξ)) = ξ` on the basis of `E_(1,1)`.
    pub right_inverse: bool,
    /// `Φ⁻¹(Φ(a⊗b)) − a⊗b` has norm zero for every simple tensor.
    pub left_inverse: bool,
    pub unit_to_unit: bool,
    pub first_failure: Option<(usize, usize)>,
}

impl LemmaReport {
    pub fn holds(&self) -> bool {
        self.inner_products_preserved && self.right_inverse && self.left_inverse && self.unit_to_unit
    }
}

/// Largest basis for which the exhaustive tensor checks run; they visit `n⁴` pairs.
pub const TENSOR_BASIS_LIMIT: usize = 64;

/// Simple tensors `a⊗b` with `a, b` running over the basis of `res`.
pub fn spanning_tensors(model: &ModelHandle, first: Direction, res: Resolution) -> Result<Vec<Tensor>> {
    let basis = basis_functions(model, res)?;
    if basis.len() > TENSOR_BASIS_LIMIT {
        return Err(Error::Precondition(format!(
            "{} basis functions; tensor checks stop at {TENSOR_BASIS_LIMIT}",
            basis.len()
        )));
    }
    let mut out = Vec::with_capacity(basis.len() * basis.len());
    for a in &basis {
        for b in &basis {
            out.push(Tensor::simple(first, a.clone(), b.clone()));
        }
    }
    Ok(out)
}

/// `zero[a][c]` when `āc = 0` for basis functions `a, c`.
fn orthogonal_table(model: &ModelHandle, res: Resolution) -> Result<Vec<Vec<bool>>> {
    let basis = basis_functions(model, res)?;
    basis
        .iter()
        .map(|a| basis.iter().map(|c| Ok(a.conj().mul(model, c)?.is_zero())).collect())
        .collect()
}

/// For spanning tensors `i = a⊗b`, `j = c⊗d`: both inner products in the checks below are
/// `L` applied to a multiple of `(āc)·α(b̄d)`, so they vanish together when `āc` or `b̄d` does.
fn vanishing_pair(zero: &[Vec<bool>], i: usize, j: usize) -> bool {
    let n = zero.len();
    zero[i / n][j / n] || zero[i % n][j % n]
}

/// `⟨Φx, Φy⟩_{E_(1,1)} = ⟨x, y⟩_{E₁⊗E₂}` on all pairs of spanning tensors, and both inverse laws.
pub fn lemma_check(
    model: &ModelHandle,
    measure: &FiberMeasureSystem,
    res: Resolution,
) -> Result<LemmaReport> {
    let first = Direction::Horizontal;
    let tensors = spanning_tensors(model, first, res)?;
    let images: Vec<CylinderFunction> = tensors.iter().map(|t| phi_iso(model, t)).collect::<Result<_>>()?;
    let zero = orthogonal_table(model, res)?;
    let mut preserved = true;
    let mut first_failure = None;
    let (mut pairs, mut pairs_vanishing) = (0, 0);
    for (i, x) in tensors.iter().enumerate() {
        for (j, y) in tensors.iter().enumerate() {
            pairs += 1;
            if vanishing_pair(&zero, i, j) {
                pairs_vanishing += 1;
                continue;
            }
            let lhs = inner_11(model, measure, &images[i], &images[j])?;
            let rhs = tensor_inner(model, measure, x, y)?;
            if !lhs.same_function(model, &rhs)? {
                preserved = false;
                first_failure.get_or_insert((i, j));
            }
        }
    }
    let mut left_inverse = true;
    for (x, img) in tensors.iter().zip(&images) {
        let diff = phi_iso_inv(model, first, img)?.minus(model, x)?;
        if !tensor_inner(model, measure, &diff, &diff)?.is_zero() {
            left_inverse = false;
        }
    }
    let mut right_inverse = true;
    for xi in basis_functions(model, res)? {
        let back = phi_iso(model, &phi_iso_inv(model, first, &xi)?)?;
        if !back.same_function(model, &xi)? {
            right_inverse = false;
        }
    }
    let one = unit_function(model, res)?;
    let unit_to_unit = phi_iso(model, &Tensor::simple(first, one.clone(), one.clone()))?
        .same_function(model, &one)?;
    Ok(LemmaReport {
        resolution: res,
        simple_tensors: tensors.len(),
        pairs_checked: pairs,
        pairs_vanishing,
        inner_products_preserved: preserved,
        right_inverse,
        left_inverse,
        unit_to_unit,
        first_failure,
    })
}

/// `Φ₂₁⁻¹ ∘ Φ₁₂`.
pub fn flip(model: &ModelHandle, t: &Tensor) -> Result<Tensor> {
    let z = phi_iso(model, t)?;
    phi_iso_inv(model, t.first.other(), &z)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlipReport {
    pub resolution: Resolution,
    pub expectations_commute: bool,
    pub pairs_checked: usize,
    /// Pairs where both sides vanish because `āc = 0` or `b̄d = 0`.
    pub pairs_vanishing: usize,
    pub preserved: bool,
    pub unit_to_unit: bool,
    pub first_failure: Option<(usize, usize)>,
}

impl FlipReport {
    pub fn holds(&self) -> bool {
        self.expectations_commute && self.preserved && self.unit_to_unit
    }
}

pub fn flip_unitary_check(
    model: &ModelHandle,
    measure: &FiberMeasureSystem,
    res: Resolution,
) -> Result<FlipReport> {
    let commute_res = match res {
        Resolution::Depth(d) => Resolution::Depth(d.max(Shape(2, 2))),
        r => r,
    };
    let commute = check_commuting_expectations(model, measure, commute_res)?;
    let tensors = spanning_tensors(model, Direction::Horizontal, res)?;
    let flipped: Vec<Tensor> = tensors.iter().map(|t| flip(model, t)).collect::<Result<_>>()?;
    let zero = orthogonal_table(model, res)?;
    let mut preserved = true;
    let mut first_failure = None;
    let (mut pairs, mut pairs_vanishing) = (0, 0);
    for (i, x) in tensors.iter().enumerate() {
        for (j, y) in tensors.iter().enumerate() {
            pairs += 1;
            if vanishing_pair(&zero, i, j) {
                pairs_vanishing += 1;
                continue;
            }
            let before = tensor_inner(model, measure, x, y)?;
            let after = tensor_inner(model, measure, &flipped[i], &flipped[j])?;
            if !before.same_function(model, &after)? {
                preserved = false;
                first_failure.get_or_insert((i, j));
            }
        }
    }
    let one = unit_function(model, res)?;
    let unit = flip(model, &Tensor::simple(Direction::Horizontal, one.clone(), one.clone()))?;
    let diff = unit.minus(model, &Tensor::simple(Direction::Vertical, one.clone(), one))?;
    Ok(FlipReport {
        resolution: res,
        expectations_commute: commute.commute && commute.transfers_commute,
        pairs_checked: pairs,
        pairs_vanishing,
        preserved,
        unit_to_unit: tensor_inner(model, measure, &diff, &diff)?.is_zero(),
        first_failure,
    })
}

/// Over `A = C` with `E_i = C^{nᵢ}`, the flip `eᵢ⊗fⱼ ↦ fⱼ⊗eᵢ` has orthonormal columns.
pub fn scalar_flip_unitary(n1: usize, n2: usize) -> bool {
    let n = n1 * n2;
    // column (i,j) of E₁⊗E₂ lands on row (j,i) of E₂⊗E₁
    let mut f = vec![vec![Scalar::zero(); n]; n];
    for i in 0..n1 {
        for j in 0..n2 {
            f[j * n1 + i][i * n2 + j] = Scalar::one();
        }
    }
    (0..n).all(|c| {
        (0..n).all(|d| {
            let g = (0..n).fold(Scalar::zero(), |acc, r| acc + f[r][c].conj() * &f[r][d]);
            g == if c == d { Scalar::one() } else { Scalar::zero() }
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bimodule::function::{CellFunction, LaurentPoly};
    use crate::symbolic::model::{build_model, Cell, ModelSpec};
    use crate::symbolic::sft::SftSpec;

    #[test]
    fn lemma_and_flip_on_ledrappier() {
        let m = build_model(ModelSpec::Sft(SftSpec::ledrappier())).unwrap();
        let mu = FiberMeasureSystem::counting();
        let res = Resolution::Depth(Shape(2, 2));
        assert!(lemma_check(&m, &mu, res).unwrap().holds());
        assert!(flip_unitary_check(&m, &mu, res).unwrap().holds());

        let chi = |v: u16| -> CylinderFunction {
            CellFunction::from_fn(&m, Shape(1, 1), |c| match c {
                Cell::Pattern(p) if p.get(0, 0) == v => Scalar::one(),
                _ => Scalar::zero(),
            })
            .unwrap()
            .into()
        };
        let t = Tensor::simple(Direction::Horizontal, chi(0), chi(1));
        let lhs = inner_11(&m, &mu, &phi_iso(&m, &t).unwrap(), &phi_iso(&m, &t).unwrap()).unwrap();
        let rhs = tensor_inner(&m, &mu, &t, &t).unwrap();
        assert!(lhs.same_function(&m, &rhs).unwrap());
    }

    #[test]
    fn skipped_pairs_really_vanish() {
        let m = build_model(ModelSpec::Sft(SftSpec::ledrappier())).unwrap();
        let mu = FiberMeasureSystem::counting();
        let res = Resolution::Depth(Shape(2, 2));
        let zero = orthogonal_table(&m, res).unwrap();
        let tensors = spanning_tensors(&m, Direction::Horizontal, res).unwrap();
        let mut seen = 0;
        for i in (0..tensors.len()).step_by(5) {
            for j in (0..tensors.len()).step_by(3) {
                if !vanishing_pair(&zero, i, j) {
                    continue;
                }
                seen += 1;
                let (x, y) = (&tensors[i], &tensors[j]);
                assert!(tensor_inner(&m, &mu, x, y).unwrap().is_zero());
                let (px, py) = (phi_iso(&m, x).unwrap(), phi_iso(&m, y).unwrap());
                assert!(inner_11(&m, &mu, &px, &py).unwrap().is_zero());
                let (fx, fy) = (flip(&m, x).unwrap(), flip(&m, y).unwrap());
                assert!(tensor_inner(&m, &mu, &fx, &fy).unwrap().is_zero());
            }
        }
        assert!(seen > 100);
    }

    #[test]
    fn lemma_on_circle_laurent() {
        let c = build_model(ModelSpec::Circle { p1: 2, p2: 3 }).unwrap();
        let mu = FiberMeasureSystem::counting();
        let r = lemma_check(&c, &mu, Resolution::LaurentSpan(2)).unwrap();
        assert!(r.holds(), "{r:?}");
        assert!(flip_unitary_check(&c, &mu, Resolution::LaurentSpan(2)).unwrap().holds());
        let one: CylinderFunction = LaurentPoly::constant(Scalar::one()).into();
        let t = Tensor::simple(Direction::Horizontal, one.clone(), one.clone());
        assert!(phi_iso(&c, &t).unwrap().same_function(&c, &one).unwrap());
    }

    #[test]
    fn scalar_flip() {
        assert!(scalar_flip_unitary(2, 3));
        assert!(scalar_flip_unitary(1, 1));
    }

    #[test]
    fn coefficient_algebra_handle() {
        let m = build_model(ModelSpec::Sft(SftSpec::ledrappier())).unwrap();
        let h = BimoduleHandle::new(m.clone(), Shape::ZERO, FiberMeasureSystem::counting());
        assert!(h.is_coefficient_algebra());
        let f: CylinderFunction = CellFunction::basis_vector(&m, Shape(1, 1), 0).unwrap().into();
        assert!(h.inner(&f, &f).unwrap().same_function(&m, &f).unwrap());
    }
}
