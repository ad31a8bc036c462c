//! Functions on cylinder bases and Laurent polynomials on the circle.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::geom::Shape;
use crate::scalar::{fmt_scalar, is_real_nonnegative, root_of_unity, Scalar};
use crate::symbolic::model::{Cell, ModelHandle};

/// A function constant on the cylinders of one depth, stored in basis order.
#[derive(Debug, Clone, PartialEq)]
pub struct CellFunction {
    depth: Shape,
    values: Vec<Scalar>,
}

impl CellFunction {
    pub fn new(model: &ModelHandle, depth: Shape, values: Vec<Scalar>) -> Result<Self> {
        let n = model.basis(depth)?.len();
        if values.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "{} values for {n} cylinders of depth {depth}",
                values.len()
            )));
        }
        Ok(CellFunction { depth, values })
    }

    pub(crate) fn raw(depth: Shape, values: Vec<Scalar>) -> Self {
        CellFunction { depth, values }
    }

    pub fn from_fn(
        model: &ModelHandle,
        depth: Shape,
        f: impl Fn(&Cell) -> Scalar,
    ) -> Result<Self> {
        let basis = model.basis(depth)?;
        Ok(CellFunction {
            depth,
            values: basis.cells().iter().map(f).collect(),
        })
    }

    pub fn constant(model: &ModelHandle, depth: Shape, c: Scalar) -> Result<Self> {
        let n = model.basis(depth)?.len();
        Ok(CellFunction {
            depth,
            values: vec![c; n],
        })
    }

    /// Indicator of the `i`-th cylinder.
    pub fn basis_vector(model: &ModelHandle, depth: Shape, i: usize) -> Result<Self> {
        let n = model.basis(depth)?.len();
        if i >= n {
            return Err(Error::ShapeMismatch(format!("index {i} of {n}")));
        }
        let mut values = vec![Scalar::zero(); n];
        values[i] = Scalar::one();
        Ok(CellFunction { depth, values })
    }

    pub fn depth(&self) -> Shape {
        self.depth
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    pub fn value(&self, i: usize) -> &Scalar {
        &self.values[i]
    }

    /// The same function on the finer basis of depth `to`.
    pub fn refine(&self, model: &ModelHandle, to: Shape) -> Result<Self> {
        if to == self.depth {
            return Ok(self.clone());
        }
        if !self.depth.le(to) {
            return Err(Error::DepthMismatch(format!(
                "cannot refine depth {} to {to}",
                self.depth
            )));
        }
        let coarse = model.basis(self.depth)?;
        let fine = model.basis(to)?;
        let mut values = Vec::with_capacity(fine.len());
        for c in fine.cells() {
            let r = model.restrict_cell(c, self.depth)?;
            let i = coarse
                .index_of(&r)
                .ok_or_else(|| Error::NotAdmissible(model.render(&r)))?;
            values.push(self.values[i].clone());
        }
        Ok(CellFunction { depth: to, values })
    }

    fn align(&self, model: &ModelHandle, other: &Self) -> Result<(Self, Self)> {
        let d = self.depth.max(other.depth);
        Ok((self.refine(model, d)?, other.refine(model, d)?))
    }

    fn zip(&self, model: &ModelHandle, other: &Self, op: impl Fn(&Scalar, &Scalar) -> Scalar) -> Result<Self> {
        let (a, b) = self.align(model, other)?;
        Ok(CellFunction {
            depth: a.depth,
            values: a.values.iter().zip(&b.values).map(|(x, y)| op(x, y)).collect(),
        })
    }

    pub fn mul(&self, model: &ModelHandle, other: &Self) -> Result<Self> {
        self.zip(model, other, |x, y| x * y)
    }

    pub fn add(&self, model: &ModelHandle, other: &Self) -> Result<Self> {
        self.zip(model, other, |x, y| x + y)
    }

    pub fn sub(&self, model: &ModelHandle, other: &Self) -> Result<Self> {
        self.zip(model, other, |x, y| x - y)
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        CellFunction {
            depth: self.depth,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn conj(&self) -> Self {
        CellFunction {
            depth: self.depth,
            values: self.values.iter().map(Scalar::conj).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(is_real_nonnegative)
    }

    /// Equality as functions on `X`, comparing at the finer of the two depths.
    pub fn same_function(&self, model: &ModelHandle, other: &Self) -> Result<bool> {
        let (a, b) = self.align(model, other)?;
        Ok(a.values == b.values)
    }
}

/// A finite Laurent polynomial `Σ c_k z^k` on the circle, zero coefficients dropped.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i64, Scalar>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Scalar) -> Self {
        Self::term(0, c)
    }

    pub fn monomial(k: i64) -> Self {
        Self::term(k, Scalar::one())
    }

    pub fn term(k: i64, c: Scalar) -> Self {
        let mut p = Self::zero();
        p.push(k, c);
        p
    }

    fn push(&mut self, k: i64, c: Scalar) {
        let e = self.coeffs.entry(k).or_insert_with(Scalar::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&k);
        }
    }

    pub fn coeffs(&self) -> &BTreeMap<i64, Scalar> {
        &self.coeffs
    }

    pub fn coeff(&self, k: i64) -> Scalar {
        self.coeffs.get(&k).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&k, c) in &other.coeffs {
            out.push(k, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Scalar::one()))
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let mut out = Self::zero();
        for (&k, v) in &self.coeffs {
            out.push(k, v * c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (&a, x) in &self.coeffs {
            for (&b, y) in &other.coeffs {
                out.push(a + b, x * y);
            }
        }
        out
    }

    /// Pointwise complex conjugate: `z̄ = z⁻¹` on the circle.
    pub fn conj(&self) -> Self {
        let mut out = Self::zero();
        for (&k, c) in &self.coeffs {
            out.push(-k, c.conj());
        }
        out
    }

    /// `f ∘ σ` for `σ(z) = z^p`.
    pub fn alpha(&self, p: i64) -> Self {
        let mut out = Self::zero();
        for (&k, c) in &self.coeffs {
            out.push(p * k, c.clone());
        }
        out
    }

    /// Average over the `|p|` preimages: `z^k ↦ z^{k/p}` when `p | k`, else `0`.
    pub fn transfer(&self, p: i64) -> Self {
        let mut out = Self::zero();
        for (&k, c) in &self.coeffs {
            if k % p == 0 {
                out.push(k / p, c.clone());
            }
        }
        out
    }

    pub fn expectation(&self, p: i64) -> Self {
        self.transfer(p).alpha(p)
    }

    /// `x ↦ f(x + j/|p|)`: `z^k ↦ ω^{jk} z^k`.
    pub fn rotate(&self, p: i64, j: i64) -> Result<Self> {
        let order = p.unsigned_abs();
        let mut out = Self::zero();
        for (&k, c) in &self.coeffs {
            out.push(k, c * root_of_unity(order, j * k)?);
        }
        Ok(out)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .map(|(k, c)| match *k {
                0 => fmt_scalar(c),
                _ => format!("({})z^{k}", fmt_scalar(c)),
            })
            .collect();
        f.write_str(&terms.join(" + "))
    }
}

/// An element of `A = C(X)` (or of a bimodule over it) in one of the two backends.
#[derive(Debug, Clone, PartialEq)]
pub enum CylinderFunction {
    Cells(CellFunction),
    Laurent(LaurentPoly),
}

impl CylinderFunction {
    pub fn cells(&self) -> Option<&CellFunction> {
        match self {
            CylinderFunction::Cells(c) => Some(c),
            CylinderFunction::Laurent(_) => None,
        }
    }

    pub fn laurent(&self) -> Option<&LaurentPoly> {
        match self {
            CylinderFunction::Laurent(l) => Some(l),
            CylinderFunction::Cells(_) => None,
        }
    }

    pub fn conj(&self) -> Self {
        match self {
            CylinderFunction::Cells(c) => CylinderFunction::Cells(c.conj()),
            CylinderFunction::Laurent(l) => CylinderFunction::Laurent(l.conj()),
        }
    }

    pub fn mul(&self, model: &ModelHandle, other: &Self) -> Result<Self> {
        match (self, other) {
            (CylinderFunction::Cells(a), CylinderFunction::Cells(b)) => {
                Ok(CylinderFunction::Cells(a.mul(model, b)?))
            }
            (CylinderFunction::Laurent(a), CylinderFunction::Laurent(b)) => {
                Ok(CylinderFunction::Laurent(a.mul(b)))
            }
            _ => Err(Error::DepthMismatch("mixed function backends".into())),
        }
    }

    pub fn add(&self, model: &ModelHandle, other: &Self) -> Result<Self> {
        match (self, other) {
            (CylinderFunction::Cells(a), CylinderFunction::Cells(b)) => {
                Ok(CylinderFunction::Cells(a.add(model, b)?))
            }
            (CylinderFunction::Laurent(a), CylinderFunction::Laurent(b)) => {
                Ok(CylinderFunction::Laurent(a.add(b)))
            }
            _ => Err(Error::DepthMismatch("mixed function backends".into())),
        }
    }

    pub fn sub(&self, model: &ModelHandle, other: &Self) -> Result<Self> {
        match (self, other) {
            (CylinderFunction::Cells(a), CylinderFunction::Cells(b)) => {
                Ok(CylinderFunction::Cells(a.sub(model, b)?))
            }
            (CylinderFunction::Laurent(a), CylinderFunction::Laurent(b)) => {
                Ok(CylinderFunction::Laurent(a.sub(b)))
            }
            _ => Err(Error::DepthMismatch("mixed function backends".into())),
        }
    }

    pub fn same_function(&self, model: &ModelHandle, other: &Self) -> Result<bool> {
        match (self, other) {
            (CylinderFunction::Cells(a), CylinderFunction::Cells(b)) => a.same_function(model, b),
            (CylinderFunction::Laurent(a), CylinderFunction::Laurent(b)) => Ok(a == b),
            _ => Err(Error::DepthMismatch("mixed function backends".into())),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            CylinderFunction::Cells(c) => c.is_zero(),
            CylinderFunction::Laurent(l) => l.is_zero(),
        }
    }

    pub fn render(&self) -> Vec<String> {
        match self {
            CylinderFunction::Cells(c) => c.values().iter().map(fmt_scalar).collect(),
            CylinderFunction::Laurent(l) => vec![l.to_string()],
        }
    }
}

impl From<CellFunction> for CylinderFunction {
    fn from(c: CellFunction) -> Self {
        CylinderFunction::Cells(c)
    }
}

impl From<LaurentPoly> for CylinderFunction {
    fn from(l: LaurentPoly) -> Self {
        CylinderFunction::Laurent(l)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{sc, Scalar};
    use num_rational::BigRational;

    #[test]
    fn laurent_transfer_on_circle() {
        let z = LaurentPoly::monomial(1);
        assert!(z.transfer(2).is_zero());
        assert_eq!(LaurentPoly::monomial(4).transfer(2), LaurentPoly::monomial(2));
        assert_eq!(LaurentPoly::monomial(-6).transfer(-3), LaurentPoly::monomial(2));
        assert_eq!(z.conj().mul(&z), LaurentPoly::constant(sc(1, 1)));
        assert_eq!(LaurentPoly::monomial(2).alpha(3), LaurentPoly::monomial(6));
    }

    #[test]
    fn rotation_by_half_turn() {
        let f = LaurentPoly::monomial(1).add(&LaurentPoly::monomial(2));
        let r = f.rotate(2, 1).unwrap();
        assert_eq!(r.coeff(1), sc(-1, 1));
        assert_eq!(r.coeff(2), sc(1, 1));
        let i = LaurentPoly::monomial(1).rotate(4, 1).unwrap();
        assert_eq!(i.coeff(1), Scalar::new(BigRational::zero(), BigRational::one()));
        assert!(LaurentPoly::monomial(1).rotate(3, 1).is_err());
    }
}
