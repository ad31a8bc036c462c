//! Finite Parseval frames `f = Σ uᵢ·cᵢ·P(uᵢ* f)`.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{Direction, Shape};
use crate::scalar::{real, Scalar};
use crate::shift::{find_injectivity_window, shift_table, FiberMeasureSystem, InjectivityStatus};
use crate::symbolic::model::{ArcCell, Cell, ModelHandle};

use super::function::{CellFunction, CylinderFunction, LaurentPoly};
use super::operator::{basis_functions, expectation, Resolution};

/// `indicator` is `uᵢ`; `weight_squared` is the positive factor `cᵢ = 1/w` (so `ν` in counting
/// mode) standing in for the square root carried by `uᵢ`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameElement {
    pub label: String,
    pub indicator: CylinderFunction,
    pub weight_squared: CylinderFunction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub direction: Direction,
    pub resolution: Resolution,
    /// Window used for the injectivity domains; empty for circle frames.
    pub window: Vec<(usize, usize)>,
    pub elements: Vec<FrameElement>,
}

impl Frame {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Largest rectangular window scanned when looking for injectivity domains.
pub const FRAME_WINDOW_MAX: Shape = Shape(2, 2);

pub fn frame_compute(
    model: &ModelHandle,
    measure: &FiberMeasureSystem,
    dir: Direction,
    res: Resolution,
) -> Result<Frame> {
    match res {
        Resolution::LaurentSpan(_) => {
            let p = model
                .circle()
                .ok_or_else(|| Error::Unsupported("Laurent frame needs a circle model".into()))?
                .degree(dir);
            let elements = (0..p.abs())
                .map(|j| FrameElement {
                    label: format!("z^{j}"),
                    indicator: LaurentPoly::monomial(j).into(),
                    weight_squared: LaurentPoly::constant(Scalar::one()).into(),
                })
                .collect();
            Ok(Frame {
                direction: dir,
                resolution: res,
                window: Vec::new(),
                elements,
            })
        }
        Resolution::Depth(depth) => {
            let lower = depth.checked_sub(dir.unit()).ok_or(Error::DepthTooSmall {
                depth,
                needed: dir.unit(),
            })?;
            let weight = inverse_weights(model, measure, dir, depth)?;
            let basis = model.basis(depth)?;
            let mut elements = Vec::new();
            let window;
            if model.circle().is_some() {
                // one arc of the first level in `dir` per element
                window = Vec::new();
                let first = dir.unit();
                let arcs = model.basis(first)?;
                for a in arcs.cells() {
                    let u = CellFunction::from_fn(model, depth, |c| {
                        indicator(model.restrict_cell(c, first).ok().as_ref() == Some(a))
                    })?;
                    let Cell::Arc(ArcCell { index, .. }) = a else {
                        unreachable!()
                    };
                    elements.push(FrameElement {
                        label: format!("arc {index}"),
                        indicator: u.into(),
                        weight_squared: weight.clone().into(),
                    });
                }
            } else {
                let max = FRAME_WINDOW_MAX.min(depth);
                let v = find_injectivity_window(model, dir, max, lower)?;
                if v.status != InjectivityStatus::VerifiedAtDepth {
                    return Err(Error::NotLocallyInjective);
                }
                window = v.window;
                let key = |c: &Cell| -> Vec<u16> {
                    let p = c.pattern().expect("pattern model");
                    window.iter().map(|&(i, j)| p.get(i, j)).collect()
                };
                let mut keys: Vec<Vec<u16>> = basis.cells().iter().map(key).collect();
                keys.sort();
                keys.dedup();
                let alphabet = model.alphabet().map(<[String]>::to_vec).unwrap_or_default();
                for k in keys {
                    let u = CellFunction::from_fn(model, depth, |c| indicator(key(c) == k))?;
                    let label = k
                        .iter()
                        .map(|&s| alphabet.get(s as usize).cloned().unwrap_or_else(|| s.to_string()))
                        .collect::<Vec<_>>()
                        .join("");
                    elements.push(FrameElement {
                        label: format!("U[{label}]"),
                        indicator: u.into(),
                        weight_squared: weight.clone().into(),
                    });
                }
            }
            Ok(Frame {
                direction: dir,
                resolution: res,
                window,
                elements,
            })
        }
    }
}

fn indicator(b: bool) -> Scalar {
    if b {
        Scalar::one()
    } else {
        Scalar::zero()
    }
}

/// `1/w(y)` with `w(y)` the fiber weight of `y` under `σ_dir`.
fn inverse_weights(
    model: &ModelHandle,
    measure: &FiberMeasureSystem,
    dir: Direction,
    depth: Shape,
) -> Result<CellFunction> {
    let t = shift_table(model, measure, dir, depth)?;
    let values = t
        .weight
        .iter()
        .map(|w| {
            if w.is_zero() {
                Err(Error::Precondition("zero fiber weight".into()))
            } else {
                Ok(real(w.recip()))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CellFunction::raw(depth, values))
}

/// `Σᵢ uᵢ·cᵢ·P(uᵢ* f)`.
pub fn reconstruct(
    model: &ModelHandle,
    measure: &FiberMeasureSystem,
    frame: &Frame,
    f: &CylinderFunction,
) -> Result<CylinderFunction> {
    let mut acc: Option<CylinderFunction> = None;
    for e in &frame.elements {
        let p = expectation(model, measure, frame.direction, &e.indicator.conj().mul(model, f)?)?;
        let term = e.indicator.mul(model, &e.weight_squared)?.mul(model, &p)?;
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(model, &term)?,
        });
    }
    acc.ok_or_else(|| Error::Precondition("empty frame".into()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReconstructionReport {
    pub direction: u8,
    pub resolution: Resolution,
    pub frame_size: usize,
    pub checked: usize,
    pub failures: usize,
    /// Index of the first basis function not reconstructed.
    pub first_failure: Option<usize>,
}

impl ReconstructionReport {
    pub fn exact(&self) -> bool {
        self.failures == 0
    }
}

/// Reconstruction on every basis function of `res`.
pub fn check_reconstruction(
    model: &ModelHandle,
    measure: &FiberMeasureSystem,
    frame: &Frame,
    res: Resolution,
) -> Result<ReconstructionReport> {
    let basis = basis_functions(model, res)?;
    let mut failures = 0;
    let mut first_failure = None;
    for (i, f) in basis.iter().enumerate() {
        let g = reconstruct(model, measure, frame, f)?;
        if !g.same_function(model, f)? {
            failures += 1;
            first_failure.get_or_insert(i);
        }
    }
    Ok(ReconstructionReport {
        direction: frame.direction.index(),
        resolution: res,
        frame_size: frame.len(),
        checked: basis.len(),
        failures,
        first_failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::model::{build_model, ModelSpec};
    use crate::symbolic::sft::SftSpec;

    #[test]
    fn ledrappier_two_element_frames() {
        let m = build_model(ModelSpec::Sft(SftSpec::ledrappier())).unwrap();
        let mu = FiberMeasureSystem::counting();
        for dir in Direction::BOTH {
            let res = Resolution::Depth(Shape(2, 2));
            let f = frame_compute(&m, &mu, dir, res).unwrap();
            assert_eq!(f.len(), 2);
            assert_eq!(f.window, vec![(0, 0)]);
            let two = crate::scalar::sc(2, 1);
            assert!(f.elements[0].weight_squared.cells().unwrap().values().iter().all(|v| *v == two));
            assert!(check_reconstruction(&m, &mu, &f, res).unwrap().exact());
        }
    }

    #[test]
    fn circle_frames() {
        let c = build_model(ModelSpec::Circle { p1: 2, p2: 3 }).unwrap();
        let mu = FiberMeasureSystem::counting();
        let f = frame_compute(&c, &mu, Direction::Horizontal, Resolution::LaurentSpan(4)).unwrap();
        assert_eq!(f.len(), 2);
        assert!(check_reconstruction(&c, &mu, &f, Resolution::LaurentSpan(4)).unwrap().exact());
        let res = Resolution::Depth(Shape(2, 1));
        let f = frame_compute(&c, &mu, Direction::Vertical, Resolution::Depth(Shape(1, 2))).unwrap();
        assert_eq!(f.len(), 3);
        assert!(check_reconstruction(&c, &mu, &f, Resolution::Depth(Shape(1, 2))).unwrap().exact());
        let f = frame_compute(&c, &mu, Direction::Horizontal, res).unwrap();
        assert!(check_reconstruction(&c, &mu, &f, res).unwrap().exact());
    }

    #[test]
    fn fullshift_has_no_frame() {
        let m = build_model(ModelSpec::Fullshift {
            alphabet: vec!["0".into(), "1".into()],
            weights: None,
        })
        .unwrap();
        let e = frame_compute(&m, m.default_measure(), Direction::Horizontal, Resolution::Depth(Shape(3, 3)));
        assert_eq!(e.unwrap_err(), Error::NotLocallyInjective);
    }
}
