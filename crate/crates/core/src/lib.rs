//! Exact finite-depth computations for pairs of commuting shift maps: pattern enumeration,
//! local injectivity, transfer operators and bimodules, the groupoid relations `Rₙ` and the
//! Bratteli diagrams of their AF cores.

pub mod bimodule;
pub mod error;
pub mod geom;
pub mod groupoid;
pub mod ktheory;
pub mod modelspec;
pub mod scalar;
pub mod shift;
pub mod symbolic;

pub use error::{Error, Result};
pub use geom::{Degree, Direction, Shape};
pub use scalar::Scalar;
pub use symbolic::model::{build_model, candidate_bound_from_env, ModelHandle, ModelKind, ModelSpec};
