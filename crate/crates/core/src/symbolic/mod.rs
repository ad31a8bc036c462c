//! Models: 2D subshifts of finite type, rank-2 graphs, circle coverings and full shifts.

pub mod kgraph;
pub mod model;
pub mod pattern;
pub mod sft;
