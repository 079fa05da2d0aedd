//! Component functions, truncated points and exact piecewise-linear
//! representations of truncated scalar projections.

mod components;
mod functional;
mod pl;

pub use components::{
    ensemble_evaluate, f_component, f_left_limit, sawtooth, truncated_point, TruncatedPoint,
};
pub use functional::Functional;
pub use pl::{build_pl, Piece, PlFunction};
pub(crate) use components::{f_left_raw, f_raw};
