//! Exact rational engine for sawtooth-series sets in coordinate models.
//!
//! The set is the image of `t -> sum_n f_n(t) x_n` where `f_0(t) = t`,
//! `f_n(t) = M_n^-1 g(M_n t)` and `g` is the half-sawtooth. Everything is
//! computed in exact rational arithmetic at a stated truncation level,
//! with certified enclosures for whatever lies beyond it.
//!
//! * [`params`]: parameters, grids, validation and block partitions
//! * [`construction`]: component functions, truncated points, piecewise-linear projections
//! * [`measure`]: interval unions, exact image measures and brackets, covering sums
//! * [`curve`]: polygonal approximations in the l1 model and their lengths
//! * [`diagnostics`]: event sets, secant witnesses, translation identities, chord witnesses

pub mod construction;
pub mod curve;
pub mod diagnostics;
pub mod error;
pub mod exec;
pub mod measure;
pub mod params;
pub mod rat;
pub mod sampling;

pub use error::{Error, Result};
pub use exec::Exec;
pub use params::{ParameterSet, Model};
pub use rat::Rat;

/// Default cap on enumerated pieces, cells or vertices.
pub const DEFAULT_BUDGET: u64 = 1 << 25;
