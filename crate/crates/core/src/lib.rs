//! Solver and verification harness for the level-set reinitialization equation
//! `u_t + f(x) H(||grad u||) = 0`, whose solution relaxes to the signed distance from
//! `{u0 = 0}` measured in the dual norm.
//!
//! Every numerical type is generic over a [`Real`] scalar; the aliases below fix `f64` (and `f32`
//! for the grid containers) for everyday use.

// Negated comparisons are deliberate: they reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod barriers;
pub mod config;
pub mod error;
pub mod experiment;
pub mod expr;
pub mod grid;
pub mod io;
pub mod norms;
pub mod oracle;
mod optim;
pub mod problem;
pub mod properties;
pub mod solver;
pub mod real;

pub use error::{Error, Result};
pub use real::Real;

pub type Grid = grid::GridSpec<f64>;
pub type Field = grid::ScalarField<f64>;
pub type Field32 = grid::ScalarField<f32>;
pub type Series = grid::TimeSeries<f64>;
pub type Norm = norms::NormSpec<f64>;
pub type Problem = problem::ProblemSpec<f64>;
