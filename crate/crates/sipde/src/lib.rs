//! Semi-implicit Rosenbrock-type and predictor-corrector BDF time
//! integrators for 1D method-of-lines PDE systems of the form
//! `dU/dt = F(U) + B(U) U` with high-order spatial derivatives.
//!
//! Only the second factor of `B(U) U` is treated implicitly: each step
//! reduces to a fixed number of linear banded solves, with no Newton
//! iteration, while avoiding the `dt = O(dx^k)` restriction explicit
//! methods face on k-th order PDEs.
// Index loops mirror the stencil arithmetic they implement, and negated
// float comparisons are NaN-rejecting guards.
#![allow(clippy::needless_range_loop)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod harness;
pub mod linalg;
pub mod multistep;
pub mod problem;
pub mod rosenbrock;
pub mod spatial;
pub mod stability;

pub use error::{Error, Result};
pub use problem::{
    assemble_split, build_grid, discrete_norms, ErrorNorms, Grid, PdeProblem, StateVector,
};
