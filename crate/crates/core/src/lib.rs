//! Linear boundary-value problems for systems of `m` complex ODEs of order `r`,
//!
//! ```text
//! y^(r) + A_{r-1} y^(r-1) + ... + A_0 y = f   on [a, b],      B y = q,
//! ```
//!
//! where `B` is a general boundary operator (point terms at `a` plus a Stieltjes
//! integral of `y^(r-1)` against a matrix measure), together with the explicit
//! sequence of multipoint problems approximating them and the error-bound checks
//! that go with it.
//!
//! Module map:
//!
//! * [`funcspace`]: grids, piecewise polynomials, sampled jets, norms
//! * [`stieltjes`]: atomic + absolutely continuous measures, weak-* discretization
//! * [`linode`]: fundamental matrices and the variation-of-constants particular solution
//! * [`boundary`]: general and multipoint boundary operators, lifting, norm estimates
//! * [`bvp`]: problem container, companion reduction, solver
//! * [`approx`]: approximating problems, sweeps, error constants and bound checks
//! * [`registry`]: named, runtime-selectable approximation strategies
//! * [`problem_file`], [`corpus`]: the JSON problem schema and the built-in problems

pub mod approx;
pub mod boundary;
pub mod bvp;
pub mod corpus;
pub mod error;
pub mod funcspace;
pub mod linode;
pub mod problem_file;
pub mod registry;
pub mod stieltjes;

pub use error::{Error, Result};

pub type C64 = num_complex::Complex64;
pub type CVector = nalgebra::DVector<C64>;
pub type CMatrix = nalgebra::DMatrix<C64>;
