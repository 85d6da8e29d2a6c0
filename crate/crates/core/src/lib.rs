//! Covariant elastodynamics of residually stressed bodies on constant-curvature
//! surfaces.
//!
//! An annulus with intrinsic curvature `K` is embedded in a surface of
//! curvature `k`. When `K ≠ k` no stress-free placement exists; the crate
//! computes the residually stressed equilibrium and the nonlinear radial
//! waves around it.

pub mod cli;
pub mod config;
pub mod elasticity;
pub mod error;
pub mod geometry;
pub mod gradcheck;
pub mod pointdyn;
pub mod solver;

pub use config::{parse_config, parse_document, serialize, RunDocument};
pub use error::{Error, Result};
pub use geometry::{AzimuthalMetric, Christoffel, CurvatureKind, CurvatureProfile};
pub use solver::{simulate, solve_equilibrium, ProblemConfig, RadialGrid, RadialState};
