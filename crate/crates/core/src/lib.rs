//! ψ-Caputo fractional calculus and homotopy-analysis series solutions for
//! time-fractional Navier-Stokes problems.
//!
//! The crate is `no_std` (it needs `alloc`). Elementary functions come from
//! [`libm`], so every result is bit-reproducible across platforms that share
//! the same `libm` build.
//!
//! Layout:
//!
//! - [`psi`], [`kernel`]: the rescaling function ψ, the ψ-fractional integral
//!   and the ψ-Caputo derivative, in closed form on the power basis and by
//!   product-integration quadrature.
//! - [`special`]: Gamma and the one-parameter Mittag-Leffler function.
//! - [`algebra`]: the closed term algebra the series iterates live in.
//! - [`problem`]: the three tube/planar flow problems and their exact solutions.
//! - [`ham`]: the m-th order deformation recursion and geometric resummation.
//! - [`verify`]: residuals, oracle tables and initial-condition checks.
#![no_std]
// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod algebra;
pub mod error;
pub mod ham;
pub mod kernel;
mod math;
pub mod problem;
pub mod psi;
pub mod special;
pub mod verify;

pub use algebra::{
    cylindrical_operator, planar_convection, planar_laplacian, series_eval, temporal_fractional_integral, FieldValue,
    Geometry, HamSeries, Laurent, SeriesTerm, SpatialExpr, SpatialPoint, TermSum, TimeExponent, Trig,
};
pub use error::{Error, Result};
pub use ham::{chi, ham_next_order, ham_series, resum_geometric, HamConfig, Hbar, NextOrder};
pub use kernel::{
    caputo_derivative_l1, caputo_derivative_numeric, default_grid_step, frac_integral_numeric, frac_integral_power,
    FracOrder,
};
pub use problem::{exact_solution, make_problem, AppKind, Application, ProblemParams, ProblemSpec};
pub use psi::{psi_eval, CustomPsi, PsiKind, PsiSpec};
pub use special::{gamma_eval, ln_gamma, ml_eval, MlQuery, MlValue};
