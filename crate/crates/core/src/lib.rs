//! Traveling-wave solutions of a nonlinearly dispersive Schrödinger
//! equation in an infinite cylindrical well, built from a Boubaker
//! polynomial expansion.
//!
//! The pipeline has five stages:
//!
//! 1. [`poly`] — generate the order-4k Boubaker polynomials with exact
//!    integer coefficients and isolate their minimal positive roots mu_k.
//! 2. [`solver`] — assemble the quadrature functionals Lambda_k, Lambda'_k
//!    and solve for the unit-norm coefficient set that annihilates the
//!    integrated residual.
//! 3. [`model`] — reconstruct the complex field u(x, t) and its probability
//!    density on [0, R] x [0, t_m], and normalize the t = 0 slice.
//! 4. [`verify`] — independent cross-checks: an alternative polynomial
//!    construction path, finite-difference residuals, and the convergence
//!    sweep over increasing expansion orders.
//! 5. [`cli`] — the `bpes` command-line front end emitting CSV tables and
//!    verification reports.
//!
//! Everything is pure and deterministic: identical inputs produce
//! bit-identical outputs, serial or parallel.

pub mod cli;
pub mod csv;
pub mod error;
pub mod model;
pub mod pipeline;
pub mod poly;
pub mod quad;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
pub use model::{
    eval_profile_f, normalize_probability, phase_factor, potential, reconstruct, t_max,
    wave_variable, PhysicalParams, Potential, SolutionField,
};
pub use pipeline::{run_pipeline, PipelineConfig, PipelineOutput};
pub use poly::{build_boubaker, subnorm_h, BoubakerBasis, PolyCoeffs, RootTable};
pub use solver::{
    assemble, residual_omega, solve_coefficients, AssembledSystem, ChainRuleMode, CoefficientSet,
    ExpansionConfig,
};
pub use verify::{
    convergence_sweep, ode_residual, polynomial_oracle, ConvergenceReport, OracleReport,
    ResidualReport,
};
