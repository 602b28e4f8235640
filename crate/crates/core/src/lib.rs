//! Randomized quadrature on the unit cube with probabilistic error analysis.
//!
//! The centrepiece is stratified control variates (SCV): on each of the
//! `m^d` subcubes of `[0,1]^d` a local polynomial interpolant of total degree
//! `< s` is integrated exactly, and the residual is estimated from `n0`
//! uniform samples drawn inside the same subcube. Classical control
//! variates, control variates with median-of-means, plain stratified
//! sampling and crude Monte Carlo are provided for comparison, all sharing
//! the same piecewise interpolant and the same seeded stream layout.
//!
//! The [`stats`] module turns replicated runs into empirical probabilistic
//! errors `e(Q_n, δ, f)`, fits convergence rates, and checks the
//! concentration inequalities behind the error bounds by simulation.

// Negated comparisons are how NaN parameters get rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimators;
pub mod grid;
pub mod interp;
pub mod rng;
pub mod stats;
pub mod testbed;

pub use error::{Error, Result};
pub use estimators::{
    classical_cv, crude_mc, cv_mom, m_for_budget, run, scv, stratified, EstimateRun,
    EstimatorConfig, InterpolationMode, Method,
};
pub use grid::{poly_dim, regular_nodes, shifted_nodes, MonomialBasis, NodeSet, Smoothness, SubcubeIndex};
pub use interp::{interpolate, patch_mean, residual_eval, Interpolator, PolyPatch};
pub use stats::{fit_rate, histogram, prob_error, replicate, tail_fraction, ErrorSample, RateFit};
pub use testbed::{bump, random_poly, tail_bump, test_function_2d, BumpSpec, Integrand};
