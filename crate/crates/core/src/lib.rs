//! Infimum of `P(X ≤ κ·E[X])` over the inverse Gaussian, log-normal, Gumbel
//! and logistic families.
//!
//! Each two-parameter family collapses to a one-dimensional objective
//! `g_κ(coord)` ([`curves`]). [`solver::infimum`] classifies the κ-regime and
//! returns the exact infimum, locating the inverse Gaussian minimizer by a
//! bracketed root search when κ > 1. [`oracles`] re-derives the same numbers
//! by quadrature, Monte Carlo and grid search without touching the closed
//! forms, and [`verify`] runs the whole cross-check matrix.

// reference constants are quoted at full published precision; `!(a < b)`
// guards are used on purpose to reject NaN
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod curves;
pub mod distributions;
pub mod error;
pub mod oracles;
pub mod report;
pub mod solver;
pub mod special;
pub mod verify;

pub use curves::{g, g_at, g_prime_ig, h_ig, ig_upper_tail, phi_ig, Kappa, ReducedPoint};
pub use distributions::{DistParams, FamilyId, EULER_GAMMA};
pub use error::{Error, Result};
pub use oracles::{GridSpec, OracleMethod, OracleReport};
pub use solver::{ig_critical_point, infimum, InfimumResult, LimitDirection, RootBracket};
pub use special::{erfcx, std_normal_cdf, upper_gaussian_integral, Probability};
