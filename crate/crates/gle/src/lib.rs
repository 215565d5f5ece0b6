//! Generalized Langevin dynamics with power-law memory.
//!
//! A particle with memory friction
//!
//! ```text
//! m x''(t) = -gamma x'(t) - Phi'(x(t)) - int_0^t K(t-s) x'(s) ds + F(t) + sqrt(2 gamma) W_0'(t)
//! ```
//!
//! is represented here through a countable family of Ornstein-Uhlenbeck modes. The kernel
//!
//! ```text
//! K(t) = sum_{k>=1} c_k exp(-lambda_k t),   c_k = k^-(1+alpha*beta),   lambda_k = k^-beta
//! ```
//!
//! decays like t^-alpha, so the recipe covers integrable (diffusive) and heavy-tailed
//! (subdiffusive) memory with one mode ladder. Coupling the modes to the velocity turns the
//! integro-differential equation into a Markovian system, and the crate's purpose is to
//! integrate that system and to check, by coupled Monte Carlo, the two limits it supports:
//! the small-mass limit (m -> 0, positions converge to an overdamped equation with shifted
//! mode variables) and the white-noise limit (kernel rescaled to (1/eps) K(t/eps), eps -> 0,
//! converging to ordinary Langevin dynamics with drag gamma + sum c_k/lambda_k).
//!
//! Module map:
//! - [`kernel`]: mode coefficients, kernel evaluation, truncation bounds, parameter regimes.
//! - [`model`]: potentials and their growth validators, state types, weighted norms, the
//!   smooth cutoff, and the overdamped Lyapunov function.
//! - [`dynamics`]: noise grids with exactly coupled OU integrals, one-step integrators for
//!   the four systems, and trajectory simulation.
//! - [`analysis`]: sup-norm coupling errors, mean-square displacement, log-log slopes,
//!   ensemble autocovariance, exit times, and ensemble summary statistics.
//! - [`runner`]: experiment configuration, deterministic RNG streams, and the canned
//!   studies behind the CLI subcommands.

pub mod analysis;
pub mod dynamics;
pub mod kernel;
pub mod model;
pub mod runner;

pub(crate) mod par;
