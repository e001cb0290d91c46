//! Core engine for simulating and analysing fully coupled jump-diffusion
//! systems.
//!
//! A coupled jump diffusion is a pair of interacting SDE components
//! `(X1, X2)` driven by independent Brownian motions and finite-activity
//! compensated Poisson random measures, where the origin is an equilibrium
//! of the second component (`b2(x1, 0) = 0`, `sigma2(x1, 0) = 0`,
//! `gamma2(x1, 0, mark) = 0`). The crate provides
//!
//! * a weak Euler integrator with compensated-jump-correct stepping and
//!   deterministic per-path RNG streams ([`integrate`]),
//! * the drift-diffusion-jump generator applied to test functions
//!   ([`generator`]),
//! * boundary invariant-measure estimation, Lyapunov functionals and
//!   stability verdicts ([`stability`]),
//! * the synchronously coupled auxiliary triple with its decay and drift
//!   budget diagnostics ([`coupling`]),
//! * polar decomposition of linearizable second components and the
//!   log-radius stability integral ([`polar`]),
//! * two-time-scale systems and the averaged angular exponent
//!   ([`fastslow`]),
//! * feedback-gain synthesis stabilizing the interacting component
//!   ([`control`]),
//! * leader-following consensus networks with noisy measurement protocols
//!   ([`consensus`]).
//!
//! The crate is `no_std`-compatible (with `alloc`); the `std` feature
//! (default) is required by the optional `parallel` ensemble runner.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod benchmarks;
pub mod consensus;
pub mod control;
pub mod coupling;
pub mod error;
pub mod fastslow;
pub mod generator;
pub mod integrate;
pub mod levy;
pub mod lipschitz;
pub mod polar;
pub mod rng;
pub mod runner;
pub mod stability;
pub mod stats;
pub mod system;

pub use error::{BuildError, SimError};
pub use integrate::{simulate_boundary_x1, simulate_path, IntegratorConfig, PathSample};
pub use levy::LevyMeasure;
pub use system::{CoefficientField, CoupledJumpDiffusion, Dims};

/// Paths whose state norm exceeds this value are treated as divergent.
pub const DIVERGENCE_RADIUS: f64 = 1e12;

/// States with norm below this value are treated as numerically absorbed at 0.
pub const ABSORPTION_RADIUS: f64 = 1e-300;
