//! Stabilized integrating-factor Runge-Kutta (sIFRK) solvers for
//! semilinear parabolic equations `u_t = L u + f(u)`.
//!
//! The crate provides
//! - explicit RK tableaus in Butcher and Shu-Osher form together with a
//!   certifier for unconditional maximum-bound preservation ([`tableau`]),
//! - matrix-free application of `e^{t(L - kappa I)}` for the
//!   central-difference Laplacian on periodic and Neumann grids
//!   ([`spectral`]),
//! - reaction terms and their stabilization ([`nonlinearity`]),
//! - the time stepper and driver ([`stepper`]),
//! - energy, error norms and convergence rates ([`diagnostics`]),
//! - ready-made experiments ([`benchmarks`]),
//! - the run configuration format ([`config`]) and the commands behind the
//!   `sifrk` binary ([`cli`]).
//!
//! Runnable walkthroughs live in `examples/`.

pub mod benchmarks;
pub mod cli;
pub mod config;
pub mod diagnostics;
pub mod error;
pub mod nonlinearity;
pub mod rng;
pub mod spectral;
pub mod stepper;
pub mod tableau;

pub use error::{Error, Result};
