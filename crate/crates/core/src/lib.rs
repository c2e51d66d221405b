//! Bound states and single-excitation entanglement dynamics for `N` qubits
//! coupled to a common zero-temperature bosonic reservoir.
//!
//! All frequencies, energies and rates are expressed in units of the qubit
//! transition frequency `omega0` unless a model is built with a different
//! `omega0`; times are then in units of `1/omega0`.
//!
//! The crate is organised bottom-up:
//!
//! - [`numerics`]: semi-infinite quadrature, bracketed root finding and a
//!   scalar Volterra integro-differential solver.
//! - [`reservoir`]: spectral densities `J(ω)` and correlation kernels `f(τ)`.
//! - [`spectrum`]: the self-consistency function `y(E)` and bound-state search.
//! - [`dynamics`]: amplitude propagation, analytic (Lorentzian) and numerical.
//! - [`entanglement`]: concurrence and long-time predictions.
//! - [`cli`]: the `boundstate` command-line front end.

// `!(x > 0.0)` style checks are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dynamics;
pub mod entanglement;
mod error;
pub mod numerics;
pub mod reservoir;
pub mod spectrum;

pub use error::{Error, Result};
pub use num_complex::Complex64;
