//! Charged Brownian oscillator ("Brownian emitter") dissipating energy by
//! friction and by Abraham–Lorentz radiation reaction.
//!
//! Modules, bottom-up:
//!
//! * [`constants`] / [`params`]: CODATA constants, unit systems, validated
//!   [`EmitterParams`](params::EmitterParams).
//! * [`friction`]: the catalogue of γ(ω) laws.
//! * [`spectra`]: fluctuation–dissipation force density, S_XX, S_VV, the
//!   Lorentzian approximation and the optimal-friction result.
//! * [`moments`]: velocity dispersion with cutoff, universal constants,
//!   diffusion constants, analytic autocorrelations, logarithmic MSD.
//! * [`stochastic`]: spectral synthesis, the order-reduced Langevin
//!   integrator, Welch PSD and autocorrelation estimators.
//! * [`kinetics`]: Klein–Kramers and Smoluchowski solvers, harmonic
//!   dispersion relaxation and the dispersion moment ODE.
//! * [`reproduce`]: the acceptance battery behind `emitter reproduce`.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod error;
pub mod friction;
pub mod io;
pub mod kinetics;
pub mod moments;
pub mod params;
pub mod potential;
pub mod quadrature;
pub mod reproduce;
pub mod spectra;
pub mod stochastic;

pub use error::{Error, Result};
pub use friction::FrictionModel;
pub use params::{make_params, EmitterParams, ParamSpec};
pub use potential::Potential;
