//! Spectral toolkit for the linearized compressible Navier-Stokes-Korteweg
//! system on the 2D torus and plane.
//!
//! The linearized system evolves a density perturbation `phi` and scaled
//! momentum `m` through an explicit Green matrix in Fourier space. This crate
//! evaluates that matrix exactly per mode, splits the momentum into its
//! Stokes-flow (divergence-free heat flow) and diffusion-wave parts, and
//! verifies the quantitative decay and growth estimates satisfied by each
//! piece: space-time `L^2` bounds for the density, `(1+t)^{-1}` decay,
//! logarithmic growth of the potential momentum part, exponential decay of
//! high frequencies, and the Morawetz-type energy identities behind them.
//!
//! Modules:
//! * [`params`] - model coefficients, characteristic roots, cutoffs and all
//!   Fourier multipliers;
//! * [`grid`] - periodic box, transforms, Parseval norms;
//! * [`semigroup`] - exact per-mode evolution, Helmholtz splitting,
//!   closed-form space-time integrals;
//! * [`lowfreq`] - grid-free polar quadrature over the low-frequency ball for
//!   the long-time asymptotics;
//! * [`morawetz`] - energy identities, auxiliary solves and estimate-level
//!   checkers;
//! * [`fit`], [`quad`], [`signal`], [`rng`], [`timeseries`] - supporting
//!   machinery (rate fits, quadrature, exponential sums, seeded data, CSV).

pub mod data;
pub mod error;
pub mod field_io;
pub mod fit;
pub mod grid;
pub mod lowfreq;
pub mod morawetz;
pub mod params;
pub mod quad;
pub mod rng;
pub mod semigroup;
pub mod signal;
pub mod special;
pub mod timeseries;

pub use error::{Error, Result};
pub use params::{ModelParams, Regime};
