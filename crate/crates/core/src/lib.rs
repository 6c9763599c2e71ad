//! Simulation and data reduction for longitudinal spin coupling through
//! kinetic inductance.
//!
//! - [`physics`]: constants, dipole fields and the closed-form material laws.
//! - [`fluxonium`]: fluxonium spectra and the single-spin nanojunction readout.
//! - [`ensemble`]: resonator field sweeps, magnetization extraction and spin dynamics.
//! - [`spectro`]: notch-resonator S21 fitting, frequency tracking and field alignment.

// `!(x > 0.0)` rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ensemble;
pub mod error;
pub mod fluxonium;
pub mod io;
pub mod numerics;
pub mod physics;
pub mod spectro;

pub use error::{Error, Result};
