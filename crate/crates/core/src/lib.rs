//! Analytical coherence models for high-frequency transmon qubits.
//!
//! The crate is `no_std` (with `alloc`) and contains only numerics:
//!
//! - [`constants`]: CODATA 2018 constants and unit conversion
//! - [`device`]: validated qubit, resonator and material parameters
//! - [`junction`]: Josephson junction relations and transmon estimates
//! - [`thermal`]: thermal-photon dephasing, quasiparticle loss, T1(T), T2(T)
//! - [`pulse`]: truncated-Gaussian Rabi model, Bloch-equation oracle, chevrons
//! - [`fit`]: Levenberg–Marquardt trace fitting and fluctuation statistics
//! - [`sweep`]: best-case dephasing maps and maximum operating temperature
//!
//! File formats, configuration and the command-line front end live in the
//! `hotqubit-cli` crate.

#![no_std]
#![warn(
    clippy::cast_lossless,
    clippy::redundant_closure_for_method_calls,
    clippy::map_unwrap_or
)]
// negated comparisons deliberately route NaN to the failure branch
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod constants;
pub mod device;
pub mod error;
pub mod fit;
pub mod junction;
mod linalg;
pub mod pulse;
pub mod quadrature;
pub mod special;
pub mod sweep;
pub mod thermal;

#[inline]
pub(crate) fn sq(x: f64) -> f64 {
    x * x
}

#[doc(inline)]
pub use self::{
    constants::{angular, PhysicalConstants},
    device::{ChiConvention, DeviceParams, QubitParams, ResonatorParams, SuperconductorMaterial},
    error::{Error, Result},
    thermal::ThermalModel,
};
