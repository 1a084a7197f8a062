//! Physical constants and unit conventions.
//!
//! Values are CODATA 2018. Since the 2019 SI redefinition `h`, `e` and `k_B`
//! are exact; `hbar` and the flux quantum are derived from them so the
//! identities `hbar = h / 2π` and `Φ0 = h / 2e` hold to rounding.
//!
//! User-facing frequencies and rates are cyclic (Hz). Model internals use
//! angular rates (rad/s); conversion happens only through [`angular`].

use core::f64::consts::PI;

/// Planck constant h, J·s (exact).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Reduced Planck constant h/2π, J·s.
pub const HBAR: f64 = PLANCK / (2.0 * PI);
/// Boltzmann constant, J/K (exact).
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Elementary charge, C (exact).
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Magnetic flux quantum h/2e, Wb.
pub const FLUX_QUANTUM: f64 = PLANCK / (2.0 * ELEMENTARY_CHARGE);

/// BCS weak-coupling ratio Δ(0) / (k_B·Tc).
pub const BCS_GAP_RATIO: f64 = 1.764;

/// Temperatures below this are treated as the zero-temperature limit.
pub const TEMPERATURE_FLOOR: f64 = 1e-3;

/// One electron-volt in joules.
pub const ELECTRON_VOLT: f64 = ELEMENTARY_CHARGE;

/// Bundle of the constants used across the models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub h: f64,
    pub hbar: f64,
    pub kb: f64,
    pub e_charge: f64,
    pub phi0: f64,
}

impl PhysicalConstants {
    pub const CODATA_2018: Self = Self {
        h: PLANCK,
        hbar: HBAR,
        kb: BOLTZMANN,
        e_charge: ELEMENTARY_CHARGE,
        phi0: FLUX_QUANTUM,
    };
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA_2018
    }
}

/// Converts a cyclic frequency (Hz) to an angular one (rad/s).
#[inline]
pub fn angular(f_hz: f64) -> f64 {
    2.0 * PI * f_hz
}
