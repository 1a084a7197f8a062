//! Validated device-parameter data model.

use alloc::string::String;

use crate::constants::{angular, BCS_GAP_RATIO, BOLTZMANN};
use crate::error::{positive, Error, Result};

pub use crate::thermal::ThermalModel as DeviceParams;

/// Superconductor of the junction electrodes.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperconductorMaterial {
    name: String,
    tc: f64,
    gap0: f64,
}

impl SuperconductorMaterial {
    pub const NIOBIUM_TC: f64 = 9.2;
    pub const ALUMINUM_TC: f64 = 1.2;

    /// Material whose zero-temperature gap follows BCS: Δ = 1.764·k_B·Tc.
    pub fn from_tc(name: impl Into<String>, tc: f64) -> Result<Self> {
        let tc = positive("tc_k", tc)?;
        Ok(Self {
            name: name.into(),
            tc,
            gap0: BCS_GAP_RATIO * BOLTZMANN * tc,
        })
    }

    /// Material with an explicitly measured or effective gap (J).
    pub fn with_gap(name: impl Into<String>, tc: f64, gap0: f64) -> Result<Self> {
        Ok(Self {
            name: name.into(),
            tc: positive("tc_k", tc)?,
            gap0: positive("gap", gap0)?,
        })
    }

    pub fn niobium() -> Self {
        Self::from_tc("Nb", Self::NIOBIUM_TC).expect("constant Tc is positive")
    }

    pub fn aluminum() -> Self {
        Self::from_tc("Al", Self::ALUMINUM_TC).expect("constant Tc is positive")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Critical temperature, K.
    pub fn tc(&self) -> f64 {
        self.tc
    }

    /// Zero-temperature gap Δ, J.
    pub fn gap0(&self) -> f64 {
        self.gap0
    }
}

/// Qubit transition and low-temperature coherence scales.
///
/// `t1_0` and `t2_0` may be `f64::INFINITY` to model a loss-free device.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitParams {
    f_ge: f64,
    alpha: f64,
    t1_0: f64,
    t2_0: f64,
    material: SuperconductorMaterial,
}

impl QubitParams {
    pub fn new(
        f_ge: f64,
        alpha: f64,
        t1_0: f64,
        t2_0: f64,
        material: SuperconductorMaterial,
    ) -> Result<Self> {
        let f_ge = positive("f_ge_hz", f_ge)?;
        if !(alpha.abs() < f_ge) {
            return Err(Error::Domain {
                name: "alpha_hz",
                value: alpha,
                reason: "|alpha| must be smaller than f_ge",
            });
        }
        Ok(Self {
            f_ge,
            alpha,
            t1_0: positive("t1_0_s", t1_0)?,
            t2_0: positive("t2_0_s", t2_0)?,
            material,
        })
    }

    pub fn f_ge(&self) -> f64 {
        self.f_ge
    }

    pub fn omega_ge(&self) -> f64 {
        angular(self.f_ge)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn t1_0(&self) -> f64 {
        self.t1_0
    }

    pub fn t2_0(&self) -> f64 {
        self.t2_0
    }

    pub fn material(&self) -> &SuperconductorMaterial {
        &self.material
    }

    pub fn with_t1_0(mut self, t1_0: f64) -> Result<Self> {
        self.t1_0 = positive("t1_0_s", t1_0)?;
        Ok(self)
    }

    pub fn with_t2_0(mut self, t2_0: f64) -> Result<Self> {
        self.t2_0 = positive("t2_0_s", t2_0)?;
        Ok(self)
    }
}

/// How a configured dispersive shift is to be read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChiConvention {
    /// χ is the state-dependent pull ±χ of the resonator (default).
    #[default]
    HalfShift,
    /// The configured value is the full separation 2χ between the two
    /// qubit-state resonator frequencies.
    FullShift,
}

/// Readout resonator parameters, all cyclic.
#[derive(Debug, Clone, PartialEq)]
pub struct ResonatorParams {
    f_r: f64,
    kappa_over_2pi: f64,
    chi_over_2pi: f64,
    convention: ChiConvention,
}

impl ResonatorParams {
    pub fn new(f_r: f64, kappa_over_2pi: f64, chi_over_2pi: f64) -> Result<Self> {
        Self::with_convention(f_r, kappa_over_2pi, chi_over_2pi, ChiConvention::HalfShift)
    }

    pub fn with_convention(
        f_r: f64,
        kappa_over_2pi: f64,
        chi_over_2pi: f64,
        convention: ChiConvention,
    ) -> Result<Self> {
        if chi_over_2pi == 0.0 || chi_over_2pi.is_nan() {
            return Err(Error::Domain {
                name: "chi_2pi_hz",
                value: chi_over_2pi,
                reason: "dispersive shift must be non-zero",
            });
        }
        Ok(Self {
            f_r: positive("f_r_hz", f_r)?,
            kappa_over_2pi: positive("kappa_2pi_hz", kappa_over_2pi)?,
            chi_over_2pi,
            convention,
        })
    }

    pub fn f_r(&self) -> f64 {
        self.f_r
    }

    pub fn kappa_over_2pi(&self) -> f64 {
        self.kappa_over_2pi
    }

    /// Dispersive shift as configured (before convention handling).
    pub fn chi_over_2pi(&self) -> f64 {
        self.chi_over_2pi
    }

    pub fn convention(&self) -> ChiConvention {
        self.convention
    }

    /// Resonator energy decay rate γ, rad/s.
    pub fn gamma(&self) -> f64 {
        angular(self.kappa_over_2pi)
    }

    /// Half-shift dispersive coupling χ, rad/s.
    pub fn chi(&self) -> f64 {
        match self.convention {
            ChiConvention::HalfShift => angular(self.chi_over_2pi),
            ChiConvention::FullShift => angular(self.chi_over_2pi) / 2.0,
        }
    }

    /// Loaded quality factor ω_R / γ.
    pub fn quality_factor(&self) -> f64 {
        self.f_r / self.kappa_over_2pi
    }
}

/// Qubit quality factor Q1 = 2π·f_q·T1.
pub fn quality_factor(f_q: f64, t1: f64) -> Result<f64> {
    Ok(angular(positive("f_q", f_q)?) * positive("t1", t1)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;
    use proptest::prelude::*;

    #[test]
    fn quality_factor_examples() {
        assert!((quality_factor(1.0 / (2.0 * PI), 1.0).unwrap() - 1.0).abs() < 1e-15);
        let q = quality_factor(18.474e9, 1.6e-6).unwrap();
        // 2π · 18.474e9 · 1.6e-6 = 185720.9045...
        assert!(((q - 1.857_209_045_837_371e5) / q).abs() < 1e-12);
        assert!(quality_factor(0.0, 1.0).is_err());
        assert!(quality_factor(1.0, -1.0).is_err());
    }

    #[test]
    fn mean_q1_of_a_k_band_table_is_order_1e5() {
        // Representative (f, T1) pairs spanning the measured band.
        let table = [
            (18.474e9, 1.6e-6),
            (19.8e9, 0.5e-6),
            (20.9e9, 0.45e-6),
            (21.6e9, 0.52e-6),
            (22.8e9, 0.4e-6),
            (23.9e9, 0.35e-6),
        ];
        let mean: f64 = table
            .iter()
            .map(|&(f, t)| quality_factor(f, t).unwrap())
            .sum::<f64>()
            / table.len() as f64;
        assert!(mean > 0.5e5 && mean < 1.2e5, "mean Q1 {mean}");
    }

    #[test]
    fn bcs_gap() {
        let nb = SuperconductorMaterial::niobium();
        let expected = 1.764 * BOLTZMANN * 9.2;
        assert!(((nb.gap0() - expected) / expected).abs() < 1e-9);
        assert!(SuperconductorMaterial::from_tc("x", 0.0).is_err());
        assert!(SuperconductorMaterial::with_gap("x", 1.0, -1.0).is_err());
    }

    #[test]
    fn qubit_validation() {
        let nb = SuperconductorMaterial::niobium();
        assert!(QubitParams::new(20e9, -200e6, 1e-6, 5e-6, nb.clone()).is_ok());
        assert!(QubitParams::new(20e9, -200e6, f64::INFINITY, f64::INFINITY, nb.clone()).is_ok());
        assert!(QubitParams::new(20e9, -30e9, 1e-6, 5e-6, nb.clone()).is_err());
        assert!(QubitParams::new(-1.0, 0.0, 1e-6, 5e-6, nb.clone()).is_err());
        assert!(QubitParams::new(20e9, 0.0, 0.0, 5e-6, nb).is_err());
    }

    #[test]
    fn resonator_chi_conventions() {
        let half = ResonatorParams::new(21e9, 5e6, 2e6).unwrap();
        let full =
            ResonatorParams::with_convention(21e9, 5e6, 4e6, ChiConvention::FullShift).unwrap();
        assert!((half.chi() - full.chi()).abs() < 1e-9);
        assert!(ResonatorParams::new(21e9, 5e6, 0.0).is_err());
        assert!(ResonatorParams::new(21e9, 0.0, 1e6).is_err());
        assert!((half.quality_factor() - 4200.0).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn quality_factor_is_bilinear(f in 1e6f64..1e11, t in 1e-9f64..1e-3, k in 0.01f64..100.0) {
            let q = quality_factor(f, t).unwrap();
            let qf = quality_factor(k * f, t).unwrap();
            let qt = quality_factor(f, k * t).unwrap();
            prop_assert!(((qf - k * q) / (k * q)).abs() < 1e-14);
            prop_assert!(((qt - k * q) / (k * q)).abs() < 1e-14);
        }
    }
}
