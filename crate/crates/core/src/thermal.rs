//! Temperature-dependent coherence: resonator thermal photons, dispersive
//! dephasing, quasiparticle tunneling, and the composite T1(T), T2(T).
//!
//! Rates are angular (1/s of phase or population decay); inputs in Hz are
//! converted at the call boundary. Temperatures below
//! [`TEMPERATURE_FLOOR`] are evaluated as their zero-temperature limits.

use core::f64::consts::PI;

use libm::{exp, expm1, log, tanh};
use num_complex::Complex64;

use crate::constants::{BOLTZMANN, HBAR, PLANCK, TEMPERATURE_FLOOR};
use crate::device::{QubitParams, ResonatorParams};
use crate::error::{non_negative, positive, Error, Result};
use crate::special::{bessel_k0e, bessel_k1e};

/// Exponent above which `e^{-x}` is treated as zero.
const UNDERFLOW_EXPONENT: f64 = 700.0;

/// Effective temperature beyond which [`effective_temperature`] reports overflow.
pub const EFFECTIVE_TEMPERATURE_CAP: f64 = 1e6;

/// Parameter bundle for all temperature-dependent predictions.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalModel {
    pub qubit: QubitParams,
    pub resonator: ResonatorParams,
}

impl ThermalModel {
    pub fn new(qubit: QubitParams, resonator: ResonatorParams) -> Self {
        Self { qubit, resonator }
    }
}

/// Which relaxation time enters the T2 composition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum T1Source {
    /// A fixed value, typically the low-temperature average.
    Fixed(f64),
    /// [`t1_of_temperature`] evaluated at the same temperature.
    Model,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherencePrediction {
    pub temperature: f64,
    pub t1: f64,
    pub t2: f64,
    pub gamma_phi: f64,
    pub n_th: f64,
}

/// Bose–Einstein occupation of a mode at `f` (Hz) and `t` (K).
pub fn thermal_occupation(f: f64, t: f64) -> Result<f64> {
    positive("frequency", f)?;
    non_negative("temperature", t)?;
    if t < TEMPERATURE_FLOOR {
        return Ok(0.0);
    }
    let x = PLANCK * f / (BOLTZMANN * t);
    if x > UNDERFLOW_EXPONENT {
        return Ok(0.0);
    }
    Ok(1.0 / expm1(x))
}

/// Pure dephasing rate from thermal photons in a dispersively coupled
/// readout resonator.
///
/// `chi` and `gamma` are angular rates. Evaluates
/// `(γ/2)·Re[√((1 + 2iχ/γ)² + 8iχ·n/γ) − 1]` on the principal branch, in the
/// algebraically equivalent form `(γ/2)·Re[d / (√(u² + d) + u)]` with
/// `u = 1 + 2iχ/γ`, `d = 8iχn/γ`, which avoids cancellation for small `n`.
pub fn gamma_phi(chi: f64, gamma: f64, n_th: f64) -> Result<f64> {
    positive("gamma", gamma)?;
    non_negative("n_th", n_th)?;
    if !chi.is_finite() {
        return Err(Error::Domain {
            name: "chi",
            value: chi,
            reason: "must be finite",
        });
    }
    let c = chi / gamma;
    let u = Complex64::new(1.0, 2.0 * c);
    let d = Complex64::new(0.0, 8.0 * c * n_th);
    let root = (u * u + d).sqrt();
    let rate = 0.5 * gamma * (d / (root + u)).re;
    Ok(rate.max(0.0))
}

/// Thermal-quasiparticle relaxation rate Γ_qp (1/s).
///
/// `(4ω/π)·e^{−Δ/kT}·cosh(x)·(K0(x) + (ħω/4Δ)·K1(x))` with `x = ħω/2kT`.
/// The product `cosh(x)·K_ν(x)` is formed from the scaled Bessel functions
/// so it stays finite for large `x`.
pub fn qp_rate(omega_q: f64, gap0: f64, t: f64) -> Result<f64> {
    positive("omega_q", omega_q)?;
    positive("gap", gap0)?;
    positive("temperature", t)?;
    if t < TEMPERATURE_FLOOR {
        return Ok(0.0);
    }
    let kt = BOLTZMANN * t;
    let gap_ratio = gap0 / kt;
    let x = HBAR * omega_q / (2.0 * kt);
    if gap_ratio > UNDERFLOW_EXPONENT || x > UNDERFLOW_EXPONENT {
        return Ok(0.0);
    }
    // cosh(x)·K(x) = ½(1 + e^{−2x})·e^{x}K(x)
    let cosh_scaled = 0.5 * (1.0 + exp(-2.0 * x));
    let bessel = bessel_k0e(x) + HBAR * omega_q / (4.0 * gap0) * bessel_k1e(x);
    Ok(4.0 * omega_q / PI * exp(-gap_ratio) * cosh_scaled * bessel)
}

/// Quasiparticle-limited lifetime `1 / Γ_qp`; `+inf` when the rate is negligible.
pub fn t_qp(omega_q: f64, gap0: f64, t: f64) -> Result<f64> {
    let rate = qp_rate(omega_q, gap0, t)?;
    Ok(if rate > 0.0 {
        1.0 / rate
    } else {
        f64::INFINITY
    })
}

/// Environmental heating term `(1 + coth(ħω/2kT)) / T1,0`.
pub fn heating_rate(omega_q: f64, t1_0: f64, t: f64) -> Result<f64> {
    positive("omega_q", omega_q)?;
    positive("t1_0", t1_0)?;
    non_negative("temperature", t)?;
    let coth = if t < TEMPERATURE_FLOOR {
        1.0
    } else {
        let x = HBAR * omega_q / (2.0 * BOLTZMANN * t);
        if x > 20.0 {
            1.0
        } else {
            1.0 / tanh(x)
        }
    };
    Ok((1.0 + coth) / t1_0)
}

/// Relaxation time at temperature `t` including heating and quasiparticles.
///
/// Tends to `T1,0 / 2` at low temperature and returns that limit at `T = 0`;
/// see [`t1_0_from_plateau`].
pub fn t1_of_temperature(t: f64, m: &ThermalModel) -> Result<f64> {
    let omega = m.qubit.omega_ge();
    let qp = if t == 0.0 {
        0.0
    } else {
        qp_rate(omega, m.qubit.material().gap0(), t)?
    };
    Ok(1.0 / (heating_rate(omega, m.qubit.t1_0(), t)? + qp))
}

/// `T1,0` that reproduces a measured low-temperature T1 plateau.
pub fn t1_0_from_plateau(t1_measured: f64) -> Result<f64> {
    Ok(2.0 * positive("t1", t1_measured)?)
}

/// Resonator thermal-photon dephasing for the model at temperature `t`.
pub fn resonator_dephasing(t: f64, m: &ThermalModel) -> Result<(f64, f64)> {
    let n = thermal_occupation(m.resonator.f_r(), t)?;
    let g = gamma_phi(m.resonator.chi(), m.resonator.gamma(), n)?;
    Ok((g, n))
}

/// Full prediction at one temperature.
pub fn predict(t: f64, m: &ThermalModel, t1_source: T1Source) -> Result<CoherencePrediction> {
    non_negative("temperature", t)?;
    let t1_model = t1_of_temperature(t, m)?;
    let t1_used = match t1_source {
        T1Source::Fixed(v) => positive("t1", v)?,
        T1Source::Model => t1_model,
    };
    let (g, n) = resonator_dephasing(t, m)?;
    let t2 = 1.0 / (g + 1.0 / m.qubit.t2_0() + 1.0 / (2.0 * t1_used));
    Ok(CoherencePrediction {
        temperature: t,
        t1: t1_model,
        t2,
        gamma_phi: g,
        n_th: n,
    })
}

/// Dephasing time `1/T2 = Γφ + 1/T2,0 + 1/(2·T1)`.
pub fn t2_of_temperature(t: f64, m: &ThermalModel, t1_source: T1Source) -> Result<f64> {
    Ok(predict(t, m, t1_source)?.t2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DephasingExtraction {
    pub gamma_phi: f64,
    /// The raw difference was negative and has been clamped to zero.
    pub clamped: bool,
}

/// Pure dephasing from measured T2 and T1: `max(0, 1/T2 − 1/(2T1) − 1/T2,0)`.
pub fn pure_dephasing_extract(t2: f64, t1: f64, t2_0: f64) -> Result<DephasingExtraction> {
    positive("t2", t2)?;
    positive("t1", t1)?;
    positive("t2_0", t2_0)?;
    let raw = 1.0 / t2 - 1.0 / (2.0 * t1) - 1.0 / t2_0;
    Ok(DephasingExtraction {
        gamma_phi: raw.max(0.0),
        clamped: raw < 0.0,
    })
}

/// Two-level Boltzmann excited-state population.
pub fn thermal_population(f_q: f64, t: f64) -> Result<f64> {
    positive("frequency", f_q)?;
    positive("temperature", t)?;
    if t < TEMPERATURE_FLOOR {
        return Ok(0.0);
    }
    let x = PLANCK * f_q / (BOLTZMANN * t);
    if x > UNDERFLOW_EXPONENT {
        return Ok(0.0);
    }
    Ok(1.0 / (1.0 + exp(x)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveTemperature {
    pub kelvin: f64,
    /// Set when the temperature exceeds [`EFFECTIVE_TEMPERATURE_CAP`].
    pub overflow: bool,
}

/// Inverse of [`thermal_population`]: `T = h·f / (k_B·ln((1 − p)/p))`.
pub fn effective_temperature(f_q: f64, p_e: f64) -> Result<EffectiveTemperature> {
    positive("frequency", f_q)?;
    if !(p_e > 0.0 && p_e < 0.5) {
        return Err(Error::Domain {
            name: "p_e",
            value: p_e,
            reason: "population must lie in (0, 0.5)",
        });
    }
    let kelvin = PLANCK * f_q / (BOLTZMANN * log((1.0 - p_e) / p_e));
    Ok(EffectiveTemperature {
        kelvin,
        overflow: !(kelvin <= EFFECTIVE_TEMPERATURE_CAP),
    })
}

/// Lowest temperature in `[lo, hi]` at which the quasiparticle rate reaches
/// the heating term `(1 + coth)/T1,0`, found by bisection to 0.1 mK.
pub fn qp_dominance_temperature(
    omega_q: f64,
    gap0: f64,
    t1_0: f64,
    lo: f64,
    hi: f64,
) -> Result<f64> {
    let excess = |t: f64| -> Result<f64> {
        Ok(qp_rate(omega_q, gap0, t)? - heating_rate(omega_q, t1_0, t)?)
    };
    let (mut a, mut b) = (positive("temperature", lo)?, positive("temperature", hi)?);
    if excess(a)? >= 0.0 || excess(b)? < 0.0 {
        return Err(Error::OutOfRange {
            what: "quasiparticle dominance",
            lo,
            hi,
        });
    }
    while b - a > 1e-4 {
        let mid = 0.5 * (a + b);
        if excess(mid)? >= 0.0 {
            b = mid;
        } else {
            a = mid;
        }
    }
    Ok(0.5 * (a + b))
}
