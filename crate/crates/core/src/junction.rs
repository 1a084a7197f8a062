//! Josephson junction electrical relations and lowest-order transmon
//! estimates.
//!
//! Unit conventions follow the lab: critical current density in A/cm²,
//! junction area in µm², oxygen exposure in mbar·s.

use alloc::vec::Vec;
use core::f64::consts::PI;

use libm::{exp, log, sqrt};

use crate::constants::{ELEMENTARY_CHARGE, FLUX_QUANTUM, PLANCK};
use crate::error::{positive, Error, Result};
use crate::sq;

const CM2_PER_UM2: f64 = 1e-8;

/// E_J/E_C below which the transmon expressions are not trusted.
pub const TRANSMON_RATIO_MIN: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JunctionGeometry {
    /// Junction area, µm².
    pub area: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JunctionProcess {
    /// Critical current density, A/cm².
    pub jc: f64,
    /// Oxygen exposure E = P_O2·t, mbar·s.
    pub exposure: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmonDesign {
    /// Josephson inductance, H.
    pub l_j: f64,
    /// Total shunt capacitance, F.
    pub c_sigma: f64,
}

impl TransmonDesign {
    pub fn new(l_j: f64, c_sigma: f64) -> Result<Self> {
        Ok(Self {
            l_j: positive("l_j", l_j)?,
            c_sigma: positive("c_sigma", c_sigma)?,
        })
    }

    /// Design hitting a target transition frequency and anharmonicity
    /// magnitude (both Hz) under the lowest-order transmon expressions.
    pub fn for_target(f_ge: f64, anharmonicity: f64) -> Result<Self> {
        let f_ge = positive("f_ge", f_ge)?;
        let ec = PLANCK * positive("anharmonicity", anharmonicity.abs())?;
        // f_ge·h = √(8 E_J E_C) − E_C
        let ej = sq(PLANCK * f_ge + ec) / (8.0 * ec);
        Self::new(
            sq(FLUX_QUANTUM / (2.0 * PI)) / ej,
            ELEMENTARY_CHARGE * ELEMENTARY_CHARGE / (2.0 * ec),
        )
    }

    pub fn josephson_energy(&self) -> f64 {
        sq(FLUX_QUANTUM / (2.0 * PI)) / self.l_j
    }

    pub fn charging_energy(&self) -> f64 {
        ELEMENTARY_CHARGE * ELEMENTARY_CHARGE / (2.0 * self.c_sigma)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmonEstimate {
    /// Transition frequency, Hz.
    pub f_ge: f64,
    /// Anharmonicity f_ef − f_ge, Hz (negative).
    pub alpha: f64,
    pub ej_over_ec: f64,
    /// False when E_J/E_C < [`TRANSMON_RATIO_MIN`].
    pub in_transmon_regime: bool,
}

/// Critical current `Ic = Jc·A` in amperes.
pub fn critical_current(jc: f64, area: f64) -> Result<f64> {
    Ok(positive("jc", jc)? * positive("area", area)? * CM2_PER_UM2)
}

/// Josephson inductance `L_J = Φ0 / (2π·Ic)`.
pub fn josephson_inductance(ic: f64) -> Result<f64> {
    Ok(FLUX_QUANTUM / (2.0 * PI * positive("ic", ic)?))
}

/// Zero-temperature Ambegaokar–Baratoff critical current `πΔ / (2e·Rn)`.
pub fn ic_from_resistance(rn: f64, gap0: f64) -> Result<f64> {
    Ok(PI * positive("gap", gap0)? / (2.0 * ELEMENTARY_CHARGE * positive("rn", rn)?))
}

/// Lowest-order transmon frequency and anharmonicity.
pub fn transmon_from_design(d: &TransmonDesign) -> Result<TransmonEstimate> {
    positive("l_j", d.l_j)?;
    positive("c_sigma", d.c_sigma)?;
    let ej = d.josephson_energy();
    let ec = d.charging_energy();
    let ratio = ej / ec;
    Ok(TransmonEstimate {
        f_ge: (sqrt(8.0 * ej * ec) - ec) / PLANCK,
        alpha: -ec / PLANCK,
        ej_over_ec: ratio,
        in_transmon_regime: ratio >= TRANSMON_RATIO_MIN,
    })
}

/// Critical current density extracted from room-temperature resistances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaFit {
    /// Jc, A/cm².
    pub jc: f64,
    /// Fitted `L_J·A`, H·µm².
    pub inductance_area: f64,
    /// RMS residual of L_J, H.
    pub rms_residual: f64,
}

/// Fits `L_J = k / A` to junctions given as `(area µm², Rn Ω)`, with `L_J`
/// obtained from `Rn` through the Ambegaokar–Baratoff relation.
pub fn fit_jc_from_resistance(points: &[(f64, f64)], gap0: f64) -> Result<AreaFit> {
    if points.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: points.len(),
        });
    }
    let mut num = 0.0;
    let mut den = 0.0;
    let mut samples = Vec::with_capacity(points.len());
    for &(area, rn) in points {
        let area = positive("area", area)?;
        let l = josephson_inductance(ic_from_resistance(rn, gap0)?)?;
        let inv = 1.0 / area;
        num += l * inv;
        den += inv * inv;
        samples.push((inv, l));
    }
    let k = num / den;
    let ss: f64 = samples.iter().map(|&(inv, l)| sq(l - k * inv)).sum();
    // L_J·A = Φ0 / (2π·Jc) with A in cm²
    let jc = FLUX_QUANTUM / (2.0 * PI * k * CM2_PER_UM2);
    Ok(AreaFit {
        jc,
        inductance_area: k,
        rms_residual: sqrt(ss / points.len() as f64),
    })
}

/// Exponent handling for [`fit_jc_exposure`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExponentMode {
    Free,
    /// `|p|` fixed to the given magnitude; the sign giving the smaller
    /// residual is chosen.
    FixedMagnitude(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    /// `c` in `jc = c·E^p` (A/cm² at E = 1 mbar·s).
    pub prefactor: f64,
    pub exponent: f64,
    /// Covariance of `(c, p)`; the exponent rows are zero in fixed mode.
    pub covariance: [[f64; 2]; 2],
    /// Euclidean norm of the log-space residuals.
    pub residual_norm: f64,
}

impl PowerLawFit {
    pub fn eval(&self, exposure: f64) -> f64 {
        self.prefactor * exp(self.exponent * log(exposure))
    }
}

/// Log-linear least squares `ln jc = ln c + p·ln E` on `(E, jc)` points.
pub fn fit_jc_exposure(points: &[(f64, f64)], mode: ExponentMode) -> Result<PowerLawFit> {
    if points.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: points.len(),
        });
    }
    let logs: Vec<(f64, f64)> = points
        .iter()
        .map(|&(e, j)| Ok((log(positive("exposure", e)?), log(positive("jc", j)?))))
        .collect::<Result<_>>()?;
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let fixed = |p: f64| {
        let ln_c = logs.iter().map(|&(x, y)| y - p * x).sum::<f64>() / n;
        let ss: f64 = logs.iter().map(|&(x, y)| sq(y - ln_c - p * x)).sum();
        (ln_c, ss)
    };
    match mode {
        ExponentMode::Free => {
            let sxx: f64 = logs.iter().map(|&(x, _)| sq(x - mx)).sum();
            if sxx == 0.0 {
                return Err(Error::Invalid("all exposures identical"));
            }
            let sxy: f64 = logs.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
            let p = sxy / sxx;
            let (ln_c, ss) = fixed(p);
            let s2 = ss / (n - 2.0);
            let var_p = s2 / sxx;
            let var_lnc = s2 * (1.0 / n + mx * mx / sxx);
            let cov = -mx * s2 / sxx;
            let c = exp(ln_c);
            Ok(PowerLawFit {
                prefactor: c,
                exponent: p,
                covariance: [[c * c * var_lnc, c * cov], [c * cov, var_p]],
                residual_norm: sqrt(ss),
            })
        }
        ExponentMode::FixedMagnitude(m) => {
            let m = positive("exponent magnitude", m)?;
            let (up, down) = (fixed(m), fixed(-m));
            let (p, (ln_c, ss)) = if down.1 <= up.1 { (-m, down) } else { (m, up) };
            let c = exp(ln_c);
            let var_lnc = ss / (n - 1.0) / n;
            Ok(PowerLawFit {
                prefactor: c,
                exponent: p,
                covariance: [[c * c * var_lnc, 0.0], [0.0, 0.0]],
                residual_norm: sqrt(ss),
            })
        }
    }
}
