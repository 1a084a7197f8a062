//! Least-squares extraction of coherence parameters from measured traces,
//! plus the fluctuation statistics used to characterize them.

mod lm;
mod models;
mod overlay;
mod stats;

use alloc::string::String;
use alloc::vec::Vec;

use libm::sqrt;

use crate::error::{Error, Result};

pub use self::models::{
    evaluate, fit_damped_sinusoid, fit_exp_decay, fit_rabi, fit_trace, VISIBILITY_THRESHOLD,
};
pub use self::overlay::{overlay_thermal_model, Overlay, OverlayPoint};
pub use self::stats::{
    population_from_ef_amplitudes, t1_fluctuation_stats, windowed_error_rate, FluctuationStats,
};

pub const MIN_POINTS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TraceKind {
    Decay,
    Ramsey,
    Echo,
    RabiAmplitude,
    TemperatureSweep,
}

impl TraceKind {
    /// Kinds whose abscissa is a time axis and must be strictly increasing.
    pub fn is_time_like(self) -> bool {
        matches!(self, TraceKind::Decay | TraceKind::Ramsey | TraceKind::Echo)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TraceKind::Decay => "decay",
            TraceKind::Ramsey => "ramsey",
            TraceKind::Echo => "echo",
            TraceKind::RabiAmplitude => "rabi_amplitude",
            TraceKind::TemperatureSweep => "temperature_sweep",
        }
    }
}

impl core::str::FromStr for TraceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "decay" => TraceKind::Decay,
            "ramsey" => TraceKind::Ramsey,
            "echo" => TraceKind::Echo,
            "rabi_amplitude" => TraceKind::RabiAmplitude,
            "temperature_sweep" => TraceKind::TemperatureSweep,
            _ => return Err(Error::Invalid("unknown trace kind")),
        })
    }
}

/// A measured curve `y(x)` with optional per-point uncertainties.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    x: Vec<f64>,
    y: Vec<f64>,
    sigma_y: Option<Vec<f64>>,
    kind: TraceKind,
}

impl Trace {
    pub fn new(
        kind: TraceKind,
        x: Vec<f64>,
        y: Vec<f64>,
        sigma_y: Option<Vec<f64>>,
    ) -> Result<Self> {
        if x.len() != y.len() || sigma_y.as_ref().is_some_and(|s| s.len() != x.len()) {
            return Err(Error::Invalid("trace columns differ in length"));
        }
        if x.len() < MIN_POINTS {
            return Err(Error::InsufficientData {
                needed: MIN_POINTS,
                got: x.len(),
            });
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::Invalid("trace contains non-finite values"));
        }
        if let Some(s) = &sigma_y {
            if s.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
                return Err(Error::Invalid("sigma_y must be positive and finite"));
            }
        }
        if kind.is_time_like() && x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Invalid("time axis must be strictly increasing"));
        }
        Ok(Self {
            x,
            y,
            sigma_y,
            kind,
        })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn sigma_y(&self) -> Option<&[f64]> {
        self.sigma_y.as_deref()
    }

    pub fn kind(&self) -> TraceKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    fn weight(&self, i: usize) -> f64 {
        self.sigma_y.as_ref().map_or(1.0, |s| 1.0 / s[i])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FitWarning {
    /// The abscissa was re-sorted before fitting.
    Resorted,
    /// The covariance could not be formed.
    SingularCovariance,
    /// The data carry no measurable signal for this model.
    Degenerate(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub names: Vec<&'static str>,
    pub values: Vec<f64>,
    /// Row-major `names.len()²` matrix; all NaN when unavailable.
    pub covariance: Vec<f64>,
    pub reduced_chi2: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Quantities computed from the fitted parameters.
    pub derived: Vec<(&'static str, f64)>,
    pub warnings: Vec<FitWarning>,
}

impl FitResult {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.names
            .iter()
            .position(|n| *n == name)
            .map(|i| self.values[i])
            .or_else(|| {
                self.derived
                    .iter()
                    .find(|(n, _)| *n == name)
                    .map(|(_, v)| *v)
            })
    }

    /// One-standard-deviation uncertainty of a fitted parameter.
    pub fn std_error(&self, name: &str) -> Option<f64> {
        let n = self.names.len();
        let i = self.names.iter().position(|x| *x == name)?;
        Some(sqrt(self.covariance[i * n + i]))
    }

    fn from_outcome(
        names: &[&'static str],
        out: lm::Outcome,
        points: usize,
        weighted: bool,
    ) -> Self {
        let n = names.len();
        let dof = points.saturating_sub(n).max(1) as f64;
        let reduced_chi2 = out.cost / dof;
        let mut warnings = Vec::new();
        let covariance = match out.normal_inverse {
            Some(inv) => {
                let scale = if weighted { 1.0 } else { reduced_chi2 };
                inv.into_iter().map(|v| v * scale).collect()
            }
            None => {
                warnings.push(FitWarning::SingularCovariance);
                alloc::vec![f64::NAN; n * n]
            }
        };
        let converged = out.converged && !warnings.contains(&FitWarning::SingularCovariance);
        Self {
            names: names.to_vec(),
            values: out.params,
            covariance,
            reduced_chi2,
            converged,
            iterations: out.iterations,
            derived: Vec::new(),
            warnings,
        }
    }
}

fn require_kind(trace: &Trace, allowed: &[TraceKind]) -> Result<()> {
    if allowed.contains(&trace.kind) {
        Ok(())
    } else {
        Err(Error::Invalid("trace kind does not match the fitted model"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn trace_validation() {
        let x = vec![0.0, 1.0, 2.0, 3.0];
        let y = vec![1.0, 0.5, 0.2, 0.1];
        assert!(Trace::new(TraceKind::Decay, x.clone(), y.clone(), None).is_ok());
        assert!(Trace::new(TraceKind::Decay, x[..3].to_vec(), y[..3].to_vec(), None).is_err());
        assert!(Trace::new(TraceKind::Decay, x.clone(), y[..3].to_vec(), None).is_err());
        assert!(Trace::new(TraceKind::Decay, vec![0.0, 2.0, 1.0, 3.0], y.clone(), None).is_err());
        assert!(Trace::new(
            TraceKind::RabiAmplitude,
            vec![0.0, 2.0, 1.0, 3.0],
            y.clone(),
            None
        )
        .is_ok());
        assert!(Trace::new(
            TraceKind::Decay,
            x.clone(),
            y.clone(),
            Some(vec![0.1, 0.0, 0.1, 0.1])
        )
        .is_err());
        assert!(Trace::new(TraceKind::Decay, x, vec![1.0, f64::NAN, 0.0, 0.0], None).is_err());
    }

    #[test]
    fn kind_round_trip() {
        for k in [
            TraceKind::Decay,
            TraceKind::Ramsey,
            TraceKind::Echo,
            TraceKind::RabiAmplitude,
            TraceKind::TemperatureSweep,
        ] {
            assert_eq!(k.as_str().parse::<TraceKind>().unwrap(), k);
        }
        assert!("t1".parse::<TraceKind>().is_err());
    }
}
