//! Run configuration: a TOML file with one table per subcommand, plus
//! dotted `--set key=value` overrides applied before deserialization.

use std::fs;
use std::path::{Path, PathBuf};

use hotqubit::{
    constants::ELECTRON_VOLT, ChiConvention, QubitParams, ResonatorParams, SuperconductorMaterial,
    ThermalModel,
};
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::error::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    pub output_dir: PathBuf,
    pub device: DeviceConfig,
    pub thermal: ThermalConfig,
    pub pulse: PulseConfig,
    pub sweep: SweepConfig,
    pub fit: FitConfig,
    pub synth: SynthConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            output_dir: PathBuf::from("hotqubit-out"),
            device: DeviceConfig::default(),
            thermal: ThermalConfig::default(),
            pulse: PulseConfig::default(),
            sweep: SweepConfig::default(),
            fit: FitConfig::default(),
            synth: SynthConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DeviceConfig {
    pub f_ge_hz: f64,
    pub alpha_hz: f64,
    pub t1_0_s: f64,
    pub t2_0_s: f64,
    pub f_r_hz: f64,
    pub kappa_2pi_hz: f64,
    pub chi_2pi_hz: f64,
    /// `Nb`, `Al`, or any label when `tc_k` is given.
    pub material: String,
    pub tc_k: Option<f64>,
    /// Overrides the BCS gap derived from `tc_k`.
    pub gap_ev: Option<f64>,
    pub chi_convention: ChiConventionConfig,
}

impl Default for DeviceConfig {
    fn default() -> Self {
        Self {
            f_ge_hz: 20.0e9,
            alpha_hz: -200.0e6,
            t1_0_s: 1.6e-6,
            t2_0_s: 3.8e-6,
            f_r_hz: 21.0e9,
            kappa_2pi_hz: 5.0e6,
            chi_2pi_hz: 2.0e6,
            material: "Nb".into(),
            tc_k: None,
            gap_ev: None,
            chi_convention: ChiConventionConfig::Half,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ChiConventionConfig {
    Half,
    Full,
}

impl DeviceConfig {
    pub fn material(&self) -> Result<SuperconductorMaterial, CliError> {
        let tc = match (self.tc_k, self.material.as_str()) {
            (Some(tc), _) => tc,
            (None, "Nb" | "nb" | "niobium") => SuperconductorMaterial::NIOBIUM_TC,
            (None, "Al" | "al" | "aluminum" | "aluminium") => SuperconductorMaterial::ALUMINUM_TC,
            (None, other) => {
                return Err(CliError::input(format!(
                    "device.material: unknown material {other:?}; set device.tc_k"
                )))
            }
        };
        let m = match self.gap_ev {
            Some(ev) => SuperconductorMaterial::with_gap(&self.material, tc, ev * ELECTRON_VOLT)?,
            None => SuperconductorMaterial::from_tc(&self.material, tc)?,
        };
        Ok(m)
    }

    pub fn model(&self) -> Result<ThermalModel, CliError> {
        let qubit = QubitParams::new(
            self.f_ge_hz,
            self.alpha_hz,
            self.t1_0_s,
            self.t2_0_s,
            self.material()?,
        )?;
        let convention = match self.chi_convention {
            ChiConventionConfig::Half => ChiConvention::HalfShift,
            ChiConventionConfig::Full => ChiConvention::FullShift,
        };
        let resonator = ResonatorParams::with_convention(
            self.f_r_hz,
            self.kappa_2pi_hz,
            self.chi_2pi_hz,
            convention,
        )?;
        Ok(ThermalModel::new(qubit, resonator))
    }
}

/// Evenly spaced grid `[min, max]` with `points` samples, or explicit values.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Grid {
    Values(Vec<f64>),
    Linear {
        min: f64,
        max: f64,
        points: usize,
    },
    Log {
        log_min: f64,
        log_max: f64,
        points: usize,
    },
}

impl Grid {
    pub fn values(&self, name: &str) -> Result<Vec<f64>, CliError> {
        let span = |lo: f64, hi: f64, n: usize| -> Result<Vec<f64>, CliError> {
            if n == 0 || !lo.is_finite() || !hi.is_finite() || (n > 1 && hi <= lo) {
                return Err(CliError::input(format!(
                    "{name}: need finite min < max and points > 0"
                )));
            }
            if n == 1 {
                return Ok(vec![lo]);
            }
            let step = (hi - lo) / (n - 1) as f64;
            Ok((0..n)
                .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
                .collect())
        };
        match self {
            Grid::Values(v) if v.is_empty() => Err(CliError::input(format!("{name}: empty list"))),
            Grid::Values(v) => Ok(v.clone()),
            Grid::Linear { min, max, points } => span(*min, *max, *points),
            Grid::Log {
                log_min,
                log_max,
                points,
            } => {
                if *log_min <= 0.0 {
                    return Err(CliError::input(format!("{name}: log_min must be positive")));
                }
                Ok(span(log_min.ln(), log_max.ln(), *points)?
                    .into_iter()
                    .map(f64::exp)
                    .collect())
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ThermalConfig {
    pub temperatures_k: Grid,
    /// Fixed T1 in the T2 composition; the T1(T) model when absent.
    pub t1_fixed_s: Option<f64>,
}

impl Default for ThermalConfig {
    fn default() -> Self {
        Self {
            temperatures_k: Grid::Values(vec![
                0.0, 0.02, 0.05, 0.08, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4,
            ]),
            t1_fixed_s: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum AxisConfig {
    Amplitude,
    Length,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum PhaseModeConfig {
    Normalized,
    Literal,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PulseConfig {
    pub sigma_s: f64,
    pub n_trunc: f64,
    /// Effective Rabi rate held fixed on the length axis.
    pub omega_eff_hz: f64,
    pub axis: AxisConfig,
    pub phase_mode: PhaseModeConfig,
    /// Swept values: `Ω_eff` in Hz (amplitude axis) or σ in s (length axis).
    pub swept: Grid,
    pub detuning_hz: Grid,
}

impl Default for PulseConfig {
    fn default() -> Self {
        Self {
            sigma_s: 10e-9,
            n_trunc: 3.0,
            omega_eff_hz: 50e6,
            axis: AxisConfig::Amplitude,
            phase_mode: PhaseModeConfig::Normalized,
            swept: Grid::Linear {
                min: 0.0,
                max: 200e6,
                points: 200,
            },
            detuning_hz: Grid::Linear {
                min: -100e6,
                max: 100e6,
                points: 201,
            },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub f_hz: Grid,
    pub t_k: Grid,
    pub q_readout: f64,
    /// Bounds on χ/γ searched for the most damaging dispersive shift.
    pub chi_over_gamma: (f64, f64),
    pub resonator_offset_hz: f64,
    pub search_points: usize,
    /// T2 threshold for the maximum-operating-temperature column.
    pub threshold_s: Option<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            f_hz: Grid::Linear {
                min: 10e9,
                max: 100e9,
                points: 50,
            },
            t_k: Grid::Linear {
                min: 0.05,
                max: 1.5,
                points: 50,
            },
            q_readout: 3.0e6,
            chi_over_gamma: (0.3, 5.0),
            resonator_offset_hz: 0.0,
            search_points: 33,
            threshold_s: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct FitConfig {
    /// Overrides the kind declared in the trace header.
    pub kind: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthConfig {
    pub kind: String,
    pub points: usize,
    /// Gaussian noise standard deviation, absolute.
    pub noise: f64,
    pub amplitude: f64,
    pub offset: f64,
    /// Decay time T1 or T2, s.
    pub tau_s: f64,
    pub f_osc_hz: f64,
    pub x_max: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            kind: "decay".into(),
            points: 20,
            noise: 0.02,
            amplitude: 1.0,
            offset: 0.0,
            tau_s: 1e-6,
            f_osc_hz: 5e6,
            x_max: 5e-6,
        }
    }
}

impl RunConfig {
    /// Reads `path` (if any), applies overrides in order, and deserializes.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self, CliError> {
        let mut table = match path {
            Some(p) => {
                let text = fs::read_to_string(p)
                    .map_err(|e| CliError::input(format!("{}: {e}", p.display())))?;
                text.parse::<Table>()
                    .map_err(|e| CliError::input(format!("{}: {e}", p.display())))?
            }
            None => Table::new(),
        };
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| CliError::input(format!("config: {e}")))
    }
}

/// `a.b.c=value`; the value is parsed as a TOML literal, falling back to a string.
pub fn apply_override(table: &mut Table, spec: &str) -> Result<(), CliError> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| CliError::input(format!("--set {spec:?}: expected key=value")))?;
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(CliError::input(format!(
            "--set {spec:?}: empty key segment"
        )));
    }
    let value = parse_literal(raw.trim());
    let (last, parents) = path
        .split_last()
        .expect("split yields at least one segment");
    let mut cur = table;
    for p in parents {
        let entry = cur
            .entry((*p).to_string())
            .or_insert_with(|| Value::Table(Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| CliError::input(format!("--set {spec:?}: {p} is not a table")))?;
    }
    cur.insert((*last).to_string(), value);
    Ok(())
}

fn parse_literal(raw: &str) -> Value {
    format!("v = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()))
}
