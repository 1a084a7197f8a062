//! One function per subcommand. Each writes its files into the configured
//! output directory and returns the path of the JSON envelope.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use hotqubit::device::quality_factor;
use hotqubit::fit::{evaluate, fit_trace, overlay_thermal_model, population_from_ef_amplitudes};
use hotqubit::fit::{FitResult, FitWarning, TraceKind};
use hotqubit::junction::{
    fit_jc_exposure, fit_jc_from_resistance, transmon_from_design, ExponentMode, TransmonDesign,
};
use hotqubit::pulse::{
    chevron_row, pi_pulse_contours, ChevronAxis, ChevronMap, ExtremumKind, PhaseMode, PulseSpec,
};
use hotqubit::sweep::{best_case_row, max_operating_temperature, SweepGrid, SweepSpec};
use hotqubit::thermal::{effective_temperature, predict, thermal_population, T1Source};
use hotqubit::Error as ModelError;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{AxisConfig, PhaseModeConfig, RunConfig};
use crate::error::CliError;
use crate::io;
use crate::output::{float, named, to_value, ResultEnvelope};

fn prepare(cfg: &RunConfig) -> Result<&Path, CliError> {
    fs::create_dir_all(&cfg.output_dir)?;
    Ok(&cfg.output_dir)
}

fn emit<P: Serialize>(cfg: &RunConfig, command: &str, payload: &P) -> Result<PathBuf, CliError> {
    let path = cfg.output_dir.join(format!("{command}.json"));
    ResultEnvelope::new(command, cfg, payload)?.write(&path)?;
    Ok(path)
}

fn warning_text(w: &FitWarning) -> String {
    match w {
        FitWarning::Resorted => "abscissa re-sorted before fitting".into(),
        FitWarning::SingularCovariance => "covariance unavailable (singular normal matrix)".into(),
        FitWarning::Degenerate(s) => format!("degenerate: {s}"),
    }
}

pub fn fit_payload(kind: TraceKind, source: &str, r: &FitResult) -> Value {
    let n = r.names.len();
    json!({
        "kind": kind.as_str(),
        "trace": source,
        "params": named(r.names.iter().map(|k| (k.to_string(), r.get(k).unwrap_or(f64::NAN)))),
        "std_errors": named(r.names.iter().map(|k| (k.to_string(), r.std_error(k).unwrap_or(f64::NAN)))),
        "param_order": r.names,
        "covariance": r.covariance.chunks(n.max(1)).map(|row| row.iter().map(|&v| float(v)).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "derived": named(r.derived.iter().map(|(k, v)| (k.to_string(), *v))),
        "reduced_chi2": float(r.reduced_chi2),
        "converged": r.converged,
        "iterations": r.iterations,
        "warnings": r.warnings.iter().map(warning_text).collect::<Vec<_>>(),
    })
}

pub fn fit(cfg: &RunConfig, trace_path: &Path) -> Result<PathBuf, CliError> {
    let file = io::read_trace(trace_path)?;
    let kind = match (&cfg.fit.kind, file.kind) {
        (Some(k), _) => k
            .parse::<TraceKind>()
            .map_err(|_| CliError::input(format!("fit.kind: unknown trace kind {k:?}")))?,
        (None, Some(k)) => k,
        (None, None) => {
            return Err(CliError::input(format!(
                "{}: no kind in header; pass --kind",
                trace_path.display()
            )))
        }
    };
    let trace = file.into_trace(kind)?;
    let result = fit_trace(&trace)?;
    let dir = prepare(cfg)?;
    let rows: Vec<Vec<f64>> = trace
        .x()
        .iter()
        .zip(trace.y())
        .map(|(&x, &y)| vec![x, y, evaluate(kind, &result, x).unwrap_or(f64::NAN)])
        .collect();
    io::write_table(&dir.join("fit_curve.csv"), &["x", "y_data", "y_fit"], &rows)?;
    let source = trace_path
        .file_name()
        .map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    let path = emit(cfg, "fit", &fit_payload(kind, &source, &result))?;
    if !result.converged {
        return Err(CliError::model(format!(
            "{} fit did not converge; partial result in {}",
            kind.as_str(),
            path.display()
        )));
    }
    Ok(path)
}

#[derive(Serialize)]
struct ThermalRow {
    temperature_k: f64,
    t1_s: f64,
    t2_s: f64,
    gamma_phi_per_s: f64,
    n_th: f64,
}

pub fn thermal(cfg: &RunConfig, overlay: Option<&Path>, refine: bool) -> Result<PathBuf, CliError> {
    let model = cfg.device.model()?;
    let temps = cfg
        .thermal
        .temperatures_k
        .values("thermal.temperatures_k")?;
    let source = match cfg.thermal.t1_fixed_s {
        Some(v) => T1Source::Fixed(v),
        None => T1Source::Model,
    };
    let rows = temps
        .iter()
        .map(|&t| {
            let p = predict(t, &model, source)?;
            Ok(ThermalRow {
                temperature_k: t,
                t1_s: p.t1,
                t2_s: p.t2,
                gamma_phi_per_s: p.gamma_phi,
                n_th: p.n_th,
            })
        })
        .collect::<Result<Vec<_>, ModelError>>()?;
    let dir = prepare(cfg)?;
    io::write_table(
        &dir.join("thermal.csv"),
        &["T", "T1_model", "T2_model", "Gamma_phi", "n_th"],
        &rows
            .iter()
            .map(|r| vec![r.temperature_k, r.t1_s, r.t2_s, r.gamma_phi_per_s, r.n_th])
            .collect::<Vec<_>>(),
    )?;
    let mut payload = json!({
        "t1_source": match source { T1Source::Fixed(_) => "fixed", T1Source::Model => "model" },
        "resonator_quality_factor": float(model.resonator.quality_factor()),
        "rows": to_value(&rows)?,
    });
    if let Some(p) = overlay {
        let data: Vec<(f64, f64, f64)> = io::read_columns(p, 3)?
            .into_iter()
            .map(|r| (r[0], r[1], r[2]))
            .collect();
        let o = overlay_thermal_model(&data, &model, source, refine)?;
        payload["overlay"] = json!({
            "points": o.points.iter().map(|q| json!({
                "temperature_k": float(q.temperature),
                "t1_measured_s": float(q.t1_measured),
                "t2_measured_s": float(q.t2_measured),
                "t1_model_s": float(q.t1_model),
                "t2_model_s": float(q.t2_model),
                "t1_residual": float(q.t1_residual),
                "t2_residual": float(q.t2_residual),
            })).collect::<Vec<_>>(),
            "reduced_chi2": float(o.reduced_chi2),
            "t1_0_s": float(o.model.qubit.t1_0()),
            "t2_0_s": float(o.model.qubit.t2_0()),
            "refinement": o.refinement.as_ref().map(|r| fit_payload(TraceKind::TemperatureSweep, &p.display().to_string(), r)),
        });
    }
    emit(cfg, "thermal", &payload)
}

pub fn chevron(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let pc = &cfg.pulse;
    let swept = pc.swept.values("pulse.swept")?;
    let delta = pc.detuning_hz.values("pulse.detuning_hz")?;
    let axis = match pc.axis {
        AxisConfig::Amplitude => ChevronAxis::Amplitude,
        AxisConfig::Length => ChevronAxis::Length,
    };
    let p0 = PulseSpec::from_effective_rate(pc.omega_eff_hz, pc.sigma_s, pc.n_trunc, 0.0)?;
    let mode = match pc.phase_mode {
        PhaseModeConfig::Normalized => PhaseMode::Normalized,
        PhaseModeConfig::Literal => PhaseMode::Literal,
    };
    let rows = delta
        .par_iter()
        .map(|&d| chevron_row(d, &swept, &p0, axis, mode))
        .collect::<Result<Vec<_>, _>>()?;
    let map = ChevronMap {
        delta,
        swept,
        axis,
        values: rows.concat(),
    };
    let contours = pi_pulse_contours(&map)?;
    let dir = prepare(cfg)?;
    let corner = match axis {
        ChevronAxis::Amplitude => "delta_hz\\omega_eff_hz",
        ChevronAxis::Length => "delta_hz\\sigma_s",
    };
    io::write_matrix(
        &dir.join("chevron.csv"),
        corner,
        &map.delta,
        &map.swept,
        &map.values,
    )?;
    let payload = json!({
        "axis": match axis { ChevronAxis::Amplitude => "amplitude", ChevronAxis::Length => "length" },
        "phase_mode": match mode { PhaseMode::Normalized => "normalized", PhaseMode::Literal => "literal" },
        "sigma_s": float(p0.sigma),
        "n_trunc": float(p0.n_trunc),
        "omega_peak_hz": float(p0.omega_peak),
        "rows": map.delta.len(),
        "cols": map.swept.len(),
        "matrix_file": "chevron.csv",
        "contours": contours.iter().map(|c| json!({
            "kind": match c.kind { ExtremumKind::Maximum => "maximum", ExtremumKind::Minimum => "minimum" },
            "order": c.order,
            "points": c.points.iter().map(|&(x, d)| [float(x), float(d)]).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    });
    emit(cfg, "chevron", &payload)
}

pub fn sweep_spec(cfg: &RunConfig) -> Result<SweepSpec, CliError> {
    let sc = &cfg.sweep;
    let mut spec = SweepSpec::new(
        sc.f_hz.values("sweep.f_hz")?,
        sc.t_k.values("sweep.t_k")?,
        sc.q_readout,
        cfg.device.material()?,
    )?
    .with_chi_range(sc.chi_over_gamma.0, sc.chi_over_gamma.1)?
    .with_resonator_offset(sc.resonator_offset_hz)?;
    spec.search_points = sc.search_points;
    spec.validate()?;
    Ok(spec)
}

pub fn sweep(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let spec = sweep_spec(cfg)?;
    let rows = spec
        .t_grid
        .par_iter()
        .map(|&t| best_case_row(t, &spec))
        .collect::<Result<Vec<_>, _>>()?;
    let grid = SweepGrid::from_rows(rows)?;
    let dir = prepare(cfg)?;
    io::write_matrix(
        &dir.join("sweep.csv"),
        "t_k\\f_hz",
        &spec.t_grid,
        &spec.f_grid,
        &grid.values,
    )?;
    let max_temperature = match cfg.sweep.threshold_s {
        Some(th) => Some(
            spec.f_grid
                .par_iter()
                .map(|&f| match max_operating_temperature(f, th, &spec) {
                    Ok(t) => Ok(float(t)),
                    Err(ModelError::OutOfRange { .. }) => Ok(Value::Null),
                    Err(e) => Err(e),
                })
                .collect::<Result<Vec<_>, _>>()?,
        ),
        None => None,
    };
    let by_row = |v: &[f64]| -> Vec<Vec<Value>> {
        v.chunks(grid.cols)
            .map(|r| r.iter().map(|&x| float(x)).collect())
            .collect()
    };
    let payload = json!({
        "f_hz": spec.f_grid.iter().map(|&v| float(v)).collect::<Vec<_>>(),
        "t_k": spec.t_grid.iter().map(|&v| float(v)).collect::<Vec<_>>(),
        "q_readout": float(spec.q_readout),
        "chi_over_gamma": [float(spec.chi_range.0), float(spec.chi_range.1)],
        "material": spec.material.name(),
        "t2_s": by_row(&grid.values),
        "chi_star_over_gamma": by_row(&grid.argmax_chi),
        "capped_cells": grid.capped.iter().filter(|&&c| c).count(),
        "boundary_cells": grid.at_boundary.iter().filter(|&&c| c).count(),
        "threshold_s": cfg.sweep.threshold_s.map(float),
        "max_operating_temperature_k": max_temperature,
        "matrix_file": "sweep.csv",
    });
    emit(cfg, "sweep", &payload)
}

pub struct JunctionArgs<'a> {
    pub resistance: Option<&'a Path>,
    pub exposure: Option<&'a Path>,
    pub fixed_exponent: Option<f64>,
    pub t1_s: Option<f64>,
}

pub fn junction(cfg: &RunConfig, a: &JunctionArgs) -> Result<PathBuf, CliError> {
    let d = &cfg.device;
    let design = TransmonDesign::for_target(d.f_ge_hz, d.alpha_hz)?;
    let est = transmon_from_design(&design)?;
    let mut payload = json!({
        "design": {
            "f_ge_hz": float(d.f_ge_hz),
            "alpha_hz": float(d.alpha_hz),
            "l_j_h": float(design.l_j),
            "c_sigma_f": float(design.c_sigma),
            "ej_over_ec": float(est.ej_over_ec),
            "in_transmon_regime": est.in_transmon_regime,
        }
    });
    if let Some(t1) = a.t1_s {
        payload["q1"] = float(quality_factor(d.f_ge_hz, t1)?);
    }
    if let Some(p) = a.resistance {
        let f = fit_jc_from_resistance(&io::read_pairs(p)?, d.material()?.gap0())?;
        payload["resistance_fit"] = json!({
            "jc_a_per_cm2": float(f.jc),
            "inductance_area_h_um2": float(f.inductance_area),
            "rms_residual": float(f.rms_residual),
        });
    }
    if let Some(p) = a.exposure {
        let mode = a
            .fixed_exponent
            .map_or(ExponentMode::Free, ExponentMode::FixedMagnitude);
        let f = fit_jc_exposure(&io::read_pairs(p)?, mode)?;
        payload["exposure_fit"] = json!({
            "prefactor": float(f.prefactor),
            "exponent": float(f.exponent),
            "covariance": f.covariance.iter().map(|r| r.iter().map(|&v| float(v)).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "residual_norm": float(f.residual_norm),
        });
    }
    prepare(cfg)?;
    emit(cfg, "junction", &payload)
}

pub enum PopulationInput {
    Direct(f64),
    Amplitudes { idle: f64, swapped: f64 },
}

pub fn population(
    cfg: &RunConfig,
    input: PopulationInput,
    f_q: Option<f64>,
) -> Result<PathBuf, CliError> {
    let f_q = f_q.unwrap_or(cfg.device.f_ge_hz);
    let p_e = match input {
        PopulationInput::Direct(p) => p,
        PopulationInput::Amplitudes { idle, swapped } => {
            population_from_ef_amplitudes(idle, swapped)?
        }
    };
    let t = effective_temperature(f_q, p_e)?;
    let back = if t.overflow {
        f64::NAN
    } else {
        thermal_population(f_q, t.kelvin)?
    };
    let payload = json!({
        "f_q_hz": float(f_q),
        "p_e": float(p_e),
        "effective_temperature_k": float(t.kelvin),
        "overflow": t.overflow,
        "p_e_round_trip": float(back),
    });
    prepare(cfg)?;
    emit(cfg, "population", &payload)
}

/// Synthetic trace from the model of the configured kind with Gaussian noise.
pub fn synth(cfg: &RunConfig, out: &Path) -> Result<PathBuf, CliError> {
    let s = &cfg.synth;
    let kind = s
        .kind
        .parse::<TraceKind>()
        .map_err(|_| CliError::input(format!("synth.kind: unknown trace kind {:?}", s.kind)))?;
    if s.points < 2 || s.x_max.is_nan() || s.x_max <= 0.0 {
        return Err(CliError::input("synth: need points >= 2 and x_max > 0"));
    }
    let noise =
        Normal::new(0.0, s.noise).map_err(|e| CliError::input(format!("synth.noise: {e}")))?;
    if kind == TraceKind::TemperatureSweep {
        return Err(CliError::input(
            "synth: temperature sweeps are not synthesized",
        ));
    }
    let w = 2.0 * PI * s.f_osc_hz;
    let model = |x: f64| match kind {
        TraceKind::Decay => s.amplitude * (-x / s.tau_s).exp() + s.offset,
        TraceKind::RabiAmplitude => s.offset + 0.5 * s.amplitude * (1.0 - (w * x).cos()),
        _ => s.amplitude * (-x / s.tau_s).exp() * (w * x).cos() + s.offset,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = s.points;
    let x: Vec<f64> = (0..n)
        .map(|i| s.x_max * i as f64 / (n - 1) as f64)
        .collect();
    let y: Vec<f64> = x
        .iter()
        .map(|&xi| model(xi) + noise.sample(&mut rng))
        .collect();
    let sigma = (s.noise > 0.0).then(|| vec![s.noise; n]);
    let unit = if kind == TraceKind::RabiAmplitude {
        "a.u."
    } else {
        "s"
    };
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    io::write_trace(fs::File::create(out)?, kind, unit, &x, &y, sigma.as_deref())?;
    Ok(out.to_path_buf())
}
