//! Comparison of measured T1(T), T2(T) against the thermal model.

use alloc::vec::Vec;

use super::lm::{minimize, Problem};
use super::FitResult;
use crate::error::{positive, Error, Result};
use crate::sq;
use crate::thermal::{heating_rate, predict, qp_rate, T1Source, ThermalModel};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlayPoint {
    pub temperature: f64,
    pub t1_measured: f64,
    pub t2_measured: f64,
    pub t1_model: f64,
    pub t2_model: f64,
    /// `measured / model − 1`.
    pub t1_residual: f64,
    pub t2_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Overlay {
    pub points: Vec<OverlayPoint>,
    /// Mean squared relative residual per degree of freedom.
    pub reduced_chi2: f64,
    /// Model used for the curves; carries refined `T1,0`, `T2,0` if requested.
    pub model: ThermalModel,
    /// Fit of `T1_0` and `T2_0` when refinement was requested.
    pub refinement: Option<FitResult>,
}

/// Evaluates the model on the measured `(T, T1, T2)` grid. With `refine`,
/// only `T1,0` and `T2,0` are adjusted; every other parameter stays as
/// supplied.
pub fn overlay_thermal_model(
    data: &[(f64, f64, f64)],
    m: &ThermalModel,
    t1_source: T1Source,
    refine: bool,
) -> Result<Overlay> {
    if data.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    for &(t, t1, t2) in data {
        positive("temperature", t)?;
        positive("t1", t1)?;
        positive("t2", t2)?;
    }
    if data.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::Invalid("temperatures must be strictly increasing"));
    }

    let mut model = m.clone();
    let mut refinement = None;
    if refine {
        let fit = refine_scales(data, m, t1_source)?;
        model.qubit = model
            .qubit
            .with_t1_0(fit.values[0])?
            .with_t2_0(fit.values[1])?;
        refinement = Some(fit);
    }

    let mut points = Vec::with_capacity(data.len());
    let mut ss = 0.0;
    for &(t, t1, t2) in data {
        let p = predict(t, &model, t1_source)?;
        let point = OverlayPoint {
            temperature: t,
            t1_measured: t1,
            t2_measured: t2,
            t1_model: p.t1,
            t2_model: p.t2,
            t1_residual: t1 / p.t1 - 1.0,
            t2_residual: t2 / p.t2 - 1.0,
        };
        ss += sq(point.t1_residual) + sq(point.t2_residual);
        points.push(point);
    }
    let free = if refine { 2 } else { 0 };
    let dof = (2 * data.len()).saturating_sub(free).max(1) as f64;
    Ok(Overlay {
        points,
        reduced_chi2: ss / dof,
        model,
        refinement,
    })
}

fn refine_scales(
    data: &[(f64, f64, f64)],
    m: &ThermalModel,
    t1_source: T1Source,
) -> Result<FitResult> {
    let t1_0 = m.qubit.t1_0();
    let t2_0 = m.qubit.t2_0();
    if !t1_0.is_finite() || !t2_0.is_finite() {
        return Err(Error::Invalid(
            "refinement needs finite starting T1_0 and T2_0",
        ));
    }
    let omega = m.qubit.omega_ge();
    let gap = m.qubit.material().gap0();
    // per-temperature pieces independent of the fitted scales
    let fixed: Vec<(f64, f64, f64)> = data
        .iter()
        .map(|&(t, _, _)| {
            let h = heating_rate(omega, 1.0, t)?;
            let q = qp_rate(omega, gap, t)?;
            let g = predict(t, m, T1Source::Model)?.gamma_phi;
            Ok((h, q, g))
        })
        .collect::<Result<_>>()?;
    let fixed_t1 = match t1_source {
        T1Source::Fixed(v) => Some(positive("t1", v)?),
        T1Source::Model => None,
    };
    let n = data.len();
    let mut problem = Problem {
        m: 2 * n,
        eval: |p: &[f64], r: &mut [f64], j: &mut [f64]| {
            let (a, b) = (p[0], p[1]);
            for (i, (&(_, t1m, t2m), &(h, q, g))) in data.iter().zip(&fixed).enumerate() {
                let t1 = 1.0 / (h / a + q);
                let dt1_da = t1 * t1 * h / (a * a);
                let t1_used = fixed_t1.unwrap_or(t1);
                let t2 = 1.0 / (g + 1.0 / b + 0.5 / t1_used);
                // ∂(1/T2)/∂a through 1/(2T1) = (h/a + q)/2
                let dinv_da = if fixed_t1.is_some() {
                    0.0
                } else {
                    -0.5 * h / (a * a)
                };
                let dt2_da = -t2 * t2 * dinv_da;
                let dt2_db = t2 * t2 / (b * b);
                r[2 * i] = t1m / t1 - 1.0;
                r[2 * i + 1] = t2m / t2 - 1.0;
                j[4 * i] = -t1m / (t1 * t1) * dt1_da;
                j[4 * i + 1] = 0.0;
                j[4 * i + 2] = -t2m / (t2 * t2) * dt2_da;
                j[4 * i + 3] = -t2m / (t2 * t2) * dt2_db;
            }
        },
    };
    let out = minimize(&mut problem, &[t1_0, t2_0]);
    if out.params.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::Numerical {
            what: "thermal model refinement",
            estimate: out.params[0].min(out.params[1]),
            tolerance: 0.0,
        });
    }
    Ok(FitResult::from_outcome(
        &["T1_0", "T2_0"],
        out,
        2 * n,
        false,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::{QubitParams, ResonatorParams, SuperconductorMaterial};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn model(t1_0: f64, t2_0: f64) -> ThermalModel {
        ThermalModel::new(
            QubitParams::new(20e9, -200e6, t1_0, t2_0, SuperconductorMaterial::niobium()).unwrap(),
            ResonatorParams::new(21e9, 5e6, 2e6).unwrap(),
        )
    }

    fn grid() -> Vec<f64> {
        (0..30).map(|i| 0.05 + 0.0125 * f64::from(i)).collect()
    }

    fn synth(m: &ThermalModel, noise: Option<(u64, f64)>) -> Vec<(f64, f64, f64)> {
        let dist = noise.map(|(_, s)| Normal::new(0.0, s).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(noise.map_or(0, |n| n.0));
        grid()
            .into_iter()
            .map(|t| {
                let p = predict(t, m, T1Source::Model).unwrap();
                let mut f = || dist.map_or(1.0, |d| 1.0 + d.sample(&mut rng));
                (t, p.t1 * f(), p.t2 * f())
            })
            .collect()
    }

    #[test]
    fn self_consistent_data_has_no_residual() {
        let m = model(1.6e-6, 3.8e-6);
        let o = overlay_thermal_model(&synth(&m, None), &m, T1Source::Model, false).unwrap();
        for p in &o.points {
            assert!(p.t1_residual.abs() <= 1e-12 && p.t2_residual.abs() <= 1e-12);
        }
        assert!(o.reduced_chi2 < 1e-24);
        assert!(o.refinement.is_none());
    }

    #[test]
    fn refinement_recovers_scales() {
        let truth = model(1.6e-6, 3.8e-6);
        let start = model(2.5e-6, 2.5e-6);
        let mut hits = 0;
        for seed in 0..40 {
            let data = synth(&truth, Some((seed, 0.03)));
            let o = overlay_thermal_model(&data, &start, T1Source::Model, true).unwrap();
            let f = o.refinement.unwrap();
            assert!(f.converged);
            if (f.values[0] / 1.6e-6 - 1.0).abs() < 0.1 && (f.values[1] / 3.8e-6 - 1.0).abs() < 0.1
            {
                hits += 1;
            }
        }
        assert!(hits >= 38, "{hits}/40");
    }

    #[test]
    fn nb_curve_flat_to_200_mk() {
        let m = model(1.6e-6, 3.8e-6);
        let data: Vec<(f64, f64, f64)> = [0.08, 0.1, 0.15, 0.2]
            .iter()
            .map(|&t| (t, 1e-6, 1e-6))
            .collect();
        let o = overlay_thermal_model(&data, &m, T1Source::Model, false).unwrap();
        let base = o.points[0].t2_model;
        for p in &o.points {
            assert!((p.t2_model / base - 1.0).abs() < 0.1);
        }
    }

    #[test]
    fn rejects_unordered_temperatures() {
        let m = model(1.6e-6, 3.8e-6);
        let data = [(0.1, 1e-6, 1e-6), (0.05, 1e-6, 1e-6)];
        assert!(overlay_thermal_model(&data, &m, T1Source::Model, false).is_err());
        assert!(overlay_thermal_model(&[], &m, T1Source::Model, false).is_err());
    }
}
