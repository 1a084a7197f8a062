//! End-to-end paths through the public API.

use hotqubit::fit::{
    fit_damped_sinusoid, fit_exp_decay, population_from_ef_amplitudes, Trace, TraceKind,
};
use hotqubit::thermal::{
    effective_temperature, predict, pure_dephasing_extract, t1_0_from_plateau, thermal_population,
    T1Source,
};
use hotqubit::{QubitParams, ResonatorParams, SuperconductorMaterial, ThermalModel};

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

fn model(t1_0: f64) -> ThermalModel {
    ThermalModel::new(
        QubitParams::new(
            20e9,
            -200e6,
            t1_0,
            3.8e-6,
            SuperconductorMaterial::niobium(),
        )
        .unwrap(),
        ResonatorParams::new(21e9, 5e6, 2e6).unwrap(),
    )
}

#[test]
fn traces_to_dephasing_rate() {
    // Low-temperature plateau sets T1,0; a Ramsey trace at 300 mK then
    // yields the thermal-photon dephasing of the model.
    let x = linspace(0.0, 5e-6, 40);
    let plateau = 0.8e-6;
    let y: Vec<f64> = x
        .iter()
        .map(|&t| 0.9 * (-t / plateau).exp() + 0.05)
        .collect();
    let t1 = fit_exp_decay(&Trace::new(TraceKind::Decay, x, y, None).unwrap())
        .unwrap()
        .get("T1")
        .unwrap();
    let m = model(t1_0_from_plateau(t1).unwrap());
    let p = predict(0.3, &m, T1Source::Fixed(t1)).unwrap();

    let x = linspace(0.0, 3e-6, 241);
    let y: Vec<f64> = x
        .iter()
        .map(|&t| 0.5 * (-t / p.t2).exp() * (2.0 * std::f64::consts::PI * 3e6 * t).cos() + 0.5)
        .collect();
    let t2 = fit_damped_sinusoid(&Trace::new(TraceKind::Ramsey, x, y, None).unwrap())
        .unwrap()
        .get("T2")
        .unwrap();
    let g = pure_dephasing_extract(t2, t1, m.qubit.t2_0()).unwrap();
    assert!(!g.clamped);
    assert!(((g.gamma_phi - p.gamma_phi) / p.gamma_phi).abs() < 1e-6);
}

#[test]
fn swap_amplitudes_to_effective_temperature() {
    let f = 21e9;
    let pe = thermal_population(f, 0.116).unwrap();
    // Amplitude ratio p/(1 − p) produced by an e–f swap readout
    let a = population_from_ef_amplitudes(pe / (1.0 - pe) * 2.5, 2.5).unwrap();
    let t = effective_temperature(f, a).unwrap();
    assert!((t.kelvin - 0.116).abs() < 1e-12);
    assert!((a - 1.7e-4).abs() < 0.1e-4);
}
