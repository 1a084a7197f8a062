//! Exponential decay, damped sinusoid and Rabi-oscillation fitters.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use libm::{atan2, cos, exp, hypot, log, sin};

use super::lm::{minimize, Problem};
use super::{require_kind, FitResult, FitWarning, Trace, TraceKind};
use crate::error::{Error, Result};
use crate::linalg;

/// Minimum ratio of the spectral peak to the median spectral power.
pub const VISIBILITY_THRESHOLD: f64 = 12.0;
const MIN_OSCILLATION_POINTS: usize = 8;
/// Spectral grid oversampling relative to `1/span`.
const OVERSAMPLE: f64 = 8.0;

/// Fits `A·e^{-x/T1} + C`.
pub fn fit_exp_decay(trace: &Trace) -> Result<FitResult> {
    require_kind(trace, &[TraceKind::Decay])?;
    let (x, y) = (trace.x(), trace.y());
    let n = x.len();
    let names = ["A", "T1", "C"];
    let y_max = y.iter().fold(f64::MIN, |a, &b| a.max(b));
    let y_min = y.iter().fold(f64::MAX, |a, &b| a.min(b));
    if y_max - y_min <= 1e-12 * y_max.abs().max(y_min.abs()) {
        let mean = y.iter().sum::<f64>() / n as f64;
        return Ok(FitResult {
            names: names.to_vec(),
            values: vec![0.0, f64::INFINITY, mean],
            covariance: vec![f64::NAN; 9],
            reduced_chi2: 0.0,
            converged: false,
            iterations: 0,
            derived: Vec::new(),
            warnings: vec![FitWarning::Degenerate(
                "constant data, T1 unbounded".to_string(),
            )],
        });
    }

    let span = x[n - 1] - x[0];
    let tail = (n / 10).max(1);
    let c0 = y[n - tail..].iter().sum::<f64>() / tail as f64;
    let lead = y
        .iter()
        .map(|v| v - c0)
        .fold(0.0f64, |a, d| if d.abs() > a.abs() { d } else { a });
    let sign = if lead < 0.0 { -1.0 } else { 1.0 };
    // weighted log-linear regression on the baseline-subtracted signal
    let (mut sw, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&xi, &yi) in x.iter().zip(y) {
        let d = sign * (yi - c0);
        if d > 0.1 * lead.abs() {
            let w = d * d;
            let l = log(d);
            sw += w;
            sx += w * xi;
            sy += w * l;
            sxx += w * xi * xi;
            sxy += w * xi * l;
        }
    }
    let det = sw * sxx - sx * sx;
    let (mut t1, mut a0) = (span / 3.0, lead);
    if det > 0.0 {
        let slope = (sw * sxy - sx * sy) / det;
        let intercept = (sy - slope * sx) / sw;
        if slope < 0.0 && (-1.0 / slope).is_finite() {
            t1 = -1.0 / slope;
            a0 = sign * exp(intercept);
        }
    }

    let mut problem = Problem {
        m: n,
        eval: |p: &[f64], r: &mut [f64], j: &mut [f64]| {
            for i in 0..n {
                let w = trace.weight(i);
                let e = exp(-x[i] / p[1]);
                r[i] = w * (y[i] - (p[0] * e + p[2]));
                j[3 * i] = -w * e;
                j[3 * i + 1] = -w * p[0] * e * x[i] / (p[1] * p[1]);
                j[3 * i + 2] = -w;
            }
        },
    };
    let out = minimize(&mut problem, &[a0, t1, c0]);
    Ok(FitResult::from_outcome(
        &names,
        out,
        trace.len(),
        trace.sigma_y().is_some(),
    ))
}

/// Fits `A·e^{-x/T2}·cos(2π·f_osc·x + phase) + C`. The oscillation
/// frequency floats.
pub fn fit_damped_sinusoid(trace: &Trace) -> Result<FitResult> {
    require_kind(trace, &[TraceKind::Ramsey, TraceKind::Echo])?;
    let (x, y) = (trace.x(), trace.y());
    let n = check_oscillation_len(x.len())?;
    let span = x[n - 1] - x[0];
    let tau0 = 0.5 * span;
    let seed = spectral_seed(x, y, Some(tau0))?;
    let [a, b, c] = seed.coeffs;
    let mut p0 = [hypot(a, b), tau0, seed.freq, atan2(-b, a), c];

    let mut problem = Problem {
        m: n,
        eval: |p: &[f64], r: &mut [f64], j: &mut [f64]| {
            for i in 0..n {
                let w = trace.weight(i);
                let e = exp(-x[i] / p[1]);
                let th = 2.0 * PI * p[2] * x[i] + p[3];
                let (s, co) = (sin(th), cos(th));
                r[i] = w * (y[i] - (p[0] * e * co + p[4]));
                let row = &mut j[5 * i..5 * i + 5];
                row[0] = -w * e * co;
                row[1] = -w * p[0] * e * co * x[i] / (p[1] * p[1]);
                row[2] = w * p[0] * e * s * 2.0 * PI * x[i];
                row[3] = w * p[0] * e * s;
                row[4] = -w;
            }
        },
    };
    if p0[0] == 0.0 {
        p0[0] = f64::MIN_POSITIVE;
    }
    let mut out = minimize(&mut problem, &p0);
    let p = &mut out.params;
    if p[0] < 0.0 {
        p[0] = -p[0];
        p[3] += PI;
    }
    if p[2] < 0.0 {
        p[2] = -p[2];
        p[3] = -p[3];
    }
    p[3] = wrap_phase(p[3]);
    let names = ["A", "T2", "f_osc", "phase", "C"];
    Ok(FitResult::from_outcome(
        &names,
        out,
        trace.len(),
        trace.sigma_y().is_some(),
    ))
}

/// Fits `C + P0·(1 − cos(2π·amp_per_unit·x + phase))/2` to population
/// versus drive amplitude and reports `pi_amplitude = 1/(2·amp_per_unit)`.
/// Unsorted amplitude grids are sorted first, with a warning.
pub fn fit_rabi(trace: &Trace) -> Result<FitResult> {
    require_kind(trace, &[TraceKind::RabiAmplitude])?;
    let mut warnings = Vec::new();
    let sorted;
    let trace = if trace.x().windows(2).any(|w| w[1] < w[0]) {
        let mut idx: Vec<usize> = (0..trace.len()).collect();
        idx.sort_by(|&a, &b| trace.x()[a].total_cmp(&trace.x()[b]));
        let pick = |v: &[f64]| idx.iter().map(|&i| v[i]).collect::<Vec<f64>>();
        sorted = Trace::new(
            trace.kind(),
            pick(trace.x()),
            pick(trace.y()),
            trace.sigma_y().map(pick),
        )?;
        warnings.push(FitWarning::Resorted);
        &sorted
    } else {
        trace
    };
    let (x, y) = (trace.x(), trace.y());
    let n = check_oscillation_len(x.len())?;
    let seed = spectral_seed(x, y, None)?;
    let [a, b, c] = seed.coeffs;
    let half = hypot(a, b);
    let p0 = [2.0 * half, seed.freq, atan2(b, -a), c - half];

    let mut problem = Problem {
        m: n,
        eval: |p: &[f64], r: &mut [f64], j: &mut [f64]| {
            for i in 0..n {
                let w = trace.weight(i);
                let th = 2.0 * PI * p[1] * x[i] + p[2];
                let (s, co) = (sin(th), cos(th));
                r[i] = w * (y[i] - (p[3] + 0.5 * p[0] * (1.0 - co)));
                let row = &mut j[4 * i..4 * i + 4];
                row[0] = -w * 0.5 * (1.0 - co);
                row[1] = -w * p[0] * s * PI * x[i];
                row[2] = -w * 0.5 * p[0] * s;
                row[3] = -w;
            }
        },
    };
    let mut out = minimize(&mut problem, &p0);
    let p = &mut out.params;
    if p[0] < 0.0 {
        p[3] += p[0];
        p[0] = -p[0];
        p[2] += PI;
    }
    if p[1] < 0.0 {
        p[1] = -p[1];
        p[2] = -p[2];
    }
    p[2] = wrap_phase(p[2]);
    let k = p[1];
    let names = ["P0", "amp_per_unit", "phase", "C"];
    let mut result = FitResult::from_outcome(&names, out, trace.len(), trace.sigma_y().is_some());
    result.derived.push(("pi_amplitude", 0.5 / k));
    warnings.append(&mut result.warnings);
    result.warnings = warnings;
    Ok(result)
}

/// Runs the fitter that matches the trace kind.
pub fn fit_trace(trace: &Trace) -> Result<FitResult> {
    match trace.kind() {
        TraceKind::Decay => fit_exp_decay(trace),
        TraceKind::Ramsey | TraceKind::Echo => fit_damped_sinusoid(trace),
        TraceKind::RabiAmplitude => fit_rabi(trace),
        TraceKind::TemperatureSweep => Err(Error::Invalid(
            "temperature sweeps are compared with the thermal model, not fitted",
        )),
    }
}

/// Fitted model of `kind` evaluated at `x`; `None` if `r` lacks a parameter
/// of that model.
pub fn evaluate(kind: TraceKind, r: &FitResult, x: f64) -> Option<f64> {
    let p = |n: &str| r.get(n);
    Some(match kind {
        TraceKind::Decay => p("A")? * exp(-x / p("T1")?) + p("C")?,
        TraceKind::Ramsey | TraceKind::Echo => {
            p("A")? * exp(-x / p("T2")?) * cos(2.0 * PI * p("f_osc")? * x + p("phase")?) + p("C")?
        }
        TraceKind::RabiAmplitude => {
            p("C")? + 0.5 * p("P0")? * (1.0 - cos(2.0 * PI * p("amp_per_unit")? * x + p("phase")?))
        }
        TraceKind::TemperatureSweep => return None,
    })
}

fn check_oscillation_len(n: usize) -> Result<usize> {
    if n < MIN_OSCILLATION_POINTS {
        Err(Error::InsufficientData {
            needed: MIN_OSCILLATION_POINTS,
            got: n,
        })
    } else {
        Ok(n)
    }
}

fn wrap_phase(p: f64) -> f64 {
    let mut p = p % (2.0 * PI);
    if p > PI {
        p -= 2.0 * PI;
    } else if p <= -PI {
        p += 2.0 * PI;
    }
    p
}

struct SpectralSeed {
    freq: f64,
    /// `[a, b, c]` of `y ≈ env·(a·cos + b·sin) + c` at `freq`.
    coeffs: [f64; 3],
}

/// Frequency seed from the discrete spectrum of the mean-subtracted data,
/// refined by a local least-squares scan.
fn spectral_seed(x: &[f64], y: &[f64], tau: Option<f64>) -> Result<SpectralSeed> {
    let n = x.len();
    let span = x[n - 1] - x[0];
    if span <= 0.0 {
        return Err(Error::Invalid("oscillation trace needs a non-zero x span"));
    }
    let mean = y.iter().sum::<f64>() / n as f64;
    let df = 1.0 / (OVERSAMPLE * span);
    let f_max = 0.5 * (n - 1) as f64 / span;
    let count = (f_max / df) as usize;
    let power: Vec<f64> = (1..=count)
        .map(|k| {
            let f = k as f64 * df;
            let (mut re, mut im) = (0.0, 0.0);
            for (&xi, &yi) in x.iter().zip(y) {
                let th = 2.0 * PI * f * xi;
                re += (yi - mean) * cos(th);
                im += (yi - mean) * sin(th);
            }
            re * re + im * im
        })
        .collect();
    let (peak_idx, peak) =
        power.iter().enumerate().fold(
            (0, 0.0f64),
            |acc, (i, &p)| if p > acc.1 { (i, p) } else { acc },
        );
    let mut sorted = power.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted.get(sorted.len() / 2).copied().unwrap_or(0.0);
    let ratio = if peak > 0.0 && median > 0.0 {
        peak / median
    } else if peak > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    if !(ratio >= VISIBILITY_THRESHOLD) {
        return Err(Error::LowVisibility {
            ratio,
            threshold: VISIBILITY_THRESHOLD,
        });
    }
    let f_peak = (peak_idx + 1) as f64 * df;
    let mut best: Option<(f64, f64, [f64; 3])> = None;
    for k in -40..=40 {
        let f = f_peak + f64::from(k) * df / 40.0;
        if f <= 0.0 {
            continue;
        }
        if let Some((ssr, coeffs)) = linear_sinusoid(x, y, f, tau) {
            if best.is_none_or(|b| ssr < b.0) {
                best = Some((ssr, f, coeffs));
            }
        }
    }
    let (_, freq, coeffs) = best.ok_or(Error::Invalid("sinusoid seed is singular"))?;
    Ok(SpectralSeed { freq, coeffs })
}

fn linear_sinusoid(x: &[f64], y: &[f64], f: f64, tau: Option<f64>) -> Option<(f64, [f64; 3])> {
    let basis = |xi: f64| {
        let env = tau.map_or(1.0, |t| exp(-(xi - x[0]) / t));
        let th = 2.0 * PI * f * xi;
        [env * cos(th), env * sin(th), 1.0]
    };
    let mut ata = [0.0; 9];
    let mut aty = [0.0; 3];
    for (&xi, &yi) in x.iter().zip(y) {
        let b = basis(xi);
        for r in 0..3 {
            aty[r] += b[r] * yi;
            for c in 0..3 {
                ata[r * 3 + c] += b[r] * b[c];
            }
        }
    }
    let sol = linalg::solve(&ata, &aty, 3)?;
    let ssr = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| {
            let b = basis(xi);
            let m: f64 = (0..3).map(|k| b[k] * sol[k]).sum();
            (yi - m) * (yi - m)
        })
        .sum();
    // undo the envelope offset so coefficients refer to e^{-x/τ}
    let shift = tau.map_or(1.0, |t| exp(x[0] / t));
    Some((ssr, [sol[0] * shift, sol[1] * shift, sol[2]]))
}
