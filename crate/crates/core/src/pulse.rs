//! Rabi dynamics of truncated-Gaussian drive pulses.
//!
//! Rabi rates are cyclic (Hz); the rotating-frame generator uses `2πΩ`, so a
//! constant drive gives `sin²(πΩt)`. A pulse is described by its envelope peak
//! `Ω0`. The rate a square pulse of length `σ` would need for the same area is
//! the *effective* rate `Ω_eff = Ω0·√(2π)·erf(n/√2)`, and on resonance the
//! analytic model returns `sin²(πσΩ_eff)`.

use alloc::vec::Vec;
use core::f64::consts::{PI, SQRT_2};

use libm::{erf, exp, sin, sqrt};

use crate::error::{non_negative, positive, Error, Result};
use crate::quadrature::AdaptiveGaussLegendre;

/// Relative tolerance of the phase integral.
const PHASE_TOL: f64 = 1e-10;
/// Maximum change in final `P_e` allowed when the RK4 step is halved.
const STEP_TOL: f64 = 1e-8;
pub const MIN_STEPS: usize = 100;
pub const DEFAULT_STEPS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSpec {
    /// Envelope peak Rabi rate Ω0, Hz.
    pub omega_peak: f64,
    /// Gaussian width, s.
    pub sigma: f64,
    /// Truncation at `±n·σ`.
    pub n_trunc: f64,
    /// Drive detuning `f − f_ge`, Hz.
    pub detuning: f64,
}

impl PulseSpec {
    pub fn new(omega_peak: f64, sigma: f64, n_trunc: f64, detuning: f64) -> Result<Self> {
        if !detuning.is_finite() {
            return Err(Error::Domain {
                name: "detuning",
                value: detuning,
                reason: "must be finite",
            });
        }
        Ok(Self {
            omega_peak: non_negative("omega_peak", omega_peak)?,
            sigma: positive("sigma", sigma)?,
            n_trunc: positive("n_trunc", n_trunc)?,
            detuning,
        })
    }

    /// Pulse with the given effective rate `Ω_eff` (see module docs).
    pub fn from_effective_rate(
        omega_eff: f64,
        sigma: f64,
        n_trunc: f64,
        detuning: f64,
    ) -> Result<Self> {
        let n = positive("n_trunc", n_trunc)?;
        Self::new(
            non_negative("omega_eff", omega_eff)? / area_factor(n),
            sigma,
            n,
            detuning,
        )
    }

    pub fn effective_rate(&self) -> f64 {
        self.omega_peak * area_factor(self.n_trunc)
    }

    /// Total pulse length `2nσ`.
    pub fn duration(&self) -> f64 {
        2.0 * self.n_trunc * self.sigma
    }

    fn validate(&self) -> Result<()> {
        Self::new(self.omega_peak, self.sigma, self.n_trunc, self.detuning).map(|_| ())
    }
}

/// `∫_{-n}^{n} e^{-τ²/2} dτ`.
fn area_factor(n: f64) -> f64 {
    sqrt(2.0 * PI) * erf(n / SQRT_2)
}

/// Drive envelope at time `t` measured from the pulse centre.
pub fn envelope(t: f64, p: &PulseSpec) -> f64 {
    if t.abs() < p.n_trunc * p.sigma {
        p.omega_peak * exp(-t * t / (2.0 * p.sigma * p.sigma))
    } else {
        0.0
    }
}

/// Constant-drive excited-state probability with the generalized Rabi rate.
pub fn pe_continuous(omega: f64, delta: f64, t: f64) -> Result<f64> {
    non_negative("t", t)?;
    let omega2 = omega * omega;
    let total2 = omega2 + delta * delta;
    if omega2 == 0.0 {
        return Ok(0.0);
    }
    let s = sin(PI * sqrt(total2) * t);
    Ok(omega2 / total2 * s * s)
}

/// Phase convention for [`pe_truncated_gaussian`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseMode {
    /// `πσΩ_eff·I(Δ)/I(0)`; exact `sin²(πσΩ_eff)` on resonance.
    #[default]
    Normalized,
    /// The unnormalized `(σ/2)·I(Δ)`.
    Literal,
}

/// Off-resonant amplitude suppression `Ω0²e^{-n²} / (Ω0²e^{-n²} + Δ²)`.
pub fn amplitude_factor(p: &PulseSpec) -> f64 {
    let edge = p.omega_peak * p.omega_peak * exp(-p.n_trunc * p.n_trunc);
    let d2 = p.detuning * p.detuning;
    if edge == 0.0 && d2 == 0.0 {
        return if p.omega_peak > 0.0 { 1.0 } else { 0.0 };
    }
    edge / (edge + d2)
}

/// `I(Δ) = ∫_{-n}^{n} √(Ω0²e^{-τ²} + Δ²) dτ` in Hz.
pub fn phase_integral(p: &PulseSpec) -> Result<f64> {
    let scale = p.omega_peak.max(p.detuning.abs());
    if scale == 0.0 {
        return Ok(0.0);
    }
    let (a, d) = (p.omega_peak / scale, p.detuning / scale);
    let quad = AdaptiveGaussLegendre::new(10, PHASE_TOL);
    let r = quad.integrate(
        |tau| sqrt(a * a * exp(-tau * tau) + d * d),
        -p.n_trunc,
        p.n_trunc,
    )?;
    Ok(r.value * scale)
}

/// Rotation phase `Θ` such that `P_e = A·sin²Θ`.
pub fn pulse_phase(p: &PulseSpec, mode: PhaseMode) -> Result<f64> {
    let i = phase_integral(p)?;
    Ok(match mode {
        // πσΩ_eff·I(Δ)/I(0) with I(0) = Ω_eff
        PhaseMode::Normalized => PI * p.sigma * i,
        PhaseMode::Literal => 0.5 * p.sigma * i,
    })
}

/// Analytic excited-state probability after a truncated-Gaussian pulse.
pub fn pe_truncated_gaussian(p: &PulseSpec, mode: PhaseMode) -> Result<f64> {
    p.validate()?;
    if p.omega_peak == 0.0 {
        return Ok(0.0);
    }
    let s = sin(pulse_phase(p, mode)?);
    Ok(amplitude_factor(p) * s * s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Relaxation {
    pub t1: f64,
    /// Total transverse decay time.
    pub t2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochOptions {
    /// RK4 steps across the pulse (and again across any idle period).
    pub steps: usize,
    pub relaxation: Option<Relaxation>,
    /// Free evolution after the pulse, s.
    pub idle: f64,
}

impl Default for BlochOptions {
    fn default() -> Self {
        Self {
            steps: DEFAULT_STEPS,
            relaxation: None,
            idle: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlochTrajectory {
    /// Time from the start of the pulse, s.
    pub times: Vec<f64>,
    pub excited_prob: Vec<f64>,
}

impl BlochTrajectory {
    pub fn final_pe(&self) -> f64 {
        self.excited_prob.last().copied().unwrap_or(0.0)
    }
}

/// Rotating-frame Bloch-equation integration of the pulse starting in the
/// ground state. The run is repeated at half the step size and rejected if the
/// final population moves by more than 1e-8.
pub fn simulate_bloch(p: &PulseSpec, opts: &BlochOptions) -> Result<BlochTrajectory> {
    p.validate()?;
    if opts.steps < MIN_STEPS {
        return Err(Error::Domain {
            name: "steps",
            value: opts.steps as f64,
            reason: "at least 100 steps required",
        });
    }
    non_negative("idle", opts.idle)?;
    if let Some(r) = opts.relaxation {
        positive("t1", r.t1)?;
        positive("t2", r.t2)?;
    }
    let coarse = integrate_bloch(p, opts, opts.steps);
    let fine = integrate_bloch(p, opts, 2 * opts.steps);
    let diff = (coarse.final_pe() - fine.final_pe()).abs();
    if diff >= STEP_TOL {
        return Err(Error::Numerical {
            what: "Bloch integration step halving",
            estimate: diff,
            tolerance: STEP_TOL,
        });
    }
    Ok(coarse)
}

fn integrate_bloch(p: &PulseSpec, opts: &BlochOptions, steps: usize) -> BlochTrajectory {
    let (g1, g2) = opts
        .relaxation
        .map_or((0.0, 0.0), |r| (1.0 / r.t1, 1.0 / r.t2));
    let delta = 2.0 * PI * p.detuning;
    let t0 = -p.n_trunc * p.sigma;
    // the pulse segment spans the closed window, so the Gaussian is evaluated
    // without the truncation test to keep the edge samples on the pulse
    let rhs = |t: f64, driven: bool, s: [f64; 3]| -> [f64; 3] {
        let om = if driven {
            2.0 * PI * p.omega_peak * exp(-t * t / (2.0 * p.sigma * p.sigma))
        } else {
            0.0
        };
        let [u, v, w] = s;
        [
            -delta * v - g2 * u,
            delta * u - om * w - g2 * v,
            om * v - g1 * (w + 1.0),
        ]
    };
    let idle_steps = if opts.idle > 0.0 { steps } else { 0 };
    let mut times = Vec::with_capacity(steps + idle_steps + 1);
    let mut pe = Vec::with_capacity(steps + idle_steps + 1);
    let mut s = [0.0, 0.0, -1.0];
    times.push(0.0);
    pe.push(0.0);
    let segments = [(p.duration(), steps, true), (opts.idle, idle_steps, false)];
    let mut start = 0.0;
    for (length, n, driven) in segments {
        let h = length / n.max(1) as f64;
        for k in 0..n {
            let t = t0 + start + k as f64 * h;
            let k1 = rhs(t, driven, s);
            let k2 = rhs(t + 0.5 * h, driven, axpy(s, 0.5 * h, k1));
            let k3 = rhs(t + 0.5 * h, driven, axpy(s, 0.5 * h, k2));
            let k4 = rhs(t + h, driven, axpy(s, h, k3));
            for i in 0..3 {
                s[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            times.push(start + (k + 1) as f64 * h);
            pe.push(0.5 * (1.0 + s[2]));
        }
        start += length;
    }
    BlochTrajectory {
        times,
        excited_prob: pe,
    }
}

fn axpy(s: [f64; 3], h: f64, k: [f64; 3]) -> [f64; 3] {
    [s[0] + h * k[0], s[1] + h * k[1], s[2] + h * k[2]]
}

/// Parameter swept along chevron columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChevronAxis {
    /// Effective Rabi rate `Ω_eff`, Hz.
    Amplitude,
    /// Gaussian width `σ`, s, at fixed peak rate.
    Length,
}

/// `values[i * swept.len() + j]` is `P_e` at `delta[i]`, `swept[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChevronMap {
    pub delta: Vec<f64>,
    pub swept: Vec<f64>,
    pub axis: ChevronAxis,
    pub values: Vec<f64>,
}

impl ChevronMap {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.swept.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let c = self.swept.len();
        &self.values[i * c..(i + 1) * c]
    }
}

/// One chevron row: `P_e` at detuning `delta` across `swept`.
pub fn chevron_row(
    delta: f64,
    swept: &[f64],
    p0: &PulseSpec,
    axis: ChevronAxis,
    mode: PhaseMode,
) -> Result<Vec<f64>> {
    swept
        .iter()
        .map(|&x| {
            let p = match axis {
                ChevronAxis::Amplitude => {
                    PulseSpec::from_effective_rate(x, p0.sigma, p0.n_trunc, delta)?
                }
                ChevronAxis::Length => PulseSpec::new(p0.omega_peak, x, p0.n_trunc, delta)?,
            };
            pe_truncated_gaussian(&p, mode)
        })
        .collect()
}

pub fn chevron_map(
    delta: &[f64],
    swept: &[f64],
    p0: &PulseSpec,
    axis: ChevronAxis,
    mode: PhaseMode,
) -> Result<ChevronMap> {
    if delta.is_empty() || swept.is_empty() {
        return Err(Error::Invalid("chevron grids must be non-empty"));
    }
    let mut values = Vec::with_capacity(delta.len() * swept.len());
    for &d in delta {
        values.extend(chevron_row(d, swept, p0, axis, mode)?);
    }
    Ok(ChevronMap {
        delta: delta.to_vec(),
        swept: swept.to_vec(),
        axis,
        values,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    Maximum,
    Minimum,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub x: f64,
    pub value: f64,
    pub kind: ExtremumKind,
}

/// Population below which an endpoint counts as a fringe zero.
pub const ZERO_LEVEL: f64 = 1e-3;

/// Local extrema of a sampled curve, refined by a three-point parabola.
/// Endpoints are reported only as minima lying below [`ZERO_LEVEL`].
pub fn local_extrema(xs: &[f64], ys: &[f64]) -> Vec<Extremum> {
    let n = xs.len().min(ys.len());
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    if ys[0] < ZERO_LEVEL && ys[0] <= ys[1] {
        out.push(Extremum {
            x: xs[0],
            value: ys[0],
            kind: ExtremumKind::Minimum,
        });
    }
    for i in 1..n - 1 {
        let (a, b, c) = (ys[i - 1], ys[i], ys[i + 1]);
        let kind = if b > a && b >= c {
            ExtremumKind::Maximum
        } else if b < a && b <= c {
            ExtremumKind::Minimum
        } else {
            continue;
        };
        let (x, value) = parabola_vertex([xs[i - 1], xs[i], xs[i + 1]], [a, b, c]);
        out.push(Extremum { x, value, kind });
    }
    if ys[n - 1] < ZERO_LEVEL && ys[n - 1] <= ys[n - 2] {
        out.push(Extremum {
            x: xs[n - 1],
            value: ys[n - 1],
            kind: ExtremumKind::Minimum,
        });
    }
    out
}

fn parabola_vertex(x: [f64; 3], y: [f64; 3]) -> (f64, f64) {
    let d1 = (y[1] - y[0]) / (x[1] - x[0]);
    let d2 = (y[2] - y[1]) / (x[2] - x[1]);
    let curv = (d2 - d1) / (x[2] - x[0]);
    if curv == 0.0 || !curv.is_finite() {
        return (x[1], y[1]);
    }
    // y = y1 + b(x − x1) + curv(x − x1)²
    let b = d1 + curv * (x[1] - x[0]);
    let shift = (-b / (2.0 * curv)).clamp(x[0] - x[1], x[2] - x[1]);
    (x[1] + shift, y[1] + b * shift + curv * shift * shift)
}

/// Ridge or valley of the chevron traced across detuning rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    pub kind: ExtremumKind,
    /// 1-based position among same-kind extrema of a row, counted from the
    /// smallest swept value.
    pub order: usize,
    /// `(swept, delta)` vertices.
    pub points: Vec<(f64, f64)>,
}

/// Extracts integer-π contours: per-row extrema along the swept axis,
/// linked across rows by their order. The trivial zero at swept value 0 is
/// skipped.
pub fn pi_pulse_contours(map: &ChevronMap) -> Result<Vec<Contour>> {
    if map.delta.is_empty()
        || map.swept.is_empty()
        || map.values.len() != map.delta.len() * map.swept.len()
    {
        return Err(Error::Invalid("empty or inconsistent chevron map"));
    }
    let mut contours: Vec<Contour> = Vec::new();
    for (i, &d) in map.delta.iter().enumerate() {
        let mut counts = [0usize; 2];
        for e in local_extrema(&map.swept, map.row(i)) {
            if e.x == 0.0 {
                continue;
            }
            let slot = match e.kind {
                ExtremumKind::Maximum => 0,
                ExtremumKind::Minimum => 1,
            };
            counts[slot] += 1;
            let order = counts[slot];
            match contours
                .iter_mut()
                .find(|c| c.kind == e.kind && c.order == order)
            {
                Some(c) => c.points.push((e.x, d)),
                None => contours.push(Contour {
                    kind: e.kind,
                    order,
                    points: alloc::vec![(e.x, d)],
                }),
            }
        }
    }
    Ok(contours)
}

/// Half width at half maximum in Δ (Hz) of the central fringe for a pulse
/// with the given `σΩ_eff` product.
pub fn central_fringe_halfwidth(
    sigma_omega: f64,
    sigma: f64,
    n_trunc: f64,
    mode: PhaseMode,
) -> Result<f64> {
    let omega_eff = positive("sigma_omega", sigma_omega)? / positive("sigma", sigma)?;
    let pe = |d: f64| {
        pe_truncated_gaussian(
            &PulseSpec::from_effective_rate(omega_eff, sigma, n_trunc, d)?,
            mode,
        )
    };
    let half = 0.5 * pe(0.0)?;
    if half < ZERO_LEVEL {
        return Err(Error::Invalid("central fringe has no resolvable peak"));
    }
    let step = omega_eff / 200.0;
    let mut lo = 0.0;
    let mut hi = None;
    for k in 1..=20_000 {
        let d = f64::from(k) * step;
        if pe(d)? < half {
            hi = Some(d);
            break;
        }
        lo = d;
    }
    let mut hi = hi.ok_or(Error::OutOfRange {
        what: "half-maximum detuning",
        lo: 0.0,
        hi: 20_000.0 * step,
    })?;
    while hi - lo > 1e-9 * hi {
        let mid = 0.5 * (lo + hi);
        if pe(mid)? < half {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
