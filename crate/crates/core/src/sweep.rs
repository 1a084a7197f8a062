//! Best-case dephasing over a (frequency, temperature) design space.
//!
//! Each cell assumes a perfect device (`T1,0 = T2,0 = ∞`), so only resonator
//! thermal photons and quasiparticle loss remain:
//! `1/T2 = Γφ(χ) + Γ_qp/2`, maximized over the dispersive shift `χ`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use libm::{exp, log};

use crate::device::SuperconductorMaterial;
use crate::error::{positive, Error, Result};
use crate::thermal::{gamma_phi, qp_rate, thermal_occupation};

/// Sentinel returned for diverging T2, s.
pub const T2_CAP: f64 = 1e6;
/// Temperature resolution of [`max_operating_temperature`], K.
pub const TEMPERATURE_TOL: f64 = 1e-3;
const CHI_REL_TOL: f64 = 1e-4;
const DEFAULT_SEARCH_POINTS: usize = 33;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// Qubit frequencies, Hz, increasing.
    pub f_grid: Vec<f64>,
    /// Temperatures, K, increasing.
    pub t_grid: Vec<f64>,
    /// Readout quality factor `ω_R/γ`.
    pub q_readout: f64,
    /// Search interval for χ in units of γ.
    pub chi_range: (f64, f64),
    pub material: SuperconductorMaterial,
    /// `f_R − f_q`, Hz.
    pub resonator_offset: f64,
    /// Log-spaced χ samples preceding the golden-section refinement.
    pub search_points: usize,
}

impl SweepSpec {
    pub const DEFAULT_CHI_RANGE: (f64, f64) = (0.3, 5.0);

    pub fn new(
        f_grid: Vec<f64>,
        t_grid: Vec<f64>,
        q_readout: f64,
        material: SuperconductorMaterial,
    ) -> Result<Self> {
        let s = Self {
            f_grid,
            t_grid,
            q_readout,
            chi_range: Self::DEFAULT_CHI_RANGE,
            material,
            resonator_offset: 0.0,
            search_points: DEFAULT_SEARCH_POINTS,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_chi_range(mut self, lo: f64, hi: f64) -> Result<Self> {
        self.chi_range = (lo, hi);
        self.validate()?;
        Ok(self)
    }

    pub fn with_resonator_offset(mut self, offset: f64) -> Result<Self> {
        self.resonator_offset = offset;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        for (grid, what) in [
            (&self.f_grid, "frequency grid"),
            (&self.t_grid, "temperature grid"),
        ] {
            if grid.is_empty() {
                return Err(Error::Invalid("sweep grids must be non-empty"));
            }
            if grid.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::Invalid(match what {
                    "frequency grid" => "frequency grid must be strictly increasing",
                    _ => "temperature grid must be strictly increasing",
                }));
            }
        }
        for &f in &self.f_grid {
            positive("f_q", f)?;
            positive("f_r", f + self.resonator_offset)?;
        }
        for &t in &self.t_grid {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::Domain {
                    name: "temperature",
                    value: t,
                    reason: "must be finite and non-negative",
                });
            }
        }
        positive("q_readout", self.q_readout)?;
        let (lo, hi) = self.chi_range;
        positive("chi_range.lo", lo)?;
        if !(hi >= lo && hi.is_finite()) {
            return Err(Error::Domain {
                name: "chi_range.hi",
                value: hi,
                reason: "must be finite and at least chi_range.lo",
            });
        }
        if self.search_points < 3 {
            return Err(Error::Domain {
                name: "search_points",
                value: self.search_points as f64,
                reason: "at least 3 search points required",
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BestCase {
    /// Maximum T2 over the χ range, s, capped at [`T2_CAP`].
    pub t2: f64,
    /// Optimal χ in units of γ.
    pub chi_star: f64,
    pub capped: bool,
    /// The optimum sits on an end of the χ range.
    pub at_boundary: bool,
}

/// Best-case T2 at one `(f_q, T)` cell.
pub fn best_case_t2(f_q: f64, t: f64, spec: &SweepSpec) -> Result<BestCase> {
    spec.validate()?;
    positive("f_q", f_q)?;
    let f_r = positive("f_r", f_q + spec.resonator_offset)?;
    let gamma = 2.0 * PI * f_r / spec.q_readout;
    let n = thermal_occupation(f_r, t)?;
    let qp = if t > 0.0 {
        qp_rate(2.0 * PI * f_q, spec.material.gap0(), t)?
    } else {
        0.0
    };
    let rate = |u: f64| -> Result<f64> { Ok(gamma_phi(u * gamma, gamma, n)? + 0.5 * qp) };

    let (lo, hi) = spec.chi_range;
    let (llo, lhi) = (log(lo), log(hi));
    let m = spec.search_points;
    let at = |k: usize| {
        if lo == hi {
            lo
        } else {
            exp(llo + (lhi - llo) * k as f64 / (m - 1) as f64)
        }
    };
    let mut best_k = 0;
    let mut best_rate = f64::INFINITY;
    for k in 0..m {
        let r = rate(at(k))?;
        if r < best_rate {
            best_rate = r;
            best_k = k;
        }
    }
    // golden-section on ln χ inside the neighbouring samples
    let (mut a, mut b) = (
        log(at(best_k.saturating_sub(1))),
        log(at((best_k + 1).min(m - 1))),
    );
    let g = 0.5 * (libm::sqrt(5.0) - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut rc, mut rd) = (rate(exp(c))?, rate(exp(d))?);
    while b - a > CHI_REL_TOL {
        if rc <= rd {
            b = d;
            d = c;
            rd = rc;
            c = b - g * (b - a);
            rc = rate(exp(c))?;
        } else {
            a = c;
            c = d;
            rc = rd;
            d = a + g * (b - a);
            rd = rate(exp(d))?;
        }
    }
    let mut chi_star = exp(0.5 * (a + b));
    let mut r_star = rate(chi_star)?;
    for end in [lo, hi] {
        let r = rate(end)?;
        if r <= r_star {
            r_star = r;
            chi_star = end;
        }
    }
    let at_boundary =
        (chi_star / lo - 1.0).abs() <= CHI_REL_TOL || (chi_star / hi - 1.0).abs() <= CHI_REL_TOL;
    let raw = if r_star > 0.0 {
        1.0 / r_star
    } else {
        f64::INFINITY
    };
    let capped = !(raw <= T2_CAP);
    Ok(BestCase {
        t2: if capped { T2_CAP } else { raw },
        chi_star,
        capped,
        at_boundary,
    })
}

/// Row-major `t_grid.len() × f_grid.len()` maps of best-case results.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub rows: usize,
    pub cols: usize,
    /// Best-case T2, s.
    pub values: Vec<f64>,
    /// Optimal χ in units of γ.
    pub argmax_chi: Vec<f64>,
    pub capped: Vec<bool>,
    pub at_boundary: Vec<bool>,
}

impl SweepGrid {
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    /// Assembles a grid from per-row results, in row order.
    pub fn from_rows(rows: Vec<Vec<BestCase>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || cols == 0 || rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Invalid(
                "sweep rows must be non-empty and equal length",
            ));
        }
        let cells: Vec<BestCase> = rows.iter().flatten().copied().collect();
        Ok(Self {
            rows: rows.len(),
            cols,
            values: cells.iter().map(|c| c.t2).collect(),
            argmax_chi: cells.iter().map(|c| c.chi_star).collect(),
            capped: cells.iter().map(|c| c.capped).collect(),
            at_boundary: cells.iter().map(|c| c.at_boundary).collect(),
        })
    }
}

/// One temperature row of the map.
pub fn best_case_row(t: f64, spec: &SweepSpec) -> Result<Vec<BestCase>> {
    spec.f_grid
        .iter()
        .map(|&f| best_case_t2(f, t, spec))
        .collect()
}

pub fn max_t2_map(spec: &SweepSpec) -> Result<SweepGrid> {
    spec.validate()?;
    let rows = spec
        .t_grid
        .iter()
        .map(|&t| best_case_row(t, spec))
        .collect::<Result<Vec<_>>>()?;
    SweepGrid::from_rows(rows)
}

/// Temperature at which the best-case T2 falls to `threshold` (s), located
/// within the temperature grid and refined by bisection to 1 mK.
pub fn max_operating_temperature(f_q: f64, threshold: f64, spec: &SweepSpec) -> Result<f64> {
    positive("threshold", threshold)?;
    spec.validate()?;
    let t2 = |t: f64| best_case_t2(f_q, t, spec).map(|b| b.t2);
    let grid = &spec.t_grid;
    let lo = grid[0];
    let hi = grid[grid.len() - 1];
    let out_of_range = Error::OutOfRange {
        what: "T2 threshold crossing",
        lo,
        hi,
    };
    if t2(lo)? < threshold {
        return Err(out_of_range);
    }
    let mut bracket = None;
    for w in grid.windows(2) {
        if t2(w[1])? < threshold {
            bracket = Some((w[0], w[1]));
            break;
        }
    }
    let (mut a, mut b) = bracket.ok_or(out_of_range)?;
    while b - a > TEMPERATURE_TOL {
        let mid = 0.5 * (a + b);
        if t2(mid)? < threshold {
            b = mid;
        } else {
            a = mid;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thermal::gamma_phi;
    use alloc::vec;

    fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect()
    }

    fn spec(q: f64) -> SweepSpec {
        SweepSpec::new(
            linspace(10e9, 100e9, 10),
            linspace(0.05, 1.5, 30),
            q,
            SuperconductorMaterial::niobium(),
        )
        .unwrap()
    }

    #[test]
    fn validation() {
        let nb = SuperconductorMaterial::niobium();
        assert!(SweepSpec::new(vec![], vec![0.1], 1e3, nb.clone()).is_err());
        assert!(SweepSpec::new(vec![2e10, 1e10], vec![0.1], 1e3, nb.clone()).is_err());
        assert!(SweepSpec::new(vec![1e10], vec![0.1], 0.0, nb.clone()).is_err());
        let s = SweepSpec::new(vec![1e10], vec![0.1], 1e3, nb).unwrap();
        assert!(s.clone().with_chi_range(0.0, 1.0).is_err());
        assert!(s.clone().with_chi_range(2.0, 1.0).is_err());
        assert!(s.with_resonator_offset(-2e10).is_err());
    }

    #[test]
    fn zero_temperature_is_capped() {
        let b = best_case_t2(20e9, 0.0, &spec(1e4)).unwrap();
        assert!(b.capped);
        assert_eq!(b.t2, T2_CAP);
        let cold = best_case_t2(20e9, 0.02, &spec(1e4)).unwrap();
        assert!(cold.capped);
    }

    #[test]
    fn optimum_matches_direct_minimum() {
        let s = spec(3e3);
        let b = best_case_t2(20e9, 0.3, &s).unwrap();
        let gamma = 2.0 * PI * 20e9 / 3e3;
        let n = thermal_occupation(20e9, 0.3).unwrap();
        let qp = qp_rate(2.0 * PI * 20e9, s.material.gap0(), 0.3).unwrap();
        let direct = (0..=4000)
            .map(|k| {
                let u = 0.3 * (5.0f64 / 0.3).powf(f64::from(k) / 4000.0);
                1.0 / (gamma_phi(u * gamma, gamma, n).unwrap() + 0.5 * qp)
            })
            .fold(0.0, f64::max);
        assert!((b.t2 / direct - 1.0).abs() < 1e-9);
        // Γφ grows with |χ| so the optimum is the smallest allowed shift
        assert!(b.at_boundary);
        assert_eq!(b.chi_star, 0.3);
    }

    #[test]
    fn search_resolution_invariance() {
        let mut s = spec(3e3);
        let coarse = best_case_t2(30e9, 0.4, &s).unwrap();
        s.search_points = 129;
        let fine = best_case_t2(30e9, 0.4, &s).unwrap();
        assert!((coarse.t2 / fine.t2 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn one_by_one_map_matches_scalar() {
        let s = SweepSpec::new(
            vec![40e9],
            vec![0.5],
            1e4,
            SuperconductorMaterial::niobium(),
        )
        .unwrap();
        let g = max_t2_map(&s).unwrap();
        assert_eq!((g.rows, g.cols), (1, 1));
        assert_eq!(g.values[0], best_case_t2(40e9, 0.5, &s).unwrap().t2);
    }

    #[test]
    fn map_shape_properties() {
        let s = spec(3e6).with_chi_range(0.3, 5.0).unwrap();
        let g = max_t2_map(&s).unwrap();
        assert!(g.values.iter().all(|&v| v > 0.0));
        for c in 0..g.cols {
            for r in 1..g.rows {
                assert!(g.get(r, c) <= g.get(r - 1, c), "col {c} row {r}");
            }
        }
        let r300 = s.t_grid.iter().position(|&t| t >= 0.3).unwrap();
        for c in 1..g.cols {
            assert!(g.get(r300, c) > g.get(r300, c - 1) || g.capped[r300 * g.cols + c]);
        }
    }

    #[test]
    fn increasing_in_frequency_at_300_mk() {
        let s = spec(3e3);
        let t2: Vec<f64> = linspace(10e9, 100e9, 31)
            .iter()
            .map(|&f| best_case_t2(f, 0.3, &s).unwrap().t2)
            .collect();
        assert!(t2.windows(2).all(|w| w[1] > w[0]), "{t2:?}");
    }

    #[test]
    fn niobium_collapse_near_1_1_k() {
        let s = spec(3e6);
        for &f in &s.f_grid {
            let a = best_case_t2(f, 0.95, &s).unwrap().t2;
            let b = best_case_t2(f, 1.25, &s).unwrap().t2;
            assert!(a / b > 10.0, "{f}: {a} {b}");
        }
        let t2 = best_case_t2(100e9, 1.0, &s).unwrap().t2;
        assert!((1e-6..1e-3).contains(&t2), "{t2}");
    }

    #[test]
    fn lower_q_lowers_the_map() {
        let hi = max_t2_map(&spec(1e5)).unwrap();
        let lo = max_t2_map(&spec(1e4)).unwrap();
        for (a, b) in hi.values.iter().zip(&lo.values) {
            assert!(b <= a);
        }
        assert!(lo.values.iter().zip(&hi.values).any(|(b, a)| b < a));
    }

    #[test]
    fn operating_temperature() {
        // γ/2π ≈ 7 MHz at 20 GHz, χ from γ to 5γ
        let s = SweepSpec::new(
            vec![20e9],
            linspace(0.02, 1.5, 149),
            20e9 / 7e6,
            SuperconductorMaterial::niobium(),
        )
        .unwrap()
        .with_chi_range(1.0, 5.0)
        .unwrap();
        let t = max_operating_temperature(20e9, 1e-6, &s).unwrap();
        assert!((0.2..=0.3).contains(&t), "{t}");
        let b = best_case_t2(20e9, t, &s).unwrap().t2;
        assert!((b / 1e-6 - 1.0).abs() < 0.05);
        let mut prev = 0.0;
        for f in [10e9, 20e9, 40e9, 80e9] {
            let t = max_operating_temperature(f, 1e-6, &s).unwrap();
            assert!(t > prev);
            prev = t;
        }
        assert!(matches!(
            max_operating_temperature(20e9, 1e7, &s),
            Err(Error::OutOfRange { .. })
        ));
        assert!(matches!(
            max_operating_temperature(20e9, 1e-15, &s),
            Err(Error::OutOfRange { .. })
        ));
    }
}
