//! Adaptive Gauss–Legendre quadrature for smooth integrands.

use alloc::vec::Vec;
use core::f64::consts::PI;

use libm::cos;

use crate::error::{Error, Result};

/// Fixed-order Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds an `n`-point rule by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "rule needs at least one node");
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut z = cos(PI * (i as f64 + 0.75) / (nf + 0.5));
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, z);
                dp = d;
                let dz = p / d;
                z -= dz;
                if dz.abs() <= 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, z);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error_estimate: f64,
    pub intervals: usize,
}

/// Adaptive bisection driven by the difference between an `n`- and a
/// `2n`-point Gauss–Legendre rule on each panel.
#[derive(Debug, Clone)]
pub struct AdaptiveGaussLegendre {
    coarse: GaussLegendre,
    fine: GaussLegendre,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl AdaptiveGaussLegendre {
    pub fn new(order: usize, abs_tol: f64) -> Self {
        Self {
            coarse: GaussLegendre::new(order),
            fine: GaussLegendre::new(2 * order),
            abs_tol,
            max_intervals: 4096,
        }
    }

    pub fn order(&self) -> usize {
        self.coarse.order()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> Result<Integral> {
        if a == b {
            return Ok(Integral {
                value: 0.0,
                error_estimate: 0.0,
                intervals: 0,
            });
        }
        let width = (b - a).abs();
        let mut stack = alloc::vec![(a, b)];
        let mut total = 0.0;
        let mut err_total = 0.0;
        let mut accepted = 0usize;
        let mut worst = 0.0f64;
        while let Some((lo, hi)) = stack.pop() {
            let c = self.coarse.integrate(&mut f, lo, hi);
            let fine = self.fine.integrate(&mut f, lo, hi);
            let err = (fine - c).abs();
            let budget = self.abs_tol * ((hi - lo).abs() / width);
            let mid = 0.5 * (lo + hi);
            let splittable = mid > lo.min(hi) && mid < lo.max(hi);
            if err <= budget || !splittable || accepted + stack.len() >= self.max_intervals {
                if err > budget {
                    worst = worst.max(err);
                }
                total += fine;
                err_total += err;
                accepted += 1;
            } else {
                stack.push((mid, hi));
                stack.push((lo, mid));
            }
        }
        if worst > 0.0 && err_total > self.abs_tol {
            return Err(Error::Numerical {
                what: "adaptive quadrature",
                estimate: err_total,
                tolerance: self.abs_tol,
            });
        }
        Ok(Integral {
            value: total,
            error_estimate: err_total,
            intervals: accepted,
        })
    }
}

impl Default for AdaptiveGaussLegendre {
    fn default() -> Self {
        Self::new(10, 1e-10)
    }
}
