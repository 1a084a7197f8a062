//! Levenberg–Marquardt with Marquardt diagonal scaling.

use alloc::vec;
use alloc::vec::Vec;

use libm::sqrt;

use crate::linalg;

pub(crate) const MAX_ITERATIONS: usize = 200;
pub(crate) const GRADIENT_TOL: f64 = 1e-10;
const STEP_TOL: f64 = 1e-12;
const LAMBDA_MAX: f64 = 1e16;

/// `eval(p, r, j)` fills weighted residuals `r` (length m) and their
/// Jacobian `j` (m × n, row-major) with respect to `p`.
pub(crate) struct Problem<F> {
    pub eval: F,
    pub m: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct Outcome {
    pub params: Vec<f64>,
    /// Sum of squared weighted residuals.
    pub cost: f64,
    /// `(JᵀJ)⁻¹` at the optimum, row-major; `None` when singular.
    pub normal_inverse: Option<Vec<f64>>,
    pub converged: bool,
    pub iterations: usize,
    /// Cost after every accepted step, starting with the initial cost.
    #[cfg_attr(not(test), allow(dead_code))]
    pub history: Vec<f64>,
}

fn cost_of(r: &[f64]) -> f64 {
    r.iter().map(|x| x * x).sum()
}

pub(crate) fn minimize<F>(problem: &mut Problem<F>, p0: &[f64]) -> Outcome
where
    F: FnMut(&[f64], &mut [f64], &mut [f64]),
{
    let n = p0.len();
    let m = problem.m;
    let mut p = p0.to_vec();
    let mut r = vec![0.0; m];
    let mut jac = vec![0.0; m * n];
    let mut trial_r = vec![0.0; m];
    let mut trial_j = vec![0.0; m * n];
    (problem.eval)(&p, &mut r, &mut jac);
    let mut cost = cost_of(&r);
    let mut history = vec![cost];
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;

    if !cost.is_finite() {
        return Outcome {
            params: p,
            cost,
            normal_inverse: None,
            converged: false,
            iterations: 0,
            history,
        };
    }

    'outer: while iterations < MAX_ITERATIONS {
        iterations += 1;
        let (jtj, g) = normal_equations(&jac, &r, m, n);
        if gradient_small(&jac, &r, &g, m, n) {
            converged = true;
            break;
        }
        loop {
            let mut a = jtj.clone();
            for k in 0..n {
                let d = jtj[k * n + k];
                a[k * n + k] = d + lambda * if d > 0.0 { d } else { 1.0 };
            }
            let neg_g: Vec<f64> = g.iter().map(|x| -x).collect();
            let step = match jacobi_solve(&a, &neg_g, n) {
                Some(s) => s,
                None => {
                    lambda *= 10.0;
                    if lambda > LAMBDA_MAX {
                        break 'outer;
                    }
                    continue;
                }
            };
            let tiny = step
                .iter()
                .zip(&p)
                .all(|(s, v)| s.abs() <= STEP_TOL * (v.abs() + STEP_TOL));
            let trial: Vec<f64> = p.iter().zip(&step).map(|(a, b)| a + b).collect();
            (problem.eval)(&trial, &mut trial_r, &mut trial_j);
            let trial_cost = cost_of(&trial_r);
            if trial_cost.is_finite() && trial_cost < cost {
                p = trial;
                core::mem::swap(&mut r, &mut trial_r);
                core::mem::swap(&mut jac, &mut trial_j);
                cost = trial_cost;
                history.push(cost);
                lambda = (lambda / 10.0).max(1e-12);
                if tiny {
                    converged = true;
                    break 'outer;
                }
                break;
            }
            if tiny {
                // no representable step lowers the cost
                converged = true;
                break 'outer;
            }
            lambda *= 10.0;
            if lambda > LAMBDA_MAX {
                break 'outer;
            }
        }
    }

    let (jtj, _) = normal_equations(&jac, &r, m, n);
    let normal_inverse = jacobi_invert(&jtj, n);
    Outcome {
        params: p,
        cost,
        normal_inverse,
        converged,
        iterations,
        history,
    }
}

/// Diagonal scaling keeps parameters of very different magnitude (seconds
/// next to populations) from tripping the singularity threshold.
fn jacobi_scale(a: &[f64], n: usize) -> Option<(Vec<f64>, Vec<f64>)> {
    let d: Vec<f64> = (0..n).map(|k| sqrt(a[k * n + k])).collect();
    if d.iter().any(|&x| x == 0.0 || !x.is_finite()) {
        return None;
    }
    let mut s = a.to_vec();
    for i in 0..n {
        for j in 0..n {
            s[i * n + j] /= d[i] * d[j];
        }
    }
    Some((s, d))
}

fn jacobi_solve(a: &[f64], b: &[f64], n: usize) -> Option<Vec<f64>> {
    let (s, d) = jacobi_scale(a, n)?;
    let bs: Vec<f64> = b.iter().zip(&d).map(|(x, y)| x / y).collect();
    let x = linalg::solve(&s, &bs, n)?;
    Some(x.iter().zip(&d).map(|(x, y)| x / y).collect())
}

fn jacobi_invert(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let (s, d) = jacobi_scale(a, n)?;
    let mut inv = linalg::invert(&s, n)?;
    for i in 0..n {
        for j in 0..n {
            inv[i * n + j] /= d[i] * d[j];
        }
    }
    Some(inv)
}

fn normal_equations(jac: &[f64], r: &[f64], m: usize, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut jtj = vec![0.0; n * n];
    let mut g = vec![0.0; n];
    for i in 0..m {
        let row = &jac[i * n..(i + 1) * n];
        for a in 0..n {
            g[a] += row[a] * r[i];
            for b in a..n {
                jtj[a * n + b] += row[a] * row[b];
            }
        }
    }
    for a in 0..n {
        for b in 0..a {
            jtj[a * n + b] = jtj[b * n + a];
        }
    }
    (jtj, g)
}

/// Scale-free gradient test: the cosine between every Jacobian column and
/// the residual vector.
fn gradient_small(jac: &[f64], r: &[f64], g: &[f64], m: usize, n: usize) -> bool {
    let rn = sqrt(cost_of(r));
    if rn == 0.0 {
        return true;
    }
    (0..n).all(|k| {
        let cn = sqrt((0..m).map(|i| jac[i * n + k] * jac[i * n + k]).sum::<f64>());
        cn == 0.0 || g[k].abs() / (cn * rn) <= GRADIENT_TOL
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use libm::exp;

    #[test]
    fn fits_exponential_and_cost_never_increases() {
        let xs: Vec<f64> = (0..30).map(|i| f64::from(i) * 0.2).collect();
        let ys: Vec<f64> = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| 2.0 * exp(-x / 1.3) + 0.1 + if i % 2 == 0 { 0.01 } else { -0.01 })
            .collect();
        let mut prob = Problem {
            m: xs.len(),
            eval: |p: &[f64], r: &mut [f64], j: &mut [f64]| {
                for (i, (&x, &y)) in xs.iter().zip(&ys).enumerate() {
                    let e = exp(-x / p[1]);
                    r[i] = y - (p[0] * e + p[2]);
                    j[i * 3] = -e;
                    j[i * 3 + 1] = -p[0] * e * x / (p[1] * p[1]);
                    j[i * 3 + 2] = -1.0;
                }
            },
        };
        let out = minimize(&mut prob, &[0.5, 5.0, 0.0]);
        assert!(out.converged);
        assert!((out.params[1] - 1.3).abs() < 0.05);
        assert!(out.history.windows(2).all(|w| w[1] <= w[0]));
        assert!(out.normal_inverse.is_some());
    }

    #[test]
    fn unidentifiable_parameters_are_singular() {
        let mut prob = Problem {
            m: 5,
            eval: |p: &[f64], r: &mut [f64], j: &mut [f64]| {
                for i in 0..5 {
                    r[i] = 1.0 - (p[0] + p[1]);
                    j[i * 2] = -1.0;
                    j[i * 2 + 1] = -1.0;
                }
            },
        };
        let out = minimize(&mut prob, &[0.0, 0.0]);
        assert!(out.normal_inverse.is_none());
    }
}
