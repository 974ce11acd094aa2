//! Limited-memory BFGS with backtracking line search, for smooth convex
//! functions of a few dozen variables.

use std::collections::VecDeque;

use crate::error::{Error, Result};

const MEMORY: usize = 10;
const ARMIJO: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub evaluations: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Minimizes `f` (returning value and gradient) from `x0` until the gradient
/// norm is at most `tolerance`.
pub fn minimize<F>(f: F, x0: &[f64], tolerance: f64, max_iterations: usize) -> Result<Minimum>
where
    F: Fn(&[f64]) -> (f64, Vec<f64>),
{
    let mut x = x0.to_vec();
    let (mut fx, mut g) = f(&x);
    let mut evaluations = 1;
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(MEMORY);

    for iteration in 0..max_iterations {
        let gn = norm(&g);
        if !fx.is_finite() || !gn.is_finite() {
            return Err(Error::NonFinite { iteration });
        }
        if gn <= tolerance {
            return Ok(Minimum {
                x,
                value: fx,
                grad_norm: gn,
                iterations: iteration,
                evaluations,
            });
        }

        let mut d = direction(&g, &history);
        let mut slope = dot(&d, &g);
        if !(slope < 0.0) {
            history.clear();
            d = g.iter().map(|v| -v).collect();
            slope = -gn * gn;
        }

        let mut step = if history.is_empty() {
            (1.0 / gn).min(1.0)
        } else {
            1.0
        };
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + step * di).collect();
            let (ft, gt) = f(&trial);
            evaluations += 1;
            if ft.is_finite() && ft <= fx + ARMIJO * step * slope {
                accepted = Some((trial, ft, gt));
                break;
            }
            step *= 0.5;
        }
        let Some((xn, fxn, gnew)) = accepted else {
            if history.is_empty() {
                return Err(Error::NoConvergence {
                    iterations: iteration,
                    grad_norm: gn,
                });
            }
            // line search failed along the quasi-Newton direction: restart
            history.clear();
            continue;
        };

        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gnew.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * norm(&s) * norm(&y) && sy > 0.0 {
            if history.len() == MEMORY {
                history.pop_front();
            }
            history.push_back((s, y, 1.0 / sy));
        }
        x = xn;
        fx = fxn;
        g = gnew;
    }
    let grad_norm = norm(&g);
    if grad_norm <= tolerance {
        return Ok(Minimum {
            x,
            value: fx,
            grad_norm,
            iterations: max_iterations,
            evaluations,
        });
    }
    Err(Error::NoConvergence {
        iterations: max_iterations,
        grad_norm,
    })
}

/// Two-loop recursion for `-H g`.
fn direction(g: &[f64], history: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q = g.to_vec();
    let mut alphas = Vec::with_capacity(history.len());
    for (s, y, rho) in history.iter().rev() {
        let a = rho * dot(s, &q);
        q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
        alphas.push(a);
    }
    if let Some((s, y, _)) = history.back() {
        let gamma = dot(s, y) / dot(y, y);
        q.iter_mut().for_each(|v| *v *= gamma);
    }
    for ((s, y, rho), a) in history.iter().zip(alphas.iter().rev()) {
        let b = rho * dot(y, &q);
        q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - b) * si);
    }
    q.iter_mut().for_each(|v| *v = -*v);
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| {
            let (a, b) = (x[0], x[1]);
            let v = (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2);
            let g = vec![
                -2.0 * (1.0 - a) - 400.0 * a * (b - a * a),
                200.0 * (b - a * a),
            ];
            (v, g)
        };
        let m = minimize(f, &[-1.2, 1.0], 1e-8, 10_000).unwrap();
        assert!((m.x[0] - 1.0).abs() < 1e-6 && (m.x[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn ill_conditioned_quadratic() {
        let scales = [1.0, 1e3, 1e-2, 50.0];
        let f = |x: &[f64]| {
            let v: f64 = x
                .iter()
                .zip(&scales)
                .map(|(xi, s)| 0.5 * s * (xi - 1.0).powi(2))
                .sum();
            let g = x
                .iter()
                .zip(&scales)
                .map(|(xi, s)| s * (xi - 1.0))
                .collect();
            (v, g)
        };
        let m = minimize(f, &[0.0; 4], 1e-10, 1000).unwrap();
        for xi in &m.x {
            assert!((xi - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn unbounded_below_does_not_converge() {
        let f = |x: &[f64]| (-x[0], vec![-1.0]);
        assert!(matches!(
            minimize(f, &[0.0], 1e-6, 50),
            Err(Error::NoConvergence { .. })
        ));
    }
}
