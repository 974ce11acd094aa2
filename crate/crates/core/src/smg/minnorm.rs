//! Minimum-norm point in the convex hull of a few gradients.
//!
//! Solves `min_λ |Σ λ_i g_i|^2` over the probability simplex. Two gradients
//! have a closed form; three or more use Frank–Wolfe with away steps and
//! exact line search on the `m × m` Gram matrix, falling back to enumerating
//! active sets if the iteration budget runs out.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const KKT_TOLERANCE: f64 = 1e-8;
const MAX_ITERATIONS: usize = 10_000;

/// Convex-combination weights: nonnegative, summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SimplexWeights(Vec<f64>);

impl SimplexWeights {
    pub fn uniform(m: usize) -> Self {
        SimplexWeights(vec![1.0 / m as f64; m])
    }

    /// Projects tiny negative round-off to zero and renormalizes.
    pub fn from_raw(mut w: Vec<f64>) -> Result<Self> {
        for v in &mut w {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        let total: f64 = w.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::invalid(format!(
                "weights {w:?} are not on the simplex"
            )));
        }
        w.iter_mut().for_each(|v| *v /= total);
        Ok(SimplexWeights(w))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `Σ λ_i g_i`.
    pub fn combine(&self, gradients: &[Vec<f64>]) -> Vec<f64> {
        let mut out = vec![0.0; gradients.first().map_or(0, Vec::len)];
        for (w, g) in self.0.iter().zip(gradients) {
            for (o, gi) in out.iter_mut().zip(g) {
                *o += w * gi;
            }
        }
        out
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn gram(gradients: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let m = gradients.len();
    let mut q = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in i..m {
            let v = dot(&gradients[i], &gradients[j]);
            q[i][j] = v;
            q[j][i] = v;
        }
    }
    q
}

fn mat_vec(q: &[Vec<f64>], w: &[f64]) -> Vec<f64> {
    q.iter().map(|row| dot(row, w)).collect()
}

/// KKT residual of `w` for `min w'Qw` on the simplex: the worst violation of
/// `(Qw)_i >= w'Qw` over all vertices plus the worst complementarity gap
/// `w_i |(Qw)_i - w'Qw|`.
fn kkt_from_gram(q: &[Vec<f64>], w: &[f64]) -> f64 {
    let qw = mat_vec(q, w);
    let val = dot(w, &qw);
    let stationarity = qw.iter().map(|g| val - g).fold(0.0, f64::max);
    let slackness = qw
        .iter()
        .zip(w)
        .map(|(g, wi)| wi * (g - val).abs())
        .fold(0.0, f64::max);
    stationarity + slackness
}

pub fn kkt_residual(gradients: &[Vec<f64>], weights: &SimplexWeights) -> f64 {
    kkt_from_gram(&gram(gradients), weights.as_slice())
}

fn check(gradients: &[Vec<f64>]) -> Result<()> {
    let first = gradients
        .first()
        .ok_or_else(|| Error::invalid("min-norm subproblem needs at least one gradient"))?;
    for g in gradients {
        if g.len() != first.len() {
            return Err(Error::DimensionMismatch {
                expected: first.len(),
                got: g.len(),
            });
        }
        if g.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("gradient has non-finite entries"));
        }
    }
    Ok(())
}

/// Weights of the min-norm convex combination of `gradients`.
///
/// Degenerate subproblems (identical or all-zero gradients) return uniform
/// weights.
pub fn solve_minnorm(gradients: &[Vec<f64>]) -> Result<SimplexWeights> {
    check(gradients)?;
    match gradients.len() {
        1 => Ok(SimplexWeights(vec![1.0])),
        2 => Ok(two_gradients(&gradients[0], &gradients[1])),
        _ => frank_wolfe(&gram(gradients)),
    }
}

fn two_gradients(g1: &[f64], g2: &[f64]) -> SimplexWeights {
    let diff_sq: f64 = g1.iter().zip(g2).map(|(a, b)| (a - b) * (a - b)).sum();
    if diff_sq == 0.0 {
        return SimplexWeights::uniform(2);
    }
    let num: f64 = g1.iter().zip(g2).map(|(a, b)| (b - a) * b).sum();
    let l1 = (num / diff_sq).clamp(0.0, 1.0);
    SimplexWeights(vec![l1, 1.0 - l1])
}

fn frank_wolfe(q: &[Vec<f64>]) -> Result<SimplexWeights> {
    let m = q.len();
    let scale = q.iter().enumerate().map(|(i, r)| r[i]).fold(0.0, f64::max);
    let tol = (1e-4 * KKT_TOLERANCE * scale).max(f64::MIN_POSITIVE);
    let mut w = vec![1.0 / m as f64; m];

    for _ in 0..MAX_ITERATIONS {
        if kkt_from_gram(q, &w) <= tol {
            return SimplexWeights::from_raw(w);
        }
        let qw = mat_vec(q, &w);
        let val = dot(&w, &qw);
        let (s, gs) = qw
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |best, (i, g)| if g < best.1 { (i, g) } else { best },
            );
        let (a, ga) = qw
            .iter()
            .copied()
            .enumerate()
            .filter(|&(i, _)| w[i] > 0.0)
            .fold((0, f64::NEG_INFINITY), |best, (i, g)| {
                if g > best.1 {
                    (i, g)
                } else {
                    best
                }
            });

        let fw_gap = val - gs;
        let away_gap = ga - val;
        let (dir, max_step) = if fw_gap >= away_gap {
            let mut d: Vec<f64> = w.iter().map(|v| -v).collect();
            d[s] += 1.0;
            (d, 1.0)
        } else {
            let mut d = w.clone();
            d[a] -= 1.0;
            let cap = if w[a] < 1.0 {
                w[a] / (1.0 - w[a])
            } else {
                f64::INFINITY
            };
            (d, cap)
        };
        let qd = mat_vec(q, &dir);
        let curvature = dot(&dir, &qd);
        let slope = dot(&dir, &qw);
        if slope >= 0.0 {
            break;
        }
        let step = if curvature > 0.0 {
            (-slope / curvature).min(max_step)
        } else {
            max_step
        };
        if !step.is_finite() {
            break;
        }
        for (wi, di) in w.iter_mut().zip(&dir) {
            *wi += step * di;
        }
        // an away step to its cap drops the vertex exactly
        if fw_gap < away_gap && step == max_step {
            w[a] = 0.0;
        }
        w.iter_mut().for_each(|v| *v = v.max(0.0));
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|v| *v /= total);
    }

    let fw = SimplexWeights::from_raw(w)?;
    if kkt_from_gram(q, fw.as_slice()) <= tol {
        return Ok(fw);
    }
    let residual = |w: &SimplexWeights| kkt_from_gram(q, w.as_slice());
    Ok(match enumerate_supports(q) {
        Some(e) if residual(&e) <= residual(&fw) => e,
        _ => fw,
    })
}

/// Exact solution by trying every support set; only for small `m`.
fn enumerate_supports(q: &[Vec<f64>]) -> Option<SimplexWeights> {
    let m = q.len();
    if m > 12 {
        return None;
    }
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 1u32..(1 << m) {
        let support: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
        let sub: Vec<Vec<f64>> = support
            .iter()
            .map(|&i| support.iter().map(|&j| q[i][j]).collect())
            .collect();
        let Some(u) = solve_linear(sub, vec![1.0; support.len()]) else {
            continue;
        };
        let total: f64 = u.iter().sum();
        if total.abs() < 1e-300 {
            continue;
        }
        let mut w = vec![0.0; m];
        let mut feasible = true;
        for (&i, ui) in support.iter().zip(&u) {
            let v = ui / total;
            if v < -1e-12 {
                feasible = false;
            }
            w[i] = v.max(0.0);
        }
        if !feasible {
            continue;
        }
        let value = dot(&w, &mat_vec(q, &w));
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, w));
        }
    }
    best.and_then(|(_, w)| SimplexWeights::from_raw(w).ok())
}

/// Gaussian elimination with partial pivoting; `None` when singular.
fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = a
        .iter()
        .flatten()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() <= 1e-12 * scale {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn norm(v: &[f64]) -> f64 {
        dot(v, v).sqrt()
    }

    #[test]
    fn orthogonal_unit_gradients() {
        let g = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let w = solve_minnorm(&g).unwrap();
        assert_eq!(w.as_slice(), &[0.5, 0.5]);
        assert_eq!(w.combine(&g), vec![0.5, 0.5]);
    }

    #[test]
    fn shorter_gradient_wins() {
        let g = vec![vec![1.0, 0.0], vec![2.0, 0.0]];
        assert_eq!(solve_minnorm(&g).unwrap().as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn degenerate_inputs_give_uniform_weights() {
        let g = vec![vec![0.3, -1.0], vec![0.3, -1.0]];
        assert_eq!(solve_minnorm(&g).unwrap().as_slice(), &[0.5, 0.5]);
        let z = vec![vec![0.0; 3]; 3];
        let w = solve_minnorm(&z).unwrap();
        for v in w.as_slice() {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }
        let same = vec![vec![1.0, 2.0]; 3];
        let w = solve_minnorm(&same).unwrap();
        for v in w.as_slice() {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn errors() {
        assert!(solve_minnorm(&[]).is_err());
        assert!(solve_minnorm(&[vec![1.0], vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn single_gradient() {
        assert_eq!(solve_minnorm(&[vec![3.0, 4.0]]).unwrap().as_slice(), &[1.0]);
    }

    #[test]
    fn three_gradients_with_origin_inside_hull() {
        let g = vec![vec![1.0, 0.0], vec![-1.0, 1.0], vec![-1.0, -1.0]];
        let w = solve_minnorm(&g).unwrap();
        assert!(norm(&w.combine(&g)) < 1e-7);
        assert!(kkt_residual(&g, &w) <= 1e-8);
    }

    #[test]
    fn three_gradients_on_a_face() {
        // min-norm point lies on the edge between the first two gradients
        let g = vec![vec![1.0, 1.0], vec![1.0, -1.0], vec![3.0, 0.0]];
        let w = solve_minnorm(&g).unwrap();
        let c = w.combine(&g);
        assert!((c[0] - 1.0).abs() < 1e-8 && c[1].abs() < 1e-8, "{c:?}");
        assert!(w.as_slice()[2] < 1e-8);
    }

    #[test]
    fn enumeration_matches_frank_wolfe() {
        let g = vec![
            vec![0.2, 1.0, -0.3],
            vec![0.5, -0.4, 0.1],
            vec![-0.7, 0.3, 0.9],
        ];
        let q = gram(&g);
        let a = frank_wolfe(&q).unwrap();
        let b = enumerate_supports(&q).unwrap();
        for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
            assert!((x - y).abs() < 1e-6);
        }
    }

    fn gradients(m: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
        (1usize..6).prop_flat_map(move |d| {
            prop::collection::vec(prop::collection::vec(-3.0f64..3.0, d), m)
        })
    }

    proptest! {
        #[test]
        fn optimality_conditions_hold(g in (2usize..5).prop_flat_map(gradients)) {
            let w = solve_minnorm(&g).unwrap();
            let s: f64 = w.as_slice().iter().sum();
            prop_assert!((s - 1.0).abs() < 1e-10);
            prop_assert!(w.as_slice().iter().all(|v| *v >= 0.0));
            let c = w.combine(&g);
            let cn = norm(&c);
            for gi in &g {
                // vertex optimality and common-descent property
                let lhs = dot(&c, gi) - dot(&c, &c);
                prop_assert!(lhs >= -1e-8 * (cn * norm(gi)).max(1.0), "{}", lhs);
                prop_assert!(cn <= norm(gi) + 1e-9);
            }
        }

        #[test]
        fn closed_form_matches_grid(g in gradients(2)) {
            let w = solve_minnorm(&g).unwrap();
            let mut best = (f64::INFINITY, 0.0);
            for i in 0..=10_000 {
                let l = i as f64 * 1e-4;
                let c: Vec<f64> = g[0].iter().zip(&g[1]).map(|(a, b)| l * a + (1.0 - l) * b).collect();
                let v = dot(&c, &c);
                if v < best.0 {
                    best = (v, l);
                }
            }
            let c = w.combine(&g);
            // objective agreement; the argmin itself is only unique when g1 != g2
            prop_assert!(dot(&c, &c) <= best.0 + 1e-12);
            let diff: f64 = g[0].iter().zip(&g[1]).map(|(a, b)| (a - b).powi(2)).sum();
            if diff > 1e-3 {
                prop_assert!((w.as_slice()[0] - best.1).abs() <= 1e-3);
            }
        }
    }
}
