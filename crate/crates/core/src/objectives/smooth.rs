//! Numerically stable scalar helpers.

/// `ln(1 + e^u)` without overflow.
#[inline]
pub fn softplus(u: f64) -> f64 {
    if u > 0.0 {
        u + (-u).exp().ln_1p()
    } else {
        u.exp().ln_1p()
    }
}

/// Logistic sigmoid `1 / (1 + e^{-u})`.
#[inline]
pub fn sigmoid(u: f64) -> f64 {
    if u >= 0.0 {
        1.0 / (1.0 + (-u).exp())
    } else {
        let e = u.exp();
        e / (1.0 + e)
    }
}

/// Smooth `min{0, t}`: `-softplus(-beta t) / beta`.
///
/// Concave, always below the hard min, and within `ln 2 / beta` of it.
#[inline]
pub fn soft_min0(t: f64, beta: f64) -> f64 {
    -softplus(-beta * t) / beta
}

/// Derivative of [`soft_min0`] in `t`.
#[inline]
pub fn soft_min0_slope(t: f64, beta: f64) -> f64 {
    sigmoid(-beta * t)
}

/// Soft maximum `sum x_i e^{beta x_i} / sum e^{beta x_i}` and its partial
/// derivatives `w_i (1 + beta (x_i - S))`.
pub fn soft_max(xs: &[f64], beta: f64) -> (f64, Vec<f64>) {
    let top = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = xs.iter().map(|x| (beta * (x - top)).exp()).collect();
    let total: f64 = weights.iter().sum();
    let w: Vec<f64> = weights.iter().map(|v| v / total).collect();
    let s: f64 = w.iter().zip(xs).map(|(wi, xi)| wi * xi).sum();
    let grad = w
        .iter()
        .zip(xs)
        .map(|(wi, xi)| wi * (1.0 + beta * (xi - s)))
        .collect();
    (s, grad)
}
