//! Exponent thresholds, beta capping and the exponent identities that
//! make each barrier recipe scale-free.

use crate::error::{Error, Result};

/// `beta` must stay below this for the edge exponent to be below one.
pub fn edge_threshold(n: usize, alpha: f64) -> f64 {
    alpha + 2.0 * n as f64 - 1.0
}

/// Same threshold for the cusp exponent at type exponent `a`.
pub fn cusp_threshold(n: usize, alpha: f64, a: f64) -> f64 {
    edge_threshold(n, alpha) - (2.0 * n as f64 - 2.0) / a
}

/// Returns `beta` unchanged below `threshold`; otherwise the capped value
/// `beta_of(gamma_target)` realizing the requested exponent.
pub fn cap_beta<F: Fn(f64) -> f64>(beta: f64, threshold: f64, gamma_target: Option<f64>, beta_of: F, n: usize) -> Result<f64> {
    if beta < threshold {
        return Ok(beta);
    }
    let g = gamma_target.ok_or_else(|| {
        Error::regime(format!(
            "beta = {beta} >= {threshold}: the exponent may be any number in (0,1); supply a target exponent"
        ))
    })?;
    if !(g > 0.0 && g < 1.0) {
        return Err(Error::param(format!("target exponent must lie in (0,1), got {g}")));
    }
    let capped = beta_of(g);
    if capped < n as f64 + 1.0 {
        return Err(Error::param(format!(
            "target exponent {g} is too small: capped beta {capped} < n+1"
        )));
    }
    if capped > beta || capped >= threshold {
        return Err(Error::param(format!("target exponent {g} does not cap beta = {beta}")));
    }
    Ok(capped)
}

/// Cusp barrier exponent `b = 2(n+alpha) / (a(beta-n+1) + 2n - 2)`.
pub fn cusp_b(n: usize, alpha: f64, beta: f64, a: f64) -> f64 {
    let nf = n as f64;
    2.0 * (nf + alpha) / (a * (beta - nf + 1.0) + 2.0 * nf - 2.0)
}

/// Total `|W|` exponent in the lower bound chain when only the middle term
/// of the cusp Hessian is kept.
pub fn cusp_step2_exponent(n: usize, alpha: f64, beta: f64, a: f64, b: f64) -> f64 {
    let nf = n as f64;
    (1.0 - b) * (nf - 2.0) + 2.0 - 3.0 * b + a * b / 2.0 * (4.0 / a - 2.0) + a * b / 2.0 * (nf + 1.0 - beta) + alpha
}

/// Total `|W|` exponent in the chain that keeps all three Hessian terms.
pub fn cusp_step3_exponent(n: usize, alpha: f64, beta: f64, a: f64, b: f64) -> f64 {
    let nf = n as f64;
    2.0 - b - a * b + (1.0 - b) * (nf - 2.0) + a * b * (nf + 1.0 - beta) / 2.0 + alpha
}

/// Exponent of `(R - r)` in the sphere chains, `n(b-1) + b alpha + n - beta`.
pub fn sphere_exponent(n: usize, alpha: f64, beta: f64, b: f64) -> f64 {
    let nf = n as f64;
    nf * (b - 1.0) + b * alpha + nf - beta
}

/// Exponent of `(R + r)` in the exterior-sphere chain.
pub fn sphere_plus_exponent(n: usize, alpha: f64, b: f64) -> f64 {
    let nf = n as f64;
    nf * (b - 1.0) + b * alpha - 1.0
}

/// Inequality selecting the margin `delta` when `b <= 1`:
/// `(a-2)(1-delta)^{a-1} > (1 + delta(a-2)) 2(1-b)/b`.
pub fn margin_condition(a: f64, b: f64, delta: f64) -> bool {
    (a - 2.0) * (1.0 - delta).powf(a - 1.0) > (1.0 + delta * (a - 2.0)) * 2.0 * (1.0 - b) / b
}

/// `sigma(a, b, delta)`, the coefficient of the combined lower bound.
pub fn sigma(a: f64, b: f64, delta: f64) -> f64 {
    (1.0 + delta * (a - 2.0)) * 8.0 * (b - 1.0) / (a * a * b * b * b)
        + 4.0 * (a - 2.0) / (a * a * b * b) * (1.0 - delta).powf(a - 1.0)
}
