use serde::{Deserialize, Serialize};

use crate::barriers::exponents::{cusp_threshold, edge_threshold};
use crate::error::{Error, Result};
use crate::geometry::SphereCertificate;

/// A predicted boundary-decay exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", content = "value", rename_all = "kebab-case")]
pub enum Exponent {
    Exact(f64),
    /// Any number in `(0, 1)`.
    OpenUpTo1,
    One,
    /// The geometric hypothesis behind this exponent is absent.
    NotApplicable,
}

impl Exponent {
    /// Numeric value for `Exact` and `One`.
    pub fn value(&self) -> Option<f64> {
        match self {
            Exponent::Exact(v) => Some(*v),
            Exponent::One => Some(1.0),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionInputs {
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    pub a: Option<f64>,
    pub exterior_radius: Option<f64>,
    pub interior_radius: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentPrediction {
    /// General convex domains.
    pub gamma1: Exponent,
    /// Domains of `(a, eta)` type.
    pub gamma2: Exponent,
    /// Upper bound under an exterior sphere condition.
    pub gamma3: Exponent,
    /// Lower bound under an interior sphere condition.
    pub gamma4: Exponent,
    pub inputs: PredictionInputs,
}

/// Applies the exponent case splits for `F = A d^{beta-n-1} |t|^{-alpha}`.
pub fn predicted_exponents(
    n: usize,
    alpha: f64,
    beta: f64,
    a: Option<f64>,
    spheres: Option<&SphereCertificate>,
) -> Result<ExponentPrediction> {
    let nf = n as f64;
    if n < 2 || !(alpha >= 0.0) {
        return Err(Error::param("need n >= 2 and alpha >= 0"));
    }
    if !(beta >= nf + 1.0) {
        return Err(Error::regime(format!("beta must be >= n+1 = {}, got {beta}", nf + 1.0)));
    }
    if let Some(a) = a {
        if !(a > 2.0) || !a.is_finite() {
            return Err(Error::regime(format!(
                "the (a, eta)-type estimate requires a in (2, +inf), got a = {a}"
            )));
        }
    }
    let g1 = (beta - nf + 1.0) / (nf + alpha);
    let gamma1 = if beta < edge_threshold(n, alpha) { Exponent::Exact(g1) } else { Exponent::OpenUpTo1 };
    let gamma2 = match a {
        None => Exponent::NotApplicable,
        Some(a) if beta < cusp_threshold(n, alpha, a) => Exponent::Exact(g1 + (2.0 * nf - 2.0) / (a * (nf + alpha))),
        Some(_) => Exponent::OpenUpTo1,
    };
    let ext = spheres.and_then(|s| s.exterior_radius);
    let int = spheres.and_then(|s| s.interior_radius);
    let g34 = beta / (nf + alpha);
    let gamma3 = match ext {
        None => Exponent::NotApplicable,
        Some(_) if beta < alpha + nf => Exponent::Exact(g34),
        Some(_) if beta < alpha + nf + 1.0 => Exponent::OpenUpTo1,
        Some(_) => Exponent::One,
    };
    let gamma4 = match int {
        Some(_) if beta < alpha + nf => Exponent::Exact(g34),
        _ => Exponent::NotApplicable,
    };
    Ok(ExponentPrediction {
        gamma1,
        gamma2,
        gamma3,
        gamma4,
        inputs: PredictionInputs {
            n,
            alpha,
            beta,
            a,
            exterior_radius: ext,
            interior_radius: int,
        },
    })
}
