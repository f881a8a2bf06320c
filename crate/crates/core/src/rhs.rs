//! Right-hand sides `F(x, t) = A d_x^{beta-n-1} |t|^{-alpha}` and
//! structure checks for general `F`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ConvexDomain, Point};

/// Right-hand side evaluated from the boundary distance `d` and the
/// solution value `t < 0`.
pub trait RightHandSide: Sync {
    fn value(&self, d: f64, t: f64) -> f64;

    /// True when the value does not depend on `t`.
    fn is_frozen(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLaw {
    pub n: usize,
    #[serde(rename = "A")]
    pub a_coef: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl PowerLaw {
    pub fn new(n: usize, a_coef: f64, alpha: f64, beta: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::param(format!("dimension must be >= 2, got {n}")));
        }
        if !(a_coef > 0.0) || !a_coef.is_finite() {
            return Err(Error::param(format!("A must be positive, got {a_coef}")));
        }
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(Error::param(format!("alpha must be >= 0, got {alpha}")));
        }
        if !(beta >= n as f64 + 1.0) || !beta.is_finite() {
            return Err(Error::regime(format!("beta must be >= n+1 = {}, got {beta}", n + 1)));
        }
        Ok(PowerLaw { n, a_coef, alpha, beta })
    }

    /// Exponent of the distance factor, `beta - n - 1 >= 0`.
    pub fn distance_exponent(&self) -> f64 {
        self.beta - self.n as f64 - 1.0
    }

    /// `F(x, t)` for a point of `domain`; `t` must be negative.
    pub fn evaluate(&self, domain: &ConvexDomain, x: &Point, t: f64) -> Result<f64> {
        if !(t < 0.0) {
            return Err(Error::param(format!("F is defined for t < 0, got {t}")));
        }
        let d = domain.distance_to_boundary(x)?;
        Ok(self.value(d, t))
    }

    /// Same law with a different coefficient.
    pub fn with_coefficient(&self, a_coef: f64) -> Self {
        PowerLaw { a_coef, ..*self }
    }
}

impl RightHandSide for PowerLaw {
    fn value(&self, d: f64, t: f64) -> f64 {
        let e = self.distance_exponent();
        let dist = if e == 0.0 { 1.0 } else { d.max(0.0).powf(e) };
        let sing = if self.alpha == 0.0 { 1.0 } else { t.abs().powf(-self.alpha) };
        self.a_coef * dist * sing
    }

    fn is_frozen(&self) -> bool {
        self.alpha == 0.0
    }
}

/// `base(x, min(t, -floor))`: caps the singular factor at `floor^{-alpha}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regularized<F> {
    pub base: F,
    pub floor: f64,
}

impl<F: RightHandSide> Regularized<F> {
    pub fn new(base: F, floor: f64) -> Result<Self> {
        if !(floor > 0.0) {
            return Err(Error::param("regularization floor must be positive"));
        }
        Ok(Regularized { base, floor })
    }
}

impl<F: RightHandSide> RightHandSide for Regularized<F> {
    fn value(&self, d: f64, t: f64) -> f64 {
        self.base.value(d, t.min(-self.floor))
    }

    fn is_frozen(&self) -> bool {
        self.base.is_frozen()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub passed: bool,
    /// Largest relative violation found (0 when passing).
    pub worst_violation: f64,
    pub worst_sample: Option<(Vec<f64>, f64)>,
}

impl CheckOutcome {
    fn new() -> Self {
        CheckOutcome {
            passed: true,
            worst_violation: 0.0,
            worst_sample: None,
        }
    }

    fn record(&mut self, violation: f64, x: &Point, t: f64) {
        if violation > 0.0 {
            self.passed = false;
        }
        if violation > self.worst_violation {
            self.worst_violation = violation;
            self.worst_sample = Some((x.iter().copied().collect(), t));
        }
    }
}

/// Outcome of checking monotonicity in `t`, the upper power-law bound and
/// the lower power-law bound on a sample set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub monotone: CheckOutcome,
    pub upper_bound: CheckOutcome,
    pub lower_bound: CheckOutcome,
    pub samples: usize,
}

/// Sample points for [`verify_structure`]: interior points crossed with a
/// fixed ladder of negative values.
pub fn structure_samples(domain: &ConvexDomain, points: usize) -> Vec<(Point, f64)> {
    const TS: [f64; 7] = [-10.0, -2.0, -1.0, -0.5, -0.1, -1e-2, -1e-3];
    let mut out = Vec::with_capacity(points * TS.len());
    for x in domain.interior_samples(points) {
        for t in TS {
            out.push((x.clone(), t));
        }
    }
    out
}

/// Checks a general `F(x, t)` against the structure conditions with
/// constants `(A, alpha, beta)` at the given samples.
pub fn verify_structure<G>(f: G, domain: &ConvexDomain, law: &PowerLaw, samples: &[(Point, f64)], tol: f64) -> Result<StructureReport>
where
    G: Fn(&Point, f64) -> f64,
{
    let mut mono = CheckOutcome::new();
    let mut upper = CheckOutcome::new();
    let mut lower = CheckOutcome::new();

    let mut evaluated: Vec<(Point, f64, f64)> = Vec::with_capacity(samples.len());
    for (x, t) in samples {
        if !(*t < 0.0) {
            return Err(Error::param("structure samples need t < 0"));
        }
        let d = domain.distance_to_boundary(x)?;
        let v = f(x, *t);
        let bound = law.value(d, *t);
        let scale = bound.abs().max(1e-300);
        upper.record((v - bound) / scale - tol, x, *t);
        lower.record((bound - v) / scale - tol, x, *t);
        if !(v > 0.0) && d > 0.0 {
            upper.record(f64::INFINITY, x, *t);
        }
        evaluated.push((x.clone(), *t, v));
    }

    // group by point, then compare consecutive t values
    let mut order: Vec<usize> = (0..evaluated.len()).collect();
    order.sort_by(|&i, &j| {
        let (xi, ti, _) = &evaluated[i];
        let (xj, tj, _) = &evaluated[j];
        xi.iter()
            .zip(xj.iter())
            .map(|(a, b)| a.total_cmp(b))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(ti.total_cmp(tj))
    });
    for w in order.windows(2) {
        let (x1, t1, v1) = &evaluated[w[0]];
        let (x2, t2, v2) = &evaluated[w[1]];
        if x1 == x2 && t1 < t2 {
            let scale = v1.abs().max(v2.abs()).max(1e-300);
            mono.record((v1 - v2) / scale - tol, x1, *t1);
        }
    }

    Ok(StructureReport {
        monotone: mono,
        upper_bound: upper,
        lower_bound: lower,
        samples: samples.len(),
    })
}
