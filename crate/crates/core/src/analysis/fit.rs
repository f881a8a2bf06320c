use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ConvexDomain, Point};
use crate::solver::{DiscreteSolution, RadialProfile};

/// A field sampled along inward normals.
pub trait DecayField {
    fn value_at(&self, domain: &ConvexDomain, x: &Point) -> f64;

    fn default_window(&self, domain: &ConvexDomain) -> FitWindow;
}

impl DecayField for DiscreteSolution {
    fn value_at(&self, _domain: &ConvexDomain, x: &Point) -> f64 {
        self.interpolate([x[0], x[1]])
    }

    /// `[4h, 0.1 diam]`.
    fn default_window(&self, domain: &ConvexDomain) -> FitWindow {
        FitWindow::new(4.0 * self.grid.h, 0.1 * domain.diam())
    }
}

impl DecayField for RadialProfile {
    fn value_at(&self, domain: &ConvexDomain, x: &Point) -> f64 {
        self.value((x - domain.center()).norm())
    }

    /// `[tol^{1/2}, 0.1 R]`.
    fn default_window(&self, _domain: &ConvexDomain) -> FitWindow {
        FitWindow::new(self.tol.sqrt(), 0.1 * self.radius)
    }
}

/// `u(x) = -coef d_x^gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerField {
    pub gamma: f64,
    pub coef: f64,
}

impl DecayField for PowerField {
    fn value_at(&self, domain: &ConvexDomain, x: &Point) -> f64 {
        -self.coef * domain.depth(x).max(0.0).powf(self.gamma)
    }

    fn default_window(&self, domain: &ConvexDomain) -> FitWindow {
        FitWindow::new(1e-4 * domain.diam(), 0.1 * domain.diam())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitWindow {
    pub d_min: f64,
    pub d_max: f64,
}

impl FitWindow {
    pub fn new(d_min: f64, d_max: f64) -> Self {
        FitWindow { d_min, d_max }
    }

    /// The window and two variants shifted by a factor of two either way.
    pub fn variants(&self) -> [FitWindow; 3] {
        [*self, FitWindow::new(0.5 * self.d_min, 0.5 * self.d_max), FitWindow::new(2.0 * self.d_min, 2.0 * self.d_max)]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    pub std_error: f64,
    pub window: FitWindow,
    pub samples: usize,
    pub boundary_point: Vec<f64>,
    pub normal: Vec<f64>,
    /// `(d, |u|)` pairs used in the fit.
    pub data: Vec<[f64; 2]>,
}

/// Least squares for `log y = intercept + slope log x`; returns
/// `(slope, intercept, standard error of the slope)`.
pub fn log_log_fit(data: &[[f64; 2]]) -> Result<(f64, f64, f64)> {
    if data.len() < 3 {
        return Err(Error::Window(format!("need at least 3 points, got {}", data.len())));
    }
    let pts: Vec<(f64, f64)> = data.iter().map(|p| (p[0].ln(), p[1].ln())).collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Window("samples do not spread in d".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let se = (sse / (m - 2.0) / sxx).sqrt();
    Ok((slope, intercept, se))
}

/// Fits `log |u|` against `log d` along the inward normal at boundary
/// point `z`, at geometrically spaced distances inside `window`.
pub fn fit_boundary_exponent(
    field: &dyn DecayField,
    domain: &ConvexDomain,
    z: &Point,
    window: Option<FitWindow>,
) -> Result<DecayFit> {
    const SAMPLES: usize = 24;
    let window = window.unwrap_or_else(|| field.default_window(domain));
    if !(window.d_min > 0.0 && window.d_max > window.d_min) {
        return Err(Error::Window(format!("invalid window [{}, {}]", window.d_min, window.d_max)));
    }
    if !domain.is_on_boundary(z) {
        return Err(Error::param("fit point must lie on the boundary"));
    }
    let normal = domain.inward_normal(z)?;
    // distance along the normal where the depth reaches a given value
    let along = |target: f64| -> f64 {
        let (mut lo, mut hi) = (0.0, target);
        while domain.depth(&(z + &normal * hi)) < target {
            lo = hi;
            hi *= 2.0;
            if hi > 2.0 * domain.diam() {
                return f64::NAN;
            }
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if domain.depth(&(z + &normal * mid)) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let ratio = (window.d_max / window.d_min).powf(1.0 / (SAMPLES - 1) as f64);
    let mut data = Vec::new();
    for k in 0..SAMPLES {
        let target = window.d_min * ratio.powi(k as i32);
        let t = along(target);
        if !t.is_finite() {
            continue;
        }
        let y = z + &normal * t;
        let d = domain.depth(&y);
        let u = field.value_at(domain, &y);
        if u < -1e-12 && d >= window.d_min * (1.0 - 1e-9) && d <= window.d_max * (1.0 + 1e-9) {
            data.push([d, -u]);
        }
    }
    if data.len() < 8 {
        return Err(Error::Window(format!(
            "only {} usable samples in [{:.3e}, {:.3e}]",
            data.len(),
            window.d_min,
            window.d_max
        )));
    }
    let (slope, intercept, std_error) = log_log_fit(&data)?;
    Ok(DecayFit {
        slope,
        intercept,
        std_error,
        window,
        samples: data.len(),
        boundary_point: z.iter().copied().collect(),
        normal: normal.iter().copied().collect(),
        data,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    /// The exponent bounds `|u|` from above: slopes may exceed it.
    UpperBound,
    /// The exponent is sharp from both sides.
    TwoSided,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Consistency {
    pub kind: CheckKind,
    pub predicted: f64,
    pub slope: f64,
    pub std_error: f64,
    pub consistent: bool,
    pub message: String,
}

/// One-sided check: a contradiction only when the slope lies more than
/// three standard errors below the predicted exponent.
pub fn check_upper_bound(fit: &DecayFit, predicted: f64, label: &str) -> Consistency {
    let consistent = fit.slope >= predicted - 3.0 * fit.std_error;
    let message = if consistent {
        format!("consistent with {label} = {predicted}")
    } else {
        format!(
            "slope {:.4} lies more than 3 standard errors below {label} = {predicted}",
            fit.slope
        )
    };
    Consistency {
        kind: CheckKind::UpperBound,
        predicted,
        slope: fit.slope,
        std_error: fit.std_error,
        consistent,
        message,
    }
}

/// Two-sided check: the slope must lie within `band` of the prediction.
pub fn check_two_sided(fit: &DecayFit, predicted: f64, band: f64, label: &str) -> Consistency {
    let consistent = (fit.slope - predicted).abs() <= band;
    let message = if consistent {
        format!("consistent with {label} = {predicted}")
    } else {
        format!("slope {:.4} differs from {label} = {predicted} by more than {band}", fit.slope)
    };
    Consistency {
        kind: CheckKind::TwoSided,
        predicted,
        slope: fit.slope,
        std_error: fit.std_error,
        consistent,
        message,
    }
}
