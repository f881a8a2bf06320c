//! Explicit barrier families with closed-form derivatives, constant
//! selection and numerical certification.

mod cusp;
mod edge;
pub mod exponents;
mod sphere;
mod verify;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub use cusp::{CuspBarrier, CuspParts, CuspRegime};
pub use edge::EdgeBarrier;
pub use sphere::{SphereBarrier, SphereKind};
pub use verify::{verify_barrier, VerificationReport};

use crate::error::Result;
use crate::geometry::{LocalFrame, Point};

#[derive(Debug, Clone, PartialEq)]
pub struct BarrierEval {
    pub value: f64,
    pub gradient: Point,
    pub hessian: DMatrix<f64>,
    pub det: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    /// `H[W] >= 1`: bounds the solution from below.
    Sub,
    /// `H[W] <= 1`: bounds the solution from above.
    Super,
}

pub trait Barrier: Sync {
    fn dim(&self) -> usize;

    fn frame(&self) -> &LocalFrame;

    fn role(&self) -> Role;

    /// Value in frame coordinates; defined on the closure of the region.
    fn value_local(&self, x: &Point) -> Result<f64>;

    /// Value, gradient, Hessian and closed-form Hessian determinant in
    /// frame coordinates.
    fn eval_local(&self, x: &Point) -> Result<BarrierEval>;

    /// Distance-like measure from `x` to the set where the barrier is
    /// singular or undefined.
    fn singular_distance(&self, x: &Point) -> f64;

    /// `|W|` at height `t` on the frame axis.
    fn axis_magnitude(&self, t: f64) -> f64 {
        let mut p = Point::zeros(self.dim());
        p[self.dim() - 1] = t;
        self.value_local(&p).map(f64::abs).unwrap_or(f64::NAN)
    }

    fn value(&self, world: &Point) -> Result<f64> {
        self.value_local(&self.frame().apply(world))
    }

    /// World-coordinate evaluation; the determinant is frame invariant.
    fn eval(&self, world: &Point) -> Result<BarrierEval> {
        let f = self.frame();
        let mut e = self.eval_local(&f.apply(world))?;
        let rt = f.rotation.transpose();
        e.gradient = &rt * &e.gradient;
        e.hessian = &rt * &e.hessian * &f.rotation;
        Ok(e)
    }
}

/// Any of the three families, for configs and reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum AnyBarrier {
    Edge(EdgeBarrier),
    Cusp(CuspBarrier),
    Sphere(SphereBarrier),
}

impl AnyBarrier {
    pub fn as_barrier(&self) -> &dyn Barrier {
        match self {
            AnyBarrier::Edge(b) => b,
            AnyBarrier::Cusp(b) => b,
            AnyBarrier::Sphere(b) => b,
        }
    }
}

/// Central-difference Hessian at `x`, differencing the gradient:
/// `H e_j = (grad W(x + h e_j) - grad W(x - h e_j)) / 2h`, symmetrized.
pub fn fd_hessian(bar: &dyn Barrier, x: &Point, h: f64) -> Result<DMatrix<f64>> {
    let n = x.len();
    let mut hess = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut xp = x.clone();
        xp[j] += h;
        let mut xm = x.clone();
        xm[j] -= h;
        let col = (bar.eval_local(&xp)?.gradient - bar.eval_local(&xm)?.gradient) / (2.0 * h);
        hess.set_column(j, &col);
    }
    Ok((&hess + hess.transpose()) * 0.5)
}

/// Central-difference gradient of `value_local` at `x`.
pub fn fd_gradient(bar: &dyn Barrier, x: &Point, h: f64) -> Result<Point> {
    let n = x.len();
    let mut g = Point::zeros(n);
    for i in 0..n {
        let mut xp = x.clone();
        xp[i] += h;
        let mut xm = x.clone();
        xm[i] -= h;
        g[i] = (bar.value_local(&xp)? - bar.value_local(&xm)?) / (2.0 * h);
    }
    Ok(g)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdReport {
    /// Largest relative error of the closed-form determinant.
    pub max_relative_error: f64,
    /// Largest relative error of the closed-form gradient against
    /// differenced values.
    pub max_gradient_error: f64,
    pub checked: usize,
    pub skipped: usize,
    pub worst_point: Option<Vec<f64>>,
}

/// Largest relative error between the closed-form determinant and the
/// determinant of the central-difference Hessian. Points within `10 h` of
/// the singular set are skipped.
pub fn hessian_fd_check(bar: &dyn Barrier, points: &[Point], h: f64) -> Result<FdReport> {
    let mut rep = FdReport {
        max_relative_error: 0.0,
        max_gradient_error: 0.0,
        checked: 0,
        skipped: 0,
        worst_point: None,
    };
    for x in points {
        if bar.singular_distance(x) < 10.0 * h {
            rep.skipped += 1;
            continue;
        }
        let e = bar.eval_local(x)?;
        let fd = fd_hessian(bar, x, h)?.determinant();
        let err = (fd - e.det).abs() / e.det.abs().max(1e-300);
        let g = fd_gradient(bar, x, h)?;
        let gerr = (&g - &e.gradient).norm() / e.gradient.norm().max(1e-300);
        rep.max_gradient_error = rep.max_gradient_error.max(gerr);
        rep.checked += 1;
        if err > rep.max_relative_error {
            rep.max_relative_error = err;
            rep.worst_point = Some(x.iter().copied().collect());
        }
    }
    Ok(rep)
}

/// Splits a local point into `(r, x_n)` with `r = |x'|`.
pub(crate) fn radial_split(x: &Point) -> (f64, f64) {
    let n = x.len();
    (x.rows(0, n - 1).norm(), x[n - 1])
}

/// Smallest `M` for which `M^{n+alpha} * q_min / A >= 1`, nudged up by a
/// relative `1e-8` so the certificate holds after rounding.
pub(crate) fn scale_from_bound(a_coef: f64, q_min: f64, power: f64) -> f64 {
    (a_coef / q_min).powf(1.0 / power) * (1.0 + 1e-8)
}
