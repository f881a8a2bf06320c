use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::exponents::{sphere_exponent, sphere_plus_exponent};
use super::{scale_from_bound, Barrier, BarrierEval, Role};
use crate::error::{Error, Result};
use crate::geometry::{LocalFrame, Point};
use crate::numeric::grid_min;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SphereKind {
    /// Built on an exterior ball containing the domain.
    Sub,
    /// Built on an interior ball contained in the domain.
    Super,
}

/// `W = -M (R^2 - |x - y0|^2)^b` on the ball `B_R(y0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereBarrier {
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    #[serde(rename = "A")]
    pub a_coef: f64,
    #[serde(rename = "M")]
    pub m: f64,
    pub b: f64,
    #[serde(rename = "R")]
    pub radius: f64,
    pub center: Point,
    pub kind: SphereKind,
    /// Translation to the ball center; the barrier is radial about it.
    pub frame: LocalFrame,
}

impl SphereBarrier {
    fn frame_at(center: &Point) -> LocalFrame {
        let mut f = LocalFrame::identity(center.len());
        f.origin = center.clone();
        f
    }

    /// Sub-barrier on an exterior ball: `b = beta/(n+alpha)` below
    /// `beta = n+alpha`, `b = gamma_target` up to `n+alpha+1`, `b = 1` beyond;
    /// `M` is the smallest scale with `H[W] >= 1`.
    pub fn sub_recipe(
        n: usize,
        alpha: f64,
        beta: f64,
        a_coef: f64,
        radius: f64,
        center: Point,
        gamma_target: Option<f64>,
    ) -> Result<Self> {
        check_common(n, alpha, beta, a_coef, radius, &center)?;
        let nf = n as f64;
        let (rr, power) = (radius, nf + alpha);
        let b = if beta < nf + alpha {
            beta / (nf + alpha)
        } else if beta < nf + alpha + 1.0 {
            let g = gamma_target.ok_or_else(|| {
                Error::regime(format!(
                    "n+alpha <= beta = {beta} < n+alpha+1: the exponent may be any number in (0,1); supply a target exponent"
                ))
            })?;
            if !(g > 0.0 && g < 1.0) {
                return Err(Error::param(format!("target exponent must lie in (0,1), got {g}")));
            }
            g
        } else {
            1.0
        };
        let m = if b < 1.0 {
            let ep = sphere_plus_exponent(n, alpha, b);
            let em = sphere_exponent(n, alpha, beta, b);
            let c = (1.0 - (2.0 * b - 1.0).abs()) * rr * rr / a_coef * (2.0 * b).powi(n as i32);
            let q = |r: f64| c * (rr + r).powf(ep) * (rr - r).powf(em);
            let (_, q_min) = grid_min(q, 0.0, rr, 10_000);
            scale_from_bound(1.0, q_min, power)
        } else {
            let e = alpha + nf + 1.0 - beta;
            let q = |r: f64| 2f64.powi(n as i32) / a_coef * (rr + r).powf(alpha) * (rr - r).powf(e);
            let (_, q_min) = grid_min(q, 0.0, rr, 10_000);
            scale_from_bound(1.0, q_min, power)
        };
        if !m.is_finite() || !(m > 0.0) {
            return Err(Error::regime("sphere sub-barrier bound is not positive"));
        }
        Ok(SphereBarrier {
            n,
            alpha,
            beta,
            a_coef,
            m,
            b,
            radius,
            frame: Self::frame_at(&center),
            center,
            kind: SphereKind::Sub,
        })
    }

    /// Super-barrier on an interior ball with `b = beta/(n+alpha) < 1` and
    /// the largest scale `M` keeping `H[W] <= 1`.
    pub fn super_recipe(n: usize, alpha: f64, beta: f64, a_coef: f64, radius: f64, center: Point) -> Result<Self> {
        check_common(n, alpha, beta, a_coef, radius, &center)?;
        let nf = n as f64;
        if !(beta < nf + alpha) {
            return Err(Error::regime(format!(
                "the interior-sphere super-barrier needs beta/(n+alpha) < 1, i.e. beta < n+alpha = {}",
                nf + alpha
            )));
        }
        let b = beta / (nf + alpha);
        let k = (2.0 * b).powi(n as i32) * 2.0 * radius * radius * (2.0 * radius).powf(beta - nf - 1.0) / a_coef;
        let m = (1.0 / k).powf(1.0 / (nf + alpha)) * (1.0 - 1e-8);
        Ok(SphereBarrier {
            n,
            alpha,
            beta,
            a_coef,
            m,
            b,
            radius,
            frame: Self::frame_at(&center),
            center,
            kind: SphereKind::Super,
        })
    }

    /// Same barrier with the scale replaced.
    pub fn with_scale(&self, m: f64) -> Self {
        SphereBarrier { m, ..self.clone() }
    }

    pub fn det_closed_form(&self, r: f64) -> f64 {
        let nf = self.n as f64;
        let b = self.b;
        let s = self.radius * self.radius - r * r;
        (2.0 * self.m * b).powi(self.n as i32)
            * s.powf(nf * (b - 1.0) - 1.0)
            * (self.radius * self.radius - (2.0 * b - 1.0) * r * r)
    }
}

fn check_common(n: usize, alpha: f64, beta: f64, a_coef: f64, radius: f64, center: &Point) -> Result<()> {
    if n < 2 || center.len() != n {
        return Err(Error::param("dimension mismatch"));
    }
    if !(radius > 0.0) || !(a_coef > 0.0) || !(alpha >= 0.0) {
        return Err(Error::param("need R > 0, A > 0, alpha >= 0"));
    }
    if beta < n as f64 + 1.0 {
        return Err(Error::regime(format!("beta = {beta} < n+1")));
    }
    Ok(())
}

impl Barrier for SphereBarrier {
    fn dim(&self) -> usize {
        self.n
    }

    fn frame(&self) -> &LocalFrame {
        &self.frame
    }

    fn role(&self) -> Role {
        match self.kind {
            SphereKind::Sub => Role::Sub,
            SphereKind::Super => Role::Super,
        }
    }

    fn value_local(&self, x: &Point) -> Result<f64> {
        let s = self.radius * self.radius - x.norm_squared();
        if s < -1e-12 * self.radius * self.radius {
            return Err(Error::BarrierDomain(format!(
                "{:?} lies outside the barrier ball",
                x.as_slice()
            )));
        }
        Ok(-self.m * s.max(0.0).powf(self.b))
    }

    fn eval_local(&self, x: &Point) -> Result<BarrierEval> {
        let n = self.n;
        let r2 = x.norm_squared();
        let s = self.radius * self.radius - r2;
        if !(s > 0.0) {
            return Err(Error::BarrierDomain("sphere barrier needs |x - y0| < R".into()));
        }
        let (m, b) = (self.m, self.b);
        let c1 = 2.0 * m * b * s.powf(b - 1.0);
        let c2 = 4.0 * m * b * (b - 1.0) * s.powf(b - 2.0);
        let gradient = x * c1;
        let hessian = DMatrix::identity(n, n) * c1 - (x * x.transpose()) * c2;
        Ok(BarrierEval {
            value: -m * s.powf(b),
            gradient,
            hessian,
            det: self.det_closed_form(r2.sqrt()),
        })
    }

    fn singular_distance(&self, x: &Point) -> f64 {
        if self.b == 1.0 {
            f64::INFINITY
        } else {
            self.radius - x.norm()
        }
    }

    fn axis_magnitude(&self, t: f64) -> f64 {
        // t is the distance from the sphere along a radius
        let r = self.radius - t;
        self.m * (self.radius + r).powf(self.b) * (self.radius - r).powf(self.b)
    }
}
