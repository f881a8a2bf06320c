use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::exponents::{cap_beta, edge_threshold};
use super::{radial_split, scale_from_bound, Barrier, BarrierEval, Role};
use crate::error::{Error, Result};
use crate::geometry::{LocalFrame, Point};
use crate::numeric::grid_min;

/// `W = -M x_n^gamma sqrt(N^2 l^2 - r^2)`, a sub-solution on any convex
/// domain of diameter `l` lying in `{x_n >= 0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeBarrier {
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    /// Exponent actually used after capping (equals `beta` when uncapped).
    pub beta_used: f64,
    #[serde(rename = "A")]
    pub a_coef: f64,
    /// Coefficient the recipe was solved against, `A l^{beta - beta_used}`.
    pub a_effective: f64,
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "N")]
    pub big_n: u32,
    pub gamma: f64,
    pub l: f64,
    pub frame: LocalFrame,
}

impl EdgeBarrier {
    /// Canonical constants: `gamma = (beta-n+1)/(n+alpha)`, the smallest
    /// admissible integer `N` and the smallest `M` with `H[W] >= 1`.
    pub fn recipe(
        n: usize,
        alpha: f64,
        beta: f64,
        a_coef: f64,
        l: f64,
        gamma_target: Option<f64>,
        frame: LocalFrame,
    ) -> Result<Self> {
        if n < 2 || frame.dim() != n {
            return Err(Error::param("dimension mismatch"));
        }
        if !(l > 0.0) || !(a_coef > 0.0) || !(alpha >= 0.0) {
            return Err(Error::param("need l > 0, A > 0, alpha >= 0"));
        }
        let nf = n as f64;
        if beta < nf + 1.0 {
            return Err(Error::regime(format!("beta = {beta} < n+1")));
        }
        let beta_used = cap_beta(beta, edge_threshold(n, alpha), gamma_target, |g| g * (nf + alpha) + nf - 1.0, n)?;
        let gamma = (beta_used - nf + 1.0) / (nf + alpha);
        let big_n = smallest_stretch(gamma)?;
        let a_eff = a_coef * l.powf(beta - beta_used);
        let nl2 = (big_n as f64 * l).powi(2);
        let q = |r: f64| {
            let s2 = nl2 - r * r;
            nl2 * gamma * (1.0 - (1.0 + r * r / nl2) * gamma) * s2.powf((alpha - nf) / 2.0)
        };
        let (_, q_min) = grid_min(q, 0.0, l, 10_000);
        if !(q_min > 0.0) {
            return Err(Error::regime("edge recipe bound is not positive"));
        }
        let m = scale_from_bound(a_eff, q_min, nf + alpha);
        Ok(EdgeBarrier {
            n,
            alpha,
            beta,
            beta_used,
            a_coef,
            a_effective: a_eff,
            m,
            big_n,
            gamma,
            l,
            frame,
        })
    }

    fn nl2(&self) -> f64 {
        (self.big_n as f64 * self.l).powi(2)
    }

    /// Closed-form determinant `M^n N^2 l^2 gamma x_n^{n gamma - 2}
    /// (N^2 l^2 - r^2)^{-n/2} [1 - (1 + r^2/(N^2 l^2)) gamma]`.
    pub fn det_closed_form(&self, r: f64, xn: f64) -> f64 {
        let nf = self.n as f64;
        let nl2 = self.nl2();
        let g = self.gamma;
        self.m.powi(self.n as i32) * nl2 * g * xn.powf(nf * g - 2.0) * (nl2 - r * r).powf(-nf / 2.0)
            * (1.0 - (1.0 + r * r / nl2) * g)
    }

    /// Determinant through the block factorization
    /// `det G * (W_nn - xi^T G^{-1} xi)` of the explicit Hessian entries.
    pub fn det_block(&self, x: &Point) -> Result<f64> {
        let e = self.eval_local(x)?;
        let n = self.n;
        let g = e.hessian.view((0, 0), (n - 1, n - 1)).into_owned();
        let xi = e.hessian.view((0, n - 1), (n - 1, 1)).into_owned();
        let wnn = e.hessian[(n - 1, n - 1)];
        let lu = g.clone().lu();
        let sol = lu
            .solve(&xi)
            .ok_or_else(|| Error::BarrierDomain("tangential block is singular".into()))?;
        Ok(g.determinant() * (wnn - xi.dot(&sol)))
    }
}

/// Smallest integer `N >= 1` with `1 - (1 + 1/N^2) gamma > 0`.
fn smallest_stretch(gamma: f64) -> Result<u32> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::regime(format!("edge exponent {gamma} is not in (0,1)")));
    }
    let mut n = ((gamma / (1.0 - gamma)).sqrt().ceil() as u32 + 1).max(1);
    let ok = |k: u32| 1.0 - (1.0 + 1.0 / (k as f64).powi(2)) * gamma > 0.0;
    while n > 1 && ok(n - 1) {
        n -= 1;
    }
    while !ok(n) {
        n += 1;
    }
    Ok(n)
}

impl Barrier for EdgeBarrier {
    fn dim(&self) -> usize {
        self.n
    }

    fn frame(&self) -> &LocalFrame {
        &self.frame
    }

    fn role(&self) -> Role {
        Role::Sub
    }

    fn value_local(&self, x: &Point) -> Result<f64> {
        let (r, xn) = radial_split(x);
        let s2 = self.nl2() - r * r;
        if xn < 0.0 || s2 < 0.0 {
            return Err(Error::BarrierDomain(format!("edge barrier undefined at {:?}", x.as_slice())));
        }
        Ok(-self.m * xn.powf(self.gamma) * s2.sqrt())
    }

    fn eval_local(&self, x: &Point) -> Result<BarrierEval> {
        let n = self.n;
        let (r, xn) = radial_split(x);
        let s2 = self.nl2() - r * r;
        if !(xn > 0.0) || !(s2 > 0.0) {
            return Err(Error::BarrierDomain(format!(
                "edge barrier needs x_n > 0 and r < N l, got {:?}",
                x.as_slice()
            )));
        }
        let (m, g) = (self.m, self.gamma);
        let s = s2.sqrt();
        let p = xn.powf(g);
        let value = -m * p * s;
        let mut grad = Point::zeros(n);
        let mut hess = DMatrix::zeros(n, n);
        for i in 0..n - 1 {
            grad[i] = m * p * x[i] / s;
            for j in 0..n - 1 {
                let delta = if i == j { 1.0 / s } else { 0.0 };
                hess[(i, j)] = m * p * (delta + x[i] * x[j] / (s * s2));
            }
            let v = m * g * xn.powf(g - 1.0) * x[i] / s;
            hess[(i, n - 1)] = v;
            hess[(n - 1, i)] = v;
        }
        grad[n - 1] = -m * g * xn.powf(g - 1.0) * s;
        hess[(n - 1, n - 1)] = m * g * (1.0 - g) * xn.powf(g - 2.0) * s;
        Ok(BarrierEval {
            value,
            gradient: grad,
            hessian: hess,
            det: self.det_closed_form(r, xn),
        })
    }

    fn singular_distance(&self, x: &Point) -> f64 {
        let (r, xn) = radial_split(x);
        xn.min(self.big_n as f64 * self.l - r)
    }

    fn axis_magnitude(&self, t: f64) -> f64 {
        self.m * self.big_n as f64 * self.l * t.powf(self.gamma)
    }
}
