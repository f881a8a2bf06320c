use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::exponents::{cap_beta, cusp_b, cusp_threshold, margin_condition, sigma};
use super::{radial_split, Barrier, BarrierEval, Role};
use crate::error::{Error, Result};
use crate::geometry::{LocalFrame, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CuspRegime {
    /// `b > 1`: all three Hessian terms are positive.
    Convex,
    /// `b <= 1`: the negative terms are absorbed through the margin `delta`.
    Absorbed,
}

/// The three terms whose sum is `W_rr W_nn - W_rn^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CuspParts {
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    pub w_r_over_r: f64,
    pub w_rr: f64,
    pub w_nn: f64,
    pub w_rn: f64,
}

/// `W = -[(x_n/eps)^{2/a} - |x'|^2]^{1/b}` at an `(a, eta)` type point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CuspBarrier {
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    pub beta_used: f64,
    #[serde(rename = "A")]
    pub a_coef: f64,
    pub a_effective: f64,
    pub a: f64,
    pub eta: f64,
    pub b: f64,
    pub eps: f64,
    pub delta: f64,
    pub regime: CuspRegime,
    /// Set when `a` sits exactly on the regime boundary (`b = 1`).
    pub boundary_case: bool,
    pub sigma: Option<f64>,
    pub frame: LocalFrame,
}

const MARGINS: [f64; 3] = [0.5, 0.25, 0.1];

impl CuspBarrier {
    /// Canonical constants: `b` from the exponent identity, the first
    /// admissible margin `delta`, and the largest `eps` (by halving from
    /// `eta delta^{a/2}`) meeting both the inclusion and `H[W] >= 1`.
    #[allow(clippy::too_many_arguments)]
    pub fn recipe(
        n: usize,
        alpha: f64,
        beta: f64,
        a_coef: f64,
        a: f64,
        eta: f64,
        l: f64,
        gamma_target: Option<f64>,
        frame: LocalFrame,
    ) -> Result<Self> {
        if !(a > 2.0) {
            return Err(Error::regime(format!("the cusp barrier requires a in (2, +inf), got a = {a}")));
        }
        if n < 2 || frame.dim() != n {
            return Err(Error::param("dimension mismatch"));
        }
        if !(eta > 0.0) || !(a_coef > 0.0) || !(alpha >= 0.0) || !(l > 0.0) {
            return Err(Error::param("need eta > 0, A > 0, alpha >= 0, l > 0"));
        }
        let nf = n as f64;
        if beta < nf + 1.0 {
            return Err(Error::regime(format!("beta = {beta} < n+1")));
        }
        let beta_used = cap_beta(
            beta,
            cusp_threshold(n, alpha, a),
            gamma_target,
            |g| g * (nf + alpha) + nf - 1.0 - (2.0 * nf - 2.0) / a,
            n,
        )?;
        let a_eff = a_coef * l.powf(beta - beta_used);
        let b = cusp_b(n, alpha, beta_used, a);
        let kappa = beta_used - nf + 1.0;
        let a_crit = (2.0 * alpha + 2.0) / kappa;
        let regime = if a < a_crit { CuspRegime::Convex } else { CuspRegime::Absorbed };
        let boundary_case = (a - a_crit).abs() <= 1e-12 * a_crit;

        let (delta, bound, sig) = match regime {
            CuspRegime::Convex => {
                let delta: f64 = 0.1;
                let k = (1.0 / a_eff)
                    * (2.0 / b).powf(nf - 2.0)
                    * 8.0
                    * (b - 1.0)
                    / (a * a * b * b * b)
                    * (1.0 / (1.0 - delta)).powf(2.0 - a + a * (nf + 1.0 - beta_used) / 2.0);
                (delta, k, None)
            }
            CuspRegime::Absorbed => {
                let delta = margin(a, b)?;
                let s = sigma(a, b, delta);
                let k = (2.0 / b).powf(nf - 2.0)
                    * (1.0 / a_eff)
                    * (1.0 / (1.0 - delta)).powf(a * (nf + 1.0 - beta_used) / 2.0)
                    * s;
                (delta, k, Some(s))
            }
        };
        if !(bound > 0.0) || !bound.is_finite() {
            return Err(Error::regime("cusp recipe bound is not positive"));
        }
        let mut eps = eta * delta.powf(a / 2.0);
        let mut halvings = 0;
        while eps.powf(kappa) > bound {
            eps *= 0.5;
            halvings += 1;
            if halvings > 2000 {
                return Err(Error::regime("no admissible cusp scale"));
            }
        }
        Ok(CuspBarrier {
            n,
            alpha,
            beta,
            beta_used,
            a_coef,
            a_effective: a_eff,
            a,
            eta,
            b,
            eps,
            delta,
            regime,
            boundary_case,
            sigma: sig,
            frame,
        })
    }

    /// Bracket `(x_n/eps)^{2/a} - r^2` and `x_n/eps`.
    fn bracket(&self, r: f64, xn: f64) -> (f64, f64) {
        let p = xn / self.eps;
        (p.powf(2.0 / self.a) - r * r, p)
    }

    /// Radial derivatives and the three-term decomposition at `(r, x_n)`.
    pub fn parts(&self, r: f64, xn: f64) -> Result<CuspParts> {
        if !(xn > 0.0) {
            return Err(Error::BarrierDomain("cusp barrier needs x_n > 0".into()));
        }
        let (bb, p) = self.bracket(r, xn);
        if !(bb > 0.0) {
            return Err(Error::BarrierDomain("point outside the cusp barrier region".into()));
        }
        let (a, b, e) = (self.a, self.b, self.eps);
        let e2 = e * e;
        let w_r_over_r = 2.0 / b * bb.powf(1.0 / b - 1.0);
        let w_rr = 4.0 * (b - 1.0) / (b * b) * bb.powf(1.0 / b - 2.0) * r * r + w_r_over_r;
        let w_nn = 4.0 * (b - 1.0) / (a * a * b * b) * bb.powf(1.0 / b - 2.0) * p.powf(4.0 / a - 2.0) / e2
            + 2.0 * (a - 2.0) / (a * a * b) * bb.powf(1.0 / b - 1.0) * p.powf(2.0 / a - 2.0) / e2;
        let w_rn = 4.0 * (1.0 - b) / (a * b * b) * bb.powf(1.0 / b - 2.0) * p.powf(2.0 / a - 1.0) * r / e;
        let w3 = bb.powf(2.0 / b - 3.0);
        let i1 = 8.0 * (a - 2.0) * (b - 1.0) / (a * a * b * b * b) * w3 * p.powf(2.0 / a - 2.0) * r * r / e2;
        let i2 = 8.0 * (b - 1.0) / (a * a * b * b * b) * w3 * p.powf(4.0 / a - 2.0) / e2;
        let i3 = 4.0 * (a - 2.0) / (a * a * b * b) * bb.powf(2.0 / b - 2.0) * p.powf(2.0 / a - 2.0) / e2;
        Ok(CuspParts {
            i1,
            i2,
            i3,
            w_r_over_r,
            w_rr,
            w_nn,
            w_rn,
        })
    }
}

/// First `delta` in `0.5, 0.25, 0.1, 0.05, 0.025, ...` satisfying the
/// margin inequality.
fn margin(a: f64, b: f64) -> Result<f64> {
    for d in MARGINS {
        if margin_condition(a, b, d) {
            return Ok(d);
        }
    }
    let mut d = 0.05;
    while d > 1e-14 {
        if margin_condition(a, b, d) {
            return Ok(d);
        }
        d *= 0.5;
    }
    Err(Error::regime(format!("no admissible margin for a = {a}, b = {b}")))
}

impl Barrier for CuspBarrier {
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
        if xn < 0.0 {
            return Err(Error::BarrierDomain("cusp barrier needs x_n >= 0".into()));
        }
        let (bb, p) = self.bracket(r, xn);
        // rounding on the zero surface
        let bb = if bb < 0.0 && bb > -(1e-12 * p.powf(2.0 / self.a) + 1e-24) { 0.0 } else { bb };
        if bb < 0.0 {
            return Err(Error::BarrierDomain(format!(
                "point {:?} outside the cusp barrier region",
                x.as_slice()
            )));
        }
        Ok(-bb.powf(1.0 / self.b))
    }

    fn eval_local(&self, x: &Point) -> Result<BarrierEval> {
        let n = self.n;
        let (r, xn) = radial_split(x);
        let parts = self.parts(r, xn)?;
        let (bb, p) = self.bracket(r, xn);
        let (a, b) = (self.a, self.b);
        let value = -bb.powf(1.0 / b);
        let w_n = -2.0 / (a * b) * bb.powf(1.0 / b - 1.0) * p.powf(2.0 / a - 1.0) / self.eps;
        let mut grad = Point::zeros(n);
        let mut hess = DMatrix::zeros(n, n);
        for i in 0..n - 1 {
            grad[i] = parts.w_r_over_r * x[i];
            hess[(i, i)] = parts.w_r_over_r;
            if r > 0.0 {
                for j in 0..n - 1 {
                    hess[(i, j)] += (parts.w_rr - parts.w_r_over_r) * x[i] * x[j] / (r * r);
                }
                let v = parts.w_rn * x[i] / r;
                hess[(i, n - 1)] = v;
                hess[(n - 1, i)] = v;
            }
        }
        grad[n - 1] = w_n;
        hess[(n - 1, n - 1)] = parts.w_nn;
        let det = parts.w_r_over_r.powi(n as i32 - 2) * (parts.i1 + parts.i2 + parts.i3);
        Ok(BarrierEval {
            value,
            gradient: grad,
            hessian: hess,
            det,
        })
    }

    fn singular_distance(&self, x: &Point) -> f64 {
        let (r, xn) = radial_split(x);
        if xn <= 0.0 {
            return 0.0;
        }
        let (bb, p) = self.bracket(r, xn);
        if bb <= 0.0 {
            return 0.0;
        }
        // first-order distance to the zero set of the bracket
        let dn = 2.0 / self.a * p.powf(2.0 / self.a - 1.0) / self.eps;
        let grad = (dn * dn + 4.0 * r * r).sqrt();
        xn.min(bb / grad)
    }

    fn axis_magnitude(&self, t: f64) -> f64 {
        (t / self.eps).powf(2.0 / (self.a * self.b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barriers::hessian_fd_check;
    use approx::assert_relative_eq;

    fn bar(a: f64) -> CuspBarrier {
        CuspBarrier::recipe(2, 2.0, 3.0, 1.0, a, 1.0, 2.0, None, LocalFrame::identity(2)).unwrap()
    }

    #[test]
    fn recipe_regimes() {
        let c = bar(2.5);
        assert_eq!(c.regime, CuspRegime::Convex);
        assert_relative_eq!(c.b, 8.0 / 7.0, max_relative = 1e-14);
        assert!(c.eps * (1.0 / c.delta).powf(c.a / 2.0) <= c.eta * (1.0 + 1e-12));
        let c = bar(4.0);
        assert_eq!(c.regime, CuspRegime::Absorbed);
        assert_relative_eq!(c.b, 0.8, max_relative = 1e-14);
        assert!(margin_condition(4.0, 0.8, c.delta));
        assert!(c.sigma.unwrap() > 0.0);
        let c = bar(3.0);
        assert!(c.boundary_case);
        assert_eq!(c.regime, CuspRegime::Absorbed);
    }

    #[test]
    fn a_at_most_two_rejected() {
        let e = CuspBarrier::recipe(2, 2.0, 3.0, 1.0, 2.0, 1.0, 2.0, None, LocalFrame::identity(2));
        assert!(matches!(e, Err(Error::Regime(_))));
    }

    #[test]
    fn axis_and_surface_values() {
        let c = bar(4.0);
        let x = Point::from_vec(vec![0.0, 0.3]);
        let expected = -(0.3 / c.eps).powf(2.0 / (c.a * c.b));
        assert_relative_eq!(c.value_local(&x).unwrap(), expected, max_relative = 1e-14);
        let r: f64 = 0.2;
        let surf = Point::from_vec(vec![r, c.eps * r.powf(c.a)]);
        assert!(c.value_local(&surf).unwrap().abs() < 1e-12);
        let tip = Point::from_vec(vec![-9.2e-17, 0.0]);
        assert_eq!(c.value_local(&tip).unwrap(), 0.0);
        assert!(c.value_local(&Point::from_vec(vec![1e-3, 0.0])).is_err());
    }

    #[test]
    fn parts_sum_to_block_determinant() {
        for a in [2.5, 4.0, 6.0] {
            let c = bar(a);
            for k in 1..10 {
                let xn = 0.1 * k as f64;
                let rmax = (xn / c.eps).powf(1.0 / a);
                let r = 0.7 * rmax * (k as f64 / 10.0);
                let p = c.parts(r, xn).unwrap();
                let direct = p.w_rr * p.w_nn - p.w_rn * p.w_rn;
                assert_relative_eq!(p.i1 + p.i2 + p.i3, direct, max_relative = 1e-10);
                if c.regime == CuspRegime::Convex {
                    assert!(p.i1 > 0.0 && p.i2 > 0.0 && p.i3 > 0.0);
                }
            }
        }
    }

    #[test]
    fn fd_check() {
        let c = CuspBarrier::recipe(3, 1.0, 4.0, 1.0, 3.0, 2.0, 1.0, None, LocalFrame::identity(3)).unwrap();
        let pts: Vec<Point> = (1..20)
            .map(|k| {
                let xn = 0.05 * k as f64;
                let rmax = (xn / c.eps).powf(1.0 / c.a);
                let t = k as f64;
                Point::from_vec(vec![0.4 * rmax * t.cos(), 0.4 * rmax * t.sin(), xn])
            })
            .collect();
        let rep = hessian_fd_check(&c, &pts, 1e-5).unwrap();
        assert!(rep.max_relative_error < 1e-5, "{rep:?}");
    }
}
