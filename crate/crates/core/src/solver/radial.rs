use ode_solvers::dop_shared::IntegrationError;
use ode_solvers::{Dopri5, OutputType, System, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rhs::{PowerLaw, RightHandSide};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialOptions {
    /// Shooting stops once `|u(R)|` is below this.
    pub tol: f64,
    /// Relative tolerance of the integrator.
    pub rtol: f64,
    /// Decreasing floors for `|u|` inside the right-hand side.
    pub floors: Vec<f64>,
    /// Integration stops at `R (1 - end_gap)`; the rest is a power-law tail.
    pub end_gap: f64,
}

impl Default for RadialOptions {
    fn default() -> Self {
        RadialOptions {
            tol: 1e-10,
            rtol: 1e-12,
            floors: (0..9).map(|k| 1e-4 * 10f64.powi(-k)).collect(),
            end_gap: 1e-12,
        }
    }
}

/// Radial solution `u(r)` on `[0, R]` with its derivative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub n: usize,
    pub radius: f64,
    pub r: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    pub tol: f64,
    /// Computed `u(R)`.
    pub boundary_value: f64,
    pub floor: Option<f64>,
    pub floors: Vec<f64>,
    /// Difference in `u(0)` between the last two floors.
    pub floor_error: f64,
    pub extrapolated: bool,
    pub shooting_iterations: usize,
}

impl RadialProfile {
    pub fn center_value(&self) -> f64 {
        self.u[0]
    }

    /// Cubic Hermite interpolation of `u` at radius `r`.
    pub fn value(&self, r: f64) -> f64 {
        let r = r.clamp(0.0, self.radius);
        let k = match self.r.binary_search_by(|x| x.total_cmp(&r)) {
            Ok(k) => return self.u[k],
            Err(k) => k.clamp(1, self.r.len() - 1),
        };
        let (r0, r1) = (self.r[k - 1], self.r[k]);
        let h = r1 - r0;
        let s = (r - r0) / h;
        let (u0, u1) = (self.u[k - 1], self.u[k]);
        let (m0, m1) = (self.du[k - 1] * h, self.du[k] * h);
        if !(m0.is_finite() && m1.is_finite()) || k == self.r.len() - 1 {
            return u0 + s * (u1 - u0);
        }
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * u0 + (s3 - 2.0 * s2 + s) * m0 + (-2.0 * s3 + 3.0 * s2) * u1 + (s3 - s2) * m1
    }

    /// Value at boundary distance `d = R - r`.
    pub fn value_at_depth(&self, d: f64) -> f64 {
        self.value(self.radius - d)
    }
}

/// `y = (u, P)` with `P = (u')^n`, so that `P' = n r^{n-1} F(r, u)`,
/// integrated in `sigma = -ln((R - r)/R)`.
struct Shot<'a> {
    n: usize,
    radius: f64,
    rhs: &'a (dyn Fn(f64, f64) -> f64 + Sync),
    floor: f64,
}

impl Shot<'_> {
    fn f(&self, r: f64, u: f64) -> f64 {
        (self.rhs)(r, u.min(-self.floor))
    }

    /// `(r, R - r)` at `sigma`.
    fn point(&self, sigma: f64) -> (f64, f64) {
        (-self.radius * (-sigma).exp_m1(), self.radius * (-sigma).exp())
    }
}

impl System<f64, Vector2<f64>> for Shot<'_> {
    fn system(&self, sigma: f64, y: &Vector2<f64>, dy: &mut Vector2<f64>) {
        let nf = self.n as f64;
        let (r, d) = self.point(sigma);
        dy[0] = d * y[1].max(0.0).powf(1.0 / nf);
        dy[1] = d * nf * r.powi(self.n as i32 - 1) * self.f(r, y[0]);
    }

    fn solout(&mut self, _sigma: f64, y: &Vector2<f64>, _dy: &Vector2<f64>) -> bool {
        y[0] >= 0.0
    }
}

struct Trajectory {
    r: Vec<f64>,
    u: Vec<f64>,
    du: Vec<f64>,
    /// Estimated `u(R)`.
    end: f64,
    /// True when `u` reached zero before the end of integration.
    overshoot: bool,
}

fn integrate(shot: &Shot<'_>, u0: f64, opts: &RadialOptions) -> Result<Trajectory> {
    let n = shot.n;
    let radius = shot.radius;
    let s_end = -opts.end_gap.ln();
    let mut stepper = Dopri5::from_param(
        Shot { n, radius, rhs: shot.rhs, floor: shot.floor },
        0.0,
        s_end,
        s_end,
        Vector2::new(u0, 0.0),
        opts.rtol,
        opts.rtol * 1e-3,
        0.9,
        0.04,
        0.2,
        10.0,
        0.25,
        0.0,
        1_000_000,
        u32::MAX,
        OutputType::Sparse,
    );
    let explosive = match stepper.integrate() {
        Ok(_) => false,
        // u runs into the singular region faster than any step can follow
        Err(IntegrationError::StepSizeUnderflow { .. }) => true,
        Err(e) => return Err(Error::Integration(e.to_string())),
    };
    let (rs, ys) = stepper.results().get();
    let nf = n as f64;
    let mut r = Vec::with_capacity(rs.len() + 1);
    let mut u = Vec::with_capacity(rs.len() + 1);
    let mut du = Vec::with_capacity(rs.len() + 1);
    for (x, y) in rs.iter().zip(ys) {
        let x = shot.point(*x).0;
        if r.last().is_some_and(|l: &f64| x <= *l) {
            continue;
        }
        r.push(x);
        u.push(y[0]);
        du.push(y[1].max(0.0).powf(1.0 / nf));
    }
    let (rl, ul, dl) = (*r.last().unwrap(), *u.last().unwrap(), *du.last().unwrap());
    let gap = radius - rl;
    let r_end = shot.point(s_end).0;
    if explosive || ul >= 0.0 || rl < r_end * (1.0 - 1e-14) {
        return Ok(Trajectory { r, u, du, end: ul.max(0.0) + gap * dl + f64::MIN_POSITIVE, overshoot: true });
    }
    // local power law u ~ -C d^g from u'' = F (r/u')^{n-1}
    let ddu = shot.f(rl, ul) * (rl / dl).powi(n as i32 - 1);
    let g = if dl > 0.0 { (1.0 - gap * ddu / dl).clamp(1e-3, 1.0) } else { 1.0 };
    let end = ul + gap * dl / g;
    Ok(Trajectory { r, u, du, end, overshoot: false })
}

/// Shooting on `u(0)` for a fixed floor. Returns the trajectory closest
/// to `u(R) = 0` and the number of integrations.
fn shoot(shot: &Shot<'_>, opts: &RadialOptions, guess: f64) -> Result<(f64, Trajectory, usize)> {
    let mut count = 0;
    let mut run = |u0: f64| -> Result<Trajectory> {
        count += 1;
        integrate(shot, u0, opts)
    };
    let (mut hi, mut g_hi) = (0.0, run(0.0)?.end);
    let mut lo = if guess < 0.0 { guess } else { -1.0 };
    let mut t_lo = run(lo)?;
    let mut tries = 0;
    while t_lo.end >= 0.0 {
        hi = lo;
        g_hi = t_lo.end;
        lo *= 4.0;
        tries += 1;
        if tries > 40 {
            return Err(Error::Bracket { lo, hi: 0.0 });
        }
        t_lo = run(lo)?;
    }
    let mut g_lo = t_lo.end;
    let mut hi_exact = false;
    let mut best = (lo, t_lo);
    let mut side = 0i8;
    for _ in 0..200 {
        if best.1.end.abs() < opts.tol || (hi - lo) <= 4.0 * f64::EPSILON * lo.abs() {
            break;
        }
        let mid = if hi_exact {
            let x = (lo * g_hi - hi * g_lo) / (g_hi - g_lo);
            if x > lo && x < hi {
                x
            } else {
                0.5 * (lo + hi)
            }
        } else {
            0.5 * (lo + hi)
        };
        let t = run(mid)?;
        let g = t.end;
        if g < 0.0 {
            lo = mid;
            g_lo = g;
            if side == -1 {
                g_hi *= 0.5;
            }
            side = -1;
            if g.abs() < best.1.end.abs() || best.1.end >= 0.0 {
                best = (mid, t);
            }
        } else {
            hi = mid;
            g_hi = g;
            hi_exact = !t.overshoot;
            if side == 1 {
                g_lo *= 0.5;
            }
            side = 1;
            if !t.overshoot && g.abs() < best.1.end.abs() {
                best = (mid, t);
            }
        }
    }
    Ok((best.0, best.1, count))
}

/// Solves `(u'/r)^{n-1} u'' = F(r, u)` on `[0, R]` with `u'(0) = 0` and
/// `u(R) = 0`, regularizing `|u|` by decreasing floors and extrapolating
/// over the last three.
pub fn radial_solve(n: usize, radius: f64, rhs: &(dyn Fn(f64, f64) -> f64 + Sync), opts: &RadialOptions) -> Result<RadialProfile> {
    if n < 1 || !(radius > 0.0) {
        return Err(Error::param("need n >= 1 and R > 0"));
    }
    if opts.floors.is_empty() || opts.floors.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::param("floor schedule must be non-empty and positive"));
    }
    let mut levels: Vec<(f64, Trajectory)> = Vec::new();
    let mut used = Vec::new();
    let mut guess = -1.0;
    let mut iterations = 0;
    for &eps in &opts.floors {
        let shot = Shot { n, radius, rhs, floor: eps };
        let (u0, traj, c) = shoot(&shot, opts, guess)?;
        iterations += c;
        guess = u0 * 1.5;
        used.push(eps);
        levels.push((u0, traj));
        let k = levels.len();
        if k >= 2 && (levels[k - 1].0 - levels[k - 2].0).abs() < opts.tol {
            break;
        }
    }
    let k = levels.len();
    let floor_error = if k >= 2 { (levels[k - 1].0 - levels[k - 2].0).abs() } else { f64::NAN };
    let (_, fine) = levels.pop().expect("one level");
    let mut profile = RadialProfile {
        n,
        radius,
        r: fine.r,
        u: fine.u,
        du: fine.du,
        tol: opts.tol,
        boundary_value: fine.end,
        floor: used.last().copied(),
        floors: used,
        floor_error,
        extrapolated: false,
        shooting_iterations: iterations,
    };
    if k >= 3 {
        let (u2, u1, u0) = (levels[k - 3].0, levels[k - 2].0, profile.u[0]);
        let rho = (u2 - u1) / (u1 - u0);
        if rho.is_finite() && rho > 1.2 && (u1 - u0).abs() > 0.0 {
            let coarse = RadialProfile {
                r: levels[k - 2].1.r.clone(),
                u: levels[k - 2].1.u.clone(),
                du: levels[k - 2].1.du.clone(),
                ..profile.clone()
            };
            let corrected: Vec<f64> = profile
                .r
                .iter()
                .zip(&profile.u)
                .map(|(r, u)| u + (u - coarse.value(*r)) / (rho - 1.0))
                .collect();
            profile.u = corrected;
            profile.extrapolated = true;
        }
    }
    profile.r.push(radius);
    profile.u.push(profile.boundary_value);
    let last = *profile.du.last().unwrap();
    profile.du.push(last);
    Ok(profile)
}

/// [`radial_solve`] for a power law on the ball, `d = R - r`.
pub fn radial_solve_law(law: &PowerLaw, radius: f64, opts: &RadialOptions) -> Result<RadialProfile> {
    let f = move |r: f64, u: f64| law.value((radius - r).max(0.0), u);
    radial_solve(law.n, radius, &f, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_rhs_is_quadratic() {
        let p = radial_solve(2, 1.0, &|_, _| 4.0, &RadialOptions::default()).unwrap();
        assert!((p.center_value() + 1.0).abs() < 1e-9, "{}", p.center_value());
        for r in [0.1, 0.5, 0.9, 0.999] {
            assert!((p.value(r) - (r * r - 1.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn manufactured_profile() {
        let b: f64 = 0.75;
        let f = move |r: f64, _u: f64| {
            let s = 1.0 - r * r;
            (2.0 * b).powi(2) * s.powf(2.0 * (b - 1.0) - 1.0) * (1.0 - (2.0 * b - 1.0) * r * r)
        };
        let p = radial_solve(2, 1.0, &f, &RadialOptions::default()).unwrap();
        let err = (0..=1000)
            .map(|k| {
                let r = k as f64 / 1000.0;
                (p.value(r) + (1.0 - r * r).powf(0.75)).abs()
            })
            .fold(0.0, f64::max);
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn singular_ball() {
        let law = PowerLaw::new(2, 1.0, 2.0, 3.0).unwrap();
        let p = radial_solve_law(&law, 1.0, &RadialOptions::default()).unwrap();
        assert!((-1.2..=-0.6).contains(&p.center_value()), "{}", p.center_value());
        assert!(p.boundary_value.abs() < 1e-10);
        assert!(p.u.windows(2).all(|w| w[1] >= w[0]));
    }
}
