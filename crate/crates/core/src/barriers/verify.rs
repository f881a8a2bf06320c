use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Barrier, Role};
use crate::geometry::ConvexDomain;
use crate::rhs::{PowerLaw, RightHandSide};

/// Sampled check of `H[W] = det D^2 W / F(x, W)` against 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub role: Role,
    pub passed: bool,
    pub min_h: f64,
    pub max_h: f64,
    /// Sample attaining the binding extreme of `H`.
    pub worst_point: Option<Vec<f64>>,
    pub interior_samples: usize,
    /// Interior samples where the barrier could not be evaluated.
    pub undefined_samples: usize,
    pub boundary_samples: usize,
    /// Largest barrier value seen on the boundary samples.
    pub max_boundary_value: f64,
    pub tolerance: f64,
}

/// Evaluates `H[W]` at `n_samples` deterministic interior points and `W`
/// on boundary samples. A sub-barrier passes when `H >= 1 - 1e-9`, a
/// super-barrier when `H <= 1 + 1e-9`; both need `W <= 0` on the boundary.
pub fn verify_barrier(bar: &dyn Barrier, law: &PowerLaw, domain: &ConvexDomain, n_samples: usize) -> VerificationReport {
    const TOL: f64 = 1e-9;
    let pts = domain.interior_samples(n_samples);
    let role = bar.role();
    // (h, index) pairs; None where undefined
    let hs: Vec<Option<f64>> = pts
        .par_iter()
        .map(|x| {
            let d = domain.depth(x);
            let e = bar.eval(x).ok()?;
            if !(e.value < 0.0) || !e.det.is_finite() {
                return None;
            }
            let f = law.value(d, e.value);
            let h = e.det / f;
            h.is_finite().then_some(h)
        })
        .collect();

    let mut min_h = f64::INFINITY;
    let mut max_h = f64::NEG_INFINITY;
    let mut worst: Option<usize> = None;
    let mut undefined = 0;
    for (i, h) in hs.iter().enumerate() {
        match h {
            None => undefined += 1,
            Some(h) => {
                if *h < min_h {
                    min_h = *h;
                    if role == Role::Sub {
                        worst = Some(i);
                    }
                }
                if *h > max_h {
                    max_h = *h;
                    if role == Role::Super {
                        worst = Some(i);
                    }
                }
            }
        }
    }

    let boundary = domain.boundary_samples(1024);
    let mut max_bv = f64::NEG_INFINITY;
    for z in &boundary {
        let v = bar.value(z).unwrap_or(f64::INFINITY);
        max_bv = max_bv.max(v);
    }
    let bscale = 1e-12 * (1.0 + bar.axis_magnitude(0.5 * domain.diam()).abs().min(1e12));
    let boundary_ok = max_bv <= bscale;
    let h_ok = match role {
        Role::Sub => min_h >= 1.0 - TOL,
        Role::Super => max_h <= 1.0 + TOL,
    };
    VerificationReport {
        role,
        passed: h_ok && boundary_ok && undefined == 0 && !pts.is_empty(),
        min_h,
        max_h,
        worst_point: worst.map(|i| pts[i].iter().copied().collect::<Vec<f64>>()),
        interior_samples: pts.len(),
        undefined_samples: undefined,
        boundary_samples: boundary.len(),
        max_boundary_value: max_bv,
        tolerance: TOL,
    }
}
