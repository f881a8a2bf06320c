use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ConvexDomain;
use crate::solver::DiscreteSolution;

/// Sampled values of a function vanishing on the boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    pub points: Vec<[f64; 2]>,
    pub values: Vec<f64>,
    pub depths: Vec<f64>,
    pub diam: f64,
}

impl SampledField {
    /// Grid nodes plus boundary samples carrying the value zero.
    pub fn from_solution(sol: &DiscreteSolution, boundary_samples: usize) -> Self {
        let g = &sol.grid;
        let mut points = g.coords.clone();
        let mut values = sol.values.clone();
        let mut depths = g.depth.clone();
        for z in g.domain.boundary_samples(boundary_samples) {
            points.push([z[0], z[1]]);
            values.push(0.0);
            depths.push(0.0);
        }
        SampledField { points, values, depths, diam: g.domain.diam() }
    }

    /// Evaluates `u` at the grid of spacing `h` intersected with the
    /// domain, plus boundary samples where the value is zero.
    pub fn from_fn<F: Fn(&[f64; 2]) -> f64>(domain: &ConvexDomain, h: f64, boundary_samples: usize, u: F) -> Self {
        let (lo, hi) = domain.bounding_box();
        let mut points = Vec::new();
        let mut depths = Vec::new();
        let nx = ((hi[0] - lo[0]) / h).floor() as usize;
        let ny = ((hi[1] - lo[1]) / h).floor() as usize;
        for j in 0..=ny {
            for i in 0..=nx {
                let p = [lo[0] + i as f64 * h, lo[1] + j as f64 * h];
                let d = domain.depth(&crate::Point::from_vec(p.to_vec()));
                if d > 0.0 {
                    points.push(p);
                    depths.push(d);
                }
            }
        }
        let mut values: Vec<f64> = points.iter().map(&u).collect();
        for z in domain.boundary_samples(boundary_samples) {
            points.push([z[0], z[1]]);
            depths.push(0.0);
            values.push(0.0);
        }
        SampledField { points, values, depths, diam: domain.diam() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HolderStatus {
    Passed,
    Failed,
    /// `|u| <= M d^gamma` fails somewhere; the conclusion was not tested.
    HypothesisViolated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderReport {
    pub status: HolderStatus,
    pub gamma: f64,
    pub m: f64,
    /// `M (1 + diam^gamma)`.
    pub constant: f64,
    /// Largest `|u| / (M d^gamma)` over interior samples.
    pub hypothesis_ratio: f64,
    /// Largest `|u(x1) - u(x2)| / (constant |x1 - x2|^gamma)` over pairs.
    pub worst_ratio: f64,
    pub worst_pair: Option<[[f64; 2]; 2]>,
    pub pairs: usize,
    pub seed: u64,
}

/// Smallest `M` with `|u| <= M d^gamma` at all samples.
pub fn decay_constant(field: &SampledField, gamma: f64) -> f64 {
    field
        .values
        .iter()
        .zip(&field.depths)
        .filter(|(_, d)| **d > 0.0)
        .map(|(u, d)| u.abs() / d.powf(gamma))
        .fold(0.0, f64::max)
}

/// Tests `|u(x1) - u(x2)| <= M (1 + diam^gamma) |x1 - x2|^gamma + 1e-8`
/// on random sample pairs, provided `|u| <= M d^gamma` holds.
pub fn holder_reduction_check(field: &SampledField, gamma: f64, m: f64, pairs: usize, seed: u64) -> Result<HolderReport> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::param(format!("gamma must lie in (0, 1], got {gamma}")));
    }
    if !(m >= 0.0) {
        return Err(Error::param("M must be non-negative"));
    }
    let count = field.points.len();
    if count < 2 {
        return Err(Error::param("need at least two samples"));
    }
    let constant = m * (1.0 + field.diam.powf(gamma));
    let mut hyp: f64 = 0.0;
    let mut violated = false;
    for (u, d) in field.values.iter().zip(&field.depths) {
        let bound = m * d.max(0.0).powf(gamma);
        if u.abs() > bound * (1.0 + 1e-9) + 1e-12 {
            violated = true;
        }
        if *d > 0.0 && m > 0.0 {
            hyp = hyp.max(u.abs() / bound);
        }
    }
    let mut report = HolderReport {
        status: HolderStatus::HypothesisViolated,
        gamma,
        m,
        constant,
        hypothesis_ratio: hyp,
        worst_ratio: 0.0,
        worst_pair: None,
        pairs: 0,
        seed,
    };
    if violated {
        return Ok(report);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failed = false;
    for _ in 0..pairs {
        let i = rng.random_range(0..count);
        let mut j = rng.random_range(0..count - 1);
        if j >= i {
            j += 1;
        }
        let (p, q) = (field.points[i], field.points[j]);
        let dist = ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt();
        let du = (field.values[i] - field.values[j]).abs();
        let rhs = constant * dist.powf(gamma);
        if du > rhs + 1e-8 {
            failed = true;
        }
        let ratio = if rhs > 0.0 { du / rhs } else { 0.0 };
        if ratio > report.worst_ratio || report.worst_pair.is_none() {
            report.worst_ratio = ratio;
            report.worst_pair = Some([p, q]);
        }
        report.pairs += 1;
    }
    report.status = if failed { HolderStatus::Failed } else { HolderStatus::Passed };
    Ok(report)
}
