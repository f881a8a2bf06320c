use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::fixed::{operator_residual, solve_fixed_from, DiscreteSolution, FixedOptions};
use super::grid::Grid2D;
use crate::error::{Error, Result};
use crate::rhs::RightHandSide;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularOptions {
    /// Decreasing floors for `|u|` in the singular factor.
    pub floors: Vec<f64>,
    pub damping: f64,
    /// Picard steps stop when successive iterates differ by less than this.
    pub inner_tol: f64,
    /// Continuation stops when successive levels differ by less than this.
    pub level_tol: f64,
    pub max_inner: usize,
    pub fixed: FixedOptions,
}

/// `eps_k = 0.1 * 2^{-k}` for `k = 0..=k_max`.
pub fn default_floors(k_max: usize) -> Vec<f64> {
    (0..=k_max).map(|k| 0.1 * 0.5f64.powi(k as i32)).collect()
}

impl Default for SingularOptions {
    fn default() -> Self {
        SingularOptions {
            floors: default_floors(12),
            damping: 0.5,
            inner_tol: 1e-9,
            level_tol: 1e-6,
            max_inner: 2000,
            fixed: FixedOptions::default(),
        }
    }
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn frozen_rhs<F: RightHandSide + ?Sized>(grid: &Grid2D, law: &F, u: &[f64], floor: f64) -> Vec<f64> {
    grid.depth.iter().zip(u).map(|(d, t)| law.value(*d, t.min(-floor))).collect()
}

/// Solves `MA_h u = F(x, u)` by continuation in the floor `eps_k` with a
/// damped Picard iteration at each level.
pub fn solve_singular<F: RightHandSide + ?Sized>(grid: &Arc<Grid2D>, law: &F, opts: &SingularOptions) -> Result<DiscreteSolution> {
    solve_singular_from(grid, law, None, opts)
}

/// As [`solve_singular`] with an optional starting guess.
pub fn solve_singular_from<F: RightHandSide + ?Sized>(
    grid: &Arc<Grid2D>,
    law: &F,
    start: Option<&[f64]>,
    opts: &SingularOptions,
) -> Result<DiscreteSolution> {
    if opts.floors.is_empty() || opts.floors.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::param("floor schedule must be non-empty and positive"));
    }
    if opts.floors.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::param("floor schedule must be decreasing"));
    }
    if !(opts.damping > 0.0 && opts.damping <= 1.0) {
        return Err(Error::param(format!("damping must lie in (0, 1], got {}", opts.damping)));
    }
    if law.is_frozen() {
        let f = frozen_rhs(grid, law, &vec![-1.0; grid.len()], 1.0);
        return solve_fixed_from(grid, &f, start, &opts.fixed);
    }

    let mut history = Vec::new();
    let mut iterations = 0;
    let mut theta = opts.damping;
    let mut u: Vec<f64> = match start {
        Some(s) => s.to_vec(),
        None => {
            let f = frozen_rhs(grid, law, &vec![-1.0; grid.len()], opts.floors[0]);
            solve_fixed_from(grid, &f, None, &opts.fixed)?.values
        }
    };
    let mut used = Vec::new();
    let mut previous_level: Option<Vec<f64>> = None;

    for &eps in &opts.floors {
        used.push(eps);
        let mut last = f64::INFINITY;
        let mut rising = 0;
        let mut settled = false;
        for _ in 0..opts.max_inner {
            let f = frozen_rhs(grid, law, &u, eps);
            let v = solve_fixed_from(grid, &f, Some(&u), &opts.fixed)?.values;
            iterations += 1;
            let diff = sup_diff(&v, &u);
            history.push(diff);
            for (a, b) in u.iter_mut().zip(&v) {
                *a = theta * b + (1.0 - theta) * *a;
            }
            if diff < opts.inner_tol {
                settled = true;
                break;
            }
            if diff > last {
                rising += 1;
                if rising >= 10 {
                    theta *= 0.5;
                    rising = 0;
                    if theta < 1e-3 {
                        return Err(Error::Oscillation {
                            damping: theta,
                            history: history[history.len().saturating_sub(50)..].to_vec(),
                        });
                    }
                }
            } else {
                rising = 0;
            }
            last = diff;
        }
        if !settled {
            return Err(Error::IterationLimit {
                iterations,
                residual: last,
                history: history[history.len().saturating_sub(50)..].to_vec(),
            });
        }
        if let Some(prev) = &previous_level {
            if sup_diff(prev, &u) < opts.level_tol {
                break;
            }
        }
        previous_level = Some(u.clone());
    }

    let floor = *used.last().expect("at least one level");
    let f = frozen_rhs(grid, law, &u, floor);
    let residual = operator_residual(grid, &u, &f);
    Ok(DiscreteSolution {
        grid: Arc::clone(grid),
        values: u,
        residual_history: history,
        residual,
        iterations,
        floor: Some(floor),
        floors: used,
    })
}
