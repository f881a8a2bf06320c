use std::sync::Arc;

use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::Grid2D;
use super::scheme::{local_solve, ma_operator, split_difference};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sweep {
    /// Newton steps on the active-pair linearization, then Gauss-Seidel polish.
    Newton,
    GaussSeidel,
    /// Parallel simultaneous updates.
    Jacobi,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedOptions {
    pub method: Sweep,
    /// Sweep limit for the nonlinear relaxation.
    pub max_iters: usize,
    /// Stop when the largest nodal update falls below this.
    pub update_tol: f64,
    /// Accepted relative residual `|MA_h u - f| / f`.
    pub residual_tol: f64,
}

impl Default for FixedOptions {
    fn default() -> Self {
        FixedOptions {
            method: Sweep::Newton,
            max_iters: 100_000,
            update_tol: 1e-10,
            residual_tol: 1e-8,
        }
    }
}

/// Nodal values of a computed solution; the boundary value is zero.
#[derive(Debug, Clone, Serialize)]
pub struct DiscreteSolution {
    #[serde(skip)]
    pub grid: Arc<Grid2D>,
    pub values: Vec<f64>,
    /// Largest nodal update per outer step.
    pub residual_history: Vec<f64>,
    /// Final relative operator residual.
    pub residual: f64,
    pub iterations: usize,
    /// Regularization floor of the last level, if any.
    pub floor: Option<f64>,
    pub floors: Vec<f64>,
}

impl DiscreteSolution {
    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Bilinear interpolation of the nodal values.
    pub fn interpolate(&self, x: [f64; 2]) -> f64 {
        self.grid.interpolate(&self.values, x)
    }
}

/// `max |MA_h u - f| / f` over nodes (absolute where `f` vanishes).
pub fn operator_residual(grid: &Grid2D, u: &[f64], f: &[f64]) -> f64 {
    (0..grid.len())
        .into_par_iter()
        .map(|m| {
            let r = (ma_operator(grid, u, m) - f[m]).abs();
            if f[m] > 0.0 {
                r / f[m]
            } else {
                r
            }
        })
        .reduce(|| 0.0, f64::max)
}

/// Solves `MA_h u = f` with zero boundary values.
pub fn solve_fixed_rhs(grid: &Arc<Grid2D>, f: &[f64], opts: &FixedOptions) -> Result<DiscreteSolution> {
    solve_fixed_from(grid, f, None, opts)
}

/// As [`solve_fixed_rhs`] with an optional starting guess.
pub fn solve_fixed_from(grid: &Arc<Grid2D>, f: &[f64], start: Option<&[f64]>, opts: &FixedOptions) -> Result<DiscreteSolution> {
    let n = grid.len();
    if f.len() != n {
        return Err(Error::param(format!("right-hand side has {} values for {n} nodes", f.len())));
    }
    if f.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::param("right-hand side must be finite and non-negative"));
    }
    let mut u = match start {
        Some(s) if s.len() == n => s.to_vec(),
        Some(_) => return Err(Error::param("starting guess has the wrong length")),
        None => vec![0.0; n],
    };
    let mut history = Vec::new();
    let mut iterations = 0;

    if opts.method == Sweep::Newton && f.iter().any(|&v| v > 0.0) {
        if start.is_none() {
            u = laplace_start(grid, f).unwrap_or(u);
        }
        iterations += newton(grid, f, &mut u, &mut history);
    }
    let kind = if opts.method == Sweep::Jacobi { Sweep::Jacobi } else { Sweep::GaussSeidel };
    let mut converged = false;
    for _ in 0..opts.max_iters {
        let delta = match kind {
            Sweep::Jacobi => jacobi_sweep(grid, f, &mut u),
            _ => gauss_seidel_sweep(grid, f, &mut u),
        };
        iterations += 1;
        history.push(delta);
        if delta < opts.update_tol && operator_residual(grid, &u, f) <= opts.residual_tol {
            converged = true;
            break;
        }
    }
    let residual = operator_residual(grid, &u, f);
    if !converged {
        return Err(Error::IterationLimit {
            iterations,
            residual,
            history: tail(&history),
        });
    }
    if residual > opts.residual_tol {
        return Err(Error::IterationLimit {
            iterations,
            residual,
            history: tail(&history),
        });
    }
    Ok(DiscreteSolution {
        grid: Arc::clone(grid),
        values: u,
        residual_history: history,
        residual,
        iterations,
        floor: None,
        floors: Vec::new(),
    })
}

fn tail(h: &[f64]) -> Vec<f64> {
    h[h.len().saturating_sub(50)..].to_vec()
}

pub(crate) fn gauss_seidel_sweep(grid: &Grid2D, f: &[f64], u: &mut [f64]) -> f64 {
    let mut delta: f64 = 0.0;
    for m in 0..grid.len() {
        let v = local_solve(grid, u, m, f[m]);
        delta = delta.max((v - u[m]).abs());
        u[m] = v;
    }
    delta
}

pub(crate) fn jacobi_sweep(grid: &Grid2D, f: &[f64], u: &mut [f64]) -> f64 {
    let next: Vec<f64> = (0..grid.len()).into_par_iter().map(|m| local_solve(grid, u, m, f[m])).collect();
    let delta = next.iter().zip(u.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    u.copy_from_slice(&next);
    delta
}

fn sparse_solve(n: usize, triplets: &[Triplet<usize, usize, f64>], rhs: &[f64]) -> Option<Vec<f64>> {
    let a = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, triplets).ok()?;
    let lu = a.sp_lu().ok()?;
    let b = Mat::<f64>::from_fn(n, 1, |i, _| rhs[i]);
    let x = lu.solve(&b);
    let out: Vec<f64> = (0..n).map(|i| x[(i, 0)]).collect();
    out.iter().all(|v| v.is_finite()).then_some(out)
}

fn push_row(grid: &Grid2D, m: usize, k: usize, w: f64, trip: &mut Vec<Triplet<usize, usize, f64>>) {
    let lp = grid.link(m, k, true);
    let lm = grid.link(m, k, false);
    let s = 2.0 / (lp.dist + lm.dist);
    if let Some(j) = lp.node {
        trip.push(Triplet::new(m, j, w * s / lp.dist));
    }
    if let Some(j) = lm.node {
        trip.push(Triplet::new(m, j, w * s / lm.dist));
    }
    trip.push(Triplet::new(m, m, -w * 2.0 / (lp.dist * lm.dist)));
}

/// Starting guess from the axis-pair Laplacian, `D_1 u + D_2 u = 2 sqrt(f)`.
fn laplace_start(grid: &Grid2D, f: &[f64]) -> Option<Vec<f64>> {
    let n = grid.len();
    let [p, q] = grid.pairs[0];
    let mut trip = Vec::with_capacity(5 * n);
    for m in 0..n {
        push_row(grid, m, p, 1.0, &mut trip);
        push_row(grid, m, q, 1.0, &mut trip);
    }
    let rhs: Vec<f64> = f.iter().map(|v| 2.0 * v.sqrt()).collect();
    sparse_solve(n, &trip, &rhs)
}

/// `sqrt(MA_h u) - sqrt(f)` per node, with the active pair.
fn newton_residual(grid: &Grid2D, f: &[f64], u: &[f64]) -> (Vec<f64>, Vec<usize>) {
    (0..grid.len())
        .into_par_iter()
        .map(|m| {
            let mut best = (f64::INFINITY, 0);
            for (i, &[p, q]) in grid.pairs.iter().enumerate() {
                let (a1, c1) = split_difference(grid, u, m, p);
                let (a2, c2) = split_difference(grid, u, m, q);
                let v = (a1 - c1 * u[m]).max(0.0) * (a2 - c2 * u[m]).max(0.0);
                if v < best.0 {
                    best = (v, i);
                }
            }
            (best.0.sqrt() - f[m].sqrt(), best.1)
        })
        .unzip()
}

fn scaled_norm(r: &[f64], f: &[f64]) -> f64 {
    r.iter()
        .zip(f)
        .map(|(a, b)| if *b > 0.0 { a.abs() / b.sqrt() } else { a.abs() })
        .fold(0.0, f64::max)
}

/// Damped Newton iteration on `min_pairs sqrt(D_1^+ D_2^+) = sqrt(f)`.
/// Returns the number of linear solves; leaves `u` at the best iterate.
fn newton(grid: &Grid2D, f: &[f64], u: &mut Vec<f64>, history: &mut Vec<f64>) -> usize {
    let n = grid.len();
    let (mut r, mut active) = newton_residual(grid, f, u);
    let mut norm = scaled_norm(&r, f);
    let mut solves = 0;
    for _ in 0..60 {
        if norm < 1e-13 {
            break;
        }
        let mut trip = Vec::with_capacity(9 * n);
        for m in 0..n {
            let [p, q] = grid.pairs[active[m]];
            let floor = 1e-8 * f[m].sqrt().max(1e-300);
            let d1 = {
                let (a, c) = split_difference(grid, u, m, p);
                (a - c * u[m]).max(floor)
            };
            let d2 = {
                let (a, c) = split_difference(grid, u, m, q);
                (a - c * u[m]).max(floor)
            };
            push_row(grid, m, p, 0.5 * (d2 / d1).sqrt(), &mut trip);
            push_row(grid, m, q, 0.5 * (d1 / d2).sqrt(), &mut trip);
        }
        let rhs: Vec<f64> = r.iter().map(|v| -v).collect();
        let Some(step) = sparse_solve(n, &trip, &rhs) else { break };
        solves += 1;
        let mut lambda = 1.0;
        let mut accepted = false;
        while lambda >= 1.0 / 64.0 {
            let trial: Vec<f64> = u.iter().zip(&step).map(|(a, s)| a + lambda * s).collect();
            let (rt, at) = newton_residual(grid, f, &trial);
            let nt = scaled_norm(&rt, f);
            if nt < norm {
                let moved = lambda * step.iter().fold(0.0f64, |m, s| m.max(s.abs()));
                *u = trial;
                r = rt;
                active = at;
                norm = nt;
                history.push(moved);
                accepted = true;
                if moved < 1e-15 * (1.0 + u.iter().fold(0.0f64, |m, v| m.max(v.abs()))) {
                    return solves;
                }
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    solves
}
