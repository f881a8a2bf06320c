//! Monotone wide-stencil approximation of `det D^2 u` in the plane.

use super::grid::Grid2D;

/// Second difference along direction `k` at `node` written as `a - c u0`,
/// where `u0` is the node's own value.
#[inline]
pub fn split_difference(grid: &Grid2D, u: &[f64], node: usize, k: usize) -> (f64, f64) {
    let lp = grid.link(node, k, true);
    let lm = grid.link(node, k, false);
    let up = lp.node.map_or(0.0, |m| u[m]);
    let um = lm.node.map_or(0.0, |m| u[m]);
    let (tp, tm) = (lp.dist, lm.dist);
    let s = 2.0 / (tp + tm);
    (s * (up / tp + um / tm), 2.0 / (tp * tm))
}

/// Second difference of `u` at `node` along unit direction `k`, with
/// zero boundary values at cut cells.
#[inline]
pub fn second_difference(grid: &Grid2D, u: &[f64], node: usize, k: usize) -> f64 {
    let (a, c) = split_difference(grid, u, node, k);
    a - c * u[node]
}

/// `min` over orthogonal pairs of the product of positive parts of the
/// two second differences.
pub fn ma_operator(grid: &Grid2D, u: &[f64], node: usize) -> f64 {
    grid.pairs
        .iter()
        .map(|&[p, q]| second_difference(grid, u, node, p).max(0.0) * second_difference(grid, u, node, q).max(0.0))
        .fold(f64::INFINITY, f64::min)
}

/// Value of `u0` making `ma_operator = f` at `node` with all neighbor
/// values held fixed.
pub fn local_solve(grid: &Grid2D, u: &[f64], node: usize, f: f64) -> f64 {
    let mut best = f64::INFINITY;
    for &[p, q] in &grid.pairs {
        let (a1, c1) = split_difference(grid, u, node, p);
        let (a2, c2) = split_difference(grid, u, node, q);
        let v = pair_root(a1, c1, a2, c2, f);
        best = best.min(v);
    }
    best
}

/// Largest `u` with `(a1 - c1 u)(a2 - c2 u) = f` and both factors
/// non-negative; for `f = 0` the smaller zero.
#[inline]
pub fn pair_root(a1: f64, c1: f64, a2: f64, c2: f64, f: f64) -> f64 {
    if f <= 0.0 {
        return (a1 / c1).min(a2 / c2);
    }
    // X = a1 - c1 u solves c2 X^2 + k X - c1 f = 0
    let k = a2 * c1 - a1 * c2;
    let disc = (k * k + 4.0 * c1 * c2 * f).sqrt();
    let x = if k >= 0.0 { 2.0 * c1 * f / (k + disc) } else { (disc - k) / (2.0 * c2) };
    (a1 - x) / c1
}

/// Smallest second difference over all nodes and directions.
pub fn min_second_difference(grid: &Grid2D, u: &[f64]) -> f64 {
    (0..grid.len())
        .flat_map(|m| (0..grid.directions.len()).map(move |k| (m, k)))
        .map(|(m, k)| second_difference(grid, u, m, k))
        .fold(f64::INFINITY, f64::min)
}
