use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ConvexDomain, Point};

/// Lattice points closer than this fraction of `h` to the boundary are
/// treated as boundary points.
const MIN_NODE_DEPTH: f64 = 1e-3;

/// Neighbor of a node along one signed stencil direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Link {
    /// Interior node index, or `None` when the step is cut by the boundary.
    pub node: Option<usize>,
    /// Physical distance to the neighbor or to the boundary crossing.
    pub dist: f64,
}

/// Uniform lattice `(i h, j h)` restricted to the interior of a planar
/// convex domain, with wide-stencil links and cut cells.
#[derive(Debug, Clone)]
pub struct Grid2D {
    pub h: f64,
    pub stencil_width: u8,
    pub domain: ConvexDomain,
    pub coords: Vec<[f64; 2]>,
    pub lattice: Vec<[i64; 2]>,
    pub depth: Vec<f64>,
    /// Primitive lattice directions, one per line through the origin.
    pub directions: Vec<[i64; 2]>,
    /// Orthogonal direction pairs, as indices into `directions`.
    pub pairs: Vec<[usize; 2]>,
    links: Vec<Link>,
    index: HashMap<[i64; 2], usize>,
}

/// Orthogonal pairs of primitive directions with entries bounded by `width`.
pub fn stencil(width: u8) -> (Vec<[i64; 2]>, Vec<[usize; 2]>) {
    let mut base: Vec<([i64; 2], [i64; 2])> = vec![([1, 0], [0, 1]), ([1, 1], [-1, 1])];
    if width >= 2 {
        base.push(([1, 2], [-2, 1]));
        base.push(([2, 1], [-1, 2]));
    }
    if width >= 3 {
        base.push(([1, 3], [-3, 1]));
        base.push(([3, 1], [-1, 3]));
        base.push(([2, 3], [-3, 2]));
        base.push(([3, 2], [-2, 3]));
    }
    let mut dirs = Vec::new();
    let mut pairs = Vec::new();
    for (v, w) in base {
        dirs.push(v);
        dirs.push(w);
        pairs.push([dirs.len() - 2, dirs.len() - 1]);
    }
    (dirs, pairs)
}

/// Builds the grid. Requires a planar domain, `0 < h <= diam/4` and a
/// stencil width in `1..=3`.
pub fn discretize_domain(domain: &ConvexDomain, h: f64, stencil_width: u8) -> Result<Grid2D> {
    if domain.dim() != 2 {
        return Err(Error::param(format!("grid solver needs a planar domain, got dimension {}", domain.dim())));
    }
    if !(1..=3).contains(&stencil_width) {
        return Err(Error::param(format!("stencil width must be 1, 2 or 3, got {stencil_width}")));
    }
    let diam = domain.diam();
    if !(h > 0.0) || !h.is_finite() || h > diam / 4.0 {
        return Err(Error::param(format!("spacing h = {h} must lie in (0, diam/4 = {}]", diam / 4.0)));
    }
    let (lo, hi) = domain.bounding_box();
    let i0 = (lo[0] / h).ceil() as i64;
    let i1 = (hi[0] / h).floor() as i64;
    let j0 = (lo[1] / h).ceil() as i64;
    let j1 = (hi[1] / h).floor() as i64;

    let mut coords = Vec::new();
    let mut lattice = Vec::new();
    let mut depth = Vec::new();
    for j in j0..=j1 {
        for i in i0..=i1 {
            let x = [i as f64 * h, j as f64 * h];
            let d = domain.depth(&Point::from_vec(x.to_vec()));
            if d >= MIN_NODE_DEPTH * h {
                coords.push(x);
                lattice.push([i, j]);
                depth.push(d);
            }
        }
    }
    if coords.is_empty() {
        return Err(Error::Discretization(format!("domain too thin for h = {h}: no interior lattice points")));
    }
    let index: HashMap<[i64; 2], usize> = lattice.iter().enumerate().map(|(k, p)| (*p, k)).collect();
    let (directions, pairs) = stencil(stencil_width);

    let links: Vec<Link> = (0..coords.len())
        .into_par_iter()
        .flat_map_iter(|k| {
            let x = Point::from_vec(coords[k].to_vec());
            let p = lattice[k];
            let mut out = Vec::with_capacity(2 * directions.len());
            for v in &directions {
                let len = h * ((v[0] * v[0] + v[1] * v[1]) as f64).sqrt();
                for s in [1i64, -1] {
                    let q = [p[0] + s * v[0], p[1] + s * v[1]];
                    let link = match index.get(&q) {
                        Some(&m) => Link { node: Some(m), dist: len },
                        None => {
                            let dir = Point::from_vec(vec![(s * v[0]) as f64, (s * v[1]) as f64]).normalize();
                            let t = domain.ray_exit(&x, &dir).min(len);
                            Link { node: None, dist: t }
                        }
                    };
                    out.push(link);
                }
            }
            out
        })
        .collect();

    Ok(Grid2D {
        h,
        stencil_width,
        domain: domain.clone(),
        coords,
        lattice,
        depth,
        directions,
        pairs,
        links,
        index,
    })
}

impl Grid2D {
    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Link from `node` along direction `k`, forward when `forward`.
    pub fn link(&self, node: usize, k: usize, forward: bool) -> Link {
        let nd = self.directions.len();
        self.links[(node * nd + k) * 2 + usize::from(!forward)]
    }

    pub fn node_at(&self, i: i64, j: i64) -> Option<usize> {
        self.index.get(&[i, j]).copied()
    }

    /// Node closest to `x`, if `x` rounds to a grid node.
    pub fn nearest_node(&self, x: [f64; 2]) -> Option<usize> {
        self.node_at((x[0] / self.h).round() as i64, (x[1] / self.h).round() as i64)
    }

    pub fn point(&self, node: usize) -> Point {
        Point::from_vec(self.coords[node].to_vec())
    }

    /// Bilinear interpolation of nodal values (zero outside the node set).
    pub fn interpolate(&self, u: &[f64], x: [f64; 2]) -> f64 {
        let fx = x[0] / self.h;
        let fy = x[1] / self.h;
        let (i, j) = (fx.floor() as i64, fy.floor() as i64);
        let (sx, sy) = (fx - i as f64, fy - j as f64);
        let val = |a: i64, b: i64| self.node_at(a, b).map_or(0.0, |m| u[m]);
        (1.0 - sx) * (1.0 - sy) * val(i, j)
            + sx * (1.0 - sy) * val(i + 1, j)
            + (1.0 - sx) * sy * val(i, j + 1)
            + sx * sy * val(i + 1, j + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_and_disk_counts() {
        let g = discretize_domain(&ConvexDomain::unit_square(), 0.25, 1).unwrap();
        assert_eq!(g.len(), 9);
        let g = discretize_domain(&ConvexDomain::unit_disk(), 0.5, 1).unwrap();
        assert_eq!(g.len(), 9);
        assert_eq!(g.pairs.len(), 2);
    }

    #[test]
    fn stencil_sizes() {
        for (w, p) in [(1u8, 2usize), (2, 4), (3, 8)] {
            let (dirs, pairs) = stencil(w);
            assert_eq!(pairs.len(), p);
            assert_eq!(dirs.len(), 2 * p);
            for [a, b] in pairs {
                let (v, u) = (dirs[a], dirs[b]);
                assert_eq!(v[0] * u[0] + v[1] * u[1], 0);
            }
        }
    }

    #[test]
    fn cut_cells_hit_boundary() {
        let disk = ConvexDomain::unit_disk();
        let g = discretize_domain(&disk, 0.1, 3).unwrap();
        let ratio = g.len() as f64 * 0.01 / std::f64::consts::PI;
        assert!((0.5..=1.5).contains(&ratio));
        for k in 0..g.len() {
            for (q, v) in g.directions.iter().enumerate() {
                let len = g.h * ((v[0] * v[0] + v[1] * v[1]) as f64).sqrt();
                for fwd in [true, false] {
                    let l = g.link(k, q, fwd);
                    assert!(l.dist > 0.0 && l.dist <= len * (1.0 + 1e-15));
                    if l.node.is_none() && l.dist < len {
                        let s = if fwd { 1.0 } else { -1.0 };
                        let e = Point::from_vec(vec![s * v[0] as f64, s * v[1] as f64]).normalize();
                        let end = g.point(k) + e * l.dist;
                        assert!(disk.depth(&end).abs() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        let sq = ConvexDomain::unit_square();
        assert!(discretize_domain(&sq, 0.5, 1).is_err());
        assert!(discretize_domain(&sq, 0.1, 4).is_err());
        let ball = ConvexDomain::ball(vec![0.0; 3], 1.0).unwrap();
        assert!(discretize_domain(&ball, 0.1, 1).is_err());
    }
}
