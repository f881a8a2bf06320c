use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::domain::{ConvexDomain, Point};
use crate::error::{Error, Result};

/// Rigid motion `x -> R (x - z)` placing a boundary point at the origin
/// and a chosen axis along `e_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalFrame {
    pub origin: Point,
    pub rotation: DMatrix<f64>,
    /// Interior point that defined the axis, when known.
    pub through: Option<Point>,
}

impl LocalFrame {
    pub fn identity(dim: usize) -> Self {
        LocalFrame {
            origin: Point::zeros(dim),
            rotation: DMatrix::identity(dim, dim),
            through: None,
        }
    }

    /// Frame at `origin` whose `e_n` axis points along `axis`.
    pub fn from_axis(origin: &Point, axis: &Point) -> Result<Self> {
        let n = origin.len();
        if axis.len() != n || n < 2 {
            return Err(Error::DegenerateFrame("dimension mismatch".into()));
        }
        let len = axis.norm();
        if !(len > 0.0) || !len.is_finite() {
            return Err(Error::DegenerateFrame("axis has zero length".into()));
        }
        let u = axis / len;
        let mut en = Point::zeros(n);
        en[n - 1] = 1.0;
        let v = &u - &en;
        let vv = v.norm_squared();
        let rotation = if vv < 1e-30 {
            DMatrix::identity(n, n)
        } else {
            // Householder reflection swaps u and e_n; flipping the first row
            // restores det = +1 without touching the last row.
            let mut h = DMatrix::identity(n, n) - (&v * v.transpose()) * (2.0 / vv);
            for j in 0..n {
                h[(0, j)] = -h[(0, j)];
            }
            h
        };
        Ok(LocalFrame {
            origin: origin.clone(),
            rotation,
            through: None,
        })
    }

    /// Frame at boundary point `z` with the segment `zy` as positive axis.
    pub fn through_points(z: &Point, y: &Point) -> Result<Self> {
        let axis = y - z;
        if axis.norm() == 0.0 {
            return Err(Error::DegenerateFrame("interior point coincides with boundary point".into()));
        }
        let mut f = Self::from_axis(z, &axis)?;
        f.through = Some(y.clone());
        Ok(f)
    }

    pub fn dim(&self) -> usize {
        self.origin.len()
    }

    pub fn apply(&self, x: &Point) -> Point {
        &self.rotation * (x - &self.origin)
    }

    pub fn inverse(&self, p: &Point) -> Point {
        self.rotation.transpose() * p + &self.origin
    }

    /// World-space direction of the local `e_n` axis.
    pub fn axis(&self) -> Point {
        let n = self.dim();
        self.rotation.row(n - 1).transpose()
    }

    /// World point at height `t` on the local axis.
    pub fn axis_point(&self, t: f64) -> Point {
        &self.origin + self.axis() * t
    }
}

/// Frame at boundary point `z` aligned with the interior point `y`.
pub fn local_frame_at(domain: &ConvexDomain, z: &Point, y: &Point) -> Result<LocalFrame> {
    if z.len() != domain.dim() || y.len() != domain.dim() {
        return Err(Error::param("frame points have wrong dimension"));
    }
    if (z - y).norm() == 0.0 {
        return Err(Error::DegenerateFrame("y equals z".into()));
    }
    if !domain.is_on_boundary(z) {
        return Err(Error::param(format!("{:?} is not a boundary point", z.as_slice())));
    }
    if !domain.contains_interior(y) {
        return Err(Error::OutsideDomain {
            point: y.iter().copied().collect(),
            depth: domain.depth(y),
        });
    }
    LocalFrame::through_points(z, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn p(v: &[f64]) -> Point {
        Point::from_vec(v.to_vec())
    }

    #[test]
    fn disk_frame_example() {
        let disk = ConvexDomain::unit_disk();
        let f = local_frame_at(&disk, &p(&[1.0, 0.0]), &p(&[0.5, 0.0])).unwrap();
        assert_abs_diff_eq!(f.apply(&p(&[1.0, 0.0])).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((f.apply(&p(&[0.5, 0.0])) - p(&[0.0, 0.5])).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.rotation.determinant(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn square_frame_is_translation() {
        let sq = ConvexDomain::unit_square();
        let f = local_frame_at(&sq, &p(&[0.5, 0.0]), &p(&[0.5, 0.2])).unwrap();
        assert_eq!(f.rotation, DMatrix::identity(2, 2));
        assert_eq!(f.apply(&p(&[0.0, 0.0])), p(&[-0.5, 0.0]));
    }

    #[test]
    fn degenerate_frame() {
        let sq = ConvexDomain::unit_square();
        let z = p(&[0.5, 0.0]);
        assert!(matches!(local_frame_at(&sq, &z, &z), Err(Error::DegenerateFrame(_))));
    }

    #[test]
    fn frame_in_higher_dimension_is_rotation() {
        let f = LocalFrame::from_axis(&p(&[0.0, 0.0, 0.0, 1.0]), &p(&[1.0, -2.0, 0.5, 0.3])).unwrap();
        let r = &f.rotation;
        let id = r * r.transpose();
        assert_abs_diff_eq!((id - DMatrix::identity(4, 4)).norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.determinant(), 1.0, epsilon = 1e-13);
        let img = f.apply(&p(&[1.0, -2.0, 0.5, 1.3]));
        assert_abs_diff_eq!(img.rows(0, 3).norm(), 0.0, epsilon = 1e-14);
        assert!(img[3] > 0.0);
        let back = f.inverse(&img);
        assert_abs_diff_eq!((back - p(&[1.0, -2.0, 0.5, 1.3])).norm(), 0.0, epsilon = 1e-14);
    }
}
