use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::sampling::{halton, unit_directions};
use crate::error::{Error, Result};

pub type Point = DVector<f64>;

/// Half-space `normal · x <= offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfSpaceSpec {
    pub normal: Vec<f64>,
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallSpec {
    pub center: Vec<f64>,
    #[serde(rename = "radius_len")]
    pub radius: f64,
}

/// Domain descriptor, as read from experiment configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Shape {
    Ball {
        center: Vec<f64>,
        #[serde(rename = "radius_len")]
        radius: f64,
    },
    Box {
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
    /// Convex polygon in the plane; either orientation is accepted.
    Polygon { vertices: Vec<[f64; 2]> },
    Intersection {
        #[serde(default)]
        half_spaces: Vec<HalfSpaceSpec>,
        #[serde(default)]
        balls: Vec<BallSpec>,
    },
    /// `{ eta |x'|^a <= x_n <= height }`, tip at the origin.
    Cusp {
        dimension: usize,
        a: f64,
        eta: f64,
        #[serde(rename = "height_len")]
        height: f64,
    },
}

#[derive(Debug, Clone)]
pub(crate) enum Constraint {
    HalfSpace { normal: Point, offset: f64 },
    Ball { center: Point, radius: f64 },
    Cusp { a: f64, eta: f64 },
}

impl Constraint {
    /// Signed depth: positive inside, equal to the distance to this
    /// constraint's boundary.
    fn depth(&self, x: &Point) -> f64 {
        match self {
            Constraint::HalfSpace { normal, offset } => offset - normal.dot(x),
            Constraint::Ball { center, radius } => radius - (x - center).norm(),
            Constraint::Cusp { a, eta } => {
                let (r, xn) = split_radial(x);
                let (dist, _) = cusp_nearest(*a, *eta, r, xn);
                if xn >= eta * r.powf(*a) {
                    dist
                } else {
                    -dist
                }
            }
        }
    }

    /// Nearest point of this constraint's boundary.
    fn project(&self, x: &Point) -> Point {
        match self {
            Constraint::HalfSpace { normal, offset } => x + normal * (offset - normal.dot(x)),
            Constraint::Ball { center, radius } => {
                let v = x - center;
                let nv = v.norm();
                if nv == 0.0 {
                    // every sphere point ties; the lexicographically smallest is -R e_1
                    let mut p = center.clone();
                    p[0] -= radius;
                    p
                } else {
                    center + v * (radius / nv)
                }
            }
            Constraint::Cusp { a, eta } => {
                let n = x.len();
                let (r, xn) = split_radial(x);
                let (_, s) = cusp_nearest(*a, *eta, r, xn);
                let mut p = Point::zeros(n);
                if r > 0.0 {
                    for i in 0..n - 1 {
                        p[i] = x[i] / r * s;
                    }
                } else {
                    p[0] = -s;
                }
                p[n - 1] = eta * s.powf(*a);
                p
            }
        }
    }

    fn inward_normal(&self, z: &Point) -> Point {
        match self {
            Constraint::HalfSpace { normal, .. } => -normal.clone(),
            Constraint::Ball { center, .. } => {
                let v = center - z;
                let n = v.norm();
                v / n
            }
            Constraint::Cusp { a, eta } => {
                let n = z.len();
                let (r, _) = split_radial(z);
                let mut g = Point::zeros(n);
                if r > 0.0 {
                    let scale = eta * a * r.powf(a - 2.0);
                    for i in 0..n - 1 {
                        g[i] = -scale * z[i];
                    }
                }
                g[n - 1] = 1.0;
                let gn = g.norm();
                g / gn
            }
        }
    }

    /// Distance along the unit direction `dir` from an interior `origin`
    /// to this constraint's boundary; infinity if the ray never leaves.
    fn exit_distance(&self, origin: &Point, dir: &Point, scale: f64) -> f64 {
        match self {
            Constraint::HalfSpace { normal, offset } => {
                let nd = normal.dot(dir);
                if nd <= 1e-300 {
                    f64::INFINITY
                } else {
                    ((offset - normal.dot(origin)) / nd).max(0.0)
                }
            }
            Constraint::Ball { center, radius } => {
                let oc = origin - center;
                let b = oc.dot(dir);
                let c = oc.norm_squared() - radius * radius;
                let disc = (b * b - c).max(0.0);
                let sq = disc.sqrt();
                // c <= 0 for interior origins, so the larger root is >= 0
                if b > 0.0 {
                    (-c / (b + sq)).max(0.0)
                } else {
                    (sq - b).max(0.0)
                }
            }
            Constraint::Cusp { a, eta } => {
                let phi = |t: f64| {
                    let p = origin + dir * t;
                    let (r, xn) = split_radial(&p);
                    xn - eta * r.powf(*a)
                };
                if phi(0.0) < 0.0 {
                    return 0.0;
                }
                let mut hi = 1e-3 * scale;
                while phi(hi) >= 0.0 {
                    hi *= 2.0;
                    if hi > 1e8 * scale {
                        return f64::INFINITY;
                    }
                }
                let mut lo = 0.0;
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if phi(mid) >= 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            }
        }
    }
}

fn split_radial(x: &Point) -> (f64, f64) {
    let n = x.len();
    let r = x.rows(0, n - 1).norm();
    (r, x[n - 1])
}

/// Distance from `(r, xn)` to the curve `t = eta s^a`, `s >= 0`, in the
/// meridian half-plane. Returns `(distance, s)` of the nearest point.
fn cusp_nearest(a: f64, eta: f64, r: f64, xn: f64) -> (f64, f64) {
    let g = |s: f64| {
        let ds = s - r;
        let dt = eta * s.powf(a) - xn;
        ds * ds + dt * dt
    };
    let vertical = (xn - eta * r.powf(a)).abs();
    let mut span = vertical;
    if xn > 0.0 {
        span = span.min(((xn / eta).powf(1.0 / a) - r).abs());
    }
    let lo = (r - span).max(0.0);
    let hi = r + span;
    if hi <= lo {
        return (g(lo).sqrt(), lo);
    }
    const SCAN: usize = 64;
    let step = (hi - lo) / SCAN as f64;
    let mut best = 0;
    let mut best_val = f64::INFINITY;
    for k in 0..=SCAN {
        let v = g(lo + step * k as f64);
        if v < best_val {
            best_val = v;
            best = k;
        }
    }
    let mut a_ = (lo + step * (best as f64 - 1.0)).max(lo);
    let mut b_ = (lo + step * (best as f64 + 1.0)).min(hi);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b_ - phi * (b_ - a_);
    let mut d = a_ + phi * (b_ - a_);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..100 {
        if gc < gd {
            b_ = d;
            d = c;
            gd = gc;
            c = b_ - phi * (b_ - a_);
            gc = g(c);
        } else {
            a_ = c;
            c = d;
            gc = gd;
            d = a_ + phi * (b_ - a_);
            gd = g(d);
        }
        if (b_ - a_).abs() <= 1e-15 * (1.0 + r.abs()) {
            break;
        }
    }
    let s = 0.5 * (a_ + b_);
    let mut out = (g(s), s);
    for cand in [lo, hi, lo + step * best as f64] {
        let v = g(cand);
        if v < out.0 {
            out = (v, cand);
        }
    }
    (out.0.sqrt(), out.1)
}

/// Bounded convex region assembled from exactly computable constraints.
///
/// Boundary distances are exact for balls, boxes, polygons and
/// half-space/ball intersections; the cusp surface is resolved by a 1-D
/// minimization in the meridian plane.
#[derive(Debug, Clone)]
pub struct ConvexDomain {
    shape: Shape,
    dim: usize,
    constraints: Vec<Constraint>,
    center: Point,
    diam: f64,
    vertices: Vec<Point>,
    bbox: (Point, Point),
}

impl ConvexDomain {
    pub fn new(shape: Shape) -> Result<Self> {
        let mut vertices = Vec::new();
        let (dim, constraints, center, diam) = match &shape {
            Shape::Ball { center, radius } => {
                check_dim(center.len())?;
                if !(*radius > 0.0) {
                    return Err(Error::param("ball radius must be positive"));
                }
                let c = Point::from_vec(center.clone());
                let cons = vec![Constraint::Ball {
                    center: c.clone(),
                    radius: *radius,
                }];
                (center.len(), cons, c, 2.0 * radius)
            }
            Shape::Box { lower, upper } => {
                let n = lower.len();
                check_dim(n)?;
                if upper.len() != n || lower.iter().zip(upper).any(|(l, u)| !(u > l)) {
                    return Err(Error::param("box needs lower < upper in every coordinate"));
                }
                let mut cons = Vec::with_capacity(2 * n);
                for i in 0..n {
                    let mut e = Point::zeros(n);
                    e[i] = 1.0;
                    cons.push(Constraint::HalfSpace {
                        normal: e.clone(),
                        offset: upper[i],
                    });
                    cons.push(Constraint::HalfSpace {
                        normal: -e,
                        offset: -lower[i],
                    });
                }
                for mask in 0..(1usize << n) {
                    vertices.push(Point::from_fn(n, |i, _| {
                        if mask >> i & 1 == 1 {
                            upper[i]
                        } else {
                            lower[i]
                        }
                    }));
                }
                let c = Point::from_fn(n, |i, _| 0.5 * (lower[i] + upper[i]));
                let d = lower
                    .iter()
                    .zip(upper)
                    .map(|(l, u)| (u - l) * (u - l))
                    .sum::<f64>()
                    .sqrt();
                (n, cons, c, d)
            }
            Shape::Polygon { vertices: vs } => {
                let (cons, verts) = polygon_constraints(vs)?;
                let m = verts.len() as f64;
                let c = verts.iter().fold(Point::zeros(2), |acc, v| acc + v) / m;
                let mut d: f64 = 0.0;
                for (i, p) in verts.iter().enumerate() {
                    for q in &verts[i + 1..] {
                        d = d.max((p - q).norm());
                    }
                }
                vertices = verts;
                (2, cons, c, d)
            }
            Shape::Intersection { half_spaces, balls } => {
                let n = half_spaces
                    .first()
                    .map(|h| h.normal.len())
                    .or_else(|| balls.first().map(|b| b.center.len()))
                    .ok_or_else(|| Error::param("intersection needs at least one constraint"))?;
                check_dim(n)?;
                let mut cons = Vec::new();
                for hs in half_spaces {
                    if hs.normal.len() != n {
                        return Err(Error::param("half-space dimension mismatch"));
                    }
                    let v = Point::from_vec(hs.normal.clone());
                    let nv = v.norm();
                    if nv == 0.0 {
                        return Err(Error::param("half-space normal must be nonzero"));
                    }
                    cons.push(Constraint::HalfSpace {
                        normal: v / nv,
                        offset: hs.offset / nv,
                    });
                }
                for b in balls {
                    if b.center.len() != n || !(b.radius > 0.0) {
                        return Err(Error::param("invalid ball in intersection"));
                    }
                    cons.push(Constraint::Ball {
                        center: Point::from_vec(b.center.clone()),
                        radius: b.radius,
                    });
                }
                let start = if balls.is_empty() {
                    Point::zeros(n)
                } else {
                    balls
                        .iter()
                        .fold(Point::zeros(n), |acc, b| acc + Point::from_vec(b.center.clone()))
                        / balls.len() as f64
                };
                let c = deepest_point(&cons, start);
                if min_depth(&cons, &c) <= 0.0 {
                    return Err(Error::param("intersection has empty interior"));
                }
                (n, cons, c, f64::NAN)
            }
            Shape::Cusp {
                dimension,
                a,
                eta,
                height,
            } => {
                let n = *dimension;
                check_dim(n)?;
                if !(*a >= 1.0) || !(*eta > 0.0) || !(*height > 0.0) {
                    return Err(Error::param("cusp needs a >= 1, eta > 0, height > 0"));
                }
                let mut top = Point::zeros(n);
                top[n - 1] = 1.0;
                let cons = vec![
                    Constraint::Cusp { a: *a, eta: *eta },
                    Constraint::HalfSpace {
                        normal: top,
                        offset: *height,
                    },
                ];
                let mut c = Point::zeros(n);
                c[n - 1] = 0.5 * height;
                if n == 2 {
                    let rho = (height / eta).powf(1.0 / a);
                    vertices.push(Point::from_vec(vec![-rho, *height]));
                    vertices.push(Point::from_vec(vec![rho, *height]));
                }
                vertices.push(Point::zeros(n));
                (n, cons, c, f64::NAN)
            }
        };

        let mut dom = ConvexDomain {
            shape,
            dim,
            constraints,
            center,
            diam,
            vertices,
            bbox: (Point::zeros(dim), Point::zeros(dim)),
        };
        // rough scale for ray casting before the diameter is known
        if dom.diam.is_nan() {
            let probe = dom.raw_boundary_samples(256);
            let mut scale: f64 = 0.0;
            for p in &probe {
                scale = scale.max((p - &dom.center).norm());
            }
            if !scale.is_finite() {
                return Err(Error::param("domain is unbounded"));
            }
            dom.diam = 2.0 * scale;
            if dom.dim == 2 {
                dom.vertices.extend(dom.intersection_vertices());
            }
            dom.diam = dom.sampled_diameter();
        }
        if !dom.diam.is_finite() || dom.diam <= 0.0 {
            return Err(Error::param("domain is unbounded or degenerate"));
        }
        dom.bbox = dom.compute_bbox();
        Ok(dom)
    }

    pub fn unit_disk() -> Self {
        Self::new(Shape::Ball {
            center: vec![0.0, 0.0],
            radius: 1.0,
        })
        .expect("unit disk")
    }

    pub fn unit_square() -> Self {
        Self::new(Shape::Box {
            lower: vec![0.0, 0.0],
            upper: vec![1.0, 1.0],
        })
        .expect("unit square")
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        Self::new(Shape::Ball { center, radius })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Diameter `l`.
    pub fn diam(&self) -> f64 {
        self.diam
    }

    /// A reference interior point (center or deepest point).
    pub fn center(&self) -> &Point {
        &self.center
    }

    /// Corner points known in closed form (polygon/box corners, 2-D
    /// intersection vertices, cusp tip and rim).
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn bounding_box(&self) -> &(Point, Point) {
        &self.bbox
    }

    /// Geometric equality tolerance, `1e-9 * diam`.
    pub fn tol(&self) -> f64 {
        1e-9 * self.diam
    }

    fn membership_tol(&self) -> f64 {
        1e-12 * self.diam.max(1.0)
    }

    /// Signed depth: `dist(x, boundary)` inside, negative outside.
    pub fn depth(&self, x: &Point) -> f64 {
        min_depth(&self.constraints, x)
    }

    pub fn contains(&self, x: &Point) -> bool {
        x.len() == self.dim && self.depth(x) >= -self.membership_tol()
    }

    pub fn contains_interior(&self, x: &Point) -> bool {
        x.len() == self.dim && self.depth(x) > 0.0
    }

    fn check_member(&self, x: &Point) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::param(format!(
                "point has dimension {}, domain has {}",
                x.len(),
                self.dim
            )));
        }
        let d = self.depth(x);
        if d < -self.membership_tol() {
            return Err(Error::OutsideDomain {
                point: x.iter().copied().collect(),
                depth: d,
            });
        }
        Ok(d.max(0.0))
    }

    /// `d_x = dist(x, boundary)` for `x` in the closed domain.
    pub fn distance_to_boundary(&self, x: &Point) -> Result<f64> {
        self.check_member(x)
    }

    /// Nearest boundary point, ties broken lexicographically.
    pub fn nearest_boundary_point(&self, y: &Point) -> Result<(Point, f64)> {
        let d = self.check_member(y)?;
        if d <= self.membership_tol() {
            return Ok((y.clone(), 0.0));
        }
        let tie = 1e-12 * self.diam.max(1.0);
        let mut best: Option<Point> = None;
        for c in &self.constraints {
            if (c.depth(y) - d).abs() <= tie {
                let p = c.project(y);
                best = match best {
                    None => Some(p),
                    Some(b) => Some(if lex_less(&p, &b, tie) { p } else { b }),
                };
            }
        }
        let z = best.expect("an active constraint attains the minimum depth");
        Ok((z, d))
    }

    /// Distance from the interior point `origin` along unit `dir` to the
    /// boundary.
    pub fn ray_exit(&self, origin: &Point, dir: &Point) -> f64 {
        let scale = if self.diam.is_finite() { self.diam } else { 1.0 };
        self.constraints
            .iter()
            .map(|c| c.exit_distance(origin, dir, scale))
            .fold(f64::INFINITY, f64::min)
    }

    /// Boundary point hit by the ray from the center through `target`.
    pub fn boundary_point_towards(&self, target: &Point) -> Point {
        let v = target - &self.center;
        let dir = v.normalize();
        let t = self.ray_exit(&self.center, &dir);
        &self.center + dir * t
    }

    fn raw_boundary_samples(&self, count: usize) -> Vec<Point> {
        unit_directions(count, self.dim)
            .into_iter()
            .map(|d| {
                let dir = Point::from_vec(d);
                let t = self.ray_exit(&self.center, &dir);
                &self.center + dir * t
            })
            .collect()
    }

    /// Deterministic boundary samples: ray casts along low-discrepancy
    /// directions plus all known vertices.
    pub fn boundary_samples(&self, count: usize) -> Vec<Point> {
        let mut out = self.raw_boundary_samples(count);
        out.extend(self.vertices.iter().cloned());
        out
    }

    /// Deterministic interior samples (Halton points in the bounding box,
    /// rejection to the open domain).
    pub fn interior_samples(&self, count: usize) -> Vec<Point> {
        let (lo, hi) = &self.bbox;
        let mut out = Vec::with_capacity(count);
        let mut idx = 1u64;
        let limit = 1000 * count as u64 + 1000;
        while out.len() < count && idx < limit {
            let u = halton(idx, self.dim);
            idx += 1;
            let p = Point::from_fn(self.dim, |i, _| lo[i] + u[i] * (hi[i] - lo[i]));
            if self.depth(&p) > 0.0 {
                out.push(p);
            }
        }
        out
    }

    /// Inward unit normals of the constraints active at `z`.
    pub fn active_normals(&self, z: &Point) -> Vec<Point> {
        let tol = self.tol();
        self.constraints
            .iter()
            .filter(|c| c.depth(z).abs() <= tol)
            .map(|c| c.inward_normal(z))
            .collect()
    }

    /// Inward normal at a boundary point: the normalized mean of the
    /// active constraint normals (the bisector at corners).
    pub fn inward_normal(&self, z: &Point) -> Result<Point> {
        let normals = self.active_normals(z);
        if normals.is_empty() {
            return Err(Error::param(format!(
                "point {:?} is not on the boundary",
                z.as_slice()
            )));
        }
        let sum = normals.iter().fold(Point::zeros(self.dim), |acc, v| acc + v);
        let n = sum.norm();
        if n < 1e-12 {
            return Err(Error::param("normal cone is degenerate at boundary point"));
        }
        Ok(sum / n)
    }

    pub fn is_on_boundary(&self, z: &Point) -> bool {
        z.len() == self.dim && self.depth(z).abs() <= self.tol()
    }

    fn sampled_diameter(&self) -> f64 {
        let count = if self.dim == 2 { 1024 } else { 2048 };
        let pts = self.boundary_samples(count);
        let mut best = (0.0, 0, 0);
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let d = (&pts[i] - &pts[j]).norm_squared();
                if d > best.0 {
                    best = (d, i, j);
                }
            }
        }
        if self.dim != 2 {
            return best.0.sqrt();
        }
        // refine the best pair over boundary angles
        let angle = |p: &Point| (p[1] - self.center[1]).atan2(p[0] - self.center[0]);
        let at = |t: f64| {
            let dir = Point::from_vec(vec![t.cos(), t.sin()]);
            let s = self.ray_exit(&self.center, &dir);
            &self.center + dir * s
        };
        let (mut t1, mut t2) = (angle(&pts[best.1]), angle(&pts[best.2]));
        let mut val = (at(t1) - at(t2)).norm();
        let mut step = std::f64::consts::TAU / count as f64;
        while step > 1e-13 {
            let mut improved = false;
            for (d1, d2) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
                let v = (at(t1 + d1) - at(t2 + d2)).norm();
                if v > val {
                    val = v;
                    t1 += d1;
                    t2 += d2;
                    improved = true;
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        val.max(best.0.sqrt())
    }

    /// Pairwise crossings of constraint boundaries that lie on the
    /// boundary of the domain (2-D only).
    fn intersection_vertices(&self) -> Vec<Point> {
        let mut out: Vec<Point> = Vec::new();
        let tol = 1e-10 * self.diam.max(1.0);
        for (i, ci) in self.constraints.iter().enumerate() {
            for cj in &self.constraints[i + 1..] {
                for p in crossings_2d(ci, cj) {
                    if self.depth(&p).abs() <= tol && !out.iter().any(|q| (q - &p).norm() <= tol) {
                        out.push(p);
                    }
                }
            }
        }
        out
    }

    fn compute_bbox(&self) -> (Point, Point) {
        if let Shape::Ball { center, radius } = &self.shape {
            let c = Point::from_vec(center.clone());
            let r = Point::from_element(self.dim, *radius);
            return (&c - &r, &c + &r);
        }
        let pts = self.boundary_samples(if self.dim == 2 { 2048 } else { 4096 });
        let mut lo = Point::from_element(self.dim, f64::INFINITY);
        let mut hi = Point::from_element(self.dim, f64::NEG_INFINITY);
        for p in &pts {
            for i in 0..self.dim {
                lo[i] = lo[i].min(p[i]);
                hi[i] = hi[i].max(p[i]);
            }
        }
        if matches!(self.shape, Shape::Box { .. } | Shape::Polygon { .. }) {
            return (lo, hi);
        }
        let pad = 1e-3 * self.diam;
        lo.add_scalar_mut(-pad);
        hi.add_scalar_mut(pad);
        (lo, hi)
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::param(format!("dimension must be >= 2, got {n}")));
    }
    Ok(())
}

fn min_depth(cons: &[Constraint], x: &Point) -> f64 {
    cons.iter().map(|c| c.depth(x)).fold(f64::INFINITY, f64::min)
}

fn lex_less(p: &Point, q: &Point, tol: f64) -> bool {
    for (a, b) in p.iter().zip(q.iter()) {
        if (a - b).abs() > tol {
            return a < b;
        }
    }
    false
}

fn polygon_constraints(vs: &[[f64; 2]]) -> Result<(Vec<Constraint>, Vec<Point>)> {
    if vs.len() < 3 {
        return Err(Error::param("polygon needs at least 3 vertices"));
    }
    let mut pts: Vec<Point> = vs.iter().map(|v| Point::from_vec(v.to_vec())).collect();
    let area2: f64 = (0..pts.len())
        .map(|i| {
            let p = &pts[i];
            let q = &pts[(i + 1) % pts.len()];
            p[0] * q[1] - q[0] * p[1]
        })
        .sum();
    if area2.abs() < 1e-300 {
        return Err(Error::param("polygon is degenerate"));
    }
    if area2 < 0.0 {
        pts.reverse();
    }
    let m = pts.len();
    let mut cons = Vec::with_capacity(m);
    for i in 0..m {
        let p = &pts[i];
        let q = &pts[(i + 1) % m];
        let r = &pts[(i + 2) % m];
        let e = q - p;
        let f = r - q;
        if e[0] * f[1] - e[1] * f[0] <= 0.0 {
            return Err(Error::param("polygon is not strictly convex"));
        }
        let len = e.norm();
        let normal = Point::from_vec(vec![e[1] / len, -e[0] / len]);
        let offset = normal.dot(p);
        cons.push(Constraint::HalfSpace { normal, offset });
    }
    Ok((cons, pts))
}

fn crossings_2d(a: &Constraint, b: &Constraint) -> Vec<Point> {
    use Constraint::*;
    match (a, b) {
        (HalfSpace { normal: n1, offset: c1 }, HalfSpace { normal: n2, offset: c2 }) => {
            let det = n1[0] * n2[1] - n1[1] * n2[0];
            if det.abs() < 1e-14 {
                return vec![];
            }
            vec![Point::from_vec(vec![
                (c1 * n2[1] - c2 * n1[1]) / det,
                (n1[0] * c2 - n2[0] * c1) / det,
            ])]
        }
        (HalfSpace { normal, offset }, Ball { center, radius })
        | (Ball { center, radius }, HalfSpace { normal, offset }) => {
            let foot = center + normal * (offset - normal.dot(center));
            let h = (offset - normal.dot(center)).abs();
            if h > *radius {
                return vec![];
            }
            let s = (radius * radius - h * h).sqrt();
            let t = Point::from_vec(vec![-normal[1], normal[0]]);
            vec![&foot + &t * s, &foot - &t * s]
        }
        (Ball { center: c1, radius: r1 }, Ball { center: c2, radius: r2 }) => {
            let v = c2 - c1;
            let d = v.norm();
            if d < 1e-14 || d > r1 + r2 || d < (r1 - r2).abs() {
                return vec![];
            }
            let x = (d * d + r1 * r1 - r2 * r2) / (2.0 * d);
            let y = (r1 * r1 - x * x).max(0.0).sqrt();
            let e = &v / d;
            let t = Point::from_vec(vec![-e[1], e[0]]);
            let base = c1 + &e * x;
            vec![&base + &t * y, &base - &t * y]
        }
        _ => vec![],
    }
}

/// Maximizes the concave min-depth function by compass search.
fn deepest_point(cons: &[Constraint], start: Point) -> Point {
    let n = start.len();
    let mut x = start;
    let mut val = min_depth(cons, &x);
    let mut step = 1.0f64.max(val.abs());
    while step > 1e-12 {
        let mut improved = false;
        let mut dirs: Vec<Point> = (0..2 * n)
            .map(|k| {
                let mut e = Point::zeros(n);
                e[k / 2] = if k % 2 == 0 { 1.0 } else { -1.0 };
                e
            })
            .collect();
        let active = cons
            .iter()
            .filter(|c| c.depth(&x) <= val + step)
            .map(|c| c.inward_normal(&x))
            .filter(|v| v.iter().all(|t| t.is_finite()))
            .fold(Point::zeros(n), |acc, v| acc + v);
        if active.norm() > 0.0 {
            dirs.push(active.normalize());
        }
        for e in dirs {
            let y = &x + e * step;
            let v = min_depth(cons, &y);
            if v > val {
                x = y;
                val = v;
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    x
}
