use serde::{Deserialize, Serialize};

use super::domain::{ConvexDomain, Point};
use super::frame::LocalFrame;
use super::sampling::unit_directions;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertStatus {
    Certified,
    Refuted,
    Indeterminate,
}

/// Sampled certificate that `x_n >= eta |x'|^a` holds in the frame at a
/// boundary point (or at every sampled boundary point).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AEtaCertificate {
    pub a: f64,
    pub eta: f64,
    /// `None` means the certificate covers all sampled boundary points.
    pub point: Option<Vec<f64>>,
    pub status: CertStatus,
    /// Estimated local contact order of the boundary at the point.
    pub contact_order: Option<f64>,
    /// Sample attaining the minimal ratio, or the refuting sample.
    pub worst: Option<Vec<f64>>,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereWitness {
    pub point: Vec<f64>,
    pub center: Vec<f64>,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereCertificate {
    pub exterior_radius: Option<f64>,
    pub interior_radius: Option<f64>,
    pub exterior_witnesses: Vec<SphereWitness>,
    pub interior_witnesses: Vec<SphereWitness>,
}

const LOCAL_SCALES: usize = 40;

/// Tangent directions orthogonal to `normal`.
fn tangent_directions(normal: &Point) -> Vec<Point> {
    let n = normal.len();
    let frame = LocalFrame::from_axis(&Point::zeros(n), normal).expect("unit normal");
    let rt = frame.rotation.transpose();
    let mut out = Vec::new();
    let count = if n == 2 { 2 } else { 4 * (n - 1) + 8 };
    for d in unit_directions(count, n - 1) {
        let mut local = Point::zeros(n);
        for i in 0..n - 1 {
            local[i] = d[i];
        }
        out.push(&rt * local);
    }
    out
}

/// Boundary points approaching `z` from every tangent direction at
/// geometrically shrinking offsets `diam * 10^{-k/5}`, grouped by direction.
fn local_boundary_samples(domain: &ConvexDomain, z: &Point, normal: &Point) -> Vec<Vec<Point>> {
    let l = domain.diam();
    let c = domain.center();
    tangent_directions(normal)
        .into_iter()
        .map(|tau| {
            (0..LOCAL_SCALES)
                .map(|k| {
                    let t = 0.5 * l * 10f64.powf(-(k as f64) / 5.0);
                    let target = z + &tau * t;
                    let dir = (&target - c).normalize();
                    let s = domain.ray_exit(c, &dir);
                    c + dir * s
                })
                .collect()
        })
        .collect()
}

/// Largest `eta` such that the sampled frame images satisfy
/// `x_n >= eta |x'|^a`, with refutation by flat contact or by a local
/// contact order exceeding `a`.
pub fn certify_a_eta(domain: &ConvexDomain, z: &Point, a: f64, n_samples: usize) -> Result<AEtaCertificate> {
    if !(a >= 1.0) {
        return Err(Error::param(format!("a must be >= 1, got {a}")));
    }
    if !domain.is_on_boundary(z) {
        return Err(Error::param(format!("{:?} is not a boundary point", z.as_slice())));
    }
    let normal = domain.inward_normal(z)?;
    let frame = LocalFrame::from_axis(z, &normal)?;
    let l = domain.diam();
    let flat = 1e-12 * l;
    let resolved = 1e-9 * l;
    let tol = domain.tol();

    let local = local_boundary_samples(domain, z, &normal);
    let mut pts: Vec<Point> = domain.boundary_samples(n_samples);
    pts.extend(domain.interior_samples(n_samples / 4));
    pts.extend(local.iter().flatten().cloned());

    let mut cert = AEtaCertificate {
        a,
        eta: f64::INFINITY,
        point: Some(z.iter().copied().collect()),
        status: CertStatus::Certified,
        contact_order: None,
        worst: None,
        samples: pts.len(),
    };

    for p in &pts {
        let x = frame.apply(p);
        let n = x.len();
        let r = x.rows(0, n - 1).norm();
        let xn = x[n - 1];
        if r <= tol {
            continue;
        }
        if xn <= flat && r >= 1e-2 * l {
            cert.status = CertStatus::Refuted;
            cert.eta = 0.0;
            cert.worst = Some(p.iter().copied().collect());
            return Ok(cert);
        }
        if xn < resolved {
            continue;
        }
        let ratio = xn / r.powf(a);
        if ratio < cert.eta {
            cert.eta = ratio;
            cert.worst = Some(p.iter().copied().collect());
        }
    }

    // contact order from the two finest resolvable scales per direction
    let mut order: Option<f64> = None;
    for chain in &local {
        let mut usable: Vec<(f64, f64)> = Vec::new();
        for p in chain {
            let x = frame.apply(p);
            let n = x.len();
            let r = x.rows(0, n - 1).norm();
            let xn = x[n - 1];
            if r > 1e3 * tol && r < 2e-2 * l && xn > resolved {
                usable.push((r, xn));
            }
        }
        if usable.len() >= 2 {
            let (r1, h1) = usable[usable.len() - 2];
            let (r2, h2) = usable[usable.len() - 1];
            if (r1 / r2).ln().abs() > 1e-3 {
                let p = (h1 / h2).ln() / (r1 / r2).ln();
                order = Some(order.map_or(p, |o: f64| o.max(p)));
            }
        }
    }
    cert.contact_order = order;
    match order {
        Some(p) if p > a + 0.05 => {
            cert.status = CertStatus::Refuted;
            cert.eta = 0.0;
        }
        None => cert.status = CertStatus::Indeterminate,
        _ => {}
    }
    if !cert.eta.is_finite() {
        cert.status = CertStatus::Indeterminate;
        cert.eta = 0.0;
    }
    Ok(cert)
}

/// Boundary points used by domain-wide certificates.
pub fn certification_points(domain: &ConvexDomain, count: usize) -> Vec<Point> {
    domain.boundary_samples(count)
}

/// `(a, eta)` certificate for every sampled boundary point at once; `eta`
/// is the minimum over points and any refutation refutes the domain.
pub fn certify_a_eta_all(domain: &ConvexDomain, a: f64, n_points: usize, n_samples: usize) -> Result<AEtaCertificate> {
    let mut out = AEtaCertificate {
        a,
        eta: f64::INFINITY,
        point: None,
        status: CertStatus::Certified,
        contact_order: None,
        worst: None,
        samples: 0,
    };
    for z in certification_points(domain, n_points) {
        let c = certify_a_eta(domain, &z, a, n_samples)?;
        out.samples += c.samples;
        if let Some(p) = c.contact_order {
            out.contact_order = Some(out.contact_order.map_or(p, |o: f64| o.max(p)));
        }
        match c.status {
            CertStatus::Refuted => {
                out.status = CertStatus::Refuted;
                out.eta = 0.0;
                out.worst = Some(z.iter().copied().collect());
                return Ok(out);
            }
            CertStatus::Indeterminate => out.status = CertStatus::Indeterminate,
            CertStatus::Certified => {}
        }
        if c.eta < out.eta {
            out.eta = c.eta;
            out.worst = Some(z.iter().copied().collect());
        }
    }
    Ok(out)
}

/// Smallest radius of a ball containing the samples whose sphere passes
/// through `z`, over candidate inward directions; infinite if none.
fn exterior_radius_at(domain: &ConvexDomain, z: &Point, samples: &[Point]) -> (f64, Point) {
    let normals = domain.active_normals(z);
    let mut candidates: Vec<Point> = Vec::new();
    if let Ok(nu) = domain.inward_normal(z) {
        candidates.push(nu);
    }
    if domain.dim() == 2 && normals.len() >= 2 {
        for i in 0..normals.len() {
            for j in i + 1..normals.len() {
                for k in 0..=64 {
                    let t = k as f64 / 64.0;
                    let v = &normals[i] * (1.0 - t) + &normals[j] * t;
                    if v.norm() > 1e-12 {
                        candidates.push(v.normalize());
                    }
                }
            }
        }
    } else {
        candidates.extend(normals.iter().cloned());
    }
    // below this scale the chord-normal product is dominated by rounding
    let floor = 1e-3 * domain.diam();
    let mut best = (f64::INFINITY, candidates.first().cloned().unwrap_or_else(|| Point::zeros(domain.dim())));
    for nu in candidates {
        let mut sup: f64 = 0.0;
        for x in samples {
            let v = x - z;
            let dist2 = v.norm_squared();
            if dist2 <= floor * floor {
                continue;
            }
            let dot = nu.dot(&v);
            if dot <= 1e-12 * dist2.sqrt() {
                sup = f64::INFINITY;
                break;
            }
            sup = sup.max(dist2 / (2.0 * dot));
        }
        if sup < best.0 {
            best = (sup, nu);
        }
    }
    best
}

/// Largest radius of an inscribed ball touching `z`, centered on the
/// inward normal.
fn interior_radius_at(domain: &ConvexDomain, z: &Point) -> (f64, Point) {
    let Ok(nu) = domain.inward_normal(z) else {
        return (0.0, z.clone());
    };
    let tol = domain.tol();
    let fits = |r: f64| domain.depth(&(z + &nu * r)) >= r - tol;
    let (mut lo, mut hi) = (0.0, 0.5 * domain.diam());
    if fits(hi) {
        lo = hi;
    } else {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if fits(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-12 * domain.diam() {
                break;
            }
        }
    }
    (lo, z + &nu * lo)
}

/// Sampled exterior/interior sphere radii valid at every sampled boundary
/// point. A point whose boundary is flatter than quadratic admits no
/// exterior ball; a corner admits no interior ball.
pub fn sphere_conditions(domain: &ConvexDomain, n_points: usize, n_samples: usize) -> SphereCertificate {
    let l = domain.diam();
    let samples = domain.boundary_samples(n_samples);
    let mut ext: Option<f64> = Some(0.0);
    let mut int: Option<f64> = Some(f64::INFINITY);
    let mut ext_w = Vec::new();
    let mut int_w = Vec::new();
    for z in certification_points(domain, n_points) {
        let Ok(nu) = domain.inward_normal(&z) else { continue };
        let mut pts = samples.clone();
        let local = local_boundary_samples(domain, &z, &nu);
        pts.extend(local.into_iter().flatten());
        let quad = certify_a_eta(domain, &z, 2.0, 64).map(|c| c.status != CertStatus::Refuted).unwrap_or(false);
        let (r_ext, nu_ext) = exterior_radius_at(domain, &z, &pts);
        if let Some(e) = ext {
            if !quad || !r_ext.is_finite() || r_ext > 1e6 * l {
                ext = None;
            } else {
                if r_ext > e {
                    ext = Some(r_ext);
                }
                ext_w.push(SphereWitness {
                    point: z.iter().copied().collect(),
                    center: (&z + &nu_ext * r_ext).iter().copied().collect(),
                    radius: r_ext,
                });
            }
        }
        let (r_int, c_int) = interior_radius_at(domain, &z);
        if let Some(i) = int {
            if r_int < 1e-6 * l {
                int = None;
            } else {
                if r_int < i {
                    int = Some(r_int);
                }
                int_w.push(SphereWitness {
                    point: z.iter().copied().collect(),
                    center: c_int.iter().copied().collect(),
                    radius: r_int,
                });
            }
        }
    }
    if ext.is_none() {
        ext_w.clear();
    }
    if int.is_none() {
        int_w.clear();
    }
    SphereCertificate {
        exterior_radius: ext,
        interior_radius: int,
        exterior_witnesses: ext_w,
        interior_witnesses: int_w,
    }
}
