use std::path::Path;
use std::sync::Arc;

use degen_ma::analysis::{
    check_two_sided, check_upper_bound, decay_constant, fit_boundary_exponent, holder_reduction_check, predicted_exponents,
    Consistency, DecayField, DecayFit, Exponent, ExponentPrediction, FitWindow, HolderReport, PowerField, SampledField,
};
use degen_ma::barriers::{verify_barrier, AnyBarrier, CuspBarrier, EdgeBarrier, SphereBarrier, VerificationReport};
use degen_ma::geometry::{certify_a_eta_all, sphere_conditions, AEtaCertificate, LocalFrame, Shape, SphereCertificate};
use degen_ma::record::{parse_table, profile_table, solution_table};
use degen_ma::solver::{discretize_domain, radial_solve_law, solve_singular, DiscreteSolution, RadialOptions};
use degen_ma::{ConvexDomain, Error, Point};
use serde::Serialize;

use crate::config::{BarrierConfig, CheckMode, ExperimentConfig, Family, Source};
use crate::output::Output;
use crate::CliError;

const BOUNDARY_SAMPLES: usize = 64;

fn base_point(b: &BarrierConfig, domain: &ConvexDomain) -> degen_ma::Result<Point> {
    match &b.boundary_point {
        Some(p) => {
            let z = Point::from_vec(p.clone());
            if z.len() != domain.dim() || !domain.is_on_boundary(&z) {
                return Err(Error::param(format!("barrier.boundary_point {p:?} is not on the boundary")));
            }
            Ok(z)
        }
        None => Ok(lowest_point(domain)),
    }
}

fn lowest_point(domain: &ConvexDomain) -> Point {
    let mut below = domain.center().clone();
    below[domain.dim() - 1] -= domain.diam();
    domain.boundary_point_towards(&below)
}

fn sphere_ball(b: &BarrierConfig, domain: &ConvexDomain) -> degen_ma::Result<(Point, f64)> {
    match (&b.center, b.radius_len, domain.shape()) {
        (Some(c), Some(r), _) => Ok((Point::from_vec(c.clone()), r)),
        (None, None, Shape::Ball { center, radius }) => Ok((Point::from_vec(center.clone()), *radius)),
        _ => Err(Error::param("sphere barriers need barrier.center and barrier.radius_len unless the domain is a ball")),
    }
}

fn edge_frame(b: &BarrierConfig, domain: &ConvexDomain) -> degen_ma::Result<LocalFrame> {
    let z = base_point(b, domain)?;
    LocalFrame::from_axis(&z, &domain.inward_normal(&z)?)
}

#[derive(Serialize)]
struct VerifyResult {
    barrier: AnyBarrier,
    verification: VerificationReport,
}

pub fn verify(cfg: &ExperimentConfig, out: &mut Output) -> Result<i32, CliError> {
    let b = cfg.barrier.as_ref().ok_or_else(|| Error::param("config has no [barrier] table"))?;
    let domain = cfg.domain()?;
    let law = cfg.law(&domain)?;
    let (n, r) = (domain.dim(), cfg.rhs);
    let l = b.diameter_len.unwrap_or_else(|| domain.diam());
    let barrier = match b.family {
        Family::Edge => AnyBarrier::Edge(EdgeBarrier::recipe(
            n,
            r.alpha,
            r.beta,
            r.a_coef,
            l,
            b.gamma_target,
            edge_frame(b, &domain)?,
        )?),
        Family::Cusp => {
            let a = b.a.ok_or_else(|| Error::param("the cusp barrier needs barrier.a"))?;
            let eta = b.eta.ok_or_else(|| Error::param("the cusp barrier needs barrier.eta"))?;
            if !(a > 2.0) {
                return Err(Error::regime(format!("the cusp barrier requires a in (2, +inf), got a = {a}")).into());
            }
            AnyBarrier::Cusp(CuspBarrier::recipe(
                n,
                r.alpha,
                r.beta,
                r.a_coef,
                a,
                eta,
                l,
                b.gamma_target,
                edge_frame(b, &domain)?,
            )?)
        }
        Family::SphereSub => {
            let (c, rad) = sphere_ball(b, &domain)?;
            AnyBarrier::Sphere(SphereBarrier::sub_recipe(n, r.alpha, r.beta, r.a_coef, rad, c, b.gamma_target)?)
        }
        Family::SphereSuper => {
            let (c, rad) = sphere_ball(b, &domain)?;
            AnyBarrier::Sphere(SphereBarrier::super_recipe(n, r.alpha, r.beta, r.a_coef, rad, c)?)
        }
    };
    let verification = verify_barrier(barrier.as_barrier(), &law, &domain, b.samples);
    let passed = verification.passed;
    out.say(format!(
        "H[W] in [{:.6}, {:.6}] over {} samples: {}",
        verification.min_h,
        verification.max_h,
        verification.interior_samples,
        if passed { "certified" } else { "not certified" }
    ));
    let path = out.report(cfg, if passed { "certified" } else { "not-certified" }, VerifyResult { barrier, verification })?;
    out.say(path.display().to_string());
    Ok(if passed { 0 } else { 2 })
}

#[derive(Serialize)]
struct SolveResult {
    nodes: usize,
    h: f64,
    stencil_width: u8,
    iterations: usize,
    residual: f64,
    floor: Option<f64>,
    floors: Vec<f64>,
    min_value: f64,
    max_value: f64,
    center_value: f64,
    residual_history: Vec<f64>,
    holder: Option<HolderReport>,
}

#[derive(Serialize)]
struct Failure {
    error: String,
    residual_history: Vec<f64>,
}

pub fn solve(cfg: &ExperimentConfig, out: &mut Output) -> Result<i32, CliError> {
    let domain = cfg.domain()?;
    let law = cfg.law(&domain)?;
    let s = &cfg.solver;
    let grid = Arc::new(discretize_domain(&domain, s.h_len, s.stencil_width)?);
    let sol = match solve_singular(&grid, &law, &s.options()) {
        Ok(sol) => sol,
        Err(e) if e.is_convergence() => {
            let history = match &e {
                Error::IterationLimit { history, .. } | Error::Oscillation { history, .. } => history.clone(),
                _ => Vec::new(),
            };
            eprintln!("error: {e}");
            out.report(cfg, "not-converged", Failure { error: e.to_string(), residual_history: history })?;
            return Ok(3);
        }
        Err(e) => return Err(e.into()),
    };
    let prediction = predicted_exponents(2, cfg.rhs.alpha, cfg.rhs.beta, None, None)?;
    let holder = match prediction.gamma1.value() {
        Some(g) if g <= 1.0 => {
            let field = SampledField::from_solution(&sol, 4 * BOUNDARY_SAMPLES);
            let m = decay_constant(&field, g);
            Some(holder_reduction_check(&field, g, m, s.holder_pairs, cfg.seed)?)
        }
        _ => None,
    };
    let c = domain.center();
    let result = SolveResult {
        nodes: grid.len(),
        h: grid.h,
        stencil_width: grid.stencil_width,
        iterations: sol.iterations,
        residual: sol.residual,
        floor: sol.floor,
        floors: sol.floors.clone(),
        min_value: sol.min_value(),
        max_value: sol.max_value(),
        center_value: sol.interpolate([c[0], c[1]]),
        residual_history: sol.residual_history.clone(),
        holder,
    };
    out.say(format!(
        "{} nodes, u(center) = {:.6}, residual {:.3e}",
        result.nodes, result.center_value, result.residual
    ));
    let table = out.write("txt", &solution_table(&sol))?;
    let meta = out.report(cfg, "converged", result)?;
    out.say(format!("{}\n{}", table.display(), meta.display()));
    Ok(0)
}

/// Rebuilds a solution from a table written by `solve` with the same
/// domain and solver settings.
fn load_solution(cfg: &ExperimentConfig, domain: &ConvexDomain, path: &Path) -> Result<DiscreteSolution, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let (header, rows) =
        parse_table(&text).ok_or_else(|| CliError::Io(format!("{} is not a solution table", path.display())))?;
    if header != ["x", "y", "d", "u"] {
        return Err(CliError::Io(format!("{} has columns {header:?}, expected x y d u", path.display())));
    }
    let grid = Arc::new(discretize_domain(domain, cfg.solver.h_len, cfg.solver.stencil_width)?);
    if rows.len() != grid.len() {
        return Err(Error::param(format!(
            "solution has {} nodes, the configured grid has {}",
            rows.len(),
            grid.len()
        ))
        .into());
    }
    let mut values = vec![0.0; grid.len()];
    for row in &rows {
        let k = grid
            .nearest_node([row[0], row[1]])
            .ok_or_else(|| Error::param("configured grid is empty"))?;
        let x = grid.coords[k];
        if (x[0] - row[0]).abs() > 1e-9 * grid.h || (x[1] - row[1]).abs() > 1e-9 * grid.h {
            return Err(Error::param(format!("solution node ({}, {}) is not on the configured grid", row[0], row[1])).into());
        }
        values[k] = row[3];
    }
    Ok(DiscreteSolution {
        grid,
        values,
        residual_history: Vec::new(),
        residual: 0.0,
        iterations: 0,
        floor: None,
        floors: Vec::new(),
    })
}

/// Vertices and edge midpoints for polygonal domains, else the lowest point.
fn default_points(domain: &ConvexDomain) -> Vec<Point> {
    let c = domain.center().clone();
    let mut vs: Vec<Point> = domain.vertices().to_vec();
    if domain.dim() != 2 || vs.len() < 3 || matches!(domain.shape(), Shape::Cusp { .. }) {
        return vec![lowest_point(domain)];
    }
    vs.sort_by(|p, q| {
        let ap = (p[1] - c[1]).atan2(p[0] - c[0]);
        let aq = (q[1] - c[1]).atan2(q[0] - c[0]);
        ap.total_cmp(&aq)
    });
    let mut out = Vec::new();
    for i in 0..vs.len() {
        let m = (&vs[i] + &vs[(i + 1) % vs.len()]) * 0.5;
        let m = if domain.is_on_boundary(&m) { m } else { domain.boundary_point_towards(&m) };
        out.push(m);
        out.push(vs[(i + 1) % vs.len()].clone());
    }
    out
}

#[derive(Serialize)]
struct Reference {
    label: String,
    gamma: f64,
    check: CheckMode,
}

fn reference(cfg: &ExperimentConfig, p: &ExponentPrediction) -> Option<Reference> {
    let a = &cfg.analysis;
    if let Some(g) = a.predicted_gamma {
        return Some(Reference {
            label: "gamma".into(),
            gamma: g,
            check: a.check.unwrap_or(CheckMode::UpperBound),
        });
    }
    let make = |label: &str, gamma: f64, check| Some(Reference { label: label.into(), gamma, check });
    match (p.gamma3, p.gamma4, p.gamma2, p.gamma1) {
        (Exponent::Exact(g3), Exponent::Exact(g4), _, _) if (g3 - g4).abs() < 1e-12 => {
            make("gamma3 = gamma4", g3, a.check.unwrap_or(CheckMode::TwoSided))
        }
        (Exponent::Exact(g3), _, _, _) => make("gamma3", g3, CheckMode::UpperBound),
        (_, _, Exponent::Exact(g2), _) => make("gamma2", g2, CheckMode::UpperBound),
        (_, _, _, Exponent::Exact(g1)) => make("gamma1", g1, CheckMode::UpperBound),
        _ => None,
    }
}

#[derive(Serialize)]
struct PointFit {
    boundary_point: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fit: Option<DecayFit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    verdict: Option<Consistency>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct FitResult {
    prediction: ExponentPrediction,
    spheres: SphereCertificate,
    reference: Option<Reference>,
    fits: Vec<PointFit>,
    consistent: Option<bool>,
}

pub fn fit(cfg: &ExperimentConfig, out: &mut Output) -> Result<i32, CliError> {
    let domain = cfg.domain()?;
    let law = cfg.law(&domain)?;
    let a = &cfg.analysis;
    let field: Box<dyn DecayField> = match a.source {
        Source::Solution => {
            let path = a
                .solution_file
                .as_ref()
                .ok_or_else(|| Error::param("analysis.solution_file is required for source = \"solution\""))?;
            Box::new(load_solution(cfg, &domain, path)?)
        }
        Source::Radial => {
            let Shape::Ball { radius, .. } = domain.shape() else {
                return Err(Error::param("the radial oracle needs a ball domain").into());
            };
            Box::new(radial_solve_law(&law, *radius, &RadialOptions::default())?)
        }
        Source::Power => Box::new(PowerField {
            gamma: a.power_gamma.ok_or_else(|| Error::param("source = \"power\" needs analysis.power_gamma"))?,
            coef: a.power_coef,
        }),
    };
    let window = match (a.d_min_len, a.d_max_len) {
        (Some(lo), Some(hi)) => Some(FitWindow::new(lo, hi)),
        (None, None) => None,
        _ => return Err(Error::param("give both analysis.d_min_len and analysis.d_max_len, or neither").into()),
    };
    let mut spheres = sphere_conditions(&domain, a.certificate_points, BOUNDARY_SAMPLES);
    if a.exterior_radius_len.is_some() {
        spheres.exterior_radius = a.exterior_radius_len;
    }
    if a.interior_radius_len.is_some() {
        spheres.interior_radius = a.interior_radius_len;
    }
    let prediction = predicted_exponents(domain.dim(), cfg.rhs.alpha, cfg.rhs.beta, a.a, Some(&spheres))?;
    let reference = reference(cfg, &prediction);
    let points: Vec<Point> = match &a.boundary_points {
        Some(ps) => ps.iter().map(|p| Point::from_vec(p.clone())).collect(),
        None => default_points(&domain),
    };
    let mut fits = Vec::new();
    let mut first_error = None;
    for z in &points {
        let boundary_point: Vec<f64> = z.iter().copied().collect();
        match fit_boundary_exponent(field.as_ref(), &domain, z, window) {
            Ok(f) => {
                let verdict = reference.as_ref().map(|r| match r.check {
                    CheckMode::UpperBound => check_upper_bound(&f, r.gamma, &r.label),
                    CheckMode::TwoSided => check_two_sided(&f, r.gamma, a.band, &r.label),
                });
                out.say(format!(
                    "{:?}: slope {:.4} +/- {:.4}{}",
                    boundary_point,
                    f.slope,
                    f.std_error,
                    verdict.as_ref().map(|v| format!(", {}", v.message)).unwrap_or_default()
                ));
                fits.push(PointFit { boundary_point, fit: Some(f), verdict, error: None });
            }
            Err(e) => {
                out.say(format!("{boundary_point:?}: {e}"));
                fits.push(PointFit { boundary_point, fit: None, verdict: None, error: Some(e.to_string()) });
                first_error.get_or_insert(e);
            }
        }
    }
    if fits.iter().all(|f| f.fit.is_none()) {
        return Err(first_error.unwrap_or_else(|| Error::param("no boundary points to fit")).into());
    }
    let consistent = reference
        .as_ref()
        .map(|_| fits.iter().filter_map(|f| f.verdict.as_ref()).all(|v| v.consistent));
    let path = out.report(cfg, "fitted", FitResult { prediction, spheres, reference, fits, consistent })?;
    out.say(path.display().to_string());
    Ok(0)
}

#[derive(Serialize)]
struct OracleResult {
    center_value: f64,
    boundary_value: f64,
    floor: Option<f64>,
    floor_error: f64,
    extrapolated: bool,
    shooting_iterations: usize,
    points: usize,
}

pub fn oracle(cfg: &ExperimentConfig, out: &mut Output) -> Result<i32, CliError> {
    let domain = cfg.domain()?;
    let law = cfg.law(&domain)?;
    let Shape::Ball { radius, .. } = domain.shape() else {
        return Err(Error::param("the radial oracle needs a ball domain").into());
    };
    let p = match radial_solve_law(&law, *radius, &RadialOptions::default()) {
        Ok(p) => p,
        Err(e) if e.is_convergence() => {
            eprintln!("error: {e}");
            out.report(cfg, "not-converged", Failure { error: e.to_string(), residual_history: Vec::new() })?;
            return Ok(3);
        }
        Err(e) => return Err(e.into()),
    };
    out.say(format!("u(0) = {:.12}, u(R) = {:.3e}", p.center_value(), p.boundary_value));
    let table = out.write("txt", &profile_table(&p))?;
    let meta = out.report(
        cfg,
        "converged",
        OracleResult {
            center_value: p.center_value(),
            boundary_value: p.boundary_value,
            floor: p.floor,
            floor_error: p.floor_error,
            extrapolated: p.extrapolated,
            shooting_iterations: p.shooting_iterations,
            points: p.r.len(),
        },
    )?;
    out.say(format!("{}\n{}", table.display(), meta.display()));
    Ok(0)
}

#[derive(Serialize)]
struct CertifyResult {
    dimension: usize,
    diameter: f64,
    spheres: SphereCertificate,
    #[serde(skip_serializing_if = "Option::is_none")]
    a_eta: Option<AEtaCertificate>,
}

pub fn certify(cfg: &ExperimentConfig, out: &mut Output) -> Result<i32, CliError> {
    let domain = cfg.domain()?;
    let a = &cfg.analysis;
    let spheres = sphere_conditions(&domain, a.certificate_points, BOUNDARY_SAMPLES);
    let a_eta = match a.a {
        Some(exp) => Some(certify_a_eta_all(&domain, exp, a.certificate_points, BOUNDARY_SAMPLES)?),
        None => None,
    };
    out.say(format!(
        "exterior radius {:?}, interior radius {:?}{}",
        spheres.exterior_radius,
        spheres.interior_radius,
        a_eta.as_ref().map(|c| format!(", (a, eta) = ({}, {}) {:?}", c.a, c.eta, c.status)).unwrap_or_default()
    ));
    let path = out.report(
        cfg,
        "certified",
        CertifyResult { dimension: domain.dim(), diameter: domain.diam(), spheres, a_eta },
    )?;
    out.say(path.display().to_string());
    Ok(0)
}
