use degen_ma::analysis::{fit_boundary_exponent, predicted_exponents, Exponent, FitWindow, PowerField};
use degen_ma::geometry::{certify_a_eta, certify_a_eta_all, local_frame_at, CertStatus, LocalFrame, Shape};
use degen_ma::rhs::{PowerLaw, Regularized, RightHandSide};
use degen_ma::{ConvexDomain, Point};
use proptest::prelude::*;

fn domains() -> Vec<ConvexDomain> {
    vec![
        ConvexDomain::unit_square(),
        ConvexDomain::unit_disk(),
        ConvexDomain::new(Shape::Polygon { vertices: vec![[0.0, 0.0], [2.0, 0.2], [1.4, 1.3], [0.1, 0.9]] }).unwrap(),
        ConvexDomain::new(Shape::Cusp { dimension: 2, a: 3.0, eta: 1.0, height: 1.0 }).unwrap(),
        ConvexDomain::ball(vec![0.0, 0.0, 0.0], 0.7).unwrap(),
    ]
}

/// Maps a unit-cube sample into the bounding box and rejects points outside.
fn point_in(domain: &ConvexDomain, u: &[f64]) -> Option<Point> {
    let (lo, hi) = domain.bounding_box();
    let p = Point::from_fn(domain.dim(), |i, _| lo[i] + u[i] * (hi[i] - lo[i]));
    domain.contains(&p).then_some(p)
}

fn unit3() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..1.0f64, 3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn distance_is_lipschitz_and_concave(k in 0usize..5, u in unit3(), v in unit3()) {
        let dom = &domains()[k];
        let (Some(x), Some(y)) = (point_in(dom, &u), point_in(dom, &v)) else { return Ok(()) };
        let dx = dom.distance_to_boundary(&x).unwrap();
        let dy = dom.distance_to_boundary(&y).unwrap();
        prop_assert!((dx - dy).abs() <= (&x - &y).norm() + 1e-12);
        let mid = (&x + &y) * 0.5;
        let dm = dom.distance_to_boundary(&mid).unwrap();
        prop_assert!(dm >= 0.5 * (dx + dy) - 1e-10, "{dm} < mean of {dx}, {dy}");
    }

    #[test]
    fn frames_are_isometries(k in 0usize..5, u in unit3(), v in unit3(), w in unit3()) {
        let dom = &domains()[k];
        let (Some(y), Some(p), Some(q)) = (point_in(dom, &u), point_in(dom, &v), point_in(dom, &w)) else {
            return Ok(());
        };
        if dom.depth(&y) < 1e-3 {
            return Ok(());
        }
        let (z, _) = dom.nearest_boundary_point(&y).unwrap();
        let f = local_frame_at(dom, &z, &y).unwrap();
        let (fp, fq) = (f.apply(&p), f.apply(&q));
        prop_assert!(((&fp - &fq).norm() - (&p - &q).norm()).abs() < 1e-12);
        prop_assert!((f.inverse(&fp) - &p).norm() < 1e-12);
        let n = dom.dim();
        prop_assert!(fp[n - 1] >= -1e-9 && fq[n - 1] >= -1e-9);
        let fy = f.apply(&y);
        prop_assert!(fy.rows(0, n - 1).norm() < 1e-9);
    }

    #[test]
    fn axis_frames_are_rotations(axis in prop::collection::vec(-1.0..1.0f64, 3)) {
        let a = Point::from_vec(axis);
        prop_assume!(a.norm() > 1e-3);
        let f = LocalFrame::from_axis(&Point::zeros(3), &a).unwrap();
        let r = &f.rotation;
        prop_assert!((r.transpose() * r - nalgebra::DMatrix::identity(3, 3)).norm() < 1e-12);
        prop_assert!((r.determinant() - 1.0).abs() < 1e-12);
        prop_assert!((f.axis() - a.normalize()).norm() < 1e-12);
    }

    #[test]
    fn rhs_monotone_in_t(alpha in 0.0..3.0f64, extra in 0.0..2.0f64, d in 0.0..1.0f64, t1 in -5.0..-1e-3f64, t2 in -5.0..-1e-3f64) {
        let law = PowerLaw::new(2, 1.3, alpha, 3.0 + extra).unwrap();
        let (lo, hi) = if t1 < t2 { (t1, t2) } else { (t2, t1) };
        prop_assert!(law.value(d, lo) <= law.value(d, hi));
        if extra == 0.0 || d > 0.0 {
            prop_assert!(law.value(d, lo) > 0.0);
        }
        prop_assert_eq!(law.value(0.0, lo) == 0.0, extra > 0.0);
        for floor in [1e-2, 1e-4, 1e-6] {
            let reg = Regularized::new(law, floor).unwrap();
            prop_assert!(reg.value(d, lo) <= reg.value(d, hi));
            if lo <= -0.1 {
                prop_assert_eq!(reg.value(d, lo), law.value(d, lo));
            }
        }
    }

    #[test]
    fn exact_exponents_monotone(alpha in 0.0..3.0f64, b1 in 3.0..6.0f64, b2 in 3.0..6.0f64, da in 0.01..1.0f64) {
        let ext = degen_ma::geometry::SphereCertificate {
            exterior_radius: Some(1.0),
            interior_radius: None,
            exterior_witnesses: vec![],
            interior_witnesses: vec![],
        };
        let (lo, hi) = if b1 < b2 { (b1, b2) } else { (b2, b1) };
        prop_assume!(hi - lo > 1e-6);
        let p = |a: f64, b: f64| predicted_exponents(2, a, b, None, Some(&ext)).unwrap();
        if let (Exponent::Exact(x), Exponent::Exact(y)) = (p(alpha, lo).gamma1, p(alpha, hi).gamma1) {
            prop_assert!(x < y);
        }
        if let (Exponent::Exact(x), Exponent::Exact(y)) = (p(alpha, lo).gamma3, p(alpha, hi).gamma3) {
            prop_assert!(x < y);
        }
        if let (Exponent::Exact(x), Exponent::Exact(y)) = (p(alpha, lo).gamma1, p(alpha + da, lo).gamma1) {
            prop_assert!(x > y);
        }
        if let (Exponent::Exact(x), Exponent::Exact(y)) = (p(alpha, lo).gamma3, p(alpha + da, lo).gamma3) {
            prop_assert!(x > y);
        }
    }

    #[test]
    fn cusp_exponent_tends_to_edge_exponent(n in 2usize..5, alpha in 0.0..3.0f64, frac in 0.0..1.0f64, a in 2.01..1e4f64) {
        let nf = n as f64;
        let beta = nf + 1.0 + frac * (nf - 2.0 + alpha);
        let p = predicted_exponents(n, alpha, beta, Some(a), None).unwrap();
        if let (Exponent::Exact(g2), Exponent::Exact(g1)) = (p.gamma2, p.gamma1) {
            let gap = (2.0 * nf - 2.0) / (a * (nf + alpha));
            prop_assert!(((g2 - g1) - gap).abs() <= 1e-12);
        }
    }

    #[test]
    fn quadratic_cusp_formula_matches_sphere_formula(n in 2usize..6, alpha in 0.0..4.0f64, frac in 0.0..1.0f64) {
        let nf = n as f64;
        prop_assume!(alpha > 1.0 - 1e-9);
        let beta = nf + 1.0 + frac * (alpha - 1.0);
        prop_assume!(beta < alpha + nf);
        let g1 = (beta - nf + 1.0) / (nf + alpha);
        let g2_at_two = g1 + (2.0 * nf - 2.0) / (2.0 * (nf + alpha));
        let ball = degen_ma::geometry::SphereCertificate {
            exterior_radius: Some(1.0),
            interior_radius: Some(1.0),
            exterior_witnesses: vec![],
            interior_witnesses: vec![],
        };
        let p = predicted_exponents(n, alpha, beta, None, Some(&ball)).unwrap();
        prop_assert!((g2_at_two - p.gamma3.value().unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn power_law_fit_any_window(gamma in 0.2..1.0f64, lo in -4.0..-2.5f64, span in 0.5..1.5f64) {
        let sq = ConvexDomain::unit_square();
        let field = PowerField { gamma, coef: 0.8 };
        let w = FitWindow::new(10f64.powf(lo), 10f64.powf(lo + span));
        for z in [[0.5, 0.0], [0.0, 0.0], [1.0, 0.3]] {
            let fit = fit_boundary_exponent(&field, &sq, &Point::from_vec(z.to_vec()), Some(w)).unwrap();
            prop_assert!((fit.slope - gamma).abs() < 1e-3);
        }
    }
}

#[test]
fn balls_are_quadratic_type() {
    for r in [0.5, 1.0, 2.5] {
        let ball = ConvexDomain::ball(vec![0.3, -0.2], r).unwrap();
        let c = certify_a_eta_all(&ball, 2.0, 32, 2048).unwrap();
        assert_eq!(c.status, CertStatus::Certified);
        assert!((c.eta - 1.0 / (2.0 * r)).abs() <= 1e-3, "R = {r}: eta = {}", c.eta);
        for z in ball.boundary_samples(16) {
            let c = certify_a_eta(&ball, &z, 2.0, 2048).unwrap();
            assert!((c.eta - 1.0 / (2.0 * r)).abs() <= 1e-3);
        }
    }
}

#[test]
fn strictly_convex_arcs_are_not_flatter_than_quadratic() {
    let lens = ConvexDomain::new(Shape::Intersection {
        half_spaces: vec![],
        balls: vec![
            degen_ma::geometry::BallSpec { center: vec![-0.25, 0.0], radius: 1.0 },
            degen_ma::geometry::BallSpec { center: vec![0.25, 0.0], radius: 1.0 },
        ],
    })
    .unwrap();
    for dom in [ConvexDomain::unit_disk(), lens] {
        for a in [1.0, 1.5, 1.9] {
            let c = certify_a_eta_all(&dom, a, 32, 2048).unwrap();
            assert_ne!(c.status, CertStatus::Certified, "a = {a}");
        }
    }
}
