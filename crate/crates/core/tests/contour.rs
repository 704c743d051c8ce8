mod common;

use common::{random_rational, separated_points};
use kahler::contour::{integrate_closed, integrate_real_line, CircleContour, ContourError, HalfPlane};
use kahler::function::Poly;
use kahler::oracle::{differential_check, quad_circle, QuadratureSpec};
use kahler::{function_from_str, EvenElement, MeromorphicFunction, Mode};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn two_pole_function(rng: &mut StdRng) -> (MeromorphicFunction, EvenElement, EvenElement) {
    let (a, b) = (EvenElement::new(-1.0, 0.2), EvenElement::new(1.0, -0.3));
    let (ma, mb) = (rng.gen_range(1..=3), rng.gen_range(1..=2));
    let f = random_rational(rng, &[(a, ma), (b, mb)]);
    (f, a, b)
}

#[test]
fn reversing_orientation_negates() {
    let mut rng = StdRng::seed_from_u64(1);
    for _ in 0..50 {
        let (f, _, _) = two_pole_function(&mut rng);
        let c = CircleContour::new(EvenElement::ZERO, 2.0).unwrap();
        let ccw = integrate_closed(&f, &c).unwrap();
        let cw = integrate_closed(&f, &c.clockwise()).unwrap();
        assert_eq!(ccw.real_value, -cw.real_value);
        assert_eq!(ccw.imaginary_defect, -cw.imaginary_defect);
    }
}

#[test]
fn circles_add_up() {
    let mut rng = StdRng::seed_from_u64(2);
    for _ in 0..50 {
        let (f, a, b) = two_pole_function(&mut rng);
        let big = integrate_closed(&f, &CircleContour::new(EvenElement::ZERO, 2.0).unwrap()).unwrap();
        let ra = integrate_closed(&f, &CircleContour::new(a, 0.5).unwrap()).unwrap();
        let rb = integrate_closed(&f, &CircleContour::new(b, 0.5).unwrap()).unwrap();
        let scale = 1.0 + ra.real_value.abs() + rb.real_value.abs();
        assert!((big.real_value - ra.real_value - rb.real_value).abs() <= 1e-12 * scale);
        let defect = ra.imaginary_defect + rb.imaginary_defect;
        assert!((big.imaginary_defect - defect).abs() <= 1e-12 * (1.0 + defect.abs()));
    }
}

/// Derivatives of rational functions have no residues.
#[test]
fn exact_forms_integrate_to_zero() {
    let mut rng = StdRng::seed_from_u64(3);
    for _ in 0..50 {
        let pts = separated_points(&mut rng, 2, EvenElement::ZERO, 1.0, 0.4);
        let num = common::random_poly(&mut rng, 1);
        let den = Poly::from_roots([(pts[0], 1), (pts[1], 2)].iter());
        // (N/D)' = (N'D − ND')/D²
        let top = &(&num.derivative() * &den) - &(&num * &den.derivative());
        let f = MeromorphicFunction::from_poles(top, &[(pts[0], 2), (pts[1], 4)], None);
        let r = integrate_closed(&f, &CircleContour::new(EvenElement::ZERO, 2.0).unwrap()).unwrap();
        assert!(r.real_value.abs() <= 1e-12, "{}", r.real_value);
        assert!(r.imaginary_defect.abs() <= 1e-12, "{}", r.imaginary_defect);
    }
}

/// `dφ` for a smooth potential, integrated by quadrature alone.
#[test]
fn gradient_of_potential_has_zero_circulation() {
    let k = |x: f64, y: f64| x.cos() * y * y + 3.0 * x * x * y;
    let g = |x: f64, y: f64| 2.0 * x.sin() * y + x.powi(3);
    for (cx, cy, r) in [(0.0, 0.0, 1.0), (1.5, -0.5, 2.0), (-3.0, 2.0, 0.3)] {
        let c = CircleContour::new(EvenElement::new(cx, cy), r).unwrap();
        let v = quad_circle(&k, &g, &c, &QuadratureSpec::default()).unwrap();
        assert!(v.abs() <= 1e-12, "{v}");
    }
}

#[test]
fn oracle_agrees_on_random_rationals() {
    let mut rng = StdRng::seed_from_u64(4);
    for _ in 0..50 {
        let count = rng.gen_range(1..=3);
        let pts = separated_points(&mut rng, count, EvenElement::ZERO, 1.5, 0.4);
        let poles: Vec<_> = pts.into_iter().map(|z| (z, rng.gen_range(1..=3))).collect();
        let f = random_rational(&mut rng, &poles);
        // keep the circle well away from every pole
        let mut radius = 1.0;
        while poles.iter().any(|(z, _)| (z.abs() - radius).abs() < 0.15) {
            radius += 0.1;
        }
        let c = CircleContour::new(EvenElement::ZERO, radius).unwrap();
        let report = differential_check(&f, &c, 1e-7);
        assert!(report.passed, "{}", report.message);
    }
}

#[test]
fn pole_on_contour_is_rejected() {
    let f = function_from_str("1/(z-1)", Mode::Contour, &[]).unwrap();
    let err = integrate_closed(&f, &CircleContour::unit()).unwrap_err();
    assert!(matches!(err, ContourError::PoleOnContour { .. }), "{err:?}");
}

#[test]
fn real_line_rejects_slow_decay_and_real_poles() {
    let slow = function_from_str("x/(x^2+1)", Mode::RealLine, &[]).unwrap();
    assert!(matches!(
        integrate_real_line(&slow, HalfPlane::Auto),
        Err(ContourError::DecayViolation(_))
    ));
    let real_pole = function_from_str("1/(x^2-1)", Mode::RealLine, &[]).unwrap();
    assert!(matches!(
        integrate_real_line(&real_pole, HalfPlane::Auto),
        Err(ContourError::PoleOnRealAxis { .. })
    ));
    let wrong_side = function_from_str("exp(I*x)/(x^2+1)", Mode::RealLine, &[]).unwrap();
    assert!(matches!(
        integrate_real_line(&wrong_side, HalfPlane::Lower),
        Err(ContourError::DecayViolation(_))
    ));
}

#[test]
fn lower_closure_matches_upper_when_both_decay() {
    let h = function_from_str("1/((x^2+1)*(x^2+4))", Mode::RealLine, &[]).unwrap();
    let up = integrate_real_line(&h, HalfPlane::Upper).unwrap().real_value;
    let down = integrate_real_line(&h, HalfPlane::Lower).unwrap().real_value;
    assert!((up - std::f64::consts::PI / 6.0).abs() < 1e-14);
    assert!((up - down).abs() < 1e-14);
}
