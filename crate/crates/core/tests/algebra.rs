use kahler::clifford::{dphi_at, mv_product};
use kahler::{EvenElement, Multivector, PolarForm};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn random_mv(rng: &mut StdRng) -> Multivector {
    let mut c = || rng.gen_range(-3.0..3.0);
    Multivector::new(c(), c(), c(), c())
}

#[test]
fn product_associates_on_random_triples() {
    let mut rng = StdRng::seed_from_u64(42);
    for _ in 0..1000 {
        let (a, b, c) = (random_mv(&mut rng), random_mv(&mut rng), random_mv(&mut rng));
        let l = mv_product(mv_product(a, b), c);
        let r = mv_product(a, mv_product(b, c));
        let scale = 1.0 + [l.s, l.a, l.b, l.p].iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for (x, y) in [(l.s, r.s), (l.a, r.a), (l.b, r.b), (l.p, r.p)] {
            assert!((x - y).abs() <= 1e-13 * scale, "{l:?} vs {r:?}");
        }
    }
}

#[test]
fn even_part_closes_under_product() {
    let mut rng = StdRng::seed_from_u64(3);
    for _ in 0..200 {
        let a = EvenElement::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let b = EvenElement::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let p = mv_product(a.to_multivector(), b.to_multivector());
        assert_eq!((p.a, p.b), (0.0, 0.0));
        assert_eq!(p.even_part(), a * b);
    }
}

proptest! {
    #[test]
    fn polar_round_trip(u in -1e3..1e3f64, v in -1e3..1e3f64) {
        prop_assume!(u.abs() + v.abs() > 1e-6);
        let z = EvenElement::new(u, v);
        let back = PolarForm::from_even(z).unwrap().to_even();
        prop_assert!((back - z).abs() <= 1e-14 * z.abs() * 4.0);
    }

    #[test]
    fn polar_angle_in_range(u in -10.0..10.0f64, v in -10.0..10.0f64) {
        prop_assume!(u != 0.0 || v != 0.0);
        let p = PolarForm::from_even(EvenElement::new(u, v)).unwrap();
        prop_assert!(p.phi > -std::f64::consts::PI && p.phi <= std::f64::consts::PI);
    }

    /// `z·dφ` is `dy`, up to rounding.
    #[test]
    fn dphi_times_z_is_dy(u in -5.0..5.0f64, v in -5.0..5.0f64) {
        prop_assume!(u.abs() + v.abs() > 1e-3);
        let z = EvenElement::new(u, v);
        let w = mv_product(z.to_multivector(), dphi_at(z).unwrap());
        prop_assert!(w.s.abs() < 1e-14 && w.p.abs() < 1e-14);
        prop_assert!(w.a.abs() < 1e-14 && (w.b - 1.0).abs() < 1e-14);
    }
}
