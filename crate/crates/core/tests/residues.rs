mod common;

use common::{even, random_rational, separated_points};
use kahler::function::Pole;
use kahler::residue::{laurent_expand, residue_finite_difference, residue_with, residues, ResidueMethod};
use kahler::{EvenElement, MeromorphicFunction};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn random_function(seed: u64, max_order: usize) -> MeromorphicFunction {
    let mut rng = StdRng::seed_from_u64(seed);
    let count = rng.gen_range(1..=3);
    let locations = separated_points(&mut rng, count, EvenElement::ZERO, 2.0, 0.5);
    let poles: Vec<(EvenElement, usize)> = locations
        .into_iter()
        .map(|z| (z, rng.gen_range(1..=max_order)))
        .collect();
    random_rational(&mut rng, &poles)
}

/// Largest principal-part coefficient at `p`.
fn principal_scale(f: &MeromorphicFunction, p: &Pole) -> f64 {
    f.local_expansion(p.location, p.order)
        .unwrap()
        .coeffs()
        .iter()
        .map(|c| c.abs())
        .fold(0.0, f64::max)
}

fn close(a: EvenElement, b: EvenElement, rel: f64, scale: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(scale)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// Series, order reduction, the derivative formula and the finite-difference
    /// estimate, pairwise. The scale guards residues that vanish identically.
    #[test]
    fn methods_agree(seed in any::<u64>()) {
        let f = random_function(seed, 4);
        let series = residues(&f, ResidueMethod::Series).unwrap();
        for method in [ResidueMethod::OrderReduction, ResidueMethod::DerivativeFormula] {
            let other = residues(&f, method).unwrap();
            prop_assert_eq!(series.len(), other.len());
            for (a, b) in series.iter().zip(&other) {
                let scale = 1e-8 * principal_scale(&f, &a.pole);
                prop_assert!(
                    close(a.a_minus_1, b.a_minus_1, 1e-6, scale),
                    "{}: {} vs {}", method.name(), a.a_minus_1, b.a_minus_1
                );
            }
        }
        for a in &series {
            let fd = residue_finite_difference(&f, &a.pole).unwrap();
            let scale = 1e-8 * principal_scale(&f, &a.pole);
            prop_assert!(close(a.a_minus_1, fd, 1e-6, scale), "series {} vs differences {}", a.a_minus_1, fd);
        }
    }

    #[test]
    fn residue_is_linear(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let p = EvenElement::new(0.3, -0.7);
        let q = EvenElement::new(-1.1, 0.4);
        let f = random_rational(&mut rng, &[(p, 2), (q, 1)]);
        let g = random_rational(&mut rng, &[(p, 1), (q, 3)]);
        let (alpha, beta) = (even(&mut rng, 2.0), even(&mut rng, 2.0));
        let h = f.scaled(alpha).add(&g.scaled(beta)).unwrap();
        for loc in [p, q] {
            let at = |m: &MeromorphicFunction| {
                m.pole_at(loc).map_or(Ok(EvenElement::ZERO), |pole| {
                    residue_with(m, &pole, ResidueMethod::Series).map(|r| r.a_minus_1)
                })
            };
            let want = alpha * at(&f).unwrap() + beta * at(&g).unwrap();
            let got = at(&h).unwrap();
            prop_assert!(close(got, want, 1e-8, 1e-8), "{} vs {}", got, want);
        }
    }
}

/// The truncated Laurent series reproduces the function close to the pole.
/// The reference is the factored form: the expanded denominator splits a
/// multiple root by rounding, which shows up this close to it.
#[test]
fn expansion_matches_evaluation() {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..100 {
        let f = random_function(rng.gen(), 3);
        for p in f.find_poles() {
            let d = f.clearance(p.location).min(2.0);
            let series = f.local_expansion(p.location, 24).unwrap();
            for _ in 0..4 {
                let w = common::point_in_disk(&mut rng, EvenElement::ZERO, 0.1 * d);
                if w.abs() < 1e-3 * d {
                    continue;
                }
                let z = p.location + w;
                let (want, got) = (f.eval_factored(z), series.eval(z));
                assert!(close(got, want, 1e-9, 0.0), "at {z}: series {got}, direct {want}");
            }
        }
    }
}

/// `bₖ` from the expansion against central differences of `(z−c)ᵐ f`.
#[test]
fn taylor_coefficients_of_regular_part() {
    let h = 1e-5;
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..40 {
        let f = random_function(rng.gen(), 3);
        for p in f.find_poles() {
            let l = laurent_expand(&f, p.location, -(p.order as i32), 2).unwrap();
            let g = |w: f64| f.eval_regular_part(&p, p.location + EvenElement::real(w));
            let fd = [
                g(0.0),
                (g(h) - g(-h)) / (2.0 * h),
                (g(h) - g(0.0) * 2.0 + g(-h)) / (2.0 * h * h),
            ];
            let scale = l.b(0).unwrap().abs().max(1e-3);
            for (k, want) in fd.into_iter().enumerate() {
                let got = l.b(k as i32).unwrap();
                assert!(
                    close(got, want, 1e-4, scale),
                    "b{k} at pole {} (order {}): series {got}, differences {want}",
                    p.location,
                    p.order
                );
            }
        }
    }
}

#[test]
fn reported_pole_orders_match_construction() {
    let p = EvenElement::new(0.5, 0.5);
    let f = MeromorphicFunction::from_poles(kahler::function::Poly::one(), &[(p, 4)], None);
    let poles: Vec<Pole> = f.find_poles();
    assert_eq!(poles.len(), 1);
    assert_eq!(poles[0].order, 4);
    let r = residue_with(&f, &poles[0], ResidueMethod::Series).unwrap();
    assert!(r.a_minus_1.abs() < 1e-12);
    assert!((r.leading - EvenElement::ONE).abs() < 1e-12);
}
