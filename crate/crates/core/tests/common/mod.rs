#![allow(dead_code)]

use kahler::function::{MeromorphicFunction, Poly};
use kahler::EvenElement;
use rand::rngs::StdRng;
use rand::Rng;

pub fn even(rng: &mut StdRng, scale: f64) -> EvenElement {
    EvenElement::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
}

/// Random point at distance at most `radius` from `center`.
pub fn point_in_disk(rng: &mut StdRng, center: EvenElement, radius: f64) -> EvenElement {
    let r = radius * rng.gen::<f64>().sqrt();
    let t = rng.gen_range(0.0..std::f64::consts::TAU);
    center + EvenElement::new(r * t.cos(), r * t.sin())
}

/// Rejection-samples `count` points in a disk with pairwise separation.
pub fn separated_points(
    rng: &mut StdRng,
    count: usize,
    center: EvenElement,
    radius: f64,
    min_gap: f64,
) -> Vec<EvenElement> {
    let mut pts: Vec<EvenElement> = Vec::new();
    while pts.len() < count {
        let p = point_in_disk(rng, center, radius);
        if pts.iter().all(|q| (*q - p).abs() >= min_gap) {
            pts.push(p);
        }
    }
    pts
}

pub fn random_poly(rng: &mut StdRng, degree: usize) -> Poly {
    let mut c: Vec<EvenElement> = (0..=degree).map(|_| even(rng, 1.0)).collect();
    if c[degree].abs() < 0.1 {
        c[degree] = EvenElement::ONE;
    }
    Poly::new(c)
}

/// A random rational function with the given poles and a numerator of
/// degree below the denominator's, built through the normal constructor
/// (so the poles are rediscovered by root finding).
pub fn random_rational(rng: &mut StdRng, poles: &[(EvenElement, usize)]) -> MeromorphicFunction {
    let total: usize = poles.iter().map(|p| p.1).sum();
    let deg = rng.gen_range(0..total);
    let num = random_poly(rng, deg);
    let den = Poly::from_roots(poles.iter());
    MeromorphicFunction::rational(num, den).expect("well-conditioned random rational")
}
