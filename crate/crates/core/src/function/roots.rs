//! All roots of a polynomial at once (Aberth–Ehrlich iteration), followed
//! by multiplicity clustering.

use std::f64::consts::PI;

use crate::clifford::EvenElement;

use super::poly::Poly;
use super::ModelError;

const MAX_ITERATIONS: usize = 800;

/// Roots closer than `CLUSTER_TOL · (1 + |r|)` merge unconditionally.
pub const CLUSTER_TOL: f64 = 1e-7;

/// A shifted Taylor coefficient counts as vanishing below this fraction
/// of its magnitude scale.
pub const VANISH_TOL: f64 = 1e-9;

/// Wider radius inside which a group of scattered roots may still be a
/// single multiple root; membership is confirmed by the Taylor test.
const CANDIDATE_RADIUS: f64 = 5e-2;

/// A root together with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub location: EvenElement,
    pub multiplicity: usize,
}

/// Finds all roots of `p` with multiplicities. The result's multiplicities
/// sum to the degree.
pub fn find_roots(p: &Poly) -> Result<Vec<Root>, ModelError> {
    let deg = match p.degree() {
        None | Some(0) => return Ok(Vec::new()),
        Some(d) => d,
    };
    let p = p.monic();
    let coeffs = p.coeffs();

    // exact roots at the origin
    let zeros = coeffs.iter().take_while(|c| c.is_zero()).count();
    let mut out = Vec::new();
    if zeros > 0 {
        out.push(Root {
            location: EvenElement::ZERO,
            multiplicity: zeros,
        });
    }
    let rest = Poly::new(coeffs[zeros..].to_vec());
    let rest_deg = deg - zeros;
    if rest_deg == 0 {
        return Ok(out);
    }
    if rest_deg == 1 {
        out.push(Root {
            location: -rest.coeffs()[0],
            multiplicity: 1,
        });
        return Ok(out);
    }

    let approx = aberth(&rest)?;
    out.extend(cluster(&rest, &approx));
    Ok(out)
}

fn initial_guesses(p: &Poly) -> Vec<EvenElement> {
    let c = p.coeffs();
    let n = c.len() - 1;
    // centroid of the roots, then a Fujiwara-type radius about it
    let centroid = -c[n - 1] / n as f64;
    let shifted = p.taylor_shift(centroid);
    let mut radius: f64 = 0.0;
    for k in 1..=n {
        let a = shifted[n - k].abs();
        if a > 0.0 {
            radius = radius.max(a.powf(1.0 / k as f64));
        }
    }
    if radius == 0.0 || !radius.is_finite() {
        radius = 1.0;
    }
    (0..n)
        .map(|k| {
            let theta = 2.0 * PI * k as f64 / n as f64 + 0.4;
            centroid + EvenElement::new(theta.cos(), theta.sin()) * radius
        })
        .collect()
}

fn aberth(p: &Poly) -> Result<Vec<EvenElement>, ModelError> {
    let mut z = initial_guesses(p);
    let n = z.len();
    let mut done = vec![false; n];
    for _ in 0..MAX_ITERATIONS {
        let mut all_done = true;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (v, dv) = p.eval_with_derivative(z[i]);
            if v.is_zero() {
                done[i] = true;
                continue;
            }
            let ratio = v / dv;
            let mut repulse = EvenElement::ZERO;
            for j in 0..n {
                if j != i {
                    repulse += EvenElement::ONE / (z[i] - z[j]);
                }
            }
            let step = ratio / (EvenElement::ONE - ratio * repulse);
            if !step.is_finite() {
                // perturb off a degenerate configuration
                let nudge = EvenElement::new(1e-8, 1e-8) * (1.0 + z[i].abs());
                z[i] += nudge;
                all_done = false;
                continue;
            }
            z[i] -= step;
            if step.abs() <= 4.0 * f64::EPSILON * (1.0 + z[i].abs()) {
                done[i] = true;
            } else {
                all_done = false;
            }
        }
        if all_done {
            break;
        }
    }
    // multiple roots stall at noise level; accept them on backward error
    for &r in &z {
        let residual = p.eval(r).abs();
        if !r.is_finite() || residual > 1e-8 * p.eval_scale(r) {
            return Err(ModelError::RootFinding { degree: n, residual });
        }
    }
    Ok(z)
}

/// Whether `center` is a root of multiplicity at least `m`: the shifted
/// Taylor coefficients below order `m` all vanish to within noise.
pub fn vanishing_order(p: &Poly, center: EvenElement, tol: f64) -> usize {
    let shifted = p.taylor_shift(center);
    let scales = p.taylor_scales(center);
    shifted
        .iter()
        .zip(&scales)
        .take_while(|(c, s)| c.abs() <= tol * **s)
        .count()
}

fn centroid(points: &[EvenElement]) -> EvenElement {
    points.iter().copied().sum::<EvenElement>() / points.len() as f64
}

fn cluster(p: &Poly, approx: &[EvenElement]) -> Vec<Root> {
    let n = approx.len();
    let mut used = vec![false; n];
    let mut out = Vec::new();
    for i in 0..n {
        if used[i] {
            continue;
        }
        let r = approx[i];
        let mut neighbours: Vec<(f64, usize)> = (0..n)
            .filter(|&j| j != i && !used[j])
            .map(|j| ((approx[j] - r).abs(), j))
            .filter(|(d, _)| *d <= CANDIDATE_RADIUS * (1.0 + r.abs()))
            .collect();
        neighbours.sort_by(|a, b| a.0.total_cmp(&b.0));

        // unconditional merge radius
        let forced = neighbours
            .iter()
            .take_while(|(d, _)| *d <= CLUSTER_TOL * (1.0 + r.abs()))
            .count();

        let mut chosen = forced;
        for size in (forced + 1..=neighbours.len()).rev() {
            let mut pts = vec![r];
            pts.extend(neighbours[..size].iter().map(|&(_, j)| approx[j]));
            let c = polish(p, centroid(&pts), size + 1);
            if vanishing_order(p, c, VANISH_TOL) > size {
                chosen = size;
                break;
            }
        }

        let mut pts = vec![r];
        used[i] = true;
        for &(_, j) in &neighbours[..chosen] {
            used[j] = true;
            pts.push(approx[j]);
        }
        let m = pts.len();
        let location = if m == 1 { r } else { polish(p, centroid(&pts), m) };
        out.push(Root {
            location,
            multiplicity: m,
        });
    }
    out
}

/// Newton on the `(m-1)`-th derivative, where an `m`-fold root is simple.
fn polish(p: &Poly, start: EvenElement, m: usize) -> EvenElement {
    let mut d = p.clone();
    for _ in 1..m {
        d = d.derivative();
    }
    let mut z = start;
    let mut best = d.eval(z).abs();
    for _ in 0..12 {
        let (v, dv) = d.eval_with_derivative(z);
        let next = z - v / dv;
        if !next.is_finite() {
            break;
        }
        let val = d.eval(next).abs();
        if val < best {
            best = val;
            z = next;
        } else {
            break;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted(mut r: Vec<Root>) -> Vec<Root> {
        r.sort_by(|a, b| {
            a.location
                .u
                .total_cmp(&b.location.u)
                .then(a.location.v.total_cmp(&b.location.v))
        });
        r
    }

    #[test]
    fn double_roots_of_squared_quadratic() {
        let p = Poly::from_real(&[1.0, 0.0, 2.0, 0.0, 1.0]);
        let r = sorted(find_roots(&p).unwrap());
        assert_eq!(r.len(), 2);
        assert_eq!(r[0].multiplicity, 2);
        assert_eq!(r[1].multiplicity, 2);
        assert!((r[0].location - EvenElement::new(0.0, -1.0)).abs() < 1e-12);
        assert!((r[1].location - EvenElement::I).abs() < 1e-12);
    }

    #[test]
    fn quadruple_root_is_recovered() {
        let roots = [
            (EvenElement::new(0.3, -0.7), 4),
            (EvenElement::new(-1.1, 0.4), 1),
            (EvenElement::new(1.2, 1.0), 2),
        ];
        let p = Poly::from_roots(&roots);
        let found = find_roots(&p).unwrap();
        assert_eq!(found.iter().map(|r| r.multiplicity).sum::<usize>(), 7);
        for (loc, m) in roots {
            let hit = found
                .iter()
                .find(|r| (r.location - loc).abs() < 1e-9)
                .unwrap_or_else(|| panic!("missing root {loc}: {found:?}"));
            assert_eq!(hit.multiplicity, m);
        }
    }

    #[test]
    fn exact_zero_roots() {
        let p = Poly::from_real(&[0.0, 0.0, 0.0, 1.0]);
        let r = find_roots(&p).unwrap();
        assert_eq!(
            r,
            vec![Root {
                location: EvenElement::ZERO,
                multiplicity: 3
            }]
        );
    }

    #[test]
    fn close_simple_roots_stay_separate() {
        let roots = [(EvenElement::real(1.0), 1), (EvenElement::real(1.001), 1)];
        let found = find_roots(&Poly::from_roots(&roots)).unwrap();
        assert_eq!(found.len(), 2);
        assert!(found.iter().all(|r| r.multiplicity == 1));
    }

    #[test]
    fn residuals_are_small() {
        let p = Poly::new(vec![
            EvenElement::new(1.0, 2.0),
            EvenElement::new(-3.0, 0.5),
            EvenElement::new(0.0, 1.0),
            EvenElement::new(2.0, 0.0),
            EvenElement::new(0.7, -0.2),
            EvenElement::ONE,
        ]);
        let r = find_roots(&p).unwrap();
        assert_eq!(r.len(), 5);
        for root in r {
            assert!(p.eval(root.location).abs() <= 1e-9 * p.max_coeff());
        }
    }
}
