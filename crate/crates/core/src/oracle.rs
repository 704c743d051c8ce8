//! Independent numeric quadrature used to check the residue machinery.
//!
//! Nothing here goes through series or residues: integrands are evaluated
//! pointwise with even-element arithmetic and integrated directly.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::f64::consts::PI;

use thiserror::Error;

use crate::clifford::EvenElement;
use crate::contour::{integrate_closed, CircleContour};
use crate::function::MeromorphicFunction;
use crate::series::EntireKind;

/// Largest number of nodes `quad_circle` will use.
pub const MAX_CIRCLE_POINTS: usize = 1 << 20;

const MAX_SIMPSON_DEPTH: u32 = 48;

/// Multiple of the rounding error of the node sum treated as converged.
const NOISE_FACTOR: f64 = 64.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(String),
    #[error("integrand is not finite at ({x}, {y})")]
    NonFinite { x: f64, y: f64 },
    #[error("circle quadrature did not converge with {points} points (last change {change:e})")]
    NotConverged { points: usize, change: f64 },
    #[error("tail bound {bound:e} exceeds the tolerance {tol:e} at cutoff {cutoff}; a cutoff of at least {needed} is required")]
    TailTooLarge {
        bound: f64,
        tol: f64,
        cutoff: f64,
        needed: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    n_points: usize,
    tail_cutoff: f64,
    tol: f64,
}

impl QuadratureSpec {
    pub fn new(n_points: usize, tail_cutoff: f64, tol: f64) -> Result<Self, OracleError> {
        if n_points < 16 || !n_points.is_multiple_of(2) {
            return Err(OracleError::InvalidSpec(format!(
                "n_points must be even and at least 16, got {n_points}"
            )));
        }
        if !(tail_cutoff > 0.0) {
            return Err(OracleError::InvalidSpec(format!(
                "tail_cutoff must be positive, got {tail_cutoff}"
            )));
        }
        if !(tol > 0.0) {
            return Err(OracleError::InvalidSpec(format!("tol must be positive, got {tol}")));
        }
        Ok(Self {
            n_points,
            tail_cutoff,
            tol,
        })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn tail_cutoff(&self) -> f64 {
        self.tail_cutoff
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn with_tol(self, tol: f64) -> Result<Self, OracleError> {
        Self::new(self.n_points, self.tail_cutoff, tol)
    }

    pub fn with_cutoff(self, tail_cutoff: f64) -> Result<Self, OracleError> {
        Self::new(self.n_points, tail_cutoff, self.tol)
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            n_points: 64,
            tail_cutoff: 1e4,
            tol: 1e-10,
        }
    }
}

/// `∮ k dx + g dy` by the periodic trapezoid rule, doubling the node count
/// until successive estimates agree.
pub fn quad_circle(
    k: &dyn Fn(f64, f64) -> f64,
    g: &dyn Fn(f64, f64) -> f64,
    c: &CircleContour,
    spec: &QuadratureSpec,
) -> Result<f64, OracleError> {
    let r = c.radius;
    let (x0, y0) = (c.center.u, c.center.v);
    let integrand = |t: f64| -> Result<f64, OracleError> {
        let (s, co) = t.sin_cos();
        let (x, y) = (x0 + r * co, y0 + r * s);
        let v = -k(x, y) * r * s + g(x, y) * r * co;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(OracleError::NonFinite { x, y })
        }
    };

    let mut n = spec.n_points;
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    for i in 0..n {
        let v = integrand(2.0 * PI * i as f64 / n as f64)?;
        sum += v;
        abs_sum += v.abs();
    }
    let mut estimate = 2.0 * PI * sum / n as f64;
    loop {
        if n >= MAX_CIRCLE_POINTS {
            return Err(OracleError::NotConverged {
                points: n,
                change: f64::NAN,
            });
        }
        // reuse the existing nodes; only the midpoints are new
        for i in 0..n {
            let v = integrand(2.0 * PI * (i as f64 + 0.5) / n as f64)?;
            sum += v;
            abs_sum += v.abs();
        }
        n *= 2;
        let next = 2.0 * PI * sum / n as f64;
        let change = (next - estimate).abs();
        estimate = next;
        // cancellation in the sum puts a floor under the attainable change
        let noise = NOISE_FACTOR * f64::EPSILON * 2.0 * PI * abs_sum / n as f64;
        if change <= (spec.tol * (1.0 + estimate.abs())).max(noise) {
            break;
        }
        if n >= MAX_CIRCLE_POINTS {
            return Err(OracleError::NotConverged { points: n, change });
        }
    }
    Ok(c.orientation.sign() * estimate)
}

/// `|H(x)| ≤ constant / |x|^gap` for large `|x|`, optionally times an
/// oscillating factor of the given angular frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailDecay {
    pub constant: f64,
    pub gap: f64,
    pub frequency: Option<f64>,
}

impl TailDecay {
    /// Estimate from the leading coefficients of a rational integrand.
    pub fn rational(num: &[EvenElement], den: &[EvenElement], frequency: Option<f64>) -> Self {
        let lead = |c: &[EvenElement]| {
            c.iter()
                .rposition(|a| !a.is_zero())
                .map_or((0, 0.0), |i| (i, c[i].abs()))
        };
        let (dn, an) = lead(num);
        let (dd, ad) = lead(den);
        Self {
            constant: an / ad,
            gap: dd as f64 - dn as f64,
            frequency,
        }
    }

    /// Bound on `∫_{|x|>L} |H|` (or on the oscillatory tail), with a safety
    /// factor of 2.
    pub fn bound(&self, cutoff: f64) -> f64 {
        let one_side = match self.frequency {
            Some(t) if t != 0.0 => 2.0 * self.constant / (t.abs() * cutoff.powf(self.gap)),
            _ if self.gap > 1.0 => self.constant * cutoff.powf(1.0 - self.gap) / (self.gap - 1.0),
            _ => f64::INFINITY,
        };
        2.0 * 2.0 * one_side
    }

    /// Smallest cutoff whose tail bound is at most `tol`.
    pub fn required_cutoff(&self, tol: f64) -> f64 {
        let b = self.bound(1.0);
        if !b.is_finite() {
            return f64::INFINITY;
        }
        if b <= tol {
            return 1.0;
        }
        let exponent = match self.frequency {
            Some(t) if t != 0.0 => self.gap,
            _ => self.gap - 1.0,
        };
        (b / tol).powf(1.0 / exponent)
    }
}

#[allow(clippy::too_many_arguments)]
fn simpson(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64, OracleError> {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    if !flm.is_finite() {
        return Err(OracleError::NonFinite { x: lm, y: 0.0 });
    }
    if !frm.is_finite() {
        return Err(OracleError::NonFinite { x: rm, y: 0.0 });
    }
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    Ok(simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
        + simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64, OracleError> {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    for (x, v) in [(a, fa), (m, fm), (b, fb)] {
        if !v.is_finite() {
            return Err(OracleError::NonFinite { x, y: 0.0 });
        }
    }
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson(f, a, b, fa, fm, fb, whole, tol, MAX_SIMPSON_DEPTH)
}

/// `∫ H(x) dx` over the real line: adaptive Simpson on `[−L, L]` split into
/// geometrically growing panels, plus an analytic bound on the tails.
pub fn quad_real_line(h: &dyn Fn(f64) -> f64, decay: &TailDecay, spec: &QuadratureSpec) -> Result<f64, OracleError> {
    let cutoff = spec.tail_cutoff;
    let bound = decay.bound(cutoff);
    if !(bound <= 0.5 * spec.tol) {
        return Err(OracleError::TailTooLarge {
            bound,
            tol: 0.5 * spec.tol,
            cutoff,
            needed: decay.required_cutoff(0.5 * spec.tol),
        });
    }

    let mut edges = vec![0.0];
    let mut right = 1.0f64.min(cutoff);
    loop {
        let left = *edges.last().unwrap();
        let width = right - left;
        let pieces = match decay.frequency {
            Some(t) if t != 0.0 => (width * t.abs() / PI).ceil().max(1.0) as usize,
            _ => 1,
        };
        for i in 1..=pieces {
            edges.push(left + width * i as f64 / pieces as f64);
        }
        if right >= cutoff {
            break;
        }
        right = (2.0 * right).min(cutoff);
    }

    let panels = 2 * (edges.len() - 1);
    let panel_tol = 0.5 * spec.tol / panels as f64;
    let mut total = 0.0;
    for w in edges.windows(2) {
        total += adaptive_simpson(h, w[0], w[1], panel_tol)?;
        total += adaptive_simpson(h, -w[1], -w[0], panel_tol)?;
    }
    Ok(total)
}

/// Double-double real, `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    fn two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        let bb = s - a;
        Dd {
            hi: s,
            lo: (a - (s - bb)) + (b - bb),
        }
    }

    fn add(self, o: Dd) -> Dd {
        let s = Dd::two_sum(self.hi, o.hi);
        let t = Dd::two_sum(self.lo, o.lo);
        let r = Dd::two_sum(s.hi, s.lo + t.hi);
        Dd::two_sum(r.hi, r.lo + t.lo)
    }

    fn mul_f64(self, b: f64) -> Dd {
        let p = self.hi * b;
        let e = self.hi.mul_add(b, -p);
        Dd::two_sum(p, e + self.lo * b)
    }

    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

/// Horner's scheme in double-double arithmetic. Near a clustered root the
/// plain f64 recurrence loses most of its digits to cancellation.
fn horner(coeffs: &[EvenElement], z: EvenElement) -> EvenElement {
    let (mut u, mut v) = (Dd::ZERO, Dd::ZERO);
    for c in coeffs.iter().rev() {
        // (u + v·dxdy)(x + y·dxdy) = (ux − vy) + (uy + vx)·dxdy
        let nu = u.mul_f64(z.u).add(v.mul_f64(z.v).neg());
        let nv = u.mul_f64(z.v).add(v.mul_f64(z.u));
        u = nu.add(Dd { hi: c.u, lo: 0.0 });
        v = nv.add(Dd { hi: c.v, lo: 0.0 });
    }
    EvenElement::new(u.hi + u.lo, v.hi + v.lo)
}

/// Pointwise `num(z)/den(z)·factor(z)` straight from the coefficients.
pub fn evaluate(f: &MeromorphicFunction, z: EvenElement) -> EvenElement {
    let r = horner(f.num().coeffs(), z) / horner(f.den().coeffs(), z);
    match f.factor() {
        Some(fac) => {
            let w = fac.scale * z;
            r * match fac.kind {
                EntireKind::Exp => w.exp(),
                EntireKind::Sin => w.sin(),
                EntireKind::Cos => w.cos(),
            }
        }
        None => r,
    }
}

/// Circle quadrature of `w dx` (`k = u`, `g = −v`) for a function of `z`.
pub fn quad_function_circle(
    f: &MeromorphicFunction,
    c: &CircleContour,
    spec: &QuadratureSpec,
) -> Result<f64, OracleError> {
    let k = |x: f64, y: f64| evaluate(f, EvenElement::new(x, y)).u;
    let g = |x: f64, y: f64| -evaluate(f, EvenElement::new(x, y)).v;
    quad_circle(&k, &g, c, spec)
}

/// Circle quadrature of the dual form `v dx + u dy`, whose value is the
/// imaginary part of the classical integral.
pub fn quad_function_circle_dual(
    f: &MeromorphicFunction,
    c: &CircleContour,
    spec: &QuadratureSpec,
) -> Result<f64, OracleError> {
    let k = |x: f64, y: f64| evaluate(f, EvenElement::new(x, y)).v;
    let g = |x: f64, y: f64| evaluate(f, EvenElement::new(x, y)).u;
    quad_circle(&k, &g, c, spec)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DifferentialReport {
    pub passed: bool,
    pub symbolic: Option<f64>,
    pub quadrature: Option<f64>,
    pub symbolic_defect: Option<f64>,
    pub quadrature_defect: Option<f64>,
    pub message: String,
}

/// Compares the residue value of `∮ f dx` with direct quadrature, for both
/// the real value and the imaginary defect.
pub fn differential_check(f: &MeromorphicFunction, c: &CircleContour, tol: f64) -> DifferentialReport {
    let mut report = DifferentialReport {
        passed: false,
        symbolic: None,
        quadrature: None,
        symbolic_defect: None,
        quadrature_defect: None,
        message: String::new(),
    };
    let symbolic = match integrate_closed(f, c) {
        Ok(r) => r,
        Err(e) => {
            report.message = format!("FAIL: residue evaluation failed: {e}");
            return report;
        }
    };
    report.symbolic = Some(symbolic.real_value);
    report.symbolic_defect = Some(symbolic.imaginary_defect);
    let spec = match QuadratureSpec::default().with_tol((0.01 * tol).max(1e-14)) {
        Ok(s) => s,
        Err(e) => {
            report.message = format!("FAIL: {e}");
            return report;
        }
    };
    let quad = quad_function_circle(f, c, &spec).and_then(|q| Ok((q, quad_function_circle_dual(f, c, &spec)?)));
    let (q, qd) = match quad {
        Ok(v) => v,
        Err(e) => {
            report.message = format!("FAIL: quadrature failed: {e}");
            return report;
        }
    };
    report.quadrature = Some(q);
    report.quadrature_defect = Some(qd);
    let diff = (symbolic.real_value - q).abs();
    let diff_dual = (symbolic.imaginary_defect - qd).abs();
    let ok = diff <= tol * (1.0 + symbolic.real_value.abs());
    let ok_dual = diff_dual <= tol * (1.0 + symbolic.imaginary_defect.abs());
    report.passed = ok && ok_dual;
    report.message = format!(
        "{}: value {} vs quadrature {} (diff {:.3e}); defect {} vs dual quadrature {} (diff {:.3e})",
        if report.passed { "PASS" } else { "FAIL" },
        symbolic.real_value,
        q,
        diff,
        symbolic.imaginary_defect,
        qd,
        diff_dual
    );
    report
}
