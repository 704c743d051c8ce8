//! Closed-circle and real-line integrals assembled from residues.
//!
//! For `α = w dx` with `w = k − g·dxdy` the counterclockwise integral over a
//! circle is `−2π Σ v(a₋₁)` over the enclosed poles. The `u` parts of the
//! same residues are the portion of the classical complex integral that has
//! no real-form counterpart; they are reported as `imaginary_defect`.

use std::f64::consts::PI;
use std::fmt;

use thiserror::Error;

use crate::clifford::{dot_one_forms, dphi_at, AlgebraError, EvenElement, Multivector};
use crate::function::{MeromorphicFunction, ModelError, Pole};
use crate::residue::{residue_with, ResidueError, ResidueMethod};
use crate::series::EntireKind;

/// Relative width of the band around a circle in which poles are rejected.
pub const DEFAULT_CLEARANCE: f64 = 1e-6;

/// Poles with `|v|` below this are on the real axis.
pub const REAL_AXIS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ContourError {
    #[error(transparent)]
    Residue(#[from] ResidueError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("circle radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("pole at {location} lies on the contour (distance {distance} from the center, radius {radius})")]
    PoleOnContour {
        location: EvenElement,
        distance: f64,
        radius: f64,
    },
    #[error("pole at {location} lies on the real axis; principal values are not supported")]
    PoleOnRealAxis { location: EvenElement },
    #[error("the integrand does not decay on the closing semicircle: {0}")]
    DecayViolation(String),
    #[error("{0}")]
    Unsupported(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Orientation {
    #[default]
    Counterclockwise,
    Clockwise,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Counterclockwise => 1.0,
            Orientation::Clockwise => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleContour {
    pub center: EvenElement,
    pub radius: f64,
    pub orientation: Orientation,
    /// Absolute half-width of the excluded band around the circle.
    pub pole_clearance: f64,
}

impl CircleContour {
    pub fn new(center: EvenElement, radius: f64) -> Result<Self, ContourError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(ContourError::InvalidRadius(radius));
        }
        Ok(Self {
            center,
            radius,
            orientation: Orientation::Counterclockwise,
            pole_clearance: DEFAULT_CLEARANCE * radius,
        })
    }

    pub fn unit() -> Self {
        Self {
            center: EvenElement::ZERO,
            radius: 1.0,
            orientation: Orientation::Counterclockwise,
            pole_clearance: DEFAULT_CLEARANCE,
        }
    }

    pub fn with_orientation(mut self, orientation: Orientation) -> Self {
        self.orientation = orientation;
        self
    }

    pub fn clockwise(self) -> Self {
        self.with_orientation(Orientation::Clockwise)
    }

    pub fn with_clearance(mut self, clearance: f64) -> Self {
        self.pole_clearance = clearance;
        self
    }

    /// Point at parameter `t` (counterclockwise parametrization).
    pub fn point(&self, t: f64) -> EvenElement {
        self.center + EvenElement::new(t.cos(), t.sin()) * self.radius
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegralResult {
    pub real_value: f64,
    pub imaginary_defect: f64,
    pub enclosed: Vec<Pole>,
    /// Residue at each enclosed pole, in the same order.
    pub residues: Vec<EvenElement>,
    pub warnings: Vec<String>,
}

impl fmt::Display for IntegralResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (imaginary defect {})", self.real_value, self.imaginary_defect)
    }
}

/// Poles strictly inside the circle; a pole inside the clearance band is an
/// error.
pub fn enclosed_poles(c: &CircleContour, poles: &[Pole]) -> Result<Vec<Pole>, ContourError> {
    let mut inside = Vec::new();
    for p in poles {
        let distance = (p.location - c.center).abs();
        if (distance - c.radius).abs() < c.pole_clearance {
            return Err(ContourError::PoleOnContour {
                location: p.location,
                distance,
                radius: c.radius,
            });
        }
        if distance < c.radius {
            inside.push(*p);
        }
    }
    Ok(inside)
}

fn assemble(
    f: &MeromorphicFunction,
    poles: Vec<Pole>,
    sign: f64,
    method: ResidueMethod,
) -> Result<IntegralResult, ContourError> {
    let mut residues = Vec::with_capacity(poles.len());
    let mut sum = EvenElement::ZERO;
    let mut magnitude = 0.0;
    for p in &poles {
        let r = residue_with(f, p, method)?.a_minus_1;
        sum += r;
        magnitude += r.abs();
        residues.push(r);
    }
    let real_value = sign * (-2.0 * PI * sum.v);
    let imaginary_defect = sign * (2.0 * PI * sum.u);
    let mut warnings = Vec::new();
    if imaginary_defect.abs() > 1e-10 * (2.0 * PI * magnitude).max(1.0) {
        warnings.push(format!(
            "imaginary_defect = {imaginary_defect}: the classical integral has an imaginary part that the real form does not produce"
        ));
    }
    Ok(IntegralResult {
        real_value,
        imaginary_defect,
        enclosed: poles,
        residues,
        warnings,
    })
}

/// `∮ f dx` over the circle.
pub fn integrate_closed(f: &MeromorphicFunction, c: &CircleContour) -> Result<IntegralResult, ContourError> {
    integrate_closed_with(f, c, ResidueMethod::Series)
}

pub fn integrate_closed_with(
    f: &MeromorphicFunction,
    c: &CircleContour,
    method: ResidueMethod,
) -> Result<IntegralResult, ContourError> {
    let inside = enclosed_poles(c, &f.find_poles())?;
    assemble(f, inside, c.orientation.sign(), method)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum HalfPlane {
    #[default]
    Auto,
    Upper,
    Lower,
}

impl HalfPlane {
    pub fn name(self) -> &'static str {
        match self {
            HalfPlane::Auto => "auto",
            HalfPlane::Upper => "upper",
            HalfPlane::Lower => "lower",
        }
    }
}

fn degree(p: &crate::function::Poly) -> usize {
    p.degree().unwrap_or(0)
}

/// Checks decay on the closing semicircle and picks the half plane.
pub fn closing_half_plane(h: &MeromorphicFunction, requested: HalfPlane) -> Result<HalfPlane, ContourError> {
    let dn = degree(h.num());
    let dd = degree(h.den());
    match h.factor() {
        None => {
            if dd < dn + 2 {
                return Err(ContourError::DecayViolation(format!(
                    "a rational integrand needs deg(den) ≥ deg(num) + 2, got {dd} and {dn}"
                )));
            }
            Ok(match requested {
                HalfPlane::Auto => HalfPlane::Upper,
                other => other,
            })
        }
        Some(fac) if fac.kind == EntireKind::Exp => {
            if fac.scale.u != 0.0 {
                return Err(ContourError::DecayViolation(format!(
                    "exp factor with scale {} grows along the real axis; only exp(t·I·x) is supported",
                    fac.scale
                )));
            }
            if dd < dn + 1 {
                return Err(ContourError::DecayViolation(format!(
                    "an exp(t·I·x) integrand needs deg(den) ≥ deg(num) + 1, got {dd} and {dn}"
                )));
            }
            let needed = if fac.scale.v > 0.0 { HalfPlane::Upper } else { HalfPlane::Lower };
            match requested {
                HalfPlane::Auto => Ok(needed),
                r if r == needed => Ok(needed),
                r => Err(ContourError::DecayViolation(format!(
                    "exp(t·I·x) with t = {} grows in the {} half plane; close in the {} half plane",
                    fac.scale.v,
                    r.name(),
                    needed.name()
                ))),
            }
        }
        Some(fac) => Err(ContourError::Unsupported(format!(
            "{} factors do not decay in either half plane; write {}(t·x) in terms of exp(t·I·x) and exp(-t·I·x) and integrate the parts separately",
            fac.kind, fac.kind
        ))),
    }
}

/// `∫ H(x) dx` over the real line by closing in a half plane.
pub fn integrate_real_line(h: &MeromorphicFunction, half_plane: HalfPlane) -> Result<IntegralResult, ContourError> {
    integrate_real_line_with(h, half_plane, ResidueMethod::Series)
}

pub fn integrate_real_line_with(
    h: &MeromorphicFunction,
    half_plane: HalfPlane,
    method: ResidueMethod,
) -> Result<IntegralResult, ContourError> {
    let half = closing_half_plane(h, half_plane)?;
    let poles = h.find_poles();
    if let Some(p) = poles.iter().find(|p| p.location.v.abs() <= REAL_AXIS_TOL) {
        return Err(ContourError::PoleOnRealAxis { location: p.location });
    }
    let (chosen, sign) = match half {
        HalfPlane::Lower => (poles.into_iter().filter(|p| p.location.v < 0.0).collect(), -1.0),
        _ => (poles.into_iter().filter(|p| p.location.v > 0.0).collect(), 1.0),
    };
    assemble(h, chosen, sign, method)
}

/// `j = ρ²(α·dφ)` for `α = k dx + g dy` at `z`, computed with algebra
/// products.
pub fn polar_coefficient(k: f64, g: f64, z: EvenElement) -> Result<f64, AlgebraError> {
    let alpha = Multivector::one_form(k, g);
    let dphi = dphi_at(z)?;
    Ok(z.norm_sq() * dot_one_forms(alpha, dphi)?)
}

/// The same coefficient as `−v(w·z)`.
pub fn polar_coefficient_from_w(w: EvenElement, z: EvenElement) -> f64 {
    -(w * z).v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::{parse, to_meromorphic, Mode, Parser};

    fn mero(s: &str) -> MeromorphicFunction {
        to_meromorphic(&parse(s).unwrap()).unwrap()
    }

    fn line(s: &str) -> MeromorphicFunction {
        to_meromorphic(&Parser::new(Mode::RealLine).parse(s).unwrap()).unwrap()
    }

    #[test]
    fn circle_examples() {
        let f = mero("1/(z^2+1)^2");
        let c = CircleContour::new(EvenElement::I, 0.5).unwrap();
        let r = integrate_closed(&f, &c).unwrap();
        assert!((r.real_value - PI / 2.0).abs() < 1e-14);
        assert_eq!(r.enclosed.len(), 1);

        let g = mero("1/(z*(z-pi))");
        let r = integrate_closed(&g, &CircleContour::unit()).unwrap();
        assert!(r.real_value.abs() < 1e-15);
        assert!((r.imaginary_defect + 2.0).abs() < 1e-14);
        assert_eq!(r.warnings.len(), 1);

        let h = mero("1/z^2");
        let r = integrate_closed(&h, &CircleContour::unit()).unwrap();
        assert_eq!(r.real_value, 0.0);
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn orientation_flips_sign() {
        let f = mero("(z+2)/((z-0.3*I)^2*(z+0.5))");
        let c = CircleContour::unit();
        let a = integrate_closed(&f, &c).unwrap();
        let b = integrate_closed(&f, &c.clockwise()).unwrap();
        assert_eq!(a.real_value, -b.real_value);
        assert_eq!(a.imaginary_defect, -b.imaginary_defect);
    }

    #[test]
    fn enclosure() {
        let poles = [EvenElement::I, -EvenElement::I].map(|location| Pole {
            location,
            order: 1,
            den_multiplicity: 1,
        });
        let c = CircleContour::new(EvenElement::I, 0.5).unwrap();
        assert_eq!(enclosed_poles(&c, &poles).unwrap(), vec![poles[0]]);

        let on = [Pole {
            location: EvenElement::ONE,
            order: 1,
            den_multiplicity: 1,
        }];
        assert!(matches!(
            enclosed_poles(&CircleContour::unit(), &on),
            Err(ContourError::PoleOnContour { .. })
        ));
        assert!(matches!(
            CircleContour::new(EvenElement::ZERO, 0.0),
            Err(ContourError::InvalidRadius(_))
        ));
    }

    #[test]
    fn real_line_examples() {
        let r = integrate_real_line(&line("1/(x^2+1)"), HalfPlane::Auto).unwrap();
        assert!((r.real_value - PI).abs() < 1e-14);
        let r = integrate_real_line(&line("1/(x^2+1)^2"), HalfPlane::Auto).unwrap();
        assert!((r.real_value - PI / 2.0).abs() < 1e-14);
        let lower = integrate_real_line(&line("1/(x^2+1)^2"), HalfPlane::Lower).unwrap();
        assert!((lower.real_value - PI / 2.0).abs() < 1e-14);

        for t in [0.5, 1.0, 2.0, -1.0] {
            let h = to_meromorphic(
                &Parser::new(Mode::RealLine)
                    .bind("t", t)
                    .parse("exp(I*t*x)/(x^2+1)")
                    .unwrap(),
            )
            .unwrap();
            let r = integrate_real_line(&h, HalfPlane::Auto).unwrap();
            assert!((r.real_value - PI * (-t.abs()).exp()).abs() < 1e-14, "t = {t}");
            assert!(r.imaginary_defect.abs() < 1e-14);
        }
    }

    #[test]
    fn real_line_rejections() {
        assert!(matches!(
            integrate_real_line(&line("x/(x^2+1)"), HalfPlane::Auto),
            Err(ContourError::DecayViolation(_))
        ));
        assert!(matches!(
            integrate_real_line(&line("1/(x^2-1)"), HalfPlane::Auto),
            Err(ContourError::PoleOnRealAxis { .. })
        ));
        assert!(matches!(
            integrate_real_line(&line("cos(x)/(x^2+1)"), HalfPlane::Auto),
            Err(ContourError::Unsupported(_))
        ));
        assert!(matches!(
            integrate_real_line(&line("exp(x)/(x^2+1)"), HalfPlane::Auto),
            Err(ContourError::DecayViolation(_))
        ));
        assert!(matches!(
            integrate_real_line(&line("exp(I*x)/(x^2+1)"), HalfPlane::Lower),
            Err(ContourError::DecayViolation(_))
        ));
    }

    #[test]
    fn polar_coefficient_matches_w() {
        let z = EvenElement::new(0.7, -1.3);
        let w = EvenElement::new(0.2, 1.1);
        let (k, g) = (w.u, -w.v);
        let j = polar_coefficient(k, g, z).unwrap();
        let want = polar_coefficient_from_w(w, z);
        assert!((j - want).abs() <= 1e-14 * want.abs());
        assert!((want - (g * z.u - k * z.v)).abs() < 1e-15);
    }
}
