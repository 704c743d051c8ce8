//! Built-in regression suite of reference values, used by the `check`
//! command.

use std::f64::consts::PI;

use crate::clifford::{even_int_pow, mv_product, EvenElement, Multivector, PolarForm};
use crate::contour::{integrate_closed, integrate_real_line_with, polar_coefficient, CircleContour, HalfPlane};
use crate::error::Result;
use crate::function::{classify_one_form, Classification, Mode, OneForm, Parser};
use crate::function_from_str;
use crate::residue::{laurent_expand, residue_by_order_reduction, ResidueMethod};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub expected: String,
    pub actual: String,
    /// Absolute deviation from the expected value (0 for exact checks).
    pub deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckOutcome {
    fn numeric(name: &str, expected: f64, actual: Result<f64>, tolerance: f64) -> Self {
        match actual {
            Ok(a) => {
                let deviation = (a - expected).abs();
                Self {
                    name: name.into(),
                    expected: expected.to_string(),
                    actual: a.to_string(),
                    deviation,
                    tolerance,
                    passed: deviation <= tolerance,
                }
            }
            Err(e) => Self::failed(name, expected.to_string(), e.to_string(), tolerance),
        }
    }

    fn even(name: &str, expected: EvenElement, actual: Result<EvenElement>, tolerance: f64) -> Self {
        match actual {
            Ok(a) => {
                let deviation = (a - expected).abs();
                Self {
                    name: name.into(),
                    expected: expected.to_string(),
                    actual: a.to_string(),
                    deviation,
                    tolerance,
                    passed: deviation <= tolerance,
                }
            }
            Err(e) => Self::failed(name, expected.to_string(), e.to_string(), tolerance),
        }
    }

    fn exact(name: &str, expected: String, actual: String) -> Self {
        let passed = expected == actual;
        Self {
            name: name.into(),
            expected,
            actual,
            deviation: if passed { 0.0 } else { f64::INFINITY },
            tolerance: 0.0,
            passed,
        }
    }

    /// Bit-level equality (with `-0.0 == 0.0`).
    fn equal<T: PartialEq + std::fmt::Debug>(name: &str, expected: T, actual: T) -> Self {
        let passed = expected == actual;
        Self {
            name: name.into(),
            expected: format!("{expected:?}"),
            actual: format!("{actual:?}"),
            deviation: if passed { 0.0 } else { f64::INFINITY },
            tolerance: 0.0,
            passed,
        }
    }

    fn failed(name: &str, expected: String, error: String, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            expected,
            actual: format!("error: {error}"),
            deviation: f64::INFINITY,
            tolerance,
            passed: false,
        }
    }
}

fn line_value(text: &str, bindings: &[(&str, f64)], method: ResidueMethod) -> Result<f64> {
    let h = function_from_str(text, Mode::RealLine, bindings)?;
    Ok(integrate_real_line_with(&h, HalfPlane::Auto, method)?.real_value)
}

fn algebra_checks(out: &mut Vec<CheckOutcome>) {
    let products = [
        ("dx·dx", Multivector::DX, Multivector::DX, Multivector::ONE),
        ("dy·dy", Multivector::DY, Multivector::DY, Multivector::ONE),
        (
            "dxdy·dxdy",
            Multivector::DXDY,
            Multivector::DXDY,
            Multivector::ONE.scale(-1.0),
        ),
        ("dx·dy", Multivector::DX, Multivector::DY, Multivector::DXDY),
        ("dy·dx", Multivector::DY, Multivector::DX, Multivector::DXDY.scale(-1.0)),
    ];
    for (name, a, b, want) in products {
        out.push(CheckOutcome::equal(&format!("algebra: {name}"), want, mv_product(a, b)));
    }
    let e = EvenElement::new(2.0, 3.0);
    let alpha = Multivector::one_form(1.5, -0.25);
    out.push(CheckOutcome::equal(
        "algebra: (2 + 3·dxdy)·α = α·(2 − 3·dxdy)",
        mv_product(alpha, e.conj().to_multivector()),
        mv_product(e.to_multivector(), alpha),
    ));
    let z = EvenElement::new(3.0, 4.0);
    out.push(CheckOutcome::even(
        "algebra: z·z* = ρ² at 3 + 4·dxdy",
        EvenElement::real(25.0),
        Ok(z * z.conj()),
        1e-14 * 25.0,
    ));
    let polar = PolarForm::from_even(EvenElement::new(1.0, 1.0)).expect("nonzero");
    for m in [-8, -3, 4, 8] {
        let want = polar.powi(m);
        out.push(CheckOutcome::even(
            &format!("algebra: (1 + dxdy)^{m} against polar form"),
            want,
            even_int_pow(EvenElement::new(1.0, 1.0), m).map_err(Into::into),
            1e-12 * want.abs(),
        ));
    }
}

/// Runs every reference check. Nothing here is random.
pub fn run_checks() -> Vec<CheckOutcome> {
    let mut out = Vec::new();

    out.push(CheckOutcome::numeric(
        "real line: 1/(x^2+1) = π",
        PI,
        line_value("1/(x^2+1)", &[], ResidueMethod::Series),
        1e-10,
    ));
    out.push(CheckOutcome::numeric(
        "real line: 1/(x^2+1)^2 = π/2 by order reduction",
        PI / 2.0,
        line_value("1/(x^2+1)^2", &[], ResidueMethod::OrderReduction),
        1e-10,
    ));
    out.push(CheckOutcome::numeric(
        "real line: 1/(x^2+1)^2 = π/2 by the derivative formula",
        PI / 2.0,
        line_value("1/(x^2+1)^2", &[], ResidueMethod::DerivativeFormula),
        1e-10,
    ));
    let a2 = (|| -> Result<EvenElement> {
        let f = function_from_str("1/(z^2+1)^2", Mode::Contour, &[])?;
        let p = f
            .pole_at(EvenElement::I)
            .ok_or(crate::residue::ResidueError::NotAPole {
                location: EvenElement::I,
            })?;
        Ok(residue_by_order_reduction(&f, &p)?.leading)
    })();
    out.push(CheckOutcome::even(
        "1/(z^2+1)^2: first extracted coefficient at dxdy",
        EvenElement::real(-0.25),
        a2,
        1e-12,
    ));

    for t in [0.5f64, 1.0, 2.0] {
        out.push(CheckOutcome::numeric(
            &format!("real line: exp(I·t·x)/(x^2+1) = π·e^(-t) at t = {t}"),
            PI * (-t).exp(),
            line_value("exp(I*t*x)/(x^2+1)", &[("t", t)], ResidueMethod::Series),
            1e-9,
        ));
    }

    let circle = (|| -> Result<_> {
        let f = function_from_str("1/(z*(z-pi))", Mode::Contour, &[])?;
        Ok(integrate_closed(&f, &CircleContour::unit())?)
    })();
    match circle {
        Ok(r) => {
            out.push(CheckOutcome::numeric(
                "unit circle: 1/(z(z-π)) real value",
                0.0,
                Ok(r.real_value),
                1e-10,
            ));
            out.push(CheckOutcome::numeric(
                "unit circle: 1/(z(z-π)) imaginary defect",
                -2.0,
                Ok(r.imaginary_defect),
                1e-10,
            ));
            out.push(CheckOutcome::exact(
                "unit circle: 1/(z(z-π)) raises a warning",
                "true".into(),
                (!r.warnings.is_empty()).to_string(),
            ));
        }
        Err(e) => out.push(CheckOutcome::failed(
            "unit circle: 1/(z(z-π))",
            "0, defect -2".into(),
            e.to_string(),
            1e-10,
        )),
    }

    // polar coefficient on a fixed grid, w = z² − 3/z
    let mut worst: f64 = 0.0;
    for i in 0..8 {
        for j in 0..8 {
            let rho = 0.1 * 100f64.powf(i as f64 / 7.0);
            let phi = -PI + 2.0 * PI * (j as f64 + 0.5) / 8.0;
            let z = EvenElement::new(rho * phi.cos(), rho * phi.sin());
            let w = z * z - EvenElement::real(3.0) / z;
            let j_algebra = polar_coefficient(w.u, -w.v, z).unwrap_or(f64::NAN);
            let j_w = -(w * z).v;
            let rel = (j_algebra - j_w).abs() / (w.u * z.v).abs().max((w.v * z.u).abs()).max(f64::MIN_POSITIVE);
            worst = worst.max(if rel.is_nan() { f64::INFINITY } else { rel });
        }
    }
    out.push(CheckOutcome::numeric(
        "polar coefficient ρ²(α·dφ) = −v(w·z) on a grid (relative)",
        0.0,
        Ok(worst),
        1e-12,
    ));

    let samples = [(0.5, 0.3), (-1.2, 0.7), (2.0, -1.5), (0.1, -0.9)];
    let plane = Parser::new(Mode::Plane);
    let cases: [(&str, &str, Classification); 3] = [
        ("w = z^3 - 2z + I", "z^3 - 2*z + I", Classification::ClosedAndCr),
        ("w = z*", "x - y*I", Classification::ClosedOnly),
        ("k = y, g = 0", "y", Classification::NotClosed),
    ];
    for (name, w, want) in cases {
        let got = plane
            .parse(w)
            .map_err(Into::into)
            .and_then(|e| Ok(classify_one_form(&OneForm::from_w_expr(e), &samples)?));
        out.push(CheckOutcome::exact(
            &format!("classification: {name}"),
            want.to_string(),
            got.map_or_else(|e: crate::Error| format!("error: {e}"), |c| c.to_string()),
        ));
    }

    algebra_checks(&mut out);

    let window = (|| -> Result<Vec<EvenElement>> {
        let f = function_from_str("sin(z)/z^3", Mode::Contour, &[])?;
        let l = laurent_expand(&f, EvenElement::ZERO, -3, 2)?;
        Ok(l.coefficients().into_iter().map(|c| c.1).collect())
    })();
    let want = [0.0, 1.0, 0.0, -1.0 / 6.0, 0.0, 1.0 / 120.0];
    match window {
        Ok(coeffs) => {
            for (k, (a, w)) in coeffs.into_iter().zip(want).enumerate() {
                out.push(CheckOutcome::even(
                    &format!("Laurent sin(z)/z^3: coefficient of z^{}", k as i32 - 3),
                    EvenElement::real(w),
                    Ok(a),
                    1e-14,
                ));
            }
        }
        Err(e) => out.push(CheckOutcome::failed(
            "Laurent sin(z)/z^3",
            format!("{want:?}"),
            e.to_string(),
            1e-14,
        )),
    }

    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_checks_pass() {
        let results = run_checks();
        assert!(results.len() > 20);
        for r in &results {
            assert!(r.passed, "{}: expected {}, got {}", r.name, r.expected, r.actual);
        }
    }
}
