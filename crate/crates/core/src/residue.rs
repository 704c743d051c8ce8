//! Residues, Laurent windows and Cauchy's integral formulas.
//!
//! The source of truth for every coefficient is series extraction; the
//! order-reduction procedure and the derivative formula are alternative
//! routes to the same numbers, and the finite-difference evaluation of the
//! derivative formula is kept only as a cross-check.

use std::f64::consts::PI;
use std::fmt;

use thiserror::Error;

use crate::clifford::EvenElement;
use crate::function::{MeromorphicFunction, ModelError, Pole};
use crate::series::{LaurentSeries, SeriesError, DEFAULT_WINDOW};

/// Largest coefficient range [`laurent_expand`] will produce.
pub const MAX_WINDOW: usize = 64;

/// `|u| ≤ APPLICABILITY_TOL · (|u| + |v| + 1e-300)` makes a value a 2-form.
pub const APPLICABILITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ResidueError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("{location} is a pole of the function; the point must be regular")]
    PoleAt { location: EvenElement },
    #[error("{location} is not a pole of the function")]
    NotAPole { location: EvenElement },
    #[error("empty coefficient range [{from}, {to}]")]
    InvalidRange { from: i32, to: i32 },
    #[error("coefficient range of {requested} exceeds the maximum of {max}")]
    WindowTooLarge { requested: usize, max: usize },
    #[error("order reduction did not terminate: {0}")]
    NonConvergent(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ResidueMethod {
    #[default]
    Series,
    OrderReduction,
    DerivativeFormula,
}

impl ResidueMethod {
    pub fn name(self) -> &'static str {
        match self {
            ResidueMethod::Series => "series",
            ResidueMethod::OrderReduction => "order_reduction",
            ResidueMethod::DerivativeFormula => "derivative_formula",
        }
    }
}

impl fmt::Display for ResidueMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidueReport {
    pub pole: Pole,
    pub a_minus_1: EvenElement,
    /// `a₋ₘ`, the coefficient of the most singular term.
    pub leading: EvenElement,
    pub method: ResidueMethod,
    /// `(exponent, coefficient)` pairs in the order they were extracted;
    /// only filled by order reduction.
    pub extractions: Vec<(i32, EvenElement)>,
}

fn expansion_window(order: usize) -> usize {
    DEFAULT_WINDOW.max(order + 2)
}

fn pole_series(f: &MeromorphicFunction, p: &Pole) -> Result<LaurentSeries, ResidueError> {
    Ok(f.local_expansion(p.location, expansion_window(p.order))?)
}

/// `a₋₁` at the pole, by series extraction.
pub fn residue(f: &MeromorphicFunction, p: &Pole) -> Result<EvenElement, ResidueError> {
    Ok(pole_series(f, p)?.coefficient(-1)?)
}

fn series_report(f: &MeromorphicFunction, p: &Pole) -> Result<ResidueReport, ResidueError> {
    let s = pole_series(f, p)?;
    Ok(ResidueReport {
        pole: *p,
        a_minus_1: s.coefficient(-1)?,
        leading: s.coefficient(-(p.order as i32))?,
        method: ResidueMethod::Series,
        extractions: Vec::new(),
    })
}

/// Repeatedly takes the limit `lim z′ᵐ f`, records it and subtracts
/// `aₘ/z′ᵐ`, until the principal part is exhausted.
pub fn residue_by_order_reduction(f: &MeromorphicFunction, p: &Pole) -> Result<ResidueReport, ResidueError> {
    let mut current = pole_series(f, p)?;
    let scale = current
        .coeffs()
        .iter()
        .take(p.order)
        .map(|c| c.abs())
        .fold(0.0, f64::max);
    let mut extractions = Vec::new();
    let mut a_minus_1 = EvenElement::ZERO;
    let mut last = i32::MIN;
    while !current.is_zero() && current.valuation() < 0 {
        let n = current.valuation();
        if n <= last || extractions.len() > p.order {
            return Err(ResidueError::NonConvergent(format!(
                "remainder still singular at exponent {n} after {} extractions",
                extractions.len()
            )));
        }
        let a = current.leading().unwrap_or_default();
        extractions.push((n, a));
        if n == -1 {
            a_minus_1 = a;
        }
        current = current.without_term(n, scale);
        last = n;
    }
    Ok(ResidueReport {
        pole: *p,
        a_minus_1,
        leading: extractions.first().map(|e| e.1).unwrap_or_default(),
        method: ResidueMethod::OrderReduction,
        extractions,
    })
}

/// `a₋₁ = g⁽ᵐ⁻¹⁾(z₀)/(m−1)!` with `g = z′ᵐ f`, the derivative taken from
/// the Taylor series of `g`.
fn derivative_report(f: &MeromorphicFunction, p: &Pole) -> Result<ResidueReport, ResidueError> {
    let g = f.regular_part(p);
    let m = p.order;
    let s = g.local_expansion(p.location, m.max(1))?;
    let d = cauchy_derivative_unchecked(&s, m - 1)?;
    Ok(ResidueReport {
        pole: *p,
        a_minus_1: d / factorial(m - 1),
        leading: s.coefficient(0)?,
        method: ResidueMethod::DerivativeFormula,
        extractions: Vec::new(),
    })
}

pub fn residue_with(f: &MeromorphicFunction, p: &Pole, method: ResidueMethod) -> Result<ResidueReport, ResidueError> {
    match method {
        ResidueMethod::Series => series_report(f, p),
        ResidueMethod::OrderReduction => residue_by_order_reduction(f, p),
        ResidueMethod::DerivativeFormula => derivative_report(f, p),
    }
}

/// Residues at every pole of `f`.
pub fn residues(f: &MeromorphicFunction, method: ResidueMethod) -> Result<Vec<ResidueReport>, ResidueError> {
    f.find_poles().iter().map(|p| residue_with(f, p, method)).collect()
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `n`-th central difference quotient of `g` along `x` at `c`.
fn central_difference(g: &dyn Fn(EvenElement) -> EvenElement, c: EvenElement, n: usize, h: f64) -> EvenElement {
    if n == 0 {
        let e = EvenElement::real(h);
        return (g(c + e) + g(c - e)) * 0.5;
    }
    let mut acc = EvenElement::ZERO;
    for k in 0..=n {
        let offset = (n as f64 / 2.0 - k as f64) * h;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        acc += g(c + EvenElement::real(offset)) * (sign * binomial(n, k));
    }
    acc / h.powi(n as i32)
}

/// Ridders' extrapolation of central differences, returning the estimate
/// with the smallest error indicator.
pub fn ridders_derivative(g: &dyn Fn(EvenElement) -> EvenElement, c: EvenElement, n: usize, h0: f64) -> EvenElement {
    const CON: f64 = 1.4;
    const CON2: f64 = CON * CON;
    const NTAB: usize = 12;
    let mut table = vec![vec![EvenElement::ZERO; NTAB]; NTAB];
    let mut h = h0;
    table[0][0] = central_difference(g, c, n, h);
    let mut best = table[0][0];
    let mut err = f64::INFINITY;
    for i in 1..NTAB {
        h /= CON;
        table[0][i] = central_difference(g, c, n, h);
        let mut fac = CON2;
        for j in 1..=i {
            table[j][i] = (table[j - 1][i] * fac - table[j - 1][i - 1]) / (fac - 1.0);
            fac *= CON2;
            let e = (table[j][i] - table[j - 1][i])
                .abs()
                .max((table[j][i] - table[j - 1][i - 1]).abs());
            if e <= err {
                err = e;
                best = table[j][i];
            }
        }
        if (table[i][i] - table[i - 1][i - 1]).abs() >= 2.0 * err {
            break;
        }
    }
    best
}

/// The derivative formula evaluated by finite differences of `z′ᵐ f` along
/// `x`; independent of the series machinery apart from the pole location.
pub fn residue_finite_difference(f: &MeromorphicFunction, p: &Pole) -> Result<EvenElement, ResidueError> {
    let g = f.regular_part(p);
    let n = p.order - 1;
    let d = f.clearance(p.location);
    let h0 = (0.25 * d / n.max(1) as f64).min(1.0);
    let eval = |z: EvenElement| g.eval_factored(z);
    if n == 0 {
        // no derivative to take: the limit is the value of z′f at the pole
        let direct = eval(p.location);
        if direct.is_finite() {
            return Ok(direct);
        }
    }
    Ok(ridders_derivative(&eval, p.location, n, h0) / factorial(n))
}

/// Value of `f` at a regular point together with the 2-form test that
/// decides whether `∮ f/(z−z₀) dx = 2π·dxdy·f(z₀)` is a real integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CauchyEvaluation {
    pub value: EvenElement,
    pub applicable: bool,
    /// `−2π·v` scaled by `1/n!` for derivatives; meaningful only when
    /// `applicable`.
    pub contour_value: f64,
}

pub fn is_two_form(e: EvenElement) -> bool {
    e.u.abs() <= APPLICABILITY_TOL * (e.u.abs() + e.v.abs() + 1e-300)
}

fn ensure_regular(f: &MeromorphicFunction, z0: EvenElement) -> Result<(), ResidueError> {
    match f.pole_at(z0) {
        Some(p) => Err(ResidueError::PoleAt { location: p.location }),
        None => Ok(()),
    }
}

pub fn cauchy_evaluate(f: &MeromorphicFunction, z0: EvenElement) -> Result<CauchyEvaluation, ResidueError> {
    ensure_regular(f, z0)?;
    let value = f.local_expansion(z0, 1)?.coefficient(0)?;
    Ok(CauchyEvaluation {
        value,
        applicable: is_two_form(value),
        contour_value: -2.0 * PI * value.v,
    })
}

fn cauchy_derivative_unchecked(s: &LaurentSeries, n: usize) -> Result<EvenElement, ResidueError> {
    Ok(s.coefficient(n as i32)? * factorial(n))
}

/// `n`-th derivative of `f` at a regular point, `n!·aₙ`.
pub fn cauchy_derivative(f: &MeromorphicFunction, z0: EvenElement, n: usize) -> Result<EvenElement, ResidueError> {
    ensure_regular(f, z0)?;
    let s = f.local_expansion(z0, n + 1)?;
    cauchy_derivative_unchecked(&s, n)
}

/// The derivative formula `∮ f/(z−z₀)ⁿ⁺¹ dx = (2π/n!)·dxdy·f⁽ⁿ⁾(z₀)`.
pub fn cauchy_derivative_integral(
    f: &MeromorphicFunction,
    z0: EvenElement,
    n: usize,
) -> Result<CauchyEvaluation, ResidueError> {
    let value = cauchy_derivative(f, z0, n)?;
    Ok(CauchyEvaluation {
        value,
        applicable: is_two_form(value),
        contour_value: -2.0 * PI * value.v / factorial(n),
    })
}

/// Coefficients `a_from ..= a_to` of the Laurent series about `z0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentExpansion {
    pub series: LaurentSeries,
    pub from: i32,
    pub to: i32,
    /// Pole order at the center, zero at regular points.
    pub pole_order: usize,
}

impl LaurentExpansion {
    pub fn coefficient(&self, n: i32) -> Result<EvenElement, SeriesError> {
        self.series.coefficient(n)
    }

    /// `(n, aₙ)` over the requested range.
    pub fn coefficients(&self) -> Vec<(i32, EvenElement)> {
        (self.from..=self.to)
            .map(|n| (n, self.series.coefficient(n).unwrap_or_default()))
            .collect()
    }

    /// Taylor coefficient `bₖ` of `z′ᵐ f`, which is `a_{k−m}`.
    pub fn b(&self, k: i32) -> Result<EvenElement, SeriesError> {
        self.series.coefficient(k - self.pole_order as i32)
    }
}

pub fn laurent_expand(
    f: &MeromorphicFunction,
    z0: EvenElement,
    from: i32,
    to: i32,
) -> Result<LaurentExpansion, ResidueError> {
    if from > to {
        return Err(ResidueError::InvalidRange { from, to });
    }
    let requested = (to - from) as usize + 1;
    if requested > MAX_WINDOW {
        return Err(ResidueError::WindowTooLarge {
            requested,
            max: MAX_WINDOW,
        });
    }
    let pole_order = f.pole_at(z0).map_or(0, |p| p.order);
    let window = (to + pole_order as i32 + 1).max(1) as usize;
    let series = f.local_expansion(z0, window)?;
    Ok(LaurentExpansion {
        series,
        from,
        to,
        pole_order,
    })
}
