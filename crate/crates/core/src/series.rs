//! Truncated Laurent series (jets) with even-element coefficients.
//!
//! A series `Σ aₙ z′ⁿ` about a center `z₀` keeps the coefficients for
//! exponents `valuation ..= truncation_order`; everything above the
//! truncation order is unknown, everything below the valuation is zero.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::clifford::EvenElement;

/// Coefficient window used when callers do not ask for a specific one.
pub const DEFAULT_WINDOW: usize = 16;

/// Relative magnitude below which leading coefficients count as zero.
pub const DEFAULT_SNAP: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("series centers differ: {0} vs {1}")]
    CenterMismatch(EvenElement, EvenElement),
    #[error("the zero series has no inverse")]
    ZeroSeries,
    #[error("exponent {n} is outside the reliable window (truncation order {truncation_order})")]
    OutsideWindow { n: i32, truncation_order: i32 },
    #[error("unknown entire function `{0}` (expected exp, sin or cos)")]
    UnknownKind(String),
    #[error("invalid series order {0}")]
    InvalidOrder(i32),
}

/// Closed catalog of entire factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EntireKind {
    Exp,
    Sin,
    Cos,
}

impl EntireKind {
    pub fn name(self) -> &'static str {
        match self {
            EntireKind::Exp => "exp",
            EntireKind::Sin => "sin",
            EntireKind::Cos => "cos",
        }
    }

    pub fn eval(self, w: EvenElement) -> EvenElement {
        match self {
            EntireKind::Exp => w.exp(),
            EntireKind::Sin => w.sin(),
            EntireKind::Cos => w.cos(),
        }
    }

    /// The `n`-th derivative of the function at `w`.
    pub fn derivative(self, w: EvenElement, n: usize) -> EvenElement {
        match self {
            EntireKind::Exp => w.exp(),
            EntireKind::Sin => match n % 4 {
                0 => w.sin(),
                1 => w.cos(),
                2 => -w.sin(),
                _ => -w.cos(),
            },
            EntireKind::Cos => match n % 4 {
                0 => w.cos(),
                1 => -w.sin(),
                2 => -w.cos(),
                _ => w.sin(),
            },
        }
    }
}

impl FromStr for EntireKind {
    type Err = SeriesError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exp" => Ok(EntireKind::Exp),
            "sin" => Ok(EntireKind::Sin),
            "cos" => Ok(EntireKind::Cos),
            other => Err(SeriesError::UnknownKind(other.to_string())),
        }
    }
}

impl fmt::Display for EntireKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaurentSeries {
    center: EvenElement,
    valuation: i32,
    coeffs: Vec<EvenElement>,
    truncation_order: i32,
}

impl LaurentSeries {
    /// Builds a series whose first coefficient sits at exponent `start`.
    /// Leading coefficients that are negligible relative to the window are
    /// dropped, so the stored valuation may exceed `start`.
    pub fn new(center: EvenElement, start: i32, coeffs: Vec<EvenElement>) -> Self {
        Self::with_snap(center, start, coeffs, DEFAULT_SNAP)
    }

    pub fn with_snap(center: EvenElement, start: i32, coeffs: Vec<EvenElement>, snap: f64) -> Self {
        let truncation_order = start + coeffs.len() as i32 - 1;
        let max = coeffs.iter().map(|c| c.abs()).fold(0.0, f64::max);
        let threshold = snap * max;
        let lead = coeffs.iter().position(|c| c.abs() > threshold && !c.is_zero());
        match lead {
            None => Self::zero(center, truncation_order),
            Some(k) => Self {
                center,
                valuation: start + k as i32,
                coeffs: coeffs[k..].to_vec(),
                truncation_order,
            },
        }
    }

    /// Builds a series without snapping; the caller guarantees the first
    /// coefficient is the genuine leading one.
    fn exact(center: EvenElement, valuation: i32, coeffs: Vec<EvenElement>) -> Self {
        if coeffs.is_empty() || coeffs[0].is_zero() {
            return Self::with_snap(center, valuation, coeffs, 0.0);
        }
        let truncation_order = valuation + coeffs.len() as i32 - 1;
        Self {
            center,
            valuation,
            coeffs,
            truncation_order,
        }
    }

    /// Zero series known up to `truncation_order`.
    pub fn zero(center: EvenElement, truncation_order: i32) -> Self {
        Self {
            center,
            valuation: truncation_order + 1,
            coeffs: Vec::new(),
            truncation_order,
        }
    }

    /// `c · z′ⁿ`, known up to `truncation_order`.
    pub fn monomial(center: EvenElement, c: EvenElement, n: i32, truncation_order: i32) -> Self {
        if truncation_order < n || c.is_zero() {
            return Self::zero(center, truncation_order);
        }
        let mut coeffs = vec![EvenElement::ZERO; (truncation_order - n + 1) as usize];
        coeffs[0] = c;
        Self::exact(center, n, coeffs)
    }

    pub fn center(&self) -> EvenElement {
        self.center
    }

    pub fn valuation(&self) -> i32 {
        self.valuation
    }

    pub fn truncation_order(&self) -> i32 {
        self.truncation_order
    }

    pub fn coeffs(&self) -> &[EvenElement] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<EvenElement> {
        self.coeffs.first().copied()
    }

    /// Coefficient of `z′ⁿ`; zero below the valuation.
    pub fn coefficient(&self, n: i32) -> Result<EvenElement, SeriesError> {
        if n > self.truncation_order {
            return Err(SeriesError::OutsideWindow {
                n,
                truncation_order: self.truncation_order,
            });
        }
        if n < self.valuation {
            return Ok(EvenElement::ZERO);
        }
        Ok(self.coeffs[(n - self.valuation) as usize])
    }

    fn check_center(&self, other: &Self) -> Result<(), SeriesError> {
        if self.center != other.center {
            return Err(SeriesError::CenterMismatch(self.center, other.center));
        }
        Ok(())
    }

    /// Cauchy product.
    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_center(other)?;
        let trunc = (self.truncation_order + other.valuation).min(other.truncation_order + self.valuation);
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.center, trunc));
        }
        let val = self.valuation + other.valuation;
        if trunc < val {
            return Ok(Self::zero(self.center, trunc));
        }
        let len = (trunc - val + 1) as usize;
        let mut out = vec![EvenElement::ZERO; len];
        for (i, a) in self.coeffs.iter().enumerate().take(len) {
            for (j, b) in other.coeffs.iter().enumerate().take(len - i) {
                out[i + j] += *a * *b;
            }
        }
        Ok(Self::exact(self.center, val, out))
    }

    /// Reciprocal series; the valuation negates.
    pub fn inv(&self) -> Result<Self, SeriesError> {
        let a0 = self.leading().ok_or(SeriesError::ZeroSeries)?;
        let inv0 = a0.inv().map_err(|_| SeriesError::ZeroSeries)?;
        let len = self.coeffs.len();
        let mut out = Vec::with_capacity(len);
        out.push(inv0);
        for n in 1..len {
            let mut acc = EvenElement::ZERO;
            for k in 1..=n {
                acc += self.coeffs[k] * out[n - k];
            }
            out.push(-(acc * inv0));
        }
        Ok(Self::exact(self.center, -self.valuation, out))
    }

    fn combine(&self, other: &Self, sign: f64) -> Result<Self, SeriesError> {
        self.check_center(other)?;
        let trunc = self.truncation_order.min(other.truncation_order);
        let start = self.valuation.min(other.valuation);
        if trunc < start {
            return Ok(Self::zero(self.center, trunc));
        }
        let coeffs = (start..=trunc)
            .map(|n| {
                let a = self.coefficient(n).unwrap_or(EvenElement::ZERO);
                let b = other.coefficient(n).unwrap_or(EvenElement::ZERO);
                a + b * sign
            })
            .collect();
        Ok(Self::new(self.center, start, coeffs))
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.combine(other, -1.0)
    }

    pub fn scale(&self, c: EvenElement) -> Self {
        let coeffs = self.coeffs.iter().map(|a| *a * c).collect();
        let mut out = Self::exact(self.center, self.valuation, coeffs);
        out.truncation_order = self.truncation_order;
        out
    }

    /// Drops the term of exponent `n` exactly (sets it to zero) and
    /// re-determines the valuation relative to `snap_scale`.
    pub fn without_term(&self, n: i32, snap_scale: f64) -> Self {
        if n < self.valuation || n > self.truncation_order {
            return self.clone();
        }
        let mut coeffs = self.coeffs.clone();
        coeffs[(n - self.valuation) as usize] = EvenElement::ZERO;
        let threshold = DEFAULT_SNAP * snap_scale;
        let lead = coeffs.iter().position(|c| !c.is_zero() && c.abs() > threshold);
        match lead {
            None => Self::zero(self.center, self.truncation_order),
            Some(k) => Self {
                center: self.center,
                valuation: self.valuation + k as i32,
                coeffs: coeffs[k..].to_vec(),
                truncation_order: self.truncation_order,
            },
        }
    }

    /// Keeps exponents up to `order` (no-op when already shorter).
    pub fn truncate(&self, order: i32) -> Self {
        if order >= self.truncation_order {
            return self.clone();
        }
        if order < self.valuation {
            return Self::zero(self.center, order);
        }
        let keep = (order - self.valuation + 1) as usize;
        Self {
            center: self.center,
            valuation: self.valuation,
            coeffs: self.coeffs[..keep].to_vec(),
            truncation_order: order,
        }
    }

    /// Multiplies by `z′ᵏ`.
    pub fn shift(&self, k: i32) -> Self {
        Self {
            center: self.center,
            valuation: self.valuation + k,
            coeffs: self.coeffs.clone(),
            truncation_order: self.truncation_order + k,
        }
    }

    /// Sums the retained terms at `z = center + w`.
    pub fn eval_offset(&self, w: EvenElement) -> EvenElement {
        if self.is_zero() {
            return EvenElement::ZERO;
        }
        let mut acc = EvenElement::ZERO;
        for c in self.coeffs.iter().rev() {
            acc = acc * w + *c;
        }
        let lead = w.powi(self.valuation).unwrap_or(EvenElement::new(f64::NAN, f64::NAN));
        acc * lead
    }

    pub fn eval(&self, z: EvenElement) -> EvenElement {
        self.eval_offset(z - self.center)
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0 + O(z'^{})", self.truncation_order + 1);
        }
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c})·z'^{}", self.valuation + k as i32)?;
        }
        write!(f, " + O(z'^{})", self.truncation_order + 1)
    }
}

pub fn series_mul(a: &LaurentSeries, b: &LaurentSeries) -> Result<LaurentSeries, SeriesError> {
    a.mul(b)
}

pub fn series_inv(a: &LaurentSeries) -> Result<LaurentSeries, SeriesError> {
    a.inv()
}

pub fn coefficient(a: &LaurentSeries, n: i32) -> Result<EvenElement, SeriesError> {
    a.coefficient(n)
}

/// Taylor series of `kind(scale·z)` about `center`, through `z′^order`.
pub fn entire_series(
    kind: EntireKind,
    scale: EvenElement,
    center: EvenElement,
    order: i32,
) -> Result<LaurentSeries, SeriesError> {
    if order < 0 {
        return Err(SeriesError::InvalidOrder(order));
    }
    let w0 = scale * center;
    let mut coeffs = Vec::with_capacity(order as usize + 1);
    // scaleⁿ/n! carried along
    let mut factor = EvenElement::ONE;
    for n in 0..=order as usize {
        if n > 0 {
            factor = factor * scale / n as f64;
        }
        coeffs.push(factor * kind.derivative(w0, n));
    }
    Ok(LaurentSeries::new(center, 0, coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;

    const O: EvenElement = EvenElement::ZERO;

    fn re(x: f64) -> EvenElement {
        EvenElement::real(x)
    }

    fn close(a: EvenElement, b: EvenElement, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn monomials_cancel() {
        let a = LaurentSeries::monomial(O, re(1.0), 1, 10);
        let b = LaurentSeries::monomial(O, re(1.0), -1, 10);
        let p = a.mul(&b).unwrap();
        assert_eq!(p.valuation(), 0);
        assert_eq!(p.coefficient(0).unwrap(), re(1.0));
        for n in 1..=p.truncation_order() {
            assert_eq!(p.coefficient(n).unwrap(), O);
        }
    }

    #[test]
    fn difference_of_squares() {
        let a = LaurentSeries::new(O, 0, vec![re(1.0), re(1.0), O, O, O]);
        let b = LaurentSeries::new(O, 0, vec![re(1.0), re(-1.0), O, O, O]);
        let p = a.mul(&b).unwrap();
        assert_eq!(p.coeffs()[..3], [re(1.0), O, re(-1.0)]);
        assert_eq!(p.truncation_order(), 4);
    }

    #[test]
    fn geometric_inverse() {
        let a = LaurentSeries::new(O, 0, vec![re(1.0), re(-1.0), O, O, O, O]);
        let inv = a.inv().unwrap();
        assert_eq!(inv.coeffs(), &[re(1.0); 6]);
        let sq = LaurentSeries::monomial(O, re(1.0), 2, 8);
        let inv = sq.inv().unwrap();
        assert_eq!(inv.valuation(), -2);
        assert_eq!(inv.coefficient(-2).unwrap(), re(1.0));
        assert!(LaurentSeries::zero(O, 4).inv().is_err());
    }

    #[test]
    fn inverse_of_shifted_quadratic() {
        // z² + 1 about dxdy is 2·dxdy·z′ + z′²
        let c = EvenElement::I;
        let a = LaurentSeries::new(c, 0, vec![O, EvenElement::new(0.0, 2.0), re(1.0), O, O, O, O]);
        assert_eq!(a.valuation(), 1);
        let inv = a.inv().unwrap();
        assert_eq!(inv.valuation(), -1);
        assert!(close(inv.leading().unwrap(), EvenElement::new(0.0, -0.5), 1e-16));
        let one = a.mul(&inv).unwrap();
        assert!(close(one.coefficient(0).unwrap(), re(1.0), 1e-15));
        for n in 1..=one.truncation_order() {
            assert!(one.coefficient(n).unwrap().abs() <= 1e-12);
        }
    }

    #[test]
    fn sine_over_cube() {
        let s = entire_series(EntireKind::Sin, re(1.0), O, 8).unwrap();
        let cube = LaurentSeries::monomial(O, re(1.0), 3, 12).inv().unwrap();
        let f = s.mul(&cube).unwrap();
        assert_eq!(f.valuation(), -2);
        assert!(close(f.coefficient(-2).unwrap(), re(1.0), 1e-15));
        assert_eq!(f.coefficient(-1).unwrap(), O);
        assert!(close(f.coefficient(0).unwrap(), re(-1.0 / 6.0), 1e-15));
        assert!(close(f.coefficient(2).unwrap(), re(1.0 / 120.0), 1e-15));
        assert_eq!(f.coefficient(-3).unwrap(), O);
    }

    #[test]
    fn catalog_series() {
        let e = entire_series(EntireKind::Exp, re(1.0), O, 3).unwrap();
        let want = [1.0, 1.0, 0.5, 1.0 / 6.0];
        for (c, w) in e.coeffs().iter().zip(want) {
            assert!(close(*c, re(w), 1e-16));
        }
        let s = entire_series(EntireKind::Sin, re(1.0), O, 5).unwrap();
        assert_eq!(s.valuation(), 1);
        assert_eq!(s.truncation_order(), 5);
        assert!(close(s.coefficient(3).unwrap(), re(-1.0 / 6.0), 1e-16));
        assert!(close(s.coefficient(5).unwrap(), re(1.0 / 120.0), 1e-16));
        assert_eq!(s.coefficient(4).unwrap(), O);

        for t in [0.5, 1.0, 2.0] {
            let e = entire_series(EntireKind::Exp, EvenElement::new(0.0, t), EvenElement::I, 4).unwrap();
            assert!(close(e.coefficient(0).unwrap(), re((-t).exp()), 1e-15));
        }

        let c = entire_series(EntireKind::Cos, re(2.0), O, 4).unwrap();
        assert!(close(c.coefficient(2).unwrap(), re(-2.0), 1e-15));
        assert!(close(c.coefficient(4).unwrap(), re(16.0 / 24.0), 1e-15));
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("cos".parse::<EntireKind>().unwrap(), EntireKind::Cos);
        assert!(matches!("tan".parse::<EntireKind>(), Err(SeriesError::UnknownKind(_))));
        assert!(entire_series(EntireKind::Exp, re(1.0), O, -1).is_err());
    }

    #[test]
    fn window_errors_and_centers() {
        let a = LaurentSeries::new(O, -1, vec![re(1.0), re(2.0)]);
        assert!(matches!(a.coefficient(1), Err(SeriesError::OutsideWindow { .. })));
        assert_eq!(a.coefficient(-5).unwrap(), O);
        let b = LaurentSeries::new(EvenElement::I, 0, vec![re(1.0)]);
        assert!(matches!(a.mul(&b), Err(SeriesError::CenterMismatch(..))));
    }

    #[test]
    fn snapping_drops_dust() {
        let a = LaurentSeries::new(O, -2, vec![re(1e-17), re(1.0), re(3.0)]);
        assert_eq!(a.valuation(), -1);
        assert_eq!(a.truncation_order(), 0);
        assert_eq!(a.coeffs().len() as i32, a.truncation_order() - a.valuation() + 1);
        let z = LaurentSeries::new(O, 0, vec![O, O]);
        assert!(z.is_zero());
        assert_eq!(z.valuation(), z.truncation_order() + 1);
    }
}
