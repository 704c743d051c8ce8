//! Dense polynomials in `z` with even-element coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::clifford::EvenElement;
use crate::series::LaurentSeries;

/// Coefficients in ascending order; trailing exact zeros are trimmed, so
/// the zero polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly {
    coeffs: Vec<EvenElement>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<EvenElement>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: EvenElement) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(EvenElement::ONE)
    }

    /// `z - root`.
    pub fn linear(root: EvenElement) -> Self {
        Self::new(vec![-root, EvenElement::ONE])
    }

    /// `Π (z - r)^m` over the given roots.
    pub fn from_roots<'a>(roots: impl IntoIterator<Item = &'a (EvenElement, usize)>) -> Self {
        let mut p = Self::one();
        for &(r, m) in roots {
            for _ in 0..m {
                p = &p * &Self::linear(r);
            }
        }
        p
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| EvenElement::real(c)).collect())
    }

    pub fn coeffs(&self) -> &[EvenElement] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<EvenElement> {
        self.coeffs.last().copied()
    }

    /// Horner evaluation.
    pub fn eval(&self, z: EvenElement) -> EvenElement {
        self.coeffs.iter().rev().fold(EvenElement::ZERO, |acc, c| acc * z + *c)
    }

    /// Value and first derivative together.
    pub fn eval_with_derivative(&self, z: EvenElement) -> (EvenElement, EvenElement) {
        let mut p = EvenElement::ZERO;
        let mut dp = EvenElement::ZERO;
        for c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + *c;
        }
        (p, dp)
    }

    /// `Σ |aₖ| |z|ᵏ`, the magnitude scale of an evaluation at `z`.
    pub fn eval_scale(&self, z: EvenElement) -> f64 {
        let r = z.abs();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.abs())
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).fold(0.0, f64::max)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| *c * k as f64)
                .collect(),
        )
    }

    pub fn scale(&self, c: EvenElement) -> Self {
        Self::new(self.coeffs.iter().map(|a| *a * c).collect())
    }

    /// Coefficients of `p(center + w)` as a polynomial in `w`.
    pub fn taylor_shift(&self, center: EvenElement) -> Vec<EvenElement> {
        let n = self.coeffs.len();
        let mut out = self.coeffs.clone();
        // repeated synthetic division by (z - center)
        for k in 0..n {
            for j in (k..n - 1).rev() {
                let next = out[j + 1];
                out[j] += next * center;
            }
        }
        out
    }

    /// Magnitude scales for each shifted coefficient:
    /// `Σₖ |aₖ| C(k, j) |c|^(k-j)`, used as noise references.
    pub fn taylor_scales(&self, center: EvenElement) -> Vec<f64> {
        let abs = Poly::new(self.coeffs.iter().map(|c| EvenElement::real(c.abs())).collect());
        abs.taylor_shift(EvenElement::real(center.abs()))
            .into_iter()
            .map(|c| c.u)
            .collect()
    }

    /// Taylor series about `center`, padded with exact zeros up to `order`.
    pub fn to_series(&self, center: EvenElement, order: i32) -> LaurentSeries {
        let mut coeffs = self.taylor_shift(center);
        let len = (order.max(0) + 1) as usize;
        coeffs.resize(len.max(coeffs.len()), EvenElement::ZERO);
        coeffs.truncate(len);
        LaurentSeries::new(center, 0, coeffs)
    }

    /// Divides by `z - root` and drops the remainder.
    pub fn deflate(&self, root: EvenElement) -> Self {
        let n = self.coeffs.len();
        if n <= 1 {
            return Self::zero();
        }
        let mut q = vec![EvenElement::ZERO; n - 1];
        let mut carry = EvenElement::ZERO;
        for k in (1..n).rev() {
            carry = carry * root + self.coeffs[k];
            q[k - 1] = carry;
        }
        Self::new(q)
    }

    /// Divides through by the leading coefficient.
    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(l) => self.scale(EvenElement::ONE / l),
            None => Self::zero(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, r: &Poly) -> Poly {
        let n = self.coeffs.len().max(r.coeffs.len());
        Poly::new(
            (0..n)
                .map(|k| self.coeffs.get(k).copied().unwrap_or_default() + r.coeffs.get(k).copied().unwrap_or_default())
                .collect(),
        )
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -*c).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, r: &Poly) -> Poly {
        self + &(-r)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, r: &Poly) -> Poly {
        if self.is_zero() || r.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![EvenElement::ZERO; self.coeffs.len() + r.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in r.coeffs.iter().enumerate() {
                out[i + j] += *a * *b;
            }
        }
        Poly::new(out)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let coeff = if c.v == 0.0 {
                format!("{}", c.u)
            } else {
                format!("({c})")
            };
            match k {
                0 => write!(f, "{coeff}")?,
                1 => write!(f, "{coeff}·z")?,
                _ => write!(f, "{coeff}·z^{k}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(x: f64) -> EvenElement {
        EvenElement::real(x)
    }

    #[test]
    fn arithmetic_and_trim() {
        let p = Poly::from_real(&[1.0, 0.0, 1.0]);
        let q = Poly::from_real(&[-1.0, 0.0, -1.0]);
        assert!((&p + &q).is_zero());
        assert_eq!((&p * &p).coeffs(), Poly::from_real(&[1.0, 0.0, 2.0, 0.0, 1.0]).coeffs());
        assert_eq!(p.degree(), Some(2));
        assert_eq!(Poly::zero().degree(), None);
    }

    #[test]
    fn shift_and_deflate() {
        // z² + 1 about dxdy: 2·dxdy·w + w²
        let p = Poly::from_real(&[1.0, 0.0, 1.0]);
        let t = p.taylor_shift(EvenElement::I);
        assert_eq!(t, vec![re(0.0), EvenElement::new(0.0, 2.0), re(1.0)]);
        let d = p.deflate(EvenElement::I);
        assert_eq!(d.coeffs(), &[EvenElement::I, re(1.0)]);
        let from = Poly::from_roots(&[(EvenElement::I, 1), (-EvenElement::I, 1)]);
        assert_eq!(from.coeffs(), p.coeffs());
    }

    #[test]
    fn derivative_and_eval() {
        let p = Poly::from_real(&[3.0, -2.0, 0.0, 1.0]);
        let z = EvenElement::new(0.5, -1.5);
        let (v, dv) = p.eval_with_derivative(z);
        assert_eq!(v, p.eval(z));
        assert_eq!(dv, p.derivative().eval(z));
    }
}
