//! Kähler algebra of the real plane.
//!
//! The full algebra is four dimensional with basis `{1, dx, dy, dxdy}` and
//! relations `dx² = dy² = 1`, `dxdy = -dydx`, hence `(dxdy)² = -1`.
//! Its even part `u + v·dxdy` is commutative and plays the role usually
//! given to complex numbers: `z = x + y·dxdy`.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("division by zero: the zero element has no inverse")]
    DivisionByZero,
    #[error("expected a 1-form (grade 1), found scalar {scalar} and dxdy {pseudo}")]
    NotGradeOne { scalar: f64, pseudo: f64 },
    #[error("the zero element has no polar form")]
    ZeroHasNoPolarForm,
}

/// General element `s + a·dx + b·dy + p·dxdy`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Multivector {
    pub s: f64,
    pub a: f64,
    pub b: f64,
    pub p: f64,
}

impl Multivector {
    pub const ONE: Multivector = Multivector::new(1.0, 0.0, 0.0, 0.0);
    pub const DX: Multivector = Multivector::new(0.0, 1.0, 0.0, 0.0);
    pub const DY: Multivector = Multivector::new(0.0, 0.0, 1.0, 0.0);
    pub const DXDY: Multivector = Multivector::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(s: f64, a: f64, b: f64, p: f64) -> Self {
        Self { s, a, b, p }
    }

    pub const fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0, 0.0)
    }

    /// The 1-form `a·dx + b·dy`.
    pub const fn one_form(a: f64, b: f64) -> Self {
        Self::new(0.0, a, b, 0.0)
    }

    /// Clifford product `self · rhs`.
    pub fn product(self, rhs: Self) -> Self {
        let (l, r) = (self, rhs);
        Self {
            s: l.s * r.s + l.a * r.a + l.b * r.b - l.p * r.p,
            a: l.s * r.a + l.a * r.s - l.b * r.p + l.p * r.b,
            b: l.s * r.b + l.a * r.p + l.b * r.s - l.p * r.a,
            p: l.s * r.p + l.a * r.b - l.b * r.a + l.p * r.s,
        }
    }

    /// Even part `s + p·dxdy`.
    pub fn even_part(self) -> EvenElement {
        EvenElement::new(self.s, self.p)
    }

    pub fn is_one_form(self) -> bool {
        self.s == 0.0 && self.p == 0.0
    }

    pub fn scale(self, k: f64) -> Self {
        Self::new(self.s * k, self.a * k, self.b * k, self.p * k)
    }
}

impl Add for Multivector {
    type Output = Self;
    fn add(self, r: Self) -> Self {
        Self::new(self.s + r.s, self.a + r.a, self.b + r.b, self.p + r.p)
    }
}

impl Sub for Multivector {
    type Output = Self;
    fn sub(self, r: Self) -> Self {
        Self::new(self.s - r.s, self.a - r.a, self.b - r.b, self.p - r.p)
    }
}

impl Mul for Multivector {
    type Output = Self;
    fn mul(self, r: Self) -> Self {
        self.product(r)
    }
}

impl From<EvenElement> for Multivector {
    fn from(e: EvenElement) -> Self {
        Multivector::new(e.u, 0.0, 0.0, e.v)
    }
}

/// Free-function form of [`Multivector::product`].
pub fn mv_product(a: Multivector, b: Multivector) -> Multivector {
    a.product(b)
}

/// `α·β = ½(αβ + βα)` for two 1-forms; the metric inner product.
pub fn dot_one_forms(alpha: Multivector, beta: Multivector) -> Result<f64, AlgebraError> {
    for f in [alpha, beta] {
        if !f.is_one_form() {
            return Err(AlgebraError::NotGradeOne {
                scalar: f.s,
                pseudo: f.p,
            });
        }
    }
    let sym = (alpha.product(beta) + beta.product(alpha)).scale(0.5);
    Ok(sym.s)
}

/// Element `u + v·dxdy` of the even subalgebra.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EvenElement {
    pub u: f64,
    pub v: f64,
}

impl EvenElement {
    pub const ZERO: EvenElement = EvenElement::new(0.0, 0.0);
    pub const ONE: EvenElement = EvenElement::new(1.0, 0.0);
    /// `dxdy` itself.
    pub const I: EvenElement = EvenElement::new(0.0, 1.0);

    pub const fn new(u: f64, v: f64) -> Self {
        Self { u, v }
    }

    pub const fn real(u: f64) -> Self {
        Self::new(u, 0.0)
    }

    /// `u - v·dxdy`.
    pub fn conj(self) -> Self {
        Self::new(self.u, -self.v)
    }

    /// `ρ² = u² + v²`.
    pub fn norm_sq(self) -> f64 {
        self.u * self.u + self.v * self.v
    }

    pub fn abs(self) -> f64 {
        self.u.hypot(self.v)
    }

    pub fn is_zero(self) -> bool {
        self.u == 0.0 && self.v == 0.0
    }

    pub fn is_finite(self) -> bool {
        self.u.is_finite() && self.v.is_finite()
    }

    pub fn scale(self, k: f64) -> Self {
        Self::new(self.u * k, self.v * k)
    }

    pub fn inv(self) -> Result<Self, AlgebraError> {
        let n = self.norm_sq();
        if n == 0.0 {
            return Err(AlgebraError::DivisionByZero);
        }
        if !n.is_finite() {
            // avoid overflow in u² + v² for huge finite components
            let s = self.u.abs().max(self.v.abs());
            let t = self.scale(1.0 / s);
            return Ok(t.conj().scale(1.0 / (t.norm_sq() * s)));
        }
        Ok(self.conj().scale(1.0 / n))
    }

    /// Integer power by repeated squaring; negative powers go through [`inv`](Self::inv).
    pub fn powi(self, m: i32) -> Result<Self, AlgebraError> {
        let base = if m < 0 { self.inv()? } else { self };
        let mut e = m.unsigned_abs();
        let mut acc = EvenElement::ONE;
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc *= sq;
            }
            e >>= 1;
            if e > 0 {
                sq = sq * sq;
            }
        }
        Ok(acc)
    }

    pub fn to_polar(self) -> Result<PolarForm, AlgebraError> {
        PolarForm::from_even(self)
    }

    pub fn exp(self) -> Self {
        let r = self.u.exp();
        Self::new(r * self.v.cos(), r * self.v.sin())
    }

    pub fn sin(self) -> Self {
        Self::new(self.u.sin() * self.v.cosh(), self.u.cos() * self.v.sinh())
    }

    pub fn cos(self) -> Self {
        Self::new(self.u.cos() * self.v.cosh(), -self.u.sin() * self.v.sinh())
    }

    /// Embeds `self` into the full algebra.
    pub fn to_multivector(self) -> Multivector {
        self.into()
    }
}

impl Add for EvenElement {
    type Output = Self;
    fn add(self, r: Self) -> Self {
        Self::new(self.u + r.u, self.v + r.v)
    }
}

impl Sub for EvenElement {
    type Output = Self;
    fn sub(self, r: Self) -> Self {
        Self::new(self.u - r.u, self.v - r.v)
    }
}

impl Neg for EvenElement {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.u, -self.v)
    }
}

impl Mul for EvenElement {
    type Output = Self;
    fn mul(self, r: Self) -> Self {
        Self::new(self.u * r.u - self.v * r.v, self.u * r.v + r.u * self.v)
    }
}

impl Mul<f64> for EvenElement {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        self.scale(k)
    }
}

/// Division by zero yields non-finite components, like `f64`; use
/// [`EvenElement::inv`] for a checked inverse.
impl Div for EvenElement {
    type Output = Self;
    fn div(self, r: Self) -> Self {
        let n = r.norm_sq();
        let num = self * r.conj();
        Self::new(num.u / n, num.v / n)
    }
}

impl Div<f64> for EvenElement {
    type Output = Self;
    fn div(self, k: f64) -> Self {
        Self::new(self.u / k, self.v / k)
    }
}

impl AddAssign for EvenElement {
    fn add_assign(&mut self, r: Self) {
        *self = *self + r;
    }
}

impl SubAssign for EvenElement {
    fn sub_assign(&mut self, r: Self) {
        *self = *self - r;
    }
}

impl MulAssign for EvenElement {
    fn mul_assign(&mut self, r: Self) {
        *self = *self * r;
    }
}

impl std::iter::Sum for EvenElement {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(EvenElement::ZERO, |a, b| a + b)
    }
}

impl From<f64> for EvenElement {
    fn from(u: f64) -> Self {
        Self::real(u)
    }
}

/// Renders as `u + v·dxdy` (or `u - |v|·dxdy`).
impl fmt::Display for EvenElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.v.is_sign_negative() && !self.v.is_nan() {
            write!(f, "{} - {}·dxdy", self.u, -self.v)
        } else {
            write!(f, "{} + {}·dxdy", self.u, self.v)
        }
    }
}

pub fn even_mul(a: EvenElement, b: EvenElement) -> EvenElement {
    a * b
}

pub fn even_inv(a: EvenElement) -> Result<EvenElement, AlgebraError> {
    a.inv()
}

pub fn even_int_pow(a: EvenElement, m: i32) -> Result<EvenElement, AlgebraError> {
    a.powi(m)
}

/// `ρ·(cos φ + sin φ·dxdy)` with `φ ∈ (-π, π]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarForm {
    pub rho: f64,
    pub phi: f64,
}

impl PolarForm {
    pub fn from_even(e: EvenElement) -> Result<Self, AlgebraError> {
        if e.is_zero() {
            return Err(AlgebraError::ZeroHasNoPolarForm);
        }
        let mut phi = e.v.atan2(e.u);
        if phi <= -PI {
            phi = PI;
        }
        Ok(Self { rho: e.abs(), phi })
    }

    pub fn to_even(self) -> EvenElement {
        EvenElement::new(self.rho * self.phi.cos(), self.rho * self.phi.sin())
    }

    /// `ρ^m (cos mφ + sin mφ·dxdy)`.
    pub fn powi(self, m: i32) -> EvenElement {
        let r = self.rho.powi(m);
        let a = f64::from(m) * self.phi;
        EvenElement::new(r * a.cos(), r * a.sin())
    }
}

/// `dφ = (x dy - y dx)/ρ²` at `z`, obtained as the product `(1/z)·dy`.
pub fn dphi_at(z: EvenElement) -> Result<Multivector, AlgebraError> {
    Ok(z.inv()?.to_multivector().product(Multivector::DY))
}
