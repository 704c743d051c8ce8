use std::fmt;

use crate::clifford::EvenElement;
use crate::series::{entire_series, EntireKind, LaurentSeries, DEFAULT_WINDOW};

use super::expr::Expr;
use super::poly::Poly;
use super::roots::{find_roots, vanishing_order, Root, CLUSTER_TOL, VANISH_TOL};
use super::ModelError;

/// `kind(scale·z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntireFactor {
    pub kind: EntireKind,
    pub scale: EvenElement,
}

impl EntireFactor {
    pub fn new(kind: EntireKind, scale: EvenElement) -> Self {
        Self { kind, scale }
    }

    pub fn eval(&self, z: EvenElement) -> EvenElement {
        self.kind.eval(self.scale * z)
    }

    fn has_zero_at(&self, z: EvenElement) -> bool {
        let w = self.scale * z;
        match self.kind {
            EntireKind::Exp => false,
            EntireKind::Sin | EntireKind::Cos => {
                let value = self.kind.eval(w).abs();
                let slope = self.kind.derivative(w, 1).abs();
                value <= VANISH_TOL * slope.max(1.0)
            }
        }
    }
}

impl fmt::Display for EntireFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(({})·z)", self.kind, self.scale)
    }
}

/// An isolated pole of finite order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pole {
    pub location: EvenElement,
    pub order: usize,
    /// Multiplicity of the location as a root of the (reduced) denominator;
    /// exceeds `order` when a zero of the entire factor sits on it.
    pub den_multiplicity: usize,
}

/// `num(z)/den(z) · factor(z)` with `den` monic and no root shared with `num`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeromorphicFunction {
    num: Poly,
    den: Poly,
    factor: Option<EntireFactor>,
    den_roots: Vec<Root>,
}

impl MeromorphicFunction {
    /// Normalizes (monic denominator, shared roots cancelled) and locates
    /// the denominator's roots.
    pub fn new(num: Poly, den: Poly, factor: Option<EntireFactor>) -> Result<Self, ModelError> {
        let Some(lead) = den.leading() else {
            return Err(ModelError::ZeroDenominator);
        };
        let factor = factor.filter(|f| !f.scale.is_zero() || f.kind == EntireKind::Sin);
        let vanishes = matches!(factor, Some(f) if f.kind == EntireKind::Sin && f.scale.is_zero());
        if num.is_zero() || vanishes {
            return Ok(Self::from_parts(Poly::zero(), Poly::one(), None, Vec::new()));
        }
        let inv_lead = EvenElement::ONE / lead;
        let mut num = num.scale(inv_lead);
        let den = den.scale(inv_lead);
        let mut roots = find_roots(&den)?;

        let mut cancelled = false;
        for root in roots.iter_mut() {
            let shared = vanishing_order(&num, root.location, VANISH_TOL).min(root.multiplicity);
            for _ in 0..shared {
                num = num.deflate(root.location);
            }
            if shared > 0 {
                root.multiplicity -= shared;
                cancelled = true;
            }
        }
        roots.retain(|r| r.multiplicity > 0);
        let den = if cancelled {
            Poly::from_roots(
                roots
                    .iter()
                    .map(|r| (r.location, r.multiplicity))
                    .collect::<Vec<_>>()
                    .iter(),
            )
        } else {
            den
        };
        Ok(Self::from_parts(num, den, factor, roots))
    }

    fn from_parts(num: Poly, den: Poly, factor: Option<EntireFactor>, den_roots: Vec<Root>) -> Self {
        Self {
            num,
            den,
            factor,
            den_roots,
        }
    }

    pub fn rational(num: Poly, den: Poly) -> Result<Self, ModelError> {
        Self::new(num, den, None)
    }

    /// `factor(z) / Π (z - r)^m` built directly from known poles, without
    /// root finding.
    pub fn from_poles(num: Poly, poles: &[(EvenElement, usize)], factor: Option<EntireFactor>) -> Self {
        let roots: Vec<Root> = poles
            .iter()
            .filter(|p| p.1 > 0)
            .map(|&(location, multiplicity)| Root { location, multiplicity })
            .collect();
        let den = Poly::from_roots(poles.iter());
        Self::from_parts(num, den, factor, roots)
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn factor(&self) -> Option<EntireFactor> {
        self.factor
    }

    pub fn den_roots(&self) -> &[Root] {
        &self.den_roots
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Direct evaluation of `num/den · factor`.
    pub fn eval(&self, z: EvenElement) -> EvenElement {
        let r = self.num.eval(z) / self.den.eval(z);
        match self.factor {
            Some(f) => r * f.eval(z),
            None => r,
        }
    }

    pub fn scaled(&self, c: EvenElement) -> Self {
        if c.is_zero() {
            return Self::from_parts(Poly::zero(), Poly::one(), None, Vec::new());
        }
        Self {
            num: self.num.scale(c),
            ..self.clone()
        }
    }

    /// Sum of two functions carrying the same entire factor.
    pub fn add(&self, other: &Self) -> Result<Self, ModelError> {
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.factor != other.factor {
            return Err(ModelError::Unsupported(
                "sums of different entire factors are not meromorphic functions of the supported form".into(),
            ));
        }
        let num = &(&self.num * &other.den) + &(&other.num * &self.den);
        let den = &self.den * &other.den;
        Self::new(num, den, self.factor)
    }

    fn root_at(&self, z: EvenElement) -> Option<usize> {
        self.den_roots
            .iter()
            .position(|r| (r.location - z).abs() <= CLUSTER_TOL * (1.0 + r.location.abs()))
    }

    /// All poles with their orders. Zeros of a `sin`/`cos` factor lower the
    /// order of a coinciding denominator root.
    pub fn find_poles(&self) -> Vec<Pole> {
        self.den_roots
            .iter()
            .filter_map(|r| {
                let mut order = r.multiplicity;
                if let Some(f) = self.factor {
                    if f.has_zero_at(r.location) {
                        order -= 1;
                    }
                }
                (order > 0).then_some(Pole {
                    location: r.location,
                    order,
                    den_multiplicity: r.multiplicity,
                })
            })
            .collect()
    }

    /// The pole at `z`, if there is one.
    pub fn pole_at(&self, z: EvenElement) -> Option<Pole> {
        let i = self.root_at(z)?;
        self.find_poles()
            .into_iter()
            .find(|p| p.location == self.den_roots[i].location)
    }

    /// Distance from `z` to the nearest denominator root other than one at `z`.
    pub fn clearance(&self, z: EvenElement) -> f64 {
        let own = self.root_at(z);
        self.den_roots
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != own)
            .map(|(_, r)| (r.location - z).abs())
            .fold(f64::INFINITY, f64::min)
    }

    /// `(z - location)^order · f`, regular at `location`.
    pub fn regular_part(&self, pole: &Pole) -> Self {
        let mut roots = Vec::new();
        for r in &self.den_roots {
            if (r.location - pole.location).abs() <= CLUSTER_TOL * (1.0 + r.location.abs()) {
                let left = r.multiplicity.saturating_sub(pole.order);
                if left > 0 {
                    roots.push((pole.location, left));
                }
            } else {
                roots.push((r.location, r.multiplicity));
            }
        }
        Self::from_poles(self.num.clone(), &roots, self.factor)
    }

    /// Evaluates `(z - location)^order · f` at `z` without forming the
    /// cancelling powers.
    pub fn eval_regular_part(&self, pole: &Pole, z: EvenElement) -> EvenElement {
        self.regular_part(pole).eval_factored(z)
    }

    /// Evaluates with the denominator kept as a product over its roots.
    pub fn eval_factored(&self, z: EvenElement) -> EvenElement {
        let mut den = EvenElement::ONE;
        for r in &self.den_roots {
            den *= (z - r.location).powi(r.multiplicity as i32).unwrap_or(EvenElement::ONE);
        }
        let v = self.num.eval(z) / den;
        match self.factor {
            Some(f) => v * f.eval(z),
            None => v,
        }
    }

    /// Laurent series of `f` about `center` with `window` coefficients
    /// starting at its valuation.
    pub fn local_expansion(&self, center: EvenElement, window: usize) -> Result<LaurentSeries, ModelError> {
        if window < 1 {
            return Err(ModelError::InvalidWindow(window));
        }
        let w = window as i32;
        if self.is_zero() {
            return Ok(LaurentSeries::zero(center, w - 1));
        }

        // denominator around the center: exact factorization when the center
        // is one of its roots
        let (den_val, other_factor) = match self.root_at(center) {
            Some(i) => {
                let shifted: Vec<(EvenElement, usize)> = self
                    .den_roots
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, r)| (r.location - center, r.multiplicity))
                    .collect();
                (
                    self.den_roots[i].multiplicity as i32,
                    Some(Poly::from_roots(shifted.iter())),
                )
            }
            None => (0, None),
        };
        let den_series = |order: i32| -> LaurentSeries {
            match &other_factor {
                Some(q) => {
                    let coeffs = q.coeffs().to_vec();
                    let mut c = coeffs;
                    let len = (order - den_val + 1).max(1) as usize;
                    c.resize(len.max(c.len()), EvenElement::ZERO);
                    c.truncate(len);
                    LaurentSeries::new(center, 0, c).shift(den_val)
                }
                None => self.den.to_series(center, order),
            }
        };

        let probe = (self.num.coeffs().len() + self.den.coeffs().len() + 2) as i32;
        let v_num = self.num.to_series(center, probe).valuation();
        let v_den = den_series(probe + den_val).valuation();
        let v_fac = match self.factor {
            Some(f) => entire_series(f.kind, f.scale, center, 4)?.valuation(),
            None => 0,
        };

        let top = v_num + v_fac - v_den + w - 1;
        let num = self.num.to_series(center, top + v_den);
        let den = den_series(top - v_num - v_fac + 2 * v_den);
        let mut out = num.mul(&den.inv()?)?;
        if let Some(f) = self.factor {
            let fac = entire_series(f.kind, f.scale, center, (top + v_den - v_num).max(0))?;
            out = out.mul(&fac)?;
        }
        Ok(out.truncate(top))
    }
}

impl fmt::Display for MeromorphicFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)?;
        if let Some(fac) = self.factor {
            write!(f, " · {fac}")?;
        }
        Ok(())
    }
}

pub fn find_poles(f: &MeromorphicFunction) -> Result<Vec<Pole>, ModelError> {
    Ok(f.find_poles())
}

pub fn local_expansion(
    f: &MeromorphicFunction,
    center: EvenElement,
    window: usize,
) -> Result<LaurentSeries, ModelError> {
    f.local_expansion(center, window)
}

/// [`local_expansion`] with the default window.
pub fn default_expansion(f: &MeromorphicFunction, center: EvenElement) -> Result<LaurentSeries, ModelError> {
    f.local_expansion(center, DEFAULT_WINDOW)
}

#[derive(Debug, Clone)]
struct Term {
    num: Poly,
    den: Poly,
    factor: Option<EntireFactor>,
}

impl Term {
    fn constant(c: EvenElement) -> Self {
        Self {
            num: Poly::constant(c),
            den: Poly::one(),
            factor: None,
        }
    }

    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

fn merge_factors(a: Option<EntireFactor>, b: Option<EntireFactor>) -> Result<Option<EntireFactor>, ModelError> {
    match (a, b) {
        (None, f) | (f, None) => Ok(f),
        (Some(x), Some(y)) if x.kind == EntireKind::Exp && y.kind == EntireKind::Exp => {
            let scale = x.scale + y.scale;
            Ok((!scale.is_zero()).then_some(EntireFactor::new(EntireKind::Exp, scale)))
        }
        _ => Err(ModelError::Unsupported(
            "products of sin/cos factors are outside the exp/sin/cos catalog".into(),
        )),
    }
}

fn invert_factor(f: Option<EntireFactor>) -> Result<Option<EntireFactor>, ModelError> {
    match f {
        None => Ok(None),
        Some(f) if f.kind == EntireKind::Exp => Ok(Some(EntireFactor::new(EntireKind::Exp, -f.scale))),
        Some(f) => Err(ModelError::Unsupported(format!(
            "{} factor in a denominator: its zeros would be poles outside the rational part",
            f.kind
        ))),
    }
}

fn convert(e: &Expr) -> Result<Term, ModelError> {
    Ok(match e {
        Expr::Num(c) => Term::constant(EvenElement::real(*c)),
        Expr::Unit => Term::constant(EvenElement::I),
        Expr::Z => Term {
            num: Poly::new(vec![EvenElement::ZERO, EvenElement::ONE]),
            den: Poly::one(),
            factor: None,
        },
        Expr::X | Expr::Y => {
            return Err(ModelError::Unsupported(
                "x and y as separate coordinates do not define a function of z".into(),
            ))
        }
        Expr::Neg(a) => {
            let t = convert(a)?;
            Term { num: -&t.num, ..t }
        }
        Expr::Add(a, b) | Expr::Sub(a, b) => {
            let l = convert(a)?;
            let mut r = convert(b)?;
            if matches!(e, Expr::Sub(..)) {
                r.num = -&r.num;
            }
            if l.is_zero() {
                return Ok(r);
            }
            if r.is_zero() {
                return Ok(l);
            }
            if l.factor != r.factor {
                return Err(ModelError::Unsupported(
                    "a sum whose terms carry different entire factors".into(),
                ));
            }
            Term {
                num: &(&l.num * &r.den) + &(&r.num * &l.den),
                den: &l.den * &r.den,
                factor: l.factor,
            }
        }
        Expr::Mul(a, b) => {
            let l = convert(a)?;
            let r = convert(b)?;
            if l.is_zero() || r.is_zero() {
                return Ok(Term::constant(EvenElement::ZERO));
            }
            Term {
                num: &l.num * &r.num,
                den: &l.den * &r.den,
                factor: merge_factors(l.factor, r.factor)?,
            }
        }
        Expr::Div(a, b) => {
            let l = convert(a)?;
            let r = convert(b)?;
            if r.is_zero() {
                return Err(ModelError::DivisionByZero);
            }
            Term {
                num: &l.num * &r.den,
                den: &l.den * &r.num,
                factor: merge_factors(l.factor, invert_factor(r.factor)?)?,
            }
        }
        Expr::Pow(a, n) => {
            let t = convert(a)?;
            let k = n.unsigned_abs();
            let factor = match t.factor {
                None => None,
                Some(f) if f.kind == EntireKind::Exp => {
                    let s = f.scale * f64::from(*n);
                    (!s.is_zero()).then_some(EntireFactor::new(EntireKind::Exp, s))
                }
                Some(_) if *n == 0 => None,
                Some(f) if *n == 1 => Some(f),
                Some(f) => {
                    return Err(ModelError::Unsupported(format!(
                        "power {n} of a {} factor is outside the exp/sin/cos catalog",
                        f.kind
                    )))
                }
            };
            if *n < 0 {
                if t.is_zero() {
                    return Err(ModelError::DivisionByZero);
                }
                Term {
                    num: t.den.pow(k),
                    den: t.num.pow(k),
                    factor,
                }
            } else {
                Term {
                    num: t.num.pow(k),
                    den: t.den.pow(k),
                    factor,
                }
            }
        }
        Expr::Call(kind, arg) => {
            let t = convert(arg)?;
            if t.factor.is_some() {
                return Err(ModelError::Unsupported(format!(
                    "nested entire functions inside {kind}(...) are not supported"
                )));
            }
            if t.den.degree() != Some(0) || t.num.degree().unwrap_or(0) > 1 {
                return Err(ModelError::Unsupported(format!(
                    "the argument of {kind} must be c·z for a constant c"
                )));
            }
            let d = t.den.coeffs()[0];
            let c0 = t.num.coeffs().first().copied().unwrap_or_default() / d;
            let c1 = t.num.coeffs().get(1).copied().unwrap_or_default() / d;
            if c1.is_zero() {
                return Ok(Term::constant(kind.eval(c0)));
            }
            if !c0.is_zero() {
                return Err(ModelError::Unsupported(format!(
                    "the argument of {kind} must be c·z, without a constant offset"
                )));
            }
            Term {
                num: Poly::one(),
                den: Poly::one(),
                factor: Some(EntireFactor::new(*kind, c1)),
            }
        }
    })
}

/// Converts a parsed expression to normalized form.
pub fn to_meromorphic(e: &Expr) -> Result<MeromorphicFunction, ModelError> {
    let t = convert(e)?;
    MeromorphicFunction::new(t.num, t.den, t.factor)
}
