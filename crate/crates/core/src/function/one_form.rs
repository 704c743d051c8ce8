//! Real 1-forms `α = k dx + g dy` and the closed / Cauchy–Riemann test.

use std::fmt;
use std::sync::Arc;

use crate::clifford::EvenElement;

use super::expr::Expr;
use super::meromorphic::MeromorphicFunction;
use super::ModelError;

type Coefficient = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Finite-difference step for the classification.
pub const DIFF_STEP: f64 = 1e-6;

/// Absolute tolerance, scaled by the local derivative magnitude.
pub const CLASSIFY_TOL: f64 = 1e-5;

/// `α = k dx + g dy`; with `w = k − g·dxdy` this is the form `w dx`.
#[derive(Clone)]
pub struct OneForm {
    k: Coefficient,
    g: Coefficient,
    singularities: Vec<EvenElement>,
}

impl fmt::Debug for OneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OneForm")
            .field("singularities", &self.singularities)
            .finish_non_exhaustive()
    }
}

impl OneForm {
    pub fn from_fns(
        k: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        g: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            k: Arc::new(k),
            g: Arc::new(g),
            singularities: Vec::new(),
        }
    }

    /// Records points the sampler must keep away from.
    pub fn with_singularities(mut self, points: Vec<EvenElement>) -> Self {
        self.singularities = points;
        self
    }

    /// `k = u(w)`, `g = −v(w)` for a function of `z`.
    pub fn from_meromorphic(f: &MeromorphicFunction) -> Self {
        let poles = f.den_roots().iter().map(|r| r.location).collect();
        let fk = f.clone();
        let fg = f.clone();
        Self::from_fns(
            move |x, y| fk.eval(EvenElement::new(x, y)).u,
            move |x, y| -fg.eval(EvenElement::new(x, y)).v,
        )
        .with_singularities(poles)
    }

    /// `k = u(w)`, `g = −v(w)` for an expression in `x`, `y`, `z`.
    pub fn from_w_expr(w: Expr) -> Self {
        let wk = w.clone();
        Self::from_fns(move |x, y| wk.eval_xy(x, y).u, move |x, y| -w.eval_xy(x, y).v)
    }

    /// Separate scalar expressions for `k` and `g`.
    pub fn from_exprs(k: Expr, g: Expr) -> Self {
        Self::from_fns(move |x, y| k.eval_xy(x, y).u, move |x, y| g.eval_xy(x, y).u)
    }

    pub fn k(&self, x: f64, y: f64) -> f64 {
        (self.k)(x, y)
    }

    pub fn g(&self, x: f64, y: f64) -> f64 {
        (self.g)(x, y)
    }

    pub fn singularities(&self) -> &[EvenElement] {
        &self.singularities
    }

    /// `w = k − g·dxdy` at a point.
    pub fn w(&self, x: f64, y: f64) -> EvenElement {
        EvenElement::new(self.k(x, y), -self.g(x, y))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    NotClosed,
    ClosedOnly,
    ClosedAndCr,
}

impl Classification {
    pub fn name(self) -> &'static str {
        match self {
            Classification::NotClosed => "not_closed",
            Classification::ClosedOnly => "closed_only",
            Classification::ClosedAndCr => "closed_and_CR",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Partial derivatives `(k_x, k_y, g_x, g_y)` by central differences.
pub fn partials(w: &OneForm, x: f64, y: f64) -> Result<[f64; 4], ModelError> {
    let h = DIFF_STEP;
    let stencil = [
        w.k(x + h, y),
        w.k(x - h, y),
        w.k(x, y + h),
        w.k(x, y - h),
        w.g(x + h, y),
        w.g(x - h, y),
        w.g(x, y + h),
        w.g(x, y - h),
    ];
    if stencil.iter().any(|v| !v.is_finite()) {
        return Err(ModelError::SampleNearSingularity { x, y });
    }
    let d = |a: f64, b: f64| (a - b) / (2.0 * h);
    Ok([
        d(stencil[0], stencil[1]),
        d(stencil[2], stencil[3]),
        d(stencil[4], stencil[5]),
        d(stencil[6], stencil[7]),
    ])
}

/// Tests `k_y = g_x` (closed) and additionally `k_x = −g_y` (Cauchy–Riemann)
/// at every sample; a property holds only if it holds everywhere.
pub fn classify_one_form(w: &OneForm, samples: &[(f64, f64)]) -> Result<Classification, ModelError> {
    let mut closed = true;
    let mut cr = true;
    for &(x, y) in samples {
        let p = EvenElement::new(x, y);
        if w.singularities.iter().any(|s| (*s - p).abs() <= 1e-6) {
            return Err(ModelError::SampleNearSingularity { x, y });
        }
        let [kx, ky, gx, gy] = partials(w, x, y)?;
        let tol = CLASSIFY_TOL * 1f64.max(kx.abs()).max(ky.abs()).max(gx.abs()).max(gy.abs());
        closed &= (ky - gx).abs() <= tol;
        cr &= (kx + gy).abs() <= tol;
    }
    Ok(match (closed, cr) {
        (false, _) => Classification::NotClosed,
        (true, false) => Classification::ClosedOnly,
        (true, true) => Classification::ClosedAndCr,
    })
}
