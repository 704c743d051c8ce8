//! Expressions, the meromorphic-function model, pole discovery and 1-form
//! classification.

use thiserror::Error;

use crate::series::SeriesError;

pub mod expr;
pub mod meromorphic;
pub mod one_form;
pub mod poly;
pub mod roots;

pub use expr::{parse, Expr, Mode, ParseError, Parser};
pub use meromorphic::{find_poles, local_expansion, to_meromorphic, EntireFactor, MeromorphicFunction, Pole};
pub use one_form::{classify_one_form, Classification, OneForm};
pub use poly::Poly;
pub use roots::{find_roots, Root};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("the denominator is the zero polynomial")]
    ZeroDenominator,
    #[error("division by zero")]
    DivisionByZero,
    #[error("unsupported expression: {0}")]
    Unsupported(String),
    #[error("root finding did not converge for a degree-{degree} polynomial (residual {residual:e}); the input is ill-conditioned")]
    RootFinding { degree: usize, residual: f64 },
    #[error("expansion window must hold at least one coefficient, got {0}")]
    InvalidWindow(usize),
    #[error("sample point ({x}, {y}) is within 1e-6 of a singularity or the forms are not finite there")]
    SampleNearSingularity { x: f64, y: f64 },
}
