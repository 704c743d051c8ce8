//! Residue calculus in the Kähler algebra of the real plane.
//!
//! The complex unit is the 2-form `dxdy`, so `z = x + y·dxdy` is an
//! inhomogeneous differential form and contour integrals of `w dx` are
//! real numbers assembled from residues.
//!
//! ```
//! use kahler::{function_from_str, contour::{integrate_real_line, HalfPlane}, Mode};
//!
//! let h = function_from_str("1/(x^2+1)^2", Mode::RealLine, &[]).unwrap();
//! let r = integrate_real_line(&h, HalfPlane::Auto).unwrap();
//! assert!((r.real_value - std::f64::consts::FRAC_PI_2).abs() < 1e-14);
//! ```

pub mod clifford;
pub mod contour;
pub mod error;
pub mod function;
pub mod oracle;
pub mod regression;
pub mod residue;
pub mod series;

pub use clifford::{EvenElement, Multivector, PolarForm};
pub use error::{Error, Result};
pub use function::{Expr, MeromorphicFunction, Mode, Pole};
pub use series::{EntireKind, LaurentSeries};

/// Parses `text` in the given mode, with named constants bound, and
/// converts it to a meromorphic function.
pub fn function_from_str(text: &str, mode: Mode, bindings: &[(&str, f64)]) -> Result<MeromorphicFunction> {
    let mut parser = function::Parser::new(mode);
    for (name, value) in bindings {
        parser = parser.bind(*name, *value);
    }
    let expr = parser.parse(text)?;
    Ok(function::to_meromorphic(&expr)?)
}
