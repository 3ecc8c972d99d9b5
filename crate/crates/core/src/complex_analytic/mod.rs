//! Complex arithmetic and the closed term language used for Weierstrass
//! data: Laurent monomials plus exponentials, with exact differentiation,
//! term-wise integration, Taylor/Laurent expansion at zeros, and
//! finite-difference Wirtinger derivatives as an independent check.

mod expr;
mod series;
mod wirtinger;

pub use num_complex::Complex64 as Complex;

pub use expr::{AnalyticExpr, Term};
pub use series::{conj_laurent, horner, principal_part, reciprocal_series, ZeroExpansion};
pub use wirtinger::{wirtinger_fd, DEFAULT_FD_STEP};

/// Distance below which a point counts as sitting on a pole center.
pub const POLE_TOL: f64 = 1e-12;
/// Magnitude below which a Taylor coefficient counts as zero.
pub const ZERO_TOL: f64 = 1e-12;

pub const I: Complex = Complex { re: 0.0, im: 1.0 };
