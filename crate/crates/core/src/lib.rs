//! Planar elasticity for the distance-squared energy family.
//!
//! Two independent routes to elastic maps live here. [`weierstrass`] and
//! [`annulus`] build exact critical points in closed form from holomorphic
//! data; [`mesh_elasticity`] and [`solver`] minimize the discrete energy on
//! triangle meshes. Each side is used to validate the other.

// `!(x > 0.0)` style checks are used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod annulus;
pub mod complex_analytic;
pub mod error;
pub mod mesh_elasticity;
pub mod solver;
pub mod weierstrass;

pub use complex_analytic::{AnalyticExpr, Complex, Term};
pub use error::{Error, Result};
