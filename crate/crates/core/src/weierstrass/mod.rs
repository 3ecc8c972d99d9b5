//! Exact elastic maps of `E_λ` built from holomorphic data.
//!
//! Given holomorphic `h` with antiderivatives `H = ∫h`, `G = ∫h²`, the map
//!
//! ```text
//! f = ½ G + λ/(1+λ) · H / conj(h) + conj(k)
//! ```
//!
//! is a strict minimizer once the meromorphic `k` cancels the poles of
//! `H/conj(h)` at the zeros of `h`. Its Wirtinger derivatives are
//! `f_z = ½ h² + λ/(1+λ) · h/conj(h)` and
//! `f_z̄ = conj(k') − λ/(1+λ) · H conj(h') / conj(h)²`, and
//! `g = (1+λ) f_z − λ f_z/|f_z| = (1+λ)/2 · h²` is holomorphic.

mod datum;
mod map;
mod special;

pub use datum::{
    compensating_k, strict_minimizer_certificate, validate_zero_count, CertificateReport,
    MeromorphicK, WeierstrassDatum, Zero,
};
pub use map::{build_elastic_map, WeierstrassMap};
pub use special::{
    special_map, AffineMap, BorderlineMap, MeltingMap, OddZeroMap, SpecialKind,
    ODD_ZERO_DEFAULT_RADIUS,
};

use crate::complex_analytic::Complex;
use crate::error::{Error, Result};

/// Below this `|f_z|` the phase of `f_z` is meaningless.
pub const BRANCH_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapSource {
    Weierstrass,
    Borderline,
    Melting,
    OddZeroExample,
    Affine,
}

/// Wirtinger derivatives at one point.
///
/// At a branch point (a zero of `h`) `f_z` has the well-defined modulus
/// `λ/(1+λ)` but no limiting phase; the reported value then uses phase 0
/// and `phase_defined` is false.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointDerivatives {
    pub fz: Complex,
    pub fzbar: Complex,
    pub phase_defined: bool,
}

impl PointDerivatives {
    pub fn regular(fz: Complex, fzbar: Complex) -> Self {
        PointDerivatives {
            fz,
            fzbar,
            phase_defined: true,
        }
    }
}

/// A planar map with closed-form Wirtinger derivatives.
pub trait ElasticMap: Send + Sync {
    fn lambda(&self) -> f64;

    fn source(&self) -> MapSource;

    fn f(&self, z: Complex) -> Result<Complex>;

    fn derivatives(&self, z: Complex) -> Result<PointDerivatives>;

    fn fz(&self, z: Complex) -> Result<Complex> {
        Ok(self.derivatives(z)?.fz)
    }

    fn fzbar(&self, z: Complex) -> Result<Complex> {
        Ok(self.derivatives(z)?.fzbar)
    }
}

/// `g = (1+λ) f_z − λ f_z / |f_z|`, holomorphic for elastic maps.
pub fn g_of<M: ElasticMap + ?Sized>(map: &M, z: Complex) -> Result<Complex> {
    g_from_fz(map.fz(z)?, map.lambda(), z)
}

/// Same as [`g_of`] for an already computed `f_z`.
pub fn g_from_fz(fz: Complex, lambda: f64, at: Complex) -> Result<Complex> {
    let r = fz.norm();
    if r < BRANCH_TOL {
        return Err(Error::BranchPoint { at });
    }
    Ok(fz * (1.0 + lambda) - fz * (lambda / r))
}

/// Five-point Laplacian of `arg f_z` at `z`; phase differences are taken
/// as `arg(f_z(z ± δ)/f_z(z))` so the result is insensitive to wrapping.
pub fn arg_fz_laplacian<M: ElasticMap + ?Sized>(map: &M, z: Complex, step: f64) -> Result<f64> {
    let center = map.fz(z)?;
    let mut acc = 0.0;
    for d in [
        Complex::new(step, 0.0),
        Complex::new(-step, 0.0),
        Complex::new(0.0, step),
        Complex::new(0.0, -step),
    ] {
        acc += (map.fz(z + d)? / center).arg();
    }
    Ok(acc / (step * step))
}
