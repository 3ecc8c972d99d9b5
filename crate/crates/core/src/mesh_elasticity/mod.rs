//! Discrete elastic energy of piecewise-linear maps on triangle meshes.
//!
//! On each triangle the map is affine, so `f_z` and `f_z̄` are constants and
//! `E_V = Σ A_t · ½(V(|f_z|²) + |f_z̄|²)`.

mod energy;
mod mesh;
pub mod meshgen;
mod potential;
mod stability;

pub use energy::{
    energy, energy_and_gradient, energy_area_identity, energy_change, gradient, image_area,
    triangle_derivatives, triangle_wirtinger, DeformedState, TriangleDerivatives,
};
pub use mesh::{TriangleGeometry, TriangleMesh, DEGENERATE_AREA_TOL};
pub use potential::{PotentialKind, PotentialV, SQRT_EPS};
pub use stability::{
    classify, phase_winding, second_variation, stability_report, stability_report_with,
    StabilityClass, StabilityReport, DEFAULT_BRANCH_TOL, DEFAULT_MELTING_TOL,
};

/// Pairwise (tree) summation in a fixed order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 16 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}
