use std::f64::consts::TAU;

use super::{pairwise_sum, triangle_derivatives, DeformedState, PotentialV, TriangleMesh};
use crate::complex_analytic::Complex;
use crate::error::{Error, Result};

pub const DEFAULT_MELTING_TOL: f64 = 1e-6;
/// Triangles with `|f_z|` below this are reported as branch triangles.
pub const DEFAULT_BRANCH_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StabilityClass {
    StableStrict,
    Melting,
    Unstable,
}

impl StabilityClass {
    pub fn as_str(self) -> &'static str {
        match self {
            StabilityClass::StableStrict => "stable_strict",
            StabilityClass::Melting => "melting",
            StabilityClass::Unstable => "unstable",
        }
    }
}

/// Classify `s = 1 + V'(|f_z|²)`.
pub fn classify(s: f64, melting_tol: f64) -> StabilityClass {
    if s > melting_tol {
        StabilityClass::StableStrict
    } else if s < -melting_tol {
        StabilityClass::Unstable
    } else {
        StabilityClass::Melting
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabilityReport {
    /// `1 + V'(|f_z|²)` per triangle.
    pub s: Vec<f64>,
    pub classes: Vec<StabilityClass>,
    /// Triangles with `|f_z|` below the branch tolerance.
    pub branch_triangles: Vec<usize>,
    /// Triangles around which the phase of `f_z` (interpolated to vertices)
    /// winds, with the winding number.
    pub winding_triangles: Vec<(usize, i32)>,
}

impl StabilityReport {
    pub fn count(&self, class: StabilityClass) -> usize {
        self.classes.iter().filter(|&&c| c == class).count()
    }

    pub fn all(&self, class: StabilityClass) -> bool {
        self.classes.iter().all(|&c| c == class)
    }

    /// Union of the two branch detectors, sorted.
    pub fn branch_points(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .branch_triangles
            .iter()
            .copied()
            .chain(self.winding_triangles.iter().map(|w| w.0))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

pub fn stability_report(
    mesh: &TriangleMesh,
    state: &DeformedState,
    v: &PotentialV,
    melting_tol: f64,
) -> Result<StabilityReport> {
    stability_report_with(mesh, state, v, melting_tol, DEFAULT_BRANCH_TOL)
}

pub fn stability_report_with(
    mesh: &TriangleMesh,
    state: &DeformedState,
    v: &PotentialV,
    melting_tol: f64,
    branch_tol: f64,
) -> Result<StabilityReport> {
    let d = triangle_derivatives(mesh, state)?;
    let s: Vec<f64> = d.iter().map(|(a, _)| 1.0 + v.d1(a.norm_sqr())).collect();
    let classes = s.iter().map(|&x| classify(x, melting_tol)).collect();
    let branch_triangles = d
        .iter()
        .enumerate()
        .filter(|(_, (a, _))| a.norm() < branch_tol)
        .map(|(t, _)| t)
        .collect();
    let fz: Vec<Complex> = d.iter().map(|x| x.0).collect();
    Ok(StabilityReport {
        s,
        classes,
        branch_triangles,
        winding_triangles: phase_winding(mesh, &fz),
    })
}

/// Per-triangle winding of a triangle-wise constant field after
/// area-weighted averaging to the vertices. The windings add up to the
/// winding along the boundary, so each isolated zero or phase singularity
/// is counted once.
pub fn phase_winding(mesh: &TriangleMesh, field: &[Complex]) -> Vec<(usize, i32)> {
    let mut at_vertex = vec![Complex::new(0.0, 0.0); mesh.vertex_count()];
    for ((tri, g), &f) in mesh.triangles().iter().zip(mesh.geometry()).zip(field) {
        for &i in tri {
            at_vertex[i] += f * g.area;
        }
    }
    let mut out = Vec::new();
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let vals = tri.map(|i| at_vertex[i]);
        if vals.iter().any(|x| x.norm() == 0.0) {
            continue;
        }
        let turn: f64 = (0..3).map(|k| (vals[(k + 1) % 3] / vals[k]).arg()).sum();
        let w = (turn / TAU).round() as i32;
        if w != 0 {
            out.push((t, w));
        }
    }
    out
}

/// Second variation of `E_V` along a variation vanishing on the boundary:
/// `Σ A_t (2 V''⟨f_z, h_z⟩² + (1 + V')|h_z|²)`.
pub fn second_variation(
    mesh: &TriangleMesh,
    state: &DeformedState,
    v: &PotentialV,
    variation: &[Complex],
) -> Result<f64> {
    if variation.len() != mesh.vertex_count() {
        return Err(Error::InvalidParameter("variation length mismatch".into()));
    }
    if let Some(&vertex) = mesh
        .boundary_vertices()
        .iter()
        .find(|&&i| variation[i] != Complex::new(0.0, 0.0))
    {
        return Err(Error::VariationOnBoundary { vertex });
    }
    let d = triangle_derivatives(mesh, state)?;
    let terms: Vec<f64> = mesh
        .triangles()
        .iter()
        .zip(mesh.geometry())
        .zip(&d)
        .map(|((tri, g), &(a, _))| {
            let (ha, _) = g.derivatives(tri.map(|i| variation[i]));
            let x = a.norm_sqr();
            let inner = (a * ha.conj()).re;
            g.area * (2.0 * v.d2(x) * inner * inner + (1.0 + v.d1(x)) * ha.norm_sqr())
        })
        .collect();
    Ok(pairwise_sum(&terms))
}

#[cfg(test)]
mod tests {
    use super::super::meshgen;
    use super::*;

    #[test]
    fn classes_of_uniform_states() {
        let m = meshgen::disk(1.0, 12).unwrap();
        let lam = 1.0;
        let v = PotentialV::lambda(lam).unwrap();
        let id = DeformedState::identity(&m);
        let r = stability_report(&m, &id, &v, DEFAULT_MELTING_TOL).unwrap();
        assert!(r.all(StabilityClass::StableStrict));
        assert!(r.s.iter().all(|s| (s - 1.0).abs() < 1e-14));
        let mu = lam / (1.0 + lam);
        let melt = DeformedState::from_fn(&m, |z| z * mu).unwrap();
        let r = stability_report(&m, &melt, &v, DEFAULT_MELTING_TOL).unwrap();
        assert!(r.all(StabilityClass::Melting));
        let bad = DeformedState::from_fn(&m, |z| z * (mu / 2.0)).unwrap();
        let r = stability_report(&m, &bad, &v, DEFAULT_MELTING_TOL).unwrap();
        assert!(r.all(StabilityClass::Unstable));
        assert!(r.s.iter().all(|s| (s + 1.0 + lam).abs() < 1e-12));
        assert!(r.winding_triangles.is_empty());
    }

    #[test]
    fn winding_counts_a_zero_once() {
        let m = meshgen::disk(1.0, 24).unwrap();
        let fz: Vec<Complex> = m
            .triangles()
            .iter()
            .map(|t| {
                let c = (m.vertices()[t[0]] + m.vertices()[t[1]] + m.vertices()[t[2]]) / 3.0;
                (c - Complex::new(0.31, -0.17)) * (c - Complex::new(0.31, -0.17))
            })
            .collect();
        let w = phase_winding(&m, &fz);
        let total: i32 = w.iter().map(|x| x.1).sum();
        assert_eq!(total, 2);
    }

    #[test]
    fn boundary_variation_is_rejected() {
        let m = meshgen::disk(1.0, 8).unwrap();
        let v = PotentialV::lambda(1.0).unwrap();
        let mut h = vec![Complex::new(0.0, 0.0); m.vertex_count()];
        let b = m.boundary_vertices()[0];
        h[b] = Complex::new(1.0, 0.0);
        assert_eq!(
            second_variation(&m, &DeformedState::identity(&m), &v, &h),
            Err(Error::VariationOnBoundary { vertex: b })
        );
    }
}
