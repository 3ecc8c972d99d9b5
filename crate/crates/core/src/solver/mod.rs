//! Minimization of the discrete energy with pinned vertices or a free
//! boundary, plus load-ramp continuation.

mod lbfgs;
mod ramp;
mod rigid;

pub use lbfgs::minimize;
pub use ramp::{ramp_solve, ramp_solve_path};
pub use rigid::{affine_initial_state, best_fit_rigid, perturb, Perturbation, RigidFit};

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::complex_analytic::Complex;
use crate::error::{Error, Result};
use crate::mesh_elasticity::{
    DeformedState, StabilityClass, TriangleMesh, DEFAULT_BRANCH_TOL, DEFAULT_MELTING_TOL,
};

/// Pinned vertices and their targets; empty means a free boundary.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Constraints {
    pinned: BTreeMap<usize, Complex>,
}

impl Constraints {
    pub fn free() -> Self {
        Constraints::default()
    }

    pub fn new(pinned: BTreeMap<usize, Complex>) -> Result<Self> {
        if let Some((i, _)) = pinned.iter().find(|(_, z)| !z.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "target of vertex {i} is not finite"
            )));
        }
        Ok(Constraints { pinned })
    }

    /// Pin `indices` to `target(reference position)`.
    pub fn from_fn(
        mesh: &TriangleMesh,
        indices: impl IntoIterator<Item = usize>,
        target: impl Fn(Complex) -> Complex,
    ) -> Result<Self> {
        let mut pinned = BTreeMap::new();
        for i in indices {
            let z = *mesh
                .vertices()
                .get(i)
                .ok_or_else(|| Error::InvalidParameter(format!("vertex {i} out of range")))?;
            pinned.insert(i, target(z));
        }
        Constraints::new(pinned)
    }

    /// Pin the whole boundary to `target`.
    pub fn boundary(mesh: &TriangleMesh, target: impl Fn(Complex) -> Complex) -> Result<Self> {
        Constraints::from_fn(mesh, mesh.boundary_vertices().iter().copied(), target)
    }

    pub fn pinned(&self) -> &BTreeMap<usize, Complex> {
        &self.pinned
    }

    pub fn is_free(&self) -> bool {
        self.pinned.is_empty()
    }

    pub fn len(&self) -> usize {
        self.pinned.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pinned.is_empty()
    }

    fn check(&self, mesh: &TriangleMesh) -> Result<()> {
        match self.pinned.keys().next_back() {
            Some(&i) if i >= mesh.vertex_count() => Err(Error::InvalidParameter(format!(
                "pinned vertex {i} out of range"
            ))),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    /// Tolerance on `diam · max_k |g_k| / A_k` over free vertices, where
    /// `A_k` is the lumped vertex area.
    pub grad_tol: f64,
    pub max_iters: usize,
    pub history: usize,
    pub ls_shrink: f64,
    pub ls_slope: f64,
    pub ramp_steps: usize,
    pub melting_tol: f64,
    pub branch_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            grad_tol: 1e-8,
            max_iters: 20000,
            history: 8,
            ls_shrink: 0.5,
            ls_slope: 1e-4,
            ramp_steps: 1,
            melting_tol: DEFAULT_MELTING_TOL,
            branch_tol: DEFAULT_BRANCH_TOL,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(format!("solver config: {m}")));
        if !(self.grad_tol > 0.0) {
            return bad("grad_tol must be positive");
        }
        if self.max_iters == 0 || self.history == 0 || self.ramp_steps == 0 {
            return bad("max_iters, history and ramp_steps must be positive");
        }
        if !(self.ls_shrink > 0.0 && self.ls_shrink < 1.0) {
            return bad("ls_shrink must lie in (0, 1)");
        }
        if !(self.ls_slope > 0.0 && self.ls_slope < 0.5) {
            return bad("ls_slope must lie in (0, 0.5)");
        }
        if !(self.melting_tol >= 0.0 && self.branch_tol >= 0.0) {
            return bad("tolerances must be non-negative");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub final_energy: f64,
    pub grad_norm: f64,
    pub iters: usize,
    pub converged: bool,
    /// Energy after each accepted step, starting with the initial energy.
    pub energy_trace: Vec<f64>,
    pub stability: Vec<StabilityClass>,
    /// `1 + V'(|f_z|²)` per triangle.
    pub stability_s: Vec<f64>,
    pub branch_points: Vec<usize>,
    /// Triangles around which the phase of `f_z` winds, with the winding.
    pub phase_windings: Vec<(usize, i32)>,
}

/// State file: one `p x y` line per vertex.
pub fn state_to_text(state: &DeformedState) -> String {
    let mut s = String::with_capacity(32 * state.len());
    for p in state.positions() {
        let _ = writeln!(s, "p {:?} {:?}", p.re, p.im);
    }
    s
}

pub fn state_from_text(text: &str, expected_len: Option<usize>) -> Result<DeformedState> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let bad = || Error::InvalidParameter(format!("state line {}: expected `p x y`", ln + 1));
        if parts.len() != 3 || parts[0] != "p" {
            return Err(bad());
        }
        let x: f64 = parts[1].parse().map_err(|_| bad())?;
        let y: f64 = parts[2].parse().map_err(|_| bad())?;
        out.push(Complex::new(x, y));
    }
    if let Some(n) = expected_len {
        if n != out.len() {
            return Err(Error::InvalidParameter(format!(
                "state has {} positions, expected {n}",
                out.len()
            )));
        }
    }
    DeformedState::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_round_trip() {
        let s =
            DeformedState::new(vec![Complex::new(0.1, -2.5), Complex::new(1e-17, 3.0)]).unwrap();
        let back = state_from_text(&state_to_text(&s), Some(2)).unwrap();
        assert_eq!(back, s);
        assert!(state_from_text("p 1 2\n", Some(2)).is_err());
        assert!(state_from_text("q 1 2\n", None).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        let bad = SolverConfig {
            ls_slope: 0.6,
            ..SolverConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
