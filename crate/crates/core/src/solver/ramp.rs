use std::collections::BTreeMap;

use super::{minimize, Constraints, SolveReport, SolverConfig};
use crate::error::{Error, Result};
use crate::mesh_elasticity::{DeformedState, PotentialV, TriangleMesh};

/// Move the pins linearly from their reference positions to the targets in
/// `cfg.ramp_steps` increments, warm-starting each solve from the last.
pub fn ramp_solve(
    mesh: &TriangleMesh,
    cons_target: &Constraints,
    v: &PotentialV,
    cfg: &SolverConfig,
) -> Result<Vec<(DeformedState, SolveReport)>> {
    if cons_target.is_empty() {
        return Err(Error::InvalidParameter(
            "ramp needs at least one pinned vertex".into(),
        ));
    }
    cons_target.check(mesh)?;
    let reference = mesh.vertices();
    let path = |s: f64| -> Result<Constraints> {
        if s >= 1.0 {
            return Ok(cons_target.clone());
        }
        let pinned: BTreeMap<_, _> = cons_target
            .pinned()
            .iter()
            .map(|(&i, &z)| (i, reference[i] + (z - reference[i]) * s))
            .collect();
        Constraints::new(pinned)
    };
    ramp_solve_path(
        mesh,
        &DeformedState::identity(mesh),
        cfg.ramp_steps,
        path,
        v,
        cfg,
    )
}

/// Continuation along an arbitrary load path: step `k` of `steps` solves
/// with the constraints `path(k / steps)`.
pub fn ramp_solve_path(
    mesh: &TriangleMesh,
    init: &DeformedState,
    steps: usize,
    path: impl Fn(f64) -> Result<Constraints>,
    v: &PotentialV,
    cfg: &SolverConfig,
) -> Result<Vec<(DeformedState, SolveReport)>> {
    if steps == 0 {
        return Err(Error::InvalidParameter(
            "ramp needs at least one step".into(),
        ));
    }
    let mut out: Vec<(DeformedState, SolveReport)> = Vec::with_capacity(steps);
    let mut current = init.clone();
    for step in 1..=steps {
        let cons = path(step as f64 / steps as f64)?;
        let (state, report) =
            minimize(mesh, &current, &cons, v, cfg).map_err(|e| Error::RampStep {
                step,
                source: Box::new(e),
            })?;
        current = state.clone();
        out.push((state, report));
    }
    Ok(out)
}
