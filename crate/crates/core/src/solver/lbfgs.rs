use std::collections::VecDeque;

use super::{Constraints, SolveReport, SolverConfig};
use crate::complex_analytic::Complex;
use crate::error::{Error, Result};
use crate::mesh_elasticity::{
    energy, energy_and_gradient, energy_change, stability_report_with, DeformedState, PotentialV,
    TriangleMesh,
};

fn dot(a: &[Complex], b: &[Complex]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.re * y.re + x.im * y.im)
        .sum()
}

fn max_abs(a: &[Complex]) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

struct Pair {
    s: Vec<Complex>,
    y: Vec<Complex>,
    rho: f64,
}

/// Two-loop recursion: returns `-H g` for the current inverse-Hessian model.
fn direction(g: &[Complex], history: &VecDeque<Pair>) -> Vec<Complex> {
    let mut q = g.to_vec();
    let mut alphas = Vec::with_capacity(history.len());
    for p in history.iter().rev() {
        let a = p.rho * dot(&p.s, &q);
        for (qi, yi) in q.iter_mut().zip(&p.y) {
            *qi -= yi * a;
        }
        alphas.push(a);
    }
    if let Some(p) = history.back() {
        let gamma = dot(&p.s, &p.y) / dot(&p.y, &p.y);
        for qi in q.iter_mut() {
            *qi *= gamma;
        }
    }
    for (p, a) in history.iter().zip(alphas.into_iter().rev()) {
        let b = p.rho * dot(&p.y, &q);
        for (qi, si) in q.iter_mut().zip(&p.s) {
            *qi += si * (a - b);
        }
    }
    for qi in q.iter_mut() {
        *qi = -*qi;
    }
    q
}

/// Limited-memory quasi-Newton descent with Armijo backtracking. Pinned
/// vertices are set to their targets and never move.
pub fn minimize(
    mesh: &TriangleMesh,
    init: &DeformedState,
    cons: &Constraints,
    v: &PotentialV,
    cfg: &SolverConfig,
) -> Result<(DeformedState, SolveReport)> {
    cfg.validate()?;
    cons.check(mesh)?;
    if init.len() != mesh.vertex_count() {
        return Err(Error::InvalidParameter(format!(
            "initial state has {} positions, mesh has {} vertices",
            init.len(),
            mesh.vertex_count()
        )));
    }
    let mut state = init.clone();
    for (&i, &z) in cons.pinned() {
        state.positions_mut()[i] = z;
    }
    let free: Vec<bool> = (0..mesh.vertex_count())
        .map(|i| !cons.pinned().contains_key(&i))
        .collect();
    let diam = mesh.diameter();
    let weights: Vec<f64> = mesh
        .lumped_vertex_areas()
        .iter()
        .map(|a| diam / a)
        .collect();
    let grad_norm = |g: &[Complex]| {
        g.iter()
            .zip(&weights)
            .zip(&free)
            .filter(|(_, &f)| f)
            .map(|((gk, w), _)| gk.norm() * w)
            .fold(0.0, f64::max)
    };
    let restrict = |g: &mut Vec<Complex>| {
        for (gk, &f) in g.iter_mut().zip(&free) {
            if !f {
                *gk = Complex::new(0.0, 0.0);
            }
        }
    };

    let (mut e, mut g) = energy_and_gradient(mesh, &state, v)?;
    if !e.is_finite() {
        return Err(Error::NonFiniteEnergy { iter: 0 });
    }
    restrict(&mut g);
    let mut trace = vec![e];
    let mut history: VecDeque<Pair> = VecDeque::with_capacity(cfg.history);
    let mut gn = grad_norm(&g);
    let mut iters = 0;
    let min_step = 1e-16 * diam.max(f64::MIN_POSITIVE);

    while gn > cfg.grad_tol && iters < cfg.max_iters {
        let mut d = direction(&g, &history);
        let mut slope = dot(&g, &d);
        let mut t = 1.0;
        if history.is_empty() || !(slope < 0.0) {
            history.clear();
            d = g.iter().map(|x| -x).collect();
            slope = dot(&g, &d);
            // first steepest step moves no vertex by more than 1% of the diameter
            t = (0.01 * diam / max_abs(&d)).min(1.0);
        }
        let dmax = max_abs(&d);
        let de = loop {
            let de = energy_change(mesh, &state, v, &d, t)?;
            if de.is_finite() && de <= cfg.ls_slope * t * slope {
                break de;
            }
            t *= cfg.ls_shrink;
            if t * dmax < min_step {
                return Err(Error::LineSearchFailure {
                    iter: iters,
                    grad_norm: gn,
                });
            }
        };
        let s: Vec<Complex> = d.iter().map(|x| x * t).collect();
        for (p, sk) in state.positions_mut().iter_mut().zip(&s) {
            *p += sk;
        }
        let (e_new, mut g_new) = energy_and_gradient(mesh, &state, v)?;
        if !e_new.is_finite() {
            return Err(Error::NonFiniteEnergy { iter: iters + 1 });
        }
        restrict(&mut g_new);
        let y: Vec<Complex> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() && sy > 0.0 {
            if history.len() == cfg.history {
                history.pop_front();
            }
            history.push_back(Pair {
                s,
                y,
                rho: 1.0 / sy,
            });
        }
        e += de;
        trace.push(e);
        g = g_new;
        gn = grad_norm(&g);
        iters += 1;
    }

    let final_energy = energy(mesh, &state, v)?;
    let stab = stability_report_with(mesh, &state, v, cfg.melting_tol, cfg.branch_tol)?;
    let report = SolveReport {
        final_energy,
        grad_norm: gn,
        iters,
        converged: gn <= cfg.grad_tol,
        energy_trace: trace,
        branch_points: stab.branch_points(),
        stability: stab.classes,
        stability_s: stab.s,
        phase_windings: stab.winding_triangles,
    };
    Ok((state, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh_elasticity::meshgen;

    #[test]
    fn identity_is_already_optimal() {
        let m = meshgen::rectangle(2.0, 1.0, 6, 3).unwrap();
        let v = PotentialV::lambda(1.0).unwrap();
        let cons = Constraints::boundary(&m, |z| z).unwrap();
        let (s, r) = minimize(
            &m,
            &DeformedState::identity(&m),
            &cons,
            &v,
            &SolverConfig::default(),
        )
        .unwrap();
        assert!(r.converged && r.iters <= 2);
        assert!(r.final_energy < 1e-18);
        assert_eq!(s, DeformedState::identity(&m));
    }

    #[test]
    fn pinned_stretch_relaxes_interior() {
        let m = meshgen::disk(1.0, 24).unwrap();
        let v = PotentialV::lambda(2.0).unwrap();
        // boundary on a scaled circle: the minimizer is the scaling
        let cons = Constraints::boundary(&m, |z| z * 1.3).unwrap();
        let init = DeformedState::from_fn(&m, |z| z + Complex::new(0.05 * z.im, 0.0)).unwrap();
        let (s, r) = minimize(&m, &init, &cons, &v, &SolverConfig::default()).unwrap();
        assert!(r.converged, "{}", r.grad_norm);
        for w in r.energy_trace.windows(2) {
            assert!(w[1] <= w[0]);
        }
        for (&i, &z) in cons.pinned() {
            assert_eq!(s.positions()[i], z);
        }
        for (p, z) in s.positions().iter().zip(m.vertices()) {
            assert!((p - z * 1.3).norm() < 1e-6);
        }
    }
}
