use std::collections::BTreeMap;

use elastica2d::complex_analytic::Complex;
use elastica2d::mesh_elasticity::{
    triangle_derivatives, DeformedState, PotentialV, StabilityClass, TriangleMesh,
};
use elastica2d::solver::{
    affine_initial_state, best_fit_rigid, minimize, perturb, ramp_solve_path, state_to_text,
    Constraints, Perturbation, SolveReport, SolverConfig,
};
use elastica2d::weierstrass::ElasticMap;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{weierstrass, Checks, Ctx};
use crate::config::{Compare, InitKind, PerturbKind, SolveConfig, Target};
use crate::error::CliError;
use crate::svg::{self, Scene};

#[derive(Serialize)]
struct MeshSummary {
    vertices: usize,
    triangles: usize,
    boundary_vertices: usize,
    area: f64,
    diameter: f64,
}

#[derive(Serialize)]
struct StepSummary {
    step: usize,
    converged: bool,
    iters: usize,
    final_energy: f64,
    grad_norm: f64,
    branch_points: usize,
}

#[derive(Serialize)]
struct TriangleRow {
    index: usize,
    class: &'static str,
    s: f64,
    abs_fz: f64,
    abs_fzbar: f64,
}

#[derive(Serialize)]
struct ClassCounts {
    stable_strict: usize,
    melting: usize,
    unstable: usize,
}

#[derive(Serialize)]
struct Report {
    mesh: MeshSummary,
    lambda: f64,
    pinned: usize,
    steps: Vec<StepSummary>,
    converged: bool,
    iters: usize,
    final_energy: f64,
    energy_per_area: f64,
    grad_norm: f64,
    energy_trace: Vec<f64>,
    stability_counts: ClassCounts,
    branch_points: Vec<usize>,
    phase_windings: Vec<(usize, i32)>,
    rigid_residual: Option<f64>,
    rigid_motion: Option<bool>,
    max_interior_deviation: Option<f64>,
    relative_interior_deviation: Option<f64>,
    triangles: Vec<TriangleRow>,
}

fn solver_config(sc: &SolveConfig) -> SolverConfig {
    let d = SolverConfig::default();
    let s = &sc.solver;
    SolverConfig {
        grad_tol: s.grad_tol.unwrap_or(d.grad_tol),
        max_iters: s.max_iters.unwrap_or(d.max_iters),
        history: s.history.unwrap_or(d.history),
        melting_tol: s.melting_tol.unwrap_or(d.melting_tol),
        branch_tol: s.branch_tol.unwrap_or(d.branch_tol),
        ramp_steps: sc.steps,
        ..d
    }
}

/// Pinned vertex, its target rule and full-load position.
struct Pin {
    vertex: usize,
    target: Target,
    full: Complex,
}

fn pins(
    sc: &SolveConfig,
    mesh: &TriangleMesh,
    analytic: Option<&dyn ElasticMap>,
) -> Result<Vec<Pin>, CliError> {
    let mut by_vertex: BTreeMap<usize, Target> = BTreeMap::new();
    for p in &sc.pins {
        for i in p.select.vertices(mesh)? {
            by_vertex.insert(i, p.target.clone());
        }
    }
    by_vertex
        .into_iter()
        .map(|(vertex, target)| {
            let z = mesh.vertices()[vertex];
            let full = match target.full(z) {
                Some(w) => w,
                None => analytic
                    .ok_or_else(|| {
                        CliError::Config(
                            "a `weierstrass` target needs a [weierstrass] section".into(),
                        )
                    })?
                    .f(z)?,
            };
            Ok(Pin {
                vertex,
                target,
                full,
            })
        })
        .collect()
}

fn constraints_at(mesh: &TriangleMesh, pins: &[Pin], s: f64) -> elastica2d::Result<Constraints> {
    Constraints::new(
        pins.iter()
            .map(|p| (p.vertex, p.target.at(mesh.vertices()[p.vertex], p.full, s)))
            .collect(),
    )
}

fn figure(mesh: &TriangleMesh, state: &DeformedState, report: &SolveReport) -> String {
    let mut scene = Scene::default();
    let refs = mesh.vertices();
    for t in mesh.triangles() {
        let mut pts: Vec<Complex> = t.iter().map(|&i| refs[i]).collect();
        pts.push(pts[0]);
        scene.line(pts, svg::REFERENCE, 0.5);
    }
    let p = state.positions();
    for (t, class) in mesh.triangles().iter().zip(&report.stability) {
        let color = match class {
            StabilityClass::StableStrict => svg::STABLE,
            StabilityClass::Melting => svg::MELTING,
            StabilityClass::Unstable => svg::UNSTABLE,
        };
        scene.polygon(t.iter().map(|&i| p[i]).collect(), color, color);
    }
    for &b in &report.branch_points {
        let t = mesh.triangles()[b];
        scene.dot((p[t[0]] + p[t[1]] + p[t[2]]) / 3.0, 4.0, svg::BRANCH);
    }
    scene.render()
}

pub fn run(ctx: &Ctx) -> Result<(), CliError> {
    let sc = ctx
        .cfg
        .solve
        .as_ref()
        .ok_or_else(|| CliError::Config("missing [solve] section".into()))?;
    sc.validate(ctx.seed)?;
    let mesh = sc.mesh.load(ctx.base_dir(), ctx.refine)?;
    let needs_map = sc.compare.is_some()
        || sc
            .pins
            .iter()
            .any(|p| matches!(p.target, Target::Weierstrass));
    let analytic = if needs_map {
        let w = weierstrass::section(ctx)?;
        if sc.compare.is_some() && w.lambda != sc.lambda {
            return Err(CliError::Config(format!(
                "comparison needs equal lambda in [solve] ({}) and [weierstrass] ({})",
                sc.lambda, w.lambda
            )));
        }
        Some(weierstrass::build(w)?)
    } else {
        None
    };
    let analytic_dyn = analytic.as_ref().map(|m| m as &dyn ElasticMap);
    let pins = pins(sc, &mesh, analytic_dyn)?;
    let v = PotentialV::lambda(sc.lambda)?;
    let cfg = solver_config(sc);
    cfg.validate()?;

    let final_cons = constraints_at(&mesh, &pins, 1.0)?;
    let mut init = match sc.init {
        InitKind::Identity => DeformedState::identity(&mesh),
        InitKind::Affine => affine_initial_state(&mesh, &final_cons)?,
    };
    if let Some(p) = &sc.perturb {
        let seed = ctx
            .seed
            .ok_or_else(|| CliError::Config("perturbation needs a seed".into()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let kind = match p.kind {
            PerturbKind::Vertex => Perturbation::Vertex,
            PerturbKind::Smooth => Perturbation::Smooth,
        };
        init = perturb(&mesh, &init, p.amplitude * mesh.diameter(), kind, &mut rng)?;
    }

    let seq = if pins.is_empty() {
        vec![minimize(&mesh, &init, &Constraints::free(), &v, &cfg)?]
    } else {
        ramp_solve_path(
            &mesh,
            &init,
            sc.steps,
            |s| constraints_at(&mesh, &pins, s),
            &v,
            &cfg,
        )?
    };
    let (state, report) = seq.last().expect("at least one step");

    let mut checks = Checks::default();
    for (k, (_, r)) in seq.iter().enumerate() {
        checks.require(r.converged, || {
            format!(
                "step {} did not converge (gradient norm {:e})",
                k + 1,
                r.grad_norm
            )
        });
        checks.require(r.energy_trace.windows(2).all(|w| w[1] <= w[0]), || {
            format!("energy increased during step {}", k + 1)
        });
    }
    checks.require(
        final_cons
            .pinned()
            .iter()
            .all(|(&i, &z)| state.positions()[i] == z),
        || "pinned vertices moved".into(),
    );

    let (rigid_residual, rigid_motion) = if pins.is_empty() {
        let fit = best_fit_rigid(&mesh, state)?;
        (Some(fit.residual), Some(fit.residual < 1e-6))
    } else {
        (None, None)
    };
    let deviation = match (sc.compare, &analytic) {
        (Some(Compare::Weierstrass), Some(map)) => {
            let mut worst: f64 = 0.0;
            for i in mesh.interior_vertices() {
                worst = worst.max((state.positions()[i] - map.f(mesh.vertices()[i])?).norm());
            }
            Some(worst)
        }
        _ => None,
    };
    let half_diam = 0.5 * mesh.diameter();

    let derivs = triangle_derivatives(&mesh, state)?;
    let count = |c: StabilityClass| report.stability.iter().filter(|&&x| x == c).count();
    let out = Report {
        mesh: MeshSummary {
            vertices: mesh.vertex_count(),
            triangles: mesh.triangle_count(),
            boundary_vertices: mesh.boundary_vertices().len(),
            area: mesh.total_area(),
            diameter: mesh.diameter(),
        },
        lambda: sc.lambda,
        pinned: pins.len(),
        steps: seq
            .iter()
            .enumerate()
            .map(|(k, (_, r))| StepSummary {
                step: k + 1,
                converged: r.converged,
                iters: r.iters,
                final_energy: r.final_energy,
                grad_norm: r.grad_norm,
                branch_points: r.branch_points.len(),
            })
            .collect(),
        converged: seq.iter().all(|(_, r)| r.converged),
        iters: report.iters,
        final_energy: report.final_energy,
        energy_per_area: report.final_energy / mesh.total_area(),
        grad_norm: report.grad_norm,
        energy_trace: report.energy_trace.clone(),
        stability_counts: ClassCounts {
            stable_strict: count(StabilityClass::StableStrict),
            melting: count(StabilityClass::Melting),
            unstable: count(StabilityClass::Unstable),
        },
        branch_points: report.branch_points.clone(),
        phase_windings: report.phase_windings.clone(),
        rigid_residual,
        rigid_motion,
        max_interior_deviation: deviation,
        relative_interior_deviation: deviation.map(|d| d / half_diam),
        triangles: report
            .stability
            .iter()
            .zip(&report.stability_s)
            .zip(&derivs)
            .enumerate()
            .map(|(index, ((c, &s), &(fz, fzbar)))| TriangleRow {
                index,
                class: c.as_str(),
                s,
                abs_fz: fz.norm(),
                abs_fzbar: fzbar.norm(),
            })
            .collect(),
    };

    ctx.write("state.txt", &state_to_text(state))?;
    let json = serde_json::to_string_pretty(&out).map_err(|e| CliError::Io {
        path: "report.json".into(),
        source: std::io::Error::other(e.to_string()),
    })?;
    ctx.write("report.json", &(json + "\n"))?;
    ctx.write("figure.svg", &figure(&mesh, state, report))?;

    print!(
        "triangles {}  converged {}  energy {:.6e}  grad {:.2e}  branch points {}",
        mesh.triangle_count(),
        out.converged,
        out.final_energy,
        out.grad_norm,
        out.branch_points.len()
    );
    if let Some(r) = rigid_residual {
        print!("  rigid residual {r:.2e}");
    }
    if let Some(d) = deviation {
        print!(
            "  max interior deviation {d:.4e} ({:.4e} of radius)",
            d / half_diam
        );
    }
    println!();
    checks.finish()
}
