use std::f64::consts::TAU;
use std::fmt::Write as _;

use elastica2d::annulus::{
    solve_annulus_params, traction_residual, AnnulusMap, BoundaryCurve, HalfInteger, StripFamily,
    StripMap,
};
use elastica2d::complex_analytic::{wirtinger_fd, Complex, DEFAULT_FD_STEP};
use elastica2d::mesh_elasticity::{
    energy, energy_area_identity, gradient, DeformedState, PotentialV,
};
use elastica2d::solver::{perturb, Perturbation};
use elastica2d::weierstrass::{g_of, ElasticMap};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{weierstrass, Ctx};
use crate::config::StripInput;
use crate::error::CliError;

struct Line {
    name: String,
    value: f64,
    limit: f64,
}

fn weierstrass_checks(ctx: &Ctx, out: &mut Vec<Line>) -> Result<(), CliError> {
    let w = weierstrass::section(ctx)?;
    let map = weierstrass::build(w)?;
    let lam = w.lambda;
    let mu = lam / (1.0 + lam);
    let (mut g_dev, mut modulus, mut fd): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for z in weierstrass::lattice(&w.region, w.grid) {
        let h = map.h(z)?;
        let g = g_of(&map, z)?;
        g_dev = g_dev.max((g - h * h * ((1.0 + lam) / 2.0)).norm() / (1.0 + g.norm()));
        let d = map.derivatives(z)?;
        modulus =
            modulus.max((d.fz.norm() - (0.5 * h.norm_sqr() + mu)).abs() / (1.0 + d.fz.norm()));
        // difference quotients are meaningless across the phase jump at zeros of h
        if map.datum().zero_distance(z) > 0.05 {
            let (a, b) = wirtinger_fd(|u| map.f(u), z, DEFAULT_FD_STEP)?;
            fd = fd.max((a - d.fz).norm()).max((b - d.fzbar).norm());
        }
    }
    out.push(Line {
        name: "weierstrass g identity".into(),
        value: g_dev,
        limit: 1e-9,
    });
    out.push(Line {
        name: "weierstrass modulus law".into(),
        value: modulus,
        limit: 1e-10,
    });
    out.push(Line {
        name: "weierstrass finite-difference derivatives".into(),
        value: fd,
        limit: 1e-6,
    });
    Ok(())
}

fn family_checks(ctx: &Ctx, out: &mut Vec<Line>) -> Result<(), CliError> {
    if let Some(a) = &ctx.cfg.annulus {
        a.validate()?;
        let fam = solve_annulus_params(a.r1, a.r2, HalfInteger::from_f64(a.n)?, a.lambda)?;
        let map = AnnulusMap::new(fam);
        let mut worst: f64 = 0.0;
        for r in [a.r1, a.r2] {
            let curve = BoundaryCurve::Circle {
                center: Complex::new(0.0, 0.0),
                radius: r,
            };
            worst = worst.max(traction_residual(&map, &curve, a.lambda, a.samples)?);
        }
        out.push(Line {
            name: "annulus traction".into(),
            value: worst,
            limit: 1e-10,
        });
    }
    if let Some(s) = &ctx.cfg.strip {
        let fam = match s.validate()? {
            StripInput::Params { c, alpha } => StripFamily::from_params(s.n, c, alpha, s.lambda)?,
            StripInput::Domain { x1, x2 } => StripFamily::from_domain(s.n, x1, x2, s.lambda)?,
        };
        let map = StripMap::new(fam);
        let mut worst: f64 = 0.0;
        for x in [fam.x1, fam.x2] {
            let curve = BoundaryCurve::Segment {
                from: Complex::new(x, 0.0),
                to: Complex::new(x, TAU),
            };
            worst = worst.max(traction_residual(&map, &curve, s.lambda, s.samples)?);
        }
        out.push(Line {
            name: "strip traction".into(),
            value: worst,
            limit: 1e-10,
        });
    }
    Ok(())
}

fn mesh_checks(ctx: &Ctx, out: &mut Vec<Line>) -> Result<(), CliError> {
    let Some(vc) = &ctx.cfg.verify else {
        return Ok(());
    };
    vc.validate(ctx.seed)?;
    let mesh = vc.mesh.load(ctx.base_dir(), ctx.refine)?;
    let v = PotentialV::lambda(vc.lambda)?;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed.expect("validated"));
    let (mut grad, mut area_id, mut frame): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let diam = mesh.diameter();
    for _ in 0..vc.states {
        let base = DeformedState::identity(&mesh);
        let state = perturb(&mesh, &base, 0.05 * diam, Perturbation::Smooth, &mut rng)?;
        let state = perturb(&mesh, &state, 0.01 * diam, Perturbation::Vertex, &mut rng)?;

        let g = gradient(&mesh, &state, &v)?;
        let gmax = g.iter().map(|x| x.norm()).fold(0.0, f64::max);
        let h = 1e-6 * diam;
        let e_at = |k: usize, d: Complex| -> Result<f64, CliError> {
            let mut s = state.clone();
            s.positions_mut()[k] += d;
            Ok(energy(&mesh, &s, &v)?)
        };
        for (k, gk) in g.iter().enumerate() {
            let fd = Complex::new(
                (e_at(k, Complex::new(h, 0.0))? - e_at(k, Complex::new(-h, 0.0))?) / (2.0 * h),
                (e_at(k, Complex::new(0.0, h))? - e_at(k, Complex::new(0.0, -h))?) / (2.0 * h),
            );
            grad = grad.max((fd - gk).norm() / gk.norm().max(1e-3 * gmax).max(f64::MIN_POSITIVE));
        }

        let (lhs, rhs) = energy_area_identity(&mesh, &state, &v)?;
        area_id = area_id.max((lhs - rhs).abs() / (1.0 + rhs.abs()));

        let angle = (rng.next_u32() as f64 / u32::MAX as f64) * TAU;
        let rot = Complex::from_polar(1.0, angle);
        let moved = DeformedState::new(
            state
                .positions()
                .iter()
                .map(|p| rot * p + Complex::new(1.5, -0.5))
                .collect(),
        )?;
        let (e0, e1) = (energy(&mesh, &state, &v)?, energy(&mesh, &moved, &v)?);
        frame = frame.max((e0 - e1).abs() / (1.0 + e0));
    }
    out.push(Line {
        name: "mesh gradient against finite differences".into(),
        value: grad,
        limit: 1e-5,
    });
    out.push(Line {
        name: "mesh energy-area identity".into(),
        value: area_id,
        limit: 1e-10,
    });
    out.push(Line {
        name: "mesh frame indifference".into(),
        value: frame,
        limit: 1e-12,
    });
    Ok(())
}

pub fn run(ctx: &Ctx) -> Result<(), CliError> {
    let mut lines = Vec::new();
    if ctx.cfg.weierstrass.is_some() {
        weierstrass_checks(ctx, &mut lines)?;
    }
    family_checks(ctx, &mut lines)?;
    mesh_checks(ctx, &mut lines)?;
    if lines.is_empty() {
        return Err(CliError::Config(
            "nothing to verify: add [weierstrass], [annulus], [strip] or [verify]".into(),
        ));
    }
    let mut text = String::new();
    let mut failed = Vec::new();
    for l in &lines {
        let ok = l.value < l.limit;
        let _ = writeln!(
            text,
            "{} {}: {:.3e} (limit {:e})",
            if ok { "PASS" } else { "FAIL" },
            l.name,
            l.value,
            l.limit
        );
        if !ok {
            failed.push(l.name.clone());
        }
    }
    print!("{text}");
    ctx.write("verify.txt", &text)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Check(format!("failed: {}", failed.join(", "))))
    }
}
