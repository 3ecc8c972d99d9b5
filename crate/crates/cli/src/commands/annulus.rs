use std::f64::consts::TAU;
use std::fmt::Write as _;

use elastica2d::annulus::{
    solve_annulus_params, traction_profile, AnnulusMap, BoundaryCurve, HalfInteger, StripFamily,
    StripMap,
};
use elastica2d::complex_analytic::Complex;
use elastica2d::weierstrass::ElasticMap;

use super::{num, Checks, Ctx};
use crate::config::StripInput;
use crate::error::CliError;
use crate::svg::{self, Scene};

const TRACTION_TOL: f64 = 1e-10;

fn sample_image(map: &dyn ElasticMap, pts: &[Complex]) -> Result<Vec<Complex>, CliError> {
    Ok(pts
        .iter()
        .map(|&z| map.f(z))
        .collect::<Result<Vec<_>, _>>()?)
}

fn traction_rows(
    map: &dyn ElasticMap,
    family: &str,
    curves: &[(&str, BoundaryCurve)],
    lambda: f64,
    samples: usize,
    rows: &mut Vec<Vec<String>>,
) -> Result<f64, CliError> {
    let mut worst: f64 = 0.0;
    for (name, curve) in curves {
        for s in traction_profile(map, curve, lambda, samples)? {
            worst = worst.max(s.residual);
            rows.push(vec![
                family.to_string(),
                name.to_string(),
                num(s.t),
                num(s.z.re),
                num(s.z.im),
                num(s.residual),
            ]);
        }
    }
    Ok(worst)
}

pub fn run(ctx: &Ctx) -> Result<(), CliError> {
    let (ann, strip) = (ctx.cfg.annulus.as_ref(), ctx.cfg.strip.as_ref());
    if ann.is_none() && strip.is_none() {
        return Err(CliError::Config(
            "missing [annulus] or [strip] section".into(),
        ));
    }
    let strip_input = strip.map(|s| s.validate()).transpose()?;
    if let Some(a) = ann {
        a.validate()?;
    }

    let mut checks = Checks::default();
    let mut params = String::new();
    let mut rows = Vec::new();
    let mut scene = Scene::default();

    if let Some(a) = ann {
        let n = HalfInteger::from_f64(a.n)?;
        let fam = solve_annulus_params(a.r1, a.r2, n, a.lambda)?;
        let map = AnnulusMap::new(fam);
        let curves = [
            (
                "inner",
                BoundaryCurve::Circle {
                    center: Complex::new(0.0, 0.0),
                    radius: a.r1,
                },
            ),
            (
                "outer",
                BoundaryCurve::Circle {
                    center: Complex::new(0.0, 0.0),
                    radius: a.r2,
                },
            ),
        ];
        let worst = traction_rows(&map, "annulus", &curves, a.lambda, a.samples, &mut rows)?;
        let scale = a.r2.powi(2 * n.twice() as i32 + 1);
        let poly = fam.residual(a.r1).abs().max(fam.residual(a.r2).abs());
        checks.require(worst < TRACTION_TOL, || {
            format!("annulus traction residual {worst:e}")
        });
        checks.require(poly < 1e-10 * scale, || {
            format!("annulus radius equation residual {poly:e}")
        });
        let _ = writeln!(params, "family annulus");
        let _ = writeln!(params, "r1 {}", num(a.r1));
        let _ = writeln!(params, "r2 {}", num(a.r2));
        let _ = writeln!(params, "n {n}");
        let _ = writeln!(params, "winding {}", n.winding());
        let _ = writeln!(params, "lambda {}", num(a.lambda));
        let _ = writeln!(params, "c {:.12}", fam.c);
        let _ = writeln!(params, "c2 {:.12}", fam.c * fam.c);
        let _ = writeln!(params, "alpha {:.12}", fam.alpha);
        let _ = writeln!(
            params,
            "inner_image_radius {:.12}",
            fam.image_radius(a.r1).abs()
        );
        let _ = writeln!(
            params,
            "outer_image_radius {:.12}",
            fam.image_radius(a.r2).abs()
        );
        let _ = writeln!(params, "radius_residual {:e}", poly);
        let _ = writeln!(params, "max_traction {:e}", worst);

        let circle = |r: f64| -> Vec<Complex> {
            (0..=256)
                .map(|k| Complex::from_polar(r, TAU * k as f64 / 256.0))
                .collect()
        };
        for j in 0..=8 {
            let r = a.r1 + (a.r2 - a.r1) * j as f64 / 8.0;
            scene.line(circle(r), svg::REFERENCE, 0.8);
            scene.line_with_opacity(sample_image(&map, &circle(r))?, svg::IMAGE, 1.0, 0.6);
        }
        for k in 0..24 {
            let e = Complex::from_polar(1.0, TAU * k as f64 / 24.0);
            let ray: Vec<Complex> = (0..=16)
                .map(|j| e * (a.r1 + (a.r2 - a.r1) * j as f64 / 16.0))
                .collect();
            scene.line(ray.clone(), svg::REFERENCE, 0.8);
            scene.line_with_opacity(sample_image(&map, &ray)?, svg::IMAGE, 1.0, 0.6);
        }
        println!(
            "annulus n = {n}: c = {:.9}, alpha = {:.9}, inner image radius {:.6}, max traction {worst:.2e}",
            fam.c,
            fam.alpha,
            fam.image_radius(a.r1).abs()
        );
    }

    if let (Some(s), Some(input)) = (strip, strip_input) {
        let fam = match input {
            StripInput::Params { c, alpha } => StripFamily::from_params(s.n, c, alpha, s.lambda)?,
            StripInput::Domain { x1, x2 } => StripFamily::from_domain(s.n, x1, x2, s.lambda)?,
        };
        let map = StripMap::new(fam);
        let curves = [
            (
                "left",
                BoundaryCurve::Segment {
                    from: Complex::new(fam.x1, 0.0),
                    to: Complex::new(fam.x1, TAU),
                },
            ),
            (
                "right",
                BoundaryCurve::Segment {
                    from: Complex::new(fam.x2, 0.0),
                    to: Complex::new(fam.x2, TAU),
                },
            ),
        ];
        let worst = traction_rows(&map, "strip", &curves, s.lambda, s.samples, &mut rows)?;
        checks.require(worst < TRACTION_TOL, || {
            format!("strip traction residual {worst:e}")
        });
        if !params.is_empty() {
            params.push('\n');
        }
        let _ = writeln!(params, "family strip");
        let _ = writeln!(params, "n {}", s.n);
        let _ = writeln!(params, "lambda {}", num(s.lambda));
        let _ = writeln!(params, "c {:.12}", fam.c);
        let _ = writeln!(params, "alpha {:.12}", fam.alpha);
        let _ = writeln!(params, "x1 {:.12}", fam.x1);
        let _ = writeln!(params, "x2 {:.12}", fam.x2);
        let _ = writeln!(params, "exp_x1 {:.12}", fam.x1.exp());
        let _ = writeln!(params, "exp_x2 {:.12}", fam.x2.exp());
        let _ = writeln!(params, "max_traction {:e}", worst);

        for j in 0..=8 {
            let x = fam.x1 + (fam.x2 - fam.x1) * j as f64 / 8.0;
            let line: Vec<Complex> = (0..=256)
                .map(|k| Complex::new(x, TAU * k as f64 / 256.0))
                .collect();
            scene.line(line.clone(), svg::REFERENCE, 0.8);
            scene.line_with_opacity(sample_image(&map, &line)?, svg::IMAGE, 1.0, 0.6);
        }
        for k in 0..=24 {
            let y = TAU * k as f64 / 24.0;
            let line: Vec<Complex> = (0..=16)
                .map(|j| Complex::new(fam.x1 + (fam.x2 - fam.x1) * j as f64 / 16.0, y))
                .collect();
            scene.line(line.clone(), svg::REFERENCE, 0.8);
            scene.line_with_opacity(sample_image(&map, &line)?, svg::IMAGE, 1.0, 0.6);
        }
        println!(
            "strip n = {}: c = {:.9}, alpha = {:.9}, e^x1 = {:.9}, e^x2 = {:.9}, max traction {worst:.2e}",
            s.n,
            fam.c,
            fam.alpha,
            fam.x1.exp(),
            fam.x2.exp()
        );
    }

    ctx.write("params.txt", &params)?;
    ctx.csv(
        "traction.csv",
        &["family", "curve", "t", "re_z", "im_z", "residual"],
        &rows,
    )?;
    ctx.write("figure.svg", &scene.render())?;
    checks.finish()
}
