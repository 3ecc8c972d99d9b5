use std::fmt::Write as _;

use elastica2d::complex_analytic::Complex;
use elastica2d::mesh_elasticity::PotentialV;
use elastica2d::weierstrass::{
    build_elastic_map, compensating_k, g_of, ElasticMap, MeromorphicK, WeierstrassDatum,
    WeierstrassMap,
};

use super::{num, Checks, Ctx};
use crate::config::{terms, RegionConfig, WeierstrassConfig};
use crate::error::CliError;
use crate::svg::{self, Scene};

pub fn section(ctx: &Ctx) -> Result<&WeierstrassConfig, CliError> {
    let w = ctx
        .cfg
        .weierstrass
        .as_ref()
        .ok_or_else(|| CliError::Config("missing [weierstrass] section".into()))?;
    w.validate()?;
    Ok(w)
}

pub fn build(w: &WeierstrassConfig) -> Result<WeierstrassMap, CliError> {
    let h = terms(&w.h, "weierstrass.h")?;
    let datum = WeierstrassDatum::new(h, w.lambda, w.zeros())?;
    let k = match &w.k {
        Some(list) => MeromorphicK::new(terms(list, "weierstrass.k")?),
        None => compensating_k(&datum)?,
    };
    Ok(build_elastic_map(&datum, &k)?)
}

/// Lattice points of the sampling grid that lie in the region.
pub fn lattice(region: &RegionConfig, grid: usize) -> Vec<Complex> {
    let (lo, hi) = region.bounds();
    let mut out = Vec::new();
    for j in 0..=grid {
        for i in 0..=grid {
            let z = Complex::new(
                lo.re + (hi.re - lo.re) * i as f64 / grid as f64,
                lo.im + (hi.im - lo.im) * j as f64 / grid as f64,
            );
            if region.contains(z) {
                out.push(z);
            }
        }
    }
    out
}

/// Grid lines clipped to the region, as runs of densely sampled points.
pub fn grid_lines(region: &RegionConfig, grid: usize) -> Vec<Vec<Complex>> {
    let (lo, hi) = region.bounds();
    let fine = 8 * grid;
    let mut lines = Vec::new();
    for j in 0..=grid {
        let a = j as f64 / grid as f64;
        for horizontal in [true, false] {
            let mut run = Vec::new();
            for i in 0..=fine {
                let b = i as f64 / fine as f64;
                let (x, y) = if horizontal { (b, a) } else { (a, b) };
                let z = Complex::new(lo.re + (hi.re - lo.re) * x, lo.im + (hi.im - lo.im) * y);
                if region.contains(z) {
                    run.push(z);
                } else if !run.is_empty() {
                    lines.push(std::mem::take(&mut run));
                }
            }
            if !run.is_empty() {
                lines.push(run);
            }
        }
    }
    lines
}

fn describe_k(map: &WeierstrassMap) -> String {
    let k = map.k();
    let mut s = String::new();
    let _ = writeln!(s, "k(z) = {}", k.k);
    let _ = writeln!(s, "poles {}", k.pole_centers.len());
    for &p in &k.pole_centers {
        let coeffs = k.principal_coeffs_at(p);
        let _ = write!(s, "pole {:.12} {:.12} order {}", p.re, p.im, coeffs.len());
        for c in coeffs {
            let _ = write!(s, " coeff {:.12} {:.12}", c.re, c.im);
        }
        s.push('\n');
    }
    s
}

pub fn run(ctx: &Ctx) -> Result<(), CliError> {
    let w = section(ctx)?;
    let map = build(w)?;
    let lam = w.lambda;
    let mu = lam / (1.0 + lam);
    let v = PotentialV::lambda(lam)?;
    let mut checks = Checks::default();

    let mut rows = Vec::new();
    let (mut worst_g, mut worst_mod): (f64, f64) = (0.0, 0.0);
    for z in lattice(&w.region, w.grid) {
        let f = map.f(z)?;
        let d = map.derivatives(z)?;
        let g = g_of(&map, z)?;
        let h = map.h(z)?;
        let s = 1.0 + v.d1(d.fz.norm_sqr());
        worst_g = worst_g.max((g - h * h * ((1.0 + lam) / 2.0)).norm() / (1.0 + g.norm()));
        worst_mod =
            worst_mod.max((d.fz.norm() - (0.5 * h.norm_sqr() + mu)).abs() / (1.0 + d.fz.norm()));
        rows.push(
            [
                z.re,
                z.im,
                f.re,
                f.im,
                d.fz.norm(),
                d.fzbar.norm(),
                g.re,
                g.im,
                s,
            ]
            .iter()
            .map(|&x| num(x))
            .collect(),
        );
    }
    checks.require(worst_g < 1e-9, || {
        format!("g deviates from (1+λ)h²/2 by {worst_g:e}")
    });
    checks.require(worst_mod < 1e-10, || {
        format!("|f_z| deviates from the modulus law by {worst_mod:e}")
    });

    ctx.csv(
        "samples.csv",
        &[
            "re_z",
            "im_z",
            "re_f",
            "im_f",
            "abs_fz",
            "abs_fzbar",
            "re_g",
            "im_g",
            "s",
        ],
        &rows,
    )?;
    ctx.write("k.txt", &describe_k(&map))?;

    let mut scene = Scene::default();
    let lines = grid_lines(&w.region, w.grid);
    for line in &lines {
        scene.line(line.clone(), svg::REFERENCE, 0.8);
    }
    for line in &lines {
        let img = line
            .iter()
            .map(|&z| map.f(z))
            .collect::<Result<Vec<_>, _>>()?;
        scene.line(img, svg::IMAGE, 1.0);
    }
    for z in map.datum().zeros.iter().filter(|z| w.region.contains(z.p)) {
        scene.dot(map.f(z.p)?, 4.0, svg::BRANCH);
    }
    ctx.write("figure.svg", &scene.render())?;

    println!(
        "samples {}  poles {}  max |g - (1+λ)h²/2|/(1+|g|) {:.3e}  max modulus defect {:.3e}",
        rows.len(),
        map.k().pole_centers.len(),
        worst_g,
        worst_mod
    );
    checks.finish()
}
