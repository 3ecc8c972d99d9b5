//! Minimal SVG scene: polylines, filled polygons and dots in world
//! coordinates, fitted into a fixed canvas with the y axis pointing up.

use std::fmt::Write as _;

use elastica2d::complex_analytic::Complex;

const CANVAS: f64 = 800.0;
const MARGIN: f64 = 20.0;

enum Item {
    Line {
        pts: Vec<Complex>,
        stroke: &'static str,
        width: f64,
        opacity: f64,
    },
    Polygon {
        pts: Vec<Complex>,
        fill: &'static str,
        stroke: &'static str,
    },
    Dot {
        at: Complex,
        radius: f64,
        fill: &'static str,
    },
}

#[derive(Default)]
pub struct Scene {
    items: Vec<Item>,
}

pub const REFERENCE: &str = "#c8c8c8";
pub const IMAGE: &str = "#1f4e9c";
pub const STABLE: &str = "#2c7a3f";
pub const MELTING: &str = "#d08a00";
pub const UNSTABLE: &str = "#c0262d";
pub const BRANCH: &str = "#000000";

impl Scene {
    pub fn line(&mut self, pts: Vec<Complex>, stroke: &'static str, width: f64) {
        self.line_with_opacity(pts, stroke, width, 1.0);
    }

    pub fn line_with_opacity(
        &mut self,
        pts: Vec<Complex>,
        stroke: &'static str,
        width: f64,
        opacity: f64,
    ) {
        if pts.len() >= 2 {
            self.items.push(Item::Line {
                pts,
                stroke,
                width,
                opacity,
            });
        }
    }

    pub fn polygon(&mut self, pts: Vec<Complex>, fill: &'static str, stroke: &'static str) {
        self.items.push(Item::Polygon { pts, fill, stroke });
    }

    pub fn dot(&mut self, at: Complex, radius: f64, fill: &'static str) {
        self.items.push(Item::Dot { at, radius, fill });
    }

    fn points(&self) -> impl Iterator<Item = Complex> + '_ {
        self.items.iter().flat_map(|it| match it {
            Item::Line { pts, .. } | Item::Polygon { pts, .. } => pts.clone(),
            Item::Dot { at, .. } => vec![*at],
        })
    }

    pub fn render(&self) -> String {
        let (mut lo, mut hi) = (
            Complex::new(f64::INFINITY, f64::INFINITY),
            Complex::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        );
        for p in self.points().filter(|p| p.is_finite()) {
            lo = Complex::new(lo.re.min(p.re), lo.im.min(p.im));
            hi = Complex::new(hi.re.max(p.re), hi.im.max(p.im));
        }
        if lo.re > hi.re {
            lo = Complex::new(-1.0, -1.0);
            hi = Complex::new(1.0, 1.0);
        }
        let span = (hi.re - lo.re).max(hi.im - lo.im).max(1e-12);
        let scale = (CANVAS - 2.0 * MARGIN) / span;
        let xy = |p: Complex| {
            (
                MARGIN + (p.re - lo.re) * scale,
                CANVAS - MARGIN - (p.im - lo.im) * scale,
            )
        };
        let path = |pts: &[Complex]| {
            let mut s = String::new();
            for (i, &p) in pts.iter().enumerate() {
                let (x, y) = xy(p);
                let _ = write!(s, "{}{x:.3},{y:.3}", if i == 0 { "" } else { " " });
            }
            s
        };
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {CANVAS} {CANVAS}" width="{CANVAS}" height="{CANVAS}">"#
        );
        let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
        for it in &self.items {
            match it {
                Item::Line {
                    pts,
                    stroke,
                    width,
                    opacity,
                } => {
                    let _ = writeln!(
                        out,
                        r#"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="{width}" stroke-opacity="{opacity}"/>"#,
                        path(pts)
                    );
                }
                Item::Polygon { pts, fill, stroke } => {
                    let _ = writeln!(
                        out,
                        r#"<polygon points="{}" fill="{fill}" fill-opacity="0.25" stroke="{stroke}" stroke-width="0.6"/>"#,
                        path(pts)
                    );
                }
                Item::Dot { at, radius, fill } => {
                    let (x, y) = xy(*at);
                    let _ = writeln!(
                        out,
                        r#"<circle cx="{x:.3}" cy="{y:.3}" r="{radius}" fill="{fill}"/>"#
                    );
                }
            }
        }
        out.push_str("</svg>\n");
        out
    }
}
