use std::f64::consts::TAU;

use super::TriangleMesh;
use crate::complex_analytic::Complex;
use crate::error::{Error, Result};

fn ring(radius: f64, count: usize) -> Vec<Complex> {
    (0..count)
        .map(|j| Complex::from_polar(radius, TAU * j as f64 / count as f64))
        .collect()
}

/// Triangulate the band between two concentric rings whose points are
/// listed counterclockwise starting at angle 0. `inner`/`outer` hold global
/// vertex indices.
fn zip_rings(inner: &[usize], outer: &[usize], tris: &mut Vec<[usize; 3]>) {
    let (m, n) = (inner.len(), outer.len());
    let (mut i, mut j) = (0, 0);
    while i < m || j < n {
        let advance_inner =
            j == n || (i < m && (i + 1) as f64 / m as f64 <= (j + 1) as f64 / n as f64);
        if advance_inner {
            tris.push([inner[i % m], outer[j % n], inner[(i + 1) % m]]);
            i += 1;
        } else {
            tris.push([inner[i % m], outer[j % n], outer[(j + 1) % n]]);
            j += 1;
        }
    }
}

/// Disk of the given radius centered at 0, with `resolution` vertices on the
/// boundary circle and concentric rings of roughly uniform spacing inside.
pub fn disk(radius: f64, resolution: usize) -> Result<TriangleMesh> {
    if resolution < 3 {
        return Err(Error::InvalidParameter(format!(
            "disk resolution must be at least 3, got {resolution}"
        )));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidParameter(format!("disk radius {radius}")));
    }
    let rings = ((resolution as f64 / TAU).round() as usize).max(1);
    let mut vertices = vec![Complex::new(0.0, 0.0)];
    let mut tris = Vec::new();
    let mut prev: Vec<usize> = vec![0];
    for k in 1..=rings {
        let count = if k == rings {
            resolution
        } else {
            ((resolution * k) as f64 / rings as f64).round().max(3.0) as usize
        };
        let start = vertices.len();
        vertices.extend(ring(radius * k as f64 / rings as f64, count));
        let cur: Vec<usize> = (start..start + count).collect();
        if k == 1 {
            for j in 0..count {
                tris.push([0, cur[j], cur[(j + 1) % count]]);
            }
        } else {
            zip_rings(&prev, &cur, &mut tris);
        }
        prev = cur;
    }
    TriangleMesh::new(vertices, tris)
}

/// Rectangle `[0, width] × [0, height]` with `nx × ny` cells, each split
/// along alternating diagonals.
pub fn rectangle(width: f64, height: f64, nx: usize, ny: usize) -> Result<TriangleMesh> {
    if nx == 0 || ny == 0 {
        return Err(Error::InvalidParameter(
            "rectangle needs at least one cell".into(),
        ));
    }
    if !(width > 0.0 && height > 0.0 && width.is_finite() && height.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "rectangle size {width} x {height}"
        )));
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            vertices.push(Complex::new(
                width * i as f64 / nx as f64,
                height * j as f64 / ny as f64,
            ));
        }
    }
    let mut tris = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (v00, v10, v01, v11) = (id(i, j), id(i + 1, j), id(i, j + 1), id(i + 1, j + 1));
            if (i + j) % 2 == 0 {
                tris.push([v00, v10, v11]);
                tris.push([v00, v11, v01]);
            } else {
                tris.push([v00, v10, v01]);
                tris.push([v10, v11, v01]);
            }
        }
    }
    TriangleMesh::new(vertices, tris)
}

/// Annulus `r1 ≤ |z| ≤ r2` with `resolution` vertices on the outer circle.
pub fn annulus(r1: f64, r2: f64, resolution: usize) -> Result<TriangleMesh> {
    if resolution < 3 {
        return Err(Error::InvalidParameter(format!(
            "annulus resolution must be at least 3, got {resolution}"
        )));
    }
    if !(r1 > 0.0 && r2 > r1 && r2.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "annulus radii must satisfy 0 < r1 < r2, got {r1}, {r2}"
        )));
    }
    let spacing = TAU * r2 / resolution as f64;
    let bands = (((r2 - r1) / spacing).round() as usize).max(1);
    let mut vertices = Vec::new();
    let mut tris = Vec::new();
    let mut prev: Vec<usize> = Vec::new();
    for k in 0..=bands {
        let r = r1 + (r2 - r1) * k as f64 / bands as f64;
        let count = if k == bands {
            resolution
        } else {
            ((resolution as f64 * r / r2).round() as usize).max(3)
        };
        let start = vertices.len();
        vertices.extend(ring(r, count));
        let cur: Vec<usize> = (start..start + count).collect();
        if k > 0 {
            zip_rings(&prev, &cur, &mut tris);
        }
        prev = cur;
    }
    TriangleMesh::new(vertices, tris)
}
