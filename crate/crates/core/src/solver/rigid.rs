use rand::Rng;

use super::Constraints;
use crate::complex_analytic::Complex;
use crate::error::{Error, Result};
use crate::mesh_elasticity::{DeformedState, TriangleMesh};

/// Best-fit `z ↦ rotation·z + translation` (unit `rotation`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RigidFit {
    pub rotation: Complex,
    pub translation: Complex,
    /// Largest vertex deviation from the fitted motion, relative to the
    /// mesh diameter.
    pub residual: f64,
}

impl RigidFit {
    pub fn apply(&self, z: Complex) -> Complex {
        self.rotation * z + self.translation
    }

    /// Pull a state back by the inverse motion.
    pub fn remove(&self, state: &DeformedState) -> Result<DeformedState> {
        let inv = self.rotation.conj();
        DeformedState::new(
            state
                .positions()
                .iter()
                .map(|p| inv * (p - self.translation))
                .collect(),
        )
    }
}

/// Least-squares rigid motion taking the reference vertices to the state.
pub fn best_fit_rigid(mesh: &TriangleMesh, state: &DeformedState) -> Result<RigidFit> {
    let refs = mesh.vertices();
    let pts = state.positions();
    if refs.len() != pts.len() || refs.is_empty() {
        return Err(Error::InvalidParameter("state does not match mesh".into()));
    }
    let n = refs.len() as f64;
    let cr = refs.iter().sum::<Complex>() / n;
    let cs = pts.iter().sum::<Complex>() / n;
    let cross: Complex = refs
        .iter()
        .zip(pts)
        .map(|(r, p)| (r - cr).conj() * (p - cs))
        .sum();
    let rotation = if cross.norm() > 0.0 {
        cross / cross.norm()
    } else {
        Complex::new(1.0, 0.0)
    };
    let translation = cs - rotation * cr;
    let diam = mesh.diameter();
    let residual = refs
        .iter()
        .zip(pts)
        .map(|(r, p)| (p - (rotation * r + translation)).norm())
        .fold(0.0, f64::max)
        / diam;
    Ok(RigidFit {
        rotation,
        translation,
        residual,
    })
}

/// Least-squares `z ↦ a z + b z̄ + c` through the pinned targets, applied
/// to every vertex. With fewer than three pins the fit falls back to a
/// translation (one pin) or the identity.
pub fn affine_initial_state(mesh: &TriangleMesh, cons: &Constraints) -> Result<DeformedState> {
    cons.check(mesh)?;
    let refs = mesh.vertices();
    let pairs: Vec<(Complex, Complex)> =
        cons.pinned().iter().map(|(&i, &z)| (refs[i], z)).collect();
    let (a, b, c) = match pairs.len() {
        0 => (
            Complex::new(1.0, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(0.0, 0.0),
        ),
        1 | 2 => {
            let n = pairs.len() as f64;
            let shift = pairs.iter().map(|(r, z)| z - r).sum::<Complex>() / n;
            (Complex::new(1.0, 0.0), Complex::new(0.0, 0.0), shift)
        }
        _ => {
            let mut m = [[Complex::new(0.0, 0.0); 4]; 3];
            for &(r, z) in &pairs {
                let basis = [r, r.conj(), Complex::new(1.0, 0.0)];
                for i in 0..3 {
                    for j in 0..3 {
                        m[i][j] += basis[i].conj() * basis[j];
                    }
                    m[i][3] += basis[i].conj() * z;
                }
            }
            let x = solve3(m).ok_or_else(|| {
                Error::InvalidParameter("pinned vertices do not determine an affine map".into())
            })?;
            (x[0], x[1], x[2])
        }
    };
    DeformedState::from_fn(mesh, |z| a * z + b * z.conj() + c)
}

fn solve3(mut m: [[Complex; 4]; 3]) -> Option<[Complex; 3]> {
    let scale = m
        .iter()
        .flat_map(|r| r[..3].iter())
        .map(|x| x.norm())
        .fold(0.0, f64::max);
    for col in 0..3 {
        let piv = (col..3).max_by(|&a, &b| m[a][col].norm().total_cmp(&m[b][col].norm()))?;
        if m[piv][col].norm() <= 1e-13 * scale {
            return None;
        }
        m.swap(col, piv);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            let pivot = m[col];
            for (x, v) in m[row].iter_mut().zip(pivot).skip(col) {
                *x -= f * v;
            }
        }
    }
    let mut x = [Complex::new(0.0, 0.0); 3];
    for row in (0..3).rev() {
        let mut acc = m[row][3];
        for k in row + 1..3 {
            acc -= m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
    }
    Some(x)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Perturbation {
    /// Independent uniform displacement in a disk at every vertex.
    Vertex,
    /// Smooth displacement: a random quadratic polynomial in `z` and `z̄`,
    /// normalized so the largest vertex displacement equals the amplitude.
    Smooth,
}

/// Add a random displacement of the given amplitude to every vertex.
pub fn perturb<R: Rng + ?Sized>(
    mesh: &TriangleMesh,
    state: &DeformedState,
    amplitude: f64,
    kind: Perturbation,
    rng: &mut R,
) -> Result<DeformedState> {
    let mut rc = || Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let disp: Vec<Complex> = match kind {
        Perturbation::Vertex => mesh
            .vertices()
            .iter()
            .map(|_| loop {
                let c = rc();
                if c.norm() <= 1.0 {
                    break c * amplitude;
                }
            })
            .collect(),
        Perturbation::Smooth => {
            let coeffs: Vec<Complex> = (0..5).map(|_| rc()).collect();
            let n = mesh.vertex_count() as f64;
            let center = mesh.vertices().iter().sum::<Complex>() / n;
            let scale = mesh.diameter();
            let raw: Vec<Complex> = mesh
                .vertices()
                .iter()
                .map(|&z| {
                    let w = (z - center) / scale;
                    coeffs[0] * w
                        + coeffs[1] * w.conj()
                        + coeffs[2] * w * w
                        + coeffs[3] * w * w.conj()
                        + coeffs[4] * w.conj() * w.conj()
                })
                .collect();
            let m = raw.iter().map(|x| x.norm()).fold(0.0, f64::max);
            raw.iter()
                .map(|x| x * (amplitude / m.max(f64::MIN_POSITIVE)))
                .collect()
        }
    };
    DeformedState::new(
        state
            .positions()
            .iter()
            .zip(&disp)
            .map(|(p, d)| p + d)
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh_elasticity::meshgen;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn recovers_a_rigid_motion() {
        let m = meshgen::disk(1.0, 20).unwrap();
        let rot = Complex::from_polar(1.0, -2.1);
        let t = Complex::new(0.3, 4.0);
        let s = DeformedState::from_fn(&m, |z| rot * z + t).unwrap();
        let fit = best_fit_rigid(&m, &s).unwrap();
        assert!((fit.rotation - rot).norm() < 1e-14);
        assert!((fit.translation - t).norm() < 1e-14);
        assert!(fit.residual < 1e-14);
        let back = fit.remove(&s).unwrap();
        for (p, z) in back.positions().iter().zip(m.vertices()) {
            assert!((p - z).norm() < 1e-14);
        }
    }

    #[test]
    fn affine_fit_reproduces_affine_targets() {
        let m = meshgen::disk(1.0, 16).unwrap();
        let f = |z: Complex| {
            Complex::new(1.2, 0.3) * z + Complex::new(0.1, -0.2) * z.conj() + Complex::new(2.0, 1.0)
        };
        let cons = Constraints::boundary(&m, f).unwrap();
        let s = affine_initial_state(&m, &cons).unwrap();
        for (p, z) in s.positions().iter().zip(m.vertices()) {
            assert!((p - f(*z)).norm() < 1e-12);
        }
        let one = Constraints::from_fn(&m, [0], |z| z + 3.0).unwrap();
        let s = affine_initial_state(&m, &one).unwrap();
        assert!((s.positions()[5] - m.vertices()[5] - 3.0).norm() < 1e-15);
    }

    #[test]
    fn perturbations_have_the_requested_size() {
        let m = meshgen::disk(1.0, 20).unwrap();
        let id = DeformedState::identity(&m);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for kind in [Perturbation::Vertex, Perturbation::Smooth] {
            let p = perturb(&m, &id, 0.2, kind, &mut rng).unwrap();
            let dmax = p
                .positions()
                .iter()
                .zip(m.vertices())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(dmax <= 0.2 + 1e-15 && dmax > 0.05);
            assert!(best_fit_rigid(&m, &p).unwrap().residual > 1e-3);
        }
        let a = perturb(
            &m,
            &id,
            0.2,
            Perturbation::Vertex,
            &mut ChaCha8Rng::seed_from_u64(1),
        )
        .unwrap();
        let b = perturb(
            &m,
            &id,
            0.2,
            Perturbation::Vertex,
            &mut ChaCha8Rng::seed_from_u64(1),
        )
        .unwrap();
        assert_eq!(a, b);
    }
}
