use super::{pairwise_sum, PotentialV, TriangleMesh, DEGENERATE_AREA_TOL};
use crate::complex_analytic::Complex;
use crate::error::{Error, Result};
use crate::weierstrass::ElasticMap;

/// Vertex images of a piecewise-linear map.
#[derive(Clone, Debug, PartialEq)]
pub struct DeformedState {
    positions: Vec<Complex>,
}

impl DeformedState {
    pub fn new(positions: Vec<Complex>) -> Result<Self> {
        if let Some(i) = positions.iter().position(|p| !p.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "position {i} is not finite"
            )));
        }
        Ok(DeformedState { positions })
    }

    pub fn identity(mesh: &TriangleMesh) -> Self {
        DeformedState {
            positions: mesh.vertices().to_vec(),
        }
    }

    /// Images of the mesh vertices under `map`.
    pub fn from_map<M: ElasticMap + ?Sized>(mesh: &TriangleMesh, map: &M) -> Result<Self> {
        let positions = mesh
            .vertices()
            .iter()
            .map(|&z| map.f(z))
            .collect::<Result<Vec<_>>>()?;
        DeformedState::new(positions)
    }

    /// Images under an arbitrary pointwise function.
    pub fn from_fn(mesh: &TriangleMesh, f: impl Fn(Complex) -> Complex) -> Result<Self> {
        DeformedState::new(mesh.vertices().iter().map(|&z| f(z)).collect())
    }

    pub fn positions(&self) -> &[Complex] {
        &self.positions
    }

    pub fn positions_mut(&mut self) -> &mut [Complex] {
        &mut self.positions
    }

    pub fn into_positions(self) -> Vec<Complex> {
        self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    fn check(&self, mesh: &TriangleMesh) -> Result<()> {
        if self.positions.len() != mesh.vertex_count() {
            return Err(Error::InvalidParameter(format!(
                "state has {} positions, mesh has {} vertices",
                self.positions.len(),
                mesh.vertex_count()
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TriangleDerivatives {
    pub fz: Complex,
    pub fzbar: Complex,
    pub ref_area: f64,
}

/// Wirtinger derivatives of the affine map taking `reference` to `image`.
pub fn triangle_wirtinger(
    reference: [Complex; 3],
    image: [Complex; 3],
) -> Result<TriangleDerivatives> {
    let e1 = reference[1] - reference[0];
    let e2 = reference[2] - reference[0];
    let d1 = image[1] - image[0];
    let d2 = image[2] - image[0];
    let cross = (e1.conj() * e2).im;
    let ext = reference
        .iter()
        .flat_map(|a| {
            reference
                .iter()
                .map(move |b| (a.re - b.re).abs().max((a.im - b.im).abs()))
        })
        .fold(0.0, f64::max);
    if !(cross.abs() * 0.5 > DEGENERATE_AREA_TOL * ext * ext) {
        return Err(Error::DegenerateTriangle { index: None });
    }
    let det = e1 * e2.conj() - e1.conj() * e2;
    Ok(TriangleDerivatives {
        fz: (d1 * e2.conj() - e1.conj() * d2) / det,
        fzbar: (e1 * d2 - d1 * e2) / det,
        ref_area: 0.5 * cross.abs(),
    })
}

/// Per-triangle `(f_z, f_z̄)` of a state.
pub fn triangle_derivatives(
    mesh: &TriangleMesh,
    state: &DeformedState,
) -> Result<Vec<(Complex, Complex)>> {
    state.check(mesh)?;
    let p = state.positions();
    Ok(mesh
        .triangles()
        .iter()
        .zip(mesh.geometry())
        .map(|(t, g)| g.derivatives(t.map(|i| p[i])))
        .collect())
}

/// `Σ A_t · ½(V(|f_z|²) + |f_z̄|²)` in triangle order with pairwise summation.
pub fn energy(mesh: &TriangleMesh, state: &DeformedState, v: &PotentialV) -> Result<f64> {
    let terms: Vec<f64> = triangle_derivatives(mesh, state)?
        .iter()
        .zip(mesh.geometry())
        .map(|(&(a, b), g)| g.area * 0.5 * (v.value(a.norm_sqr()) + b.norm_sqr()))
        .collect();
    Ok(pairwise_sum(&terms))
}

/// Exact gradient of [`energy`] with respect to every vertex position, as
/// `∂E/∂x + i ∂E/∂y`.
pub fn gradient(
    mesh: &TriangleMesh,
    state: &DeformedState,
    v: &PotentialV,
) -> Result<Vec<Complex>> {
    Ok(energy_and_gradient(mesh, state, v)?.1)
}

pub fn energy_and_gradient(
    mesh: &TriangleMesh,
    state: &DeformedState,
    v: &PotentialV,
) -> Result<(f64, Vec<Complex>)> {
    state.check(mesh)?;
    let p = state.positions();
    let mut grad = vec![Complex::new(0.0, 0.0); p.len()];
    let mut terms = Vec::with_capacity(mesh.triangle_count());
    for (tri, g) in mesh.triangles().iter().zip(mesh.geometry()) {
        let (a, b) = g.derivatives(tri.map(|i| p[i]));
        let x = a.norm_sqr();
        terms.push(g.area * 0.5 * (v.value(x) + b.norm_sqr()));
        let ca = a * (g.area * v.d1(x));
        let cb = b * g.area;
        for k in 0..3 {
            grad[tri[k]] += ca * g.alpha[k].conj() + cb * g.beta[k].conj();
        }
    }
    Ok((pairwise_sum(&terms), grad))
}

/// `E(state + t·dir) − E(state)`, accumulated per triangle from the
/// increments of `f_z` and `f_z̄` so that tiny differences stay accurate.
pub fn energy_change(
    mesh: &TriangleMesh,
    state: &DeformedState,
    v: &PotentialV,
    dir: &[Complex],
    t: f64,
) -> Result<f64> {
    state.check(mesh)?;
    if dir.len() != state.len() {
        return Err(Error::InvalidParameter("direction length mismatch".into()));
    }
    let p = state.positions();
    let terms: Vec<f64> = mesh
        .triangles()
        .iter()
        .zip(mesh.geometry())
        .map(|(tri, g)| {
            let (a, b) = g.derivatives(tri.map(|i| p[i]));
            let (da, db) = g.derivatives(tri.map(|i| dir[i]));
            let (da, db) = (da * t, db * t);
            let dx = 2.0 * (a.conj() * da).re + da.norm_sqr();
            let dy = 2.0 * (b.conj() * db).re + db.norm_sqr();
            let x0 = a.norm_sqr();
            g.area * 0.5 * (v.difference(x0, x0 + dx) + dy)
        })
        .collect();
    Ok(pairwise_sum(&terms))
}

/// Signed area of the image, `Σ A_t (|f_z|² − |f_z̄|²)`.
pub fn image_area(mesh: &TriangleMesh, state: &DeformedState) -> Result<f64> {
    let terms: Vec<f64> = triangle_derivatives(mesh, state)?
        .iter()
        .zip(mesh.geometry())
        .map(|(&(a, b), g)| g.area * (a.norm_sqr() - b.norm_sqr()))
        .collect();
    Ok(pairwise_sum(&terms))
}

/// Both sides of `E + ½ area(f) = ½ Σ A_t (V(|f_z|²) + |f_z|²)`.
pub fn energy_area_identity(
    mesh: &TriangleMesh,
    state: &DeformedState,
    v: &PotentialV,
) -> Result<(f64, f64)> {
    let lhs = energy(mesh, state, v)? + 0.5 * image_area(mesh, state)?;
    let terms: Vec<f64> = triangle_derivatives(mesh, state)?
        .iter()
        .zip(mesh.geometry())
        .map(|(&(a, _), g)| {
            let x = a.norm_sqr();
            g.area * 0.5 * (v.value(x) + x)
        })
        .collect();
    Ok((lhs, pairwise_sum(&terms)))
}
