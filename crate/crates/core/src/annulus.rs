//! Free-boundary equilibria with circular or straight boundaries: the
//! rotationally equivariant annulus family (`h = c zⁿ`, `k = α z^{-2n-1}`),
//! the periodic strip family (`h = c e^{nz/2}`, `k = α e^{-nz}`), and the
//! boundary traction residual that certifies them.

use crate::complex_analytic::{Complex, POLE_TOL};
use crate::error::{Error, Result};
use crate::weierstrass::{ElasticMap, MapSource, PointDerivatives, BRANCH_TOL};

/// A non-negative multiple of ½, stored as its double.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HalfInteger {
    twice: u32,
}

impl HalfInteger {
    pub fn from_twice(twice: u32) -> Self {
        HalfInteger { twice }
    }

    /// Accepts values whose double is an integer within `1e-9`.
    pub fn from_f64(n: f64) -> Result<Self> {
        let t = 2.0 * n;
        if !(t >= 0.0) || (t - t.round()).abs() > 1e-9 || t > u32::MAX as f64 {
            return Err(Error::InvalidParameter(format!(
                "n = {n} is not a non-negative multiple of 1/2"
            )));
        }
        Ok(HalfInteger {
            twice: t.round() as u32,
        })
    }

    pub fn twice(self) -> u32 {
        self.twice
    }

    pub fn value(self) -> f64 {
        self.twice as f64 / 2.0
    }

    /// Winding number `2n + 1` of the image annulus.
    pub fn winding(self) -> i32 {
        self.twice as i32 + 1
    }
}

impl std::fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.twice.is_multiple_of(2) {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "lambda must be positive and finite, got {lambda}"
        )))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnnulusFamily {
    pub n: HalfInteger,
    pub r1: f64,
    pub r2: f64,
    pub c: f64,
    pub alpha: f64,
    pub lambda: f64,
}

impl AnnulusFamily {
    /// `r^{4n+2} − (4n+2)/((1+λ)(n+1)c²) r^{2n+2} − (4n+2)α/(c²λ)`; it
    /// vanishes exactly at radii where the boundary traction is zero.
    pub fn residual(&self, r: f64) -> f64 {
        let m = self.n.twice as i32;
        let n = self.n.value();
        let c2 = self.c * self.c;
        r.powi(2 * m + 2)
            - (4.0 * n + 2.0) / ((1.0 + self.lambda) * (n + 1.0) * c2) * r.powi(m + 2)
            - self.alpha * (4.0 * n + 2.0) / (c2 * self.lambda)
    }

    /// Signed radial profile `|f|` (up to sign) on the circle of radius `r`.
    pub fn image_radius(&self, r: f64) -> f64 {
        let m = self.n.twice as i32;
        let n = self.n.value();
        let mu = self.lambda / (1.0 + self.lambda);
        self.c * self.c * r.powi(m + 1) / (4.0 * n + 2.0)
            + mu * r / (n + 1.0)
            + self.alpha * r.powi(-(m + 1))
    }
}

/// Closed-form `c` and `α` making both circles `|z| = r1, r2` traction free.
pub fn solve_annulus_params(
    r1: f64,
    r2: f64,
    n: HalfInteger,
    lambda: f64,
) -> Result<AnnulusFamily> {
    check_lambda(lambda)?;
    if !(r1 > 0.0 && r1.is_finite() && r2.is_finite()) {
        return Err(Error::InvalidParameter(format!("radii {r1}, {r2}")));
    }
    if (r2 - r1).abs() < 1e-12 * r2.abs().max(r1.abs()) {
        return Err(Error::DegenerateRadii { r1, r2 });
    }
    if r1 > r2 {
        return Err(Error::InvalidParameter(format!(
            "need r1 < r2, got {r1} > {r2}"
        )));
    }
    let m = n.twice as i32;
    let nv = n.value();
    let c2 = (4.0 * nv + 2.0) * (r2.powi(m + 2) - r1.powi(m + 2))
        / ((1.0 + nv) * (1.0 + lambda) * (r2.powi(2 * m + 2) - r1.powi(2 * m + 2)));
    let alpha = c2 * lambda / (4.0 * nv + 2.0)
        * (r1.powi(2 * m + 2)
            - (4.0 * nv + 2.0) / ((1.0 + lambda) * (nv + 1.0) * c2) * r1.powi(m + 2));
    Ok(AnnulusFamily {
        n,
        r1,
        r2,
        c: c2.sqrt(),
        alpha,
        lambda,
    })
}

/// Evaluator for an annulus family. Points off `[r1, r2]` are evaluated
/// anyway unless the domain is made strict.
#[derive(Clone, Debug)]
pub struct AnnulusMap {
    fam: AnnulusFamily,
    strict_domain: bool,
}

impl AnnulusMap {
    pub fn new(fam: AnnulusFamily) -> Self {
        AnnulusMap {
            fam,
            strict_domain: false,
        }
    }

    pub fn strict(fam: AnnulusFamily) -> Self {
        AnnulusMap {
            fam,
            strict_domain: true,
        }
    }

    pub fn family(&self) -> &AnnulusFamily {
        &self.fam
    }

    /// `true` if `z` lies in the closed annulus `r1 ≤ |z| ≤ r2`.
    pub fn contains(&self, z: Complex) -> bool {
        let r = z.norm();
        let tol = 1e-12 * self.fam.r2;
        r >= self.fam.r1 - tol && r <= self.fam.r2 + tol
    }

    fn polar(&self, z: Complex) -> Result<(f64, Complex)> {
        let r = z.norm();
        if r < POLE_TOL {
            return Err(Error::DomainViolation {
                at: z,
                reason: "the annulus map is singular at 0".into(),
            });
        }
        if self.strict_domain && !self.contains(z) {
            return Err(Error::DomainViolation {
                at: z,
                reason: format!("|z| outside [{}, {}]", self.fam.r1, self.fam.r2),
            });
        }
        Ok((r, z / r))
    }
}

impl ElasticMap for AnnulusMap {
    fn lambda(&self) -> f64 {
        self.fam.lambda
    }

    fn source(&self) -> MapSource {
        MapSource::Weierstrass
    }

    fn f(&self, z: Complex) -> Result<Complex> {
        let (r, u) = self.polar(z)?;
        Ok(u.powi(self.fam.n.twice as i32 + 1) * self.fam.image_radius(r))
    }

    fn derivatives(&self, z: Complex) -> Result<PointDerivatives> {
        let (r, u) = self.polar(z)?;
        let fam = &self.fam;
        let m = fam.n.twice as i32;
        let n = fam.n.value();
        let mu = fam.lambda / (1.0 + fam.lambda);
        let fz = u.powi(m) * (0.5 * fam.c * fam.c * r.powi(m) + mu);
        let fzbar =
            u.powi(m + 2) * (-n * mu / (n + 1.0) - (2.0 * n + 1.0) * fam.alpha * r.powi(-(m + 2)));
        Ok(PointDerivatives::regular(fz, fzbar))
    }
}

/// Periodic strip family on `[x1, x2] × [0, 2π)` with winding `n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StripFamily {
    pub n: u32,
    pub c: f64,
    pub alpha: f64,
    pub lambda: f64,
    pub b: f64,
    pub x1: f64,
    pub x2: f64,
}

impl StripFamily {
    /// From `(n, c, α, λ)`: the boundary lines are `e^{n x} = s ∓ b` with
    /// `s = 2/((1+λ)c²)` and `b² = s² + 2αn/(λc²)`.
    pub fn from_params(n: u32, c: f64, alpha: f64, lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        if n == 0 || !(c > 0.0 && c.is_finite()) || !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "need n >= 1 and c > 0, got n = {n}, c = {c}, alpha = {alpha}"
            )));
        }
        let c2 = c * c;
        let s = 2.0 / ((1.0 + lambda) * c2);
        let b2 = s * s + 2.0 * alpha * n as f64 / (lambda * c2);
        if !(b2 > 0.0) {
            return Err(Error::NoRealRoots {
                detail: format!("discriminant {b2} is not positive"),
            });
        }
        let b = b2.sqrt();
        let u1 = s - b;
        if !(u1 > 0.0) {
            return Err(Error::NoRealRoots {
                detail: format!("smaller root {u1} is not positive, so e^(n x1) has no solution"),
            });
        }
        let u2 = s + b;
        Ok(StripFamily {
            n,
            c,
            alpha,
            lambda,
            b,
            x1: u1.ln() / n as f64,
            x2: u2.ln() / n as f64,
        })
    }

    /// From `(n, x1, x2, λ)`, inverting the root equations:
    /// `c² = 4/((1+λ)(u1+u2))` and `α = −u1 u2 λ c²/(2n)` with `u = e^{n x}`.
    pub fn from_domain(n: u32, x1: f64, x2: f64, lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        if n == 0 {
            return Err(Error::InvalidParameter("need n >= 1".into()));
        }
        if !(x1.is_finite() && x2.is_finite()) {
            return Err(Error::InvalidParameter(format!("strip bounds {x1}, {x2}")));
        }
        if (x2 - x1).abs() < 1e-12 * x1.abs().max(x2.abs()).max(1.0) {
            return Err(Error::DegenerateRadii { r1: x1, r2: x2 });
        }
        if x1 > x2 {
            return Err(Error::InvalidParameter(format!(
                "need x1 < x2, got {x1} > {x2}"
            )));
        }
        let nf = n as f64;
        let (u1, u2) = ((nf * x1).exp(), (nf * x2).exp());
        let c2 = 4.0 / ((1.0 + lambda) * (u1 + u2));
        Ok(StripFamily {
            n,
            c: c2.sqrt(),
            alpha: -u1 * u2 * lambda * c2 / (2.0 * nf),
            lambda,
            b: 0.5 * (u2 - u1),
            x1,
            x2,
        })
    }

    /// Radius of the image circle traced by the line `Re z = x`.
    pub fn image_radius(&self, x: f64) -> f64 {
        let nf = self.n as f64;
        let mu = self.lambda / (1.0 + self.lambda);
        2.0 * mu / nf + self.c * self.c / (2.0 * nf) * (nf * x).exp() + self.alpha * (-nf * x).exp()
    }
}

/// Evaluator for a strip family, `z = x + iy`.
#[derive(Clone, Debug)]
pub struct StripMap {
    fam: StripFamily,
}

impl StripMap {
    pub fn new(fam: StripFamily) -> Self {
        StripMap { fam }
    }

    pub fn family(&self) -> &StripFamily {
        &self.fam
    }
}

impl ElasticMap for StripMap {
    fn lambda(&self) -> f64 {
        self.fam.lambda
    }

    fn source(&self) -> MapSource {
        MapSource::Weierstrass
    }

    fn f(&self, z: Complex) -> Result<Complex> {
        let phase = Complex::from_polar(1.0, self.fam.n as f64 * z.im);
        Ok(phase * self.fam.image_radius(z.re))
    }

    fn derivatives(&self, z: Complex) -> Result<PointDerivatives> {
        let fam = &self.fam;
        let nf = fam.n as f64;
        let mu = fam.lambda / (1.0 + fam.lambda);
        let phase = Complex::from_polar(1.0, nf * z.im);
        let fz = phase * (0.5 * fam.c * fam.c * (nf * z.re).exp() + mu);
        let fzbar = phase * (-nf * fam.alpha * (-nf * z.re).exp() - mu);
        Ok(PointDerivatives::regular(fz, fzbar))
    }
}

/// Boundary curve for traction checks, traversed at unit speed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundaryCurve {
    Circle { center: Complex, radius: f64 },
    Segment { from: Complex, to: Complex },
}

impl BoundaryCurve {
    /// Point and unit tangent at parameter `t ∈ [0, 1]`.
    pub fn point(&self, t: f64) -> (Complex, Complex) {
        match *self {
            BoundaryCurve::Circle { center, radius } => {
                let e = Complex::from_polar(1.0, std::f64::consts::TAU * t);
                (center + e * radius, e * Complex::new(0.0, 1.0))
            }
            BoundaryCurve::Segment { from, to } => {
                let d = to - from;
                (from + d * t, d / d.norm())
            }
        }
    }

    fn sample_params(&self, samples: usize) -> Vec<f64> {
        match self {
            BoundaryCurve::Circle { .. } => {
                (0..samples).map(|j| j as f64 / samples as f64).collect()
            }
            BoundaryCurve::Segment { .. } if samples == 1 => vec![0.5],
            BoundaryCurve::Segment { .. } => (0..samples)
                .map(|j| j as f64 / (samples - 1) as f64)
                .collect(),
        }
    }
}

/// One sample of the boundary traction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TractionSample {
    pub t: f64,
    pub z: Complex,
    pub residual: f64,
}

/// `|λ(1 − 1/|f_z|) f_z γ' − f_z̄ conj(γ')|` at `samples` points of the
/// curve; it vanishes where the boundary is free of traction.
pub fn traction_profile<M: ElasticMap + ?Sized>(
    map: &M,
    boundary: &BoundaryCurve,
    lambda: f64,
    samples: usize,
) -> Result<Vec<TractionSample>> {
    if samples == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    boundary
        .sample_params(samples)
        .into_iter()
        .map(|t| {
            let (z, tangent) = boundary.point(t);
            let d = map.derivatives(z)?;
            let r = d.fz.norm();
            if r < BRANCH_TOL {
                return Err(Error::BranchPoint { at: z });
            }
            let res = d.fz * tangent * (lambda * (1.0 - 1.0 / r)) - d.fzbar * tangent.conj();
            Ok(TractionSample {
                t,
                z,
                residual: res.norm(),
            })
        })
        .collect()
}

/// Largest residual of [`traction_profile`].
pub fn traction_residual<M: ElasticMap + ?Sized>(
    map: &M,
    boundary: &BoundaryCurve,
    lambda: f64,
    samples: usize,
) -> Result<f64> {
    Ok(traction_profile(map, boundary, lambda, samples)?
        .iter()
        .map(|s| s.residual)
        .fold(0.0, f64::max))
}
