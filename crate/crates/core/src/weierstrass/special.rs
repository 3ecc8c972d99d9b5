use super::{ElasticMap, MapSource, PointDerivatives};
use crate::complex_analytic::{AnalyticExpr, Complex, I, POLE_TOL, ZERO_TOL};
use crate::error::{Error, Result};

/// Default radius of the disk on which the odd-zero map is evaluated.
pub const ODD_ZERO_DEFAULT_RADIUS: f64 = 0.9;

fn check_lambda(lambda: f64) -> Result<f64> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(lambda / (1.0 + lambda))
    } else {
        Err(Error::InvalidParameter(format!(
            "lambda must be positive and finite, got {lambda}"
        )))
    }
}

/// `f = μ e^{i z z̄} / (i z̄) + conj(k)`, with `f_z = μ e^{i|z|²}`.
#[derive(Clone, Debug)]
pub struct MeltingMap {
    lambda: f64,
    mu: f64,
    k: AnalyticExpr,
    kp: AnalyticExpr,
}

impl MeltingMap {
    pub fn new(lambda: f64, k: AnalyticExpr) -> Result<Self> {
        let mu = check_lambda(lambda)?;
        Ok(MeltingMap {
            lambda,
            mu,
            kp: k.derivative(),
            k,
        })
    }

    fn check(&self, z: Complex) -> Result<()> {
        if z.norm() < POLE_TOL {
            return Err(Error::DomainViolation {
                at: z,
                reason: "the melting map is singular at 0".into(),
            });
        }
        Ok(())
    }
}

impl ElasticMap for MeltingMap {
    fn lambda(&self) -> f64 {
        self.lambda
    }

    fn source(&self) -> MapSource {
        MapSource::Melting
    }

    fn f(&self, z: Complex) -> Result<Complex> {
        self.check(z)?;
        let e = Complex::from_polar(self.mu, z.norm_sqr());
        Ok(e / (I * z.conj()) + self.k.eval(z)?.conj())
    }

    fn derivatives(&self, z: Complex) -> Result<PointDerivatives> {
        self.check(z)?;
        let zb = z.conj();
        let e = Complex::from_polar(self.mu, z.norm_sqr());
        let fzbar = e * (I / (zb * zb) + z / zb) + self.kp.eval(z)?.conj();
        Ok(PointDerivatives::regular(e, fzbar))
    }
}

/// `f = μ H / conj(h) + conj(k)` with `h = H'`, so `f_z = μ h / conj(h)`.
#[derive(Clone, Debug)]
pub struct BorderlineMap {
    lambda: f64,
    mu: f64,
    big_h: AnalyticExpr,
    h: AnalyticExpr,
    hp: AnalyticExpr,
    k: AnalyticExpr,
    kp: AnalyticExpr,
}

impl BorderlineMap {
    pub fn new(lambda: f64, big_h: AnalyticExpr, k: AnalyticExpr) -> Result<Self> {
        let mu = check_lambda(lambda)?;
        let h = big_h.derivative();
        if h.is_zero() {
            return Err(Error::InvalidParameter("H must not be constant".into()));
        }
        Ok(BorderlineMap {
            lambda,
            mu,
            hp: h.derivative(),
            h,
            big_h,
            kp: k.derivative(),
            k,
        })
    }

    fn h_at(&self, z: Complex) -> Result<Complex> {
        let hv = self.h.eval(z)?;
        if hv.norm() < ZERO_TOL {
            return Err(Error::PoleEvaluation { at: z });
        }
        Ok(hv)
    }
}

impl ElasticMap for BorderlineMap {
    fn lambda(&self) -> f64 {
        self.lambda
    }

    fn source(&self) -> MapSource {
        MapSource::Borderline
    }

    fn f(&self, z: Complex) -> Result<Complex> {
        let hv = self.h_at(z)?;
        Ok(self.big_h.eval(z)? * self.mu / hv.conj() + self.k.eval(z)?.conj())
    }

    fn derivatives(&self, z: Complex) -> Result<PointDerivatives> {
        let hc = self.h_at(z)?.conj();
        let fz = hc.conj() / hc * self.mu;
        let fzbar = -self.big_h.eval(z)? * self.hp.eval(z)?.conj() / (hc * hc) * self.mu
            + self.kp.eval(z)?.conj();
        Ok(PointDerivatives::regular(fz, fzbar))
    }
}

/// Closed-form elastic map for `λ = 1` with `g = z² + 1`, which has odd
/// (simple) zeros at `±i`. With `q = √(1+z²)` and `S = arcsinh z + z q`:
///
/// ```text
/// f = z³/6 + z/2 + Re S / (2 conj(q))
/// ```
///
/// Principal branches are used; the cuts run along the imaginary axis
/// beyond `±i`.
#[derive(Clone, Debug)]
pub struct OddZeroMap {
    domain_radius: f64,
}

impl OddZeroMap {
    pub fn new(domain_radius: f64) -> Result<Self> {
        if !(domain_radius > 0.0 && domain_radius.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "domain radius must be positive, got {domain_radius}"
            )));
        }
        Ok(OddZeroMap { domain_radius })
    }

    pub fn domain_radius(&self) -> f64 {
        self.domain_radius
    }

    fn check(&self, z: Complex) -> Result<Complex> {
        if z.norm() > self.domain_radius {
            return Err(Error::DomainViolation {
                at: z,
                reason: format!("outside the disk of radius {}", self.domain_radius),
            });
        }
        if z.re.abs() < 1e-14 && z.im.abs() > 1.0 + 1e-12 {
            return Err(Error::DomainViolation {
                at: z,
                reason: "on the branch cut of the square root".into(),
            });
        }
        Ok((Complex::new(1.0, 0.0) + z * z).sqrt())
    }
}

impl Default for OddZeroMap {
    fn default() -> Self {
        OddZeroMap {
            domain_radius: ODD_ZERO_DEFAULT_RADIUS,
        }
    }
}

impl ElasticMap for OddZeroMap {
    fn lambda(&self) -> f64 {
        1.0
    }

    fn source(&self) -> MapSource {
        MapSource::OddZeroExample
    }

    fn f(&self, z: Complex) -> Result<Complex> {
        let q = self.check(z)?;
        let poly = z * z * z / 6.0 + z * 0.5;
        if q.norm() < ZERO_TOL {
            // Re S vanishes at ±i
            return Ok(poly);
        }
        let s = z.asinh() + z * q;
        Ok(poly + s.re / (q.conj() * 2.0))
    }

    fn derivatives(&self, z: Complex) -> Result<PointDerivatives> {
        let q = self.check(z)?;
        let base = (z * z + 1.0) * 0.5;
        if q.norm() < ZERO_TOL {
            return Ok(PointDerivatives {
                fz: base + 0.5,
                fzbar: Complex::new(0.5, 0.0),
                phase_defined: false,
            });
        }
        let qc = q.conj();
        let s = z.asinh() + z * q;
        let fz = base + q / qc * 0.5;
        let fzbar = (Complex::new(1.0, 0.0) - z.conj() * s.re / (qc * qc * qc)) * 0.5;
        Ok(PointDerivatives::regular(fz, fzbar))
    }
}

/// `f = a z + b z̄ + c`; elastic only when `|a|` is the stress-free modulus
/// and `b = 0`, but useful as a reference map.
#[derive(Clone, Debug)]
pub struct AffineMap {
    pub lambda: f64,
    pub a: Complex,
    pub b: Complex,
    pub c: Complex,
}

impl ElasticMap for AffineMap {
    fn lambda(&self) -> f64 {
        self.lambda
    }

    fn source(&self) -> MapSource {
        MapSource::Affine
    }

    fn f(&self, z: Complex) -> Result<Complex> {
        Ok(self.a * z + self.b * z.conj() + self.c)
    }

    fn derivatives(&self, _z: Complex) -> Result<PointDerivatives> {
        Ok(PointDerivatives::regular(self.a, self.b))
    }
}

#[derive(Clone, Debug)]
pub enum SpecialKind {
    Melting {
        k: AnalyticExpr,
    },
    Borderline {
        big_h: AnalyticExpr,
        k: AnalyticExpr,
    },
    OddZeroExample {
        domain_radius: f64,
    },
}

pub fn special_map(kind: SpecialKind, lambda: f64) -> Result<Box<dyn ElasticMap>> {
    Ok(match kind {
        SpecialKind::Melting { k } => Box::new(MeltingMap::new(lambda, k)?),
        SpecialKind::Borderline { big_h, k } => Box::new(BorderlineMap::new(lambda, big_h, k)?),
        SpecialKind::OddZeroExample { domain_radius } => {
            if lambda != 1.0 {
                return Err(Error::InvalidParameter(format!(
                    "the odd-zero example is fixed at lambda = 1, got {lambda}"
                )));
            }
            Box::new(OddZeroMap::new(domain_radius)?)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::super::{arg_fz_laplacian, g_of};
    use super::*;
    use crate::complex_analytic::wirtinger_fd;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn melting_modulus_and_g() {
        let m = special_map(
            SpecialKind::Melting {
                k: AnalyticExpr::zero(),
            },
            1.0,
        )
        .unwrap();
        let z = c(1.0, 1.0);
        assert!((m.fz(z).unwrap().norm() - 0.5).abs() < 1e-15);
        assert!(g_of(m.as_ref(), z).unwrap().norm() < 1e-15);
        assert!(matches!(
            m.f(c(0.0, 0.0)),
            Err(Error::DomainViolation { .. })
        ));
    }

    #[test]
    fn melting_derivatives_match_fd() {
        let k = AnalyticExpr::polynomial(&[c(0.0, 0.0), c(0.2, 0.1), c(0.0, -0.3)]);
        let m = MeltingMap::new(2.0, k).unwrap();
        for z in [c(0.7, 0.2), c(-0.4, 0.9), c(1.1, -0.5)] {
            let (a, b) = wirtinger_fd(|w| m.f(w), z, 1e-6).unwrap();
            let pd = m.derivatives(z).unwrap();
            assert!((a - pd.fz).norm() < 1e-7, "{a} {}", pd.fz);
            assert!((b - pd.fzbar).norm() < 1e-7, "{b} {}", pd.fzbar);
        }
    }

    #[test]
    fn melting_phase_is_not_harmonic() {
        let m = MeltingMap::new(1.0, AnalyticExpr::zero()).unwrap();
        let lap = arg_fz_laplacian(&m, c(0.4, 0.3), 1e-3).unwrap();
        assert!((lap - 4.0).abs() < 1e-6, "{lap}");
    }

    #[test]
    fn borderline_with_linear_h() {
        let m = special_map(
            SpecialKind::Borderline {
                big_h: AnalyticExpr::z(),
                k: AnalyticExpr::zero(),
            },
            1.0,
        )
        .unwrap();
        for z in [c(0.3, 0.1), c(-1.0, 2.0)] {
            assert!((m.f(z).unwrap() - z * 0.5).norm() < 1e-15);
            assert!((m.fz(z).unwrap() - c(0.5, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn borderline_phase_is_harmonic() {
        let big_h = AnalyticExpr::polynomial(&[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.3, 0.2)]);
        let m = BorderlineMap::new(1.3, big_h, AnalyticExpr::z()).unwrap();
        for z in [c(0.2, 0.1), c(-0.5, 0.4)] {
            assert!((m.fz(z).unwrap().norm() - 1.3 / 2.3).abs() < 1e-12);
            assert!(arg_fz_laplacian(&m, z, 1e-3).unwrap().abs() < 1e-4);
            let (a, b) = wirtinger_fd(|w| m.f(w), z, 1e-6).unwrap();
            let pd = m.derivatives(z).unwrap();
            assert!((a - pd.fz).norm() < 1e-7);
            assert!((b - pd.fzbar).norm() < 1e-7);
        }
    }

    #[test]
    fn odd_zero_at_origin() {
        let m = special_map(
            SpecialKind::OddZeroExample {
                domain_radius: ODD_ZERO_DEFAULT_RADIUS,
            },
            1.0,
        )
        .unwrap();
        let z = c(0.0, 0.0);
        assert!((m.fz(z).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        assert!((g_of(m.as_ref(), z).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        let (a, _) = wirtinger_fd(|w| m.f(w), z, 1e-5).unwrap();
        assert!((a - c(1.0, 0.0)).norm() < 1e-8);
        assert!(special_map(SpecialKind::OddZeroExample { domain_radius: 0.9 }, 2.0).is_err());
    }

    #[test]
    fn odd_zero_derivatives_match_fd() {
        let m = OddZeroMap::default();
        for z in [c(0.3, 0.4), c(-0.6, 0.5), c(0.1, -0.85)] {
            let (a, b) = wirtinger_fd(|w| m.f(w), z, 1e-6).unwrap();
            let pd = m.derivatives(z).unwrap();
            assert!((a - pd.fz).norm() < 1e-7);
            assert!((b - pd.fzbar).norm() < 1e-7);
            let g = g_of(&m, z).unwrap();
            assert!((g - (z * z + 1.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn odd_zero_domain() {
        let m = OddZeroMap::default();
        assert!(matches!(
            m.f(c(0.95, 0.0)),
            Err(Error::DomainViolation { .. })
        ));
        let wide = OddZeroMap::new(1.4).unwrap();
        assert!(matches!(
            wide.f(c(0.0, 1.2)),
            Err(Error::DomainViolation { .. })
        ));
        let pd = wide.derivatives(c(0.0, 1.0)).unwrap();
        assert!(!pd.phase_defined);
        assert!((pd.fz.norm() - 0.5).abs() < 1e-15);
    }
}
