use crate::complex_analytic::{principal_part, AnalyticExpr, Complex, Term, POLE_TOL, ZERO_TOL};
use crate::error::{Error, Result};

/// A declared zero of `h`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Zero {
    pub p: Complex,
    pub order: usize,
}

impl Zero {
    pub fn new(p: Complex, order: usize) -> Self {
        Zero { p, order }
    }

    pub fn simple(p: Complex) -> Self {
        Zero { p, order: 1 }
    }
}

/// Holomorphic `h`, stiffness `λ > 0` and the zeros of `h` in the domain.
#[derive(Clone, Debug)]
pub struct WeierstrassDatum {
    pub h: AnalyticExpr,
    pub lambda: f64,
    pub zeros: Vec<Zero>,
}

impl WeierstrassDatum {
    /// Checks `λ`, the zero list shape and each declared order.
    pub fn new(h: AnalyticExpr, lambda: f64, zeros: Vec<Zero>) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "lambda must be positive and finite, got {lambda}"
            )));
        }
        if h.is_zero() {
            return Err(Error::InvalidParameter(
                "h must not vanish identically".into(),
            ));
        }
        for (i, a) in zeros.iter().enumerate() {
            if a.order == 0 {
                return Err(Error::InvalidParameter(format!(
                    "zero at {} has order 0",
                    a.p
                )));
            }
            if zeros[..i].iter().any(|b| (a.p - b.p).norm() < POLE_TOL) {
                return Err(Error::InvalidParameter(format!(
                    "zero {} listed twice",
                    a.p
                )));
            }
            // order check through the local expansion
            principal_part(Complex::new(1.0, 0.0), &h, a.p, a.order)?;
        }
        if let Some(coeffs) = h.polynomial_coefficients() {
            let degree = coeffs.iter().rposition(|c| c.norm() > 0.0).unwrap_or(0);
            let listed: usize = zeros.iter().map(|z| z.order).sum();
            if listed != degree {
                return Err(Error::MissingZero {
                    detail: format!(
                        "polynomial h has degree {degree} but {listed} zeros are listed"
                    ),
                });
            }
        }
        Ok(WeierstrassDatum { h, lambda, zeros })
    }

    /// `λ/(1+λ)`, the modulus of `f_z` at a zero of `h`.
    pub fn mu(&self) -> f64 {
        self.lambda / (1.0 + self.lambda)
    }

    /// Distance from `z` to the nearest declared zero.
    pub fn zero_distance(&self, z: Complex) -> f64 {
        self.zeros
            .iter()
            .map(|q| (q.p - z).norm())
            .fold(f64::INFINITY, f64::min)
    }
}

/// A meromorphic function given by its terms, with its pole set.
#[derive(Clone, Debug, PartialEq)]
pub struct MeromorphicK {
    pub k: AnalyticExpr,
    pub pole_centers: Vec<Complex>,
}

impl MeromorphicK {
    pub fn new(k: AnalyticExpr) -> Self {
        let pole_centers = k.pole_centers();
        MeromorphicK { k, pole_centers }
    }

    pub fn zero() -> Self {
        MeromorphicK::new(AnalyticExpr::zero())
    }

    /// Coefficients of `(z - p)^m` for `m = -1, -2, ...` down to the
    /// most negative power present at `p`.
    pub fn principal_coeffs_at(&self, p: Complex) -> Vec<Complex> {
        let mut out: Vec<Complex> = Vec::new();
        for t in self.k.terms() {
            if let Term::Monomial {
                coeff,
                center,
                power,
            } = *t
            {
                if power < 0 && (center - p).norm() < POLE_TOL {
                    let idx = (-power - 1) as usize;
                    if out.len() <= idx {
                        out.resize(idx + 1, Complex::new(0.0, 0.0));
                    }
                    out[idx] += coeff;
                }
            }
        }
        out
    }
}

/// The pure principal-part `k` that cancels the poles of
/// `μ H / conj(h)` at the declared zeros (`μ = λ/(1+λ)`, `H = ∫h` with
/// zero constant term).
pub fn compensating_k(datum: &WeierstrassDatum) -> Result<MeromorphicK> {
    let big_h = datum.h.antiderivative()?;
    let mu = datum.mu();
    let mut terms = Vec::new();
    for zero in &datum.zeros {
        let numer = big_h.eval(zero.p)? * mu;
        let pp = principal_part(numer, &datum.h, zero.p, zero.order)?;
        for (i, c) in pp.iter().enumerate() {
            let m = i as i32 - zero.order as i32;
            terms.push(Term::Monomial {
                coeff: -c.conj(),
                center: zero.p,
                power: m,
            });
        }
    }
    let k = AnalyticExpr::new(terms);
    let mut out = MeromorphicK::new(k);
    // keep the declared zeros as poles even when a coefficient vanished
    out.pole_centers = datum
        .zeros
        .iter()
        .filter(|z| !out.principal_coeffs_at(z.p).is_empty())
        .map(|z| z.p)
        .collect();
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertificateReport {
    pub values: Vec<f64>,
    pub min_value: f64,
    pub all_nonneg: bool,
}

/// Evaluates `1 + V'(|f_z|²) = |h|²(1+λ)² / (2λ + |h|²(1+λ))` at each sample.
pub fn strict_minimizer_certificate(
    datum: &WeierstrassDatum,
    samples: &[Complex],
) -> Result<CertificateReport> {
    let lam = datum.lambda;
    let mut values = Vec::with_capacity(samples.len());
    for &z in samples {
        let h2 = datum.h.eval(z)?.norm_sqr();
        values.push(h2 * (1.0 + lam).powi(2) / (2.0 * lam + h2 * (1.0 + lam)));
    }
    let min_value = values.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(CertificateReport {
        all_nonneg: values.iter().all(|&v| v >= 0.0),
        min_value,
        values,
    })
}

/// Argument-principle sweep: the winding of `h` around the circle
/// `|z - center| = radius` must equal the total declared order inside.
pub fn validate_zero_count(datum: &WeierstrassDatum, center: Complex, radius: f64) -> Result<()> {
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter(format!("sweep radius {radius}")));
    }
    if datum
        .h
        .pole_centers()
        .iter()
        .any(|c| (c - center).norm() <= radius)
    {
        return Err(Error::InvalidParameter(
            "h has a pole inside the sweep circle".into(),
        ));
    }
    let expected: usize = datum
        .zeros
        .iter()
        .filter(|z| (z.p - center).norm() < radius)
        .map(|z| z.order)
        .sum();
    let mut n = 4096usize;
    let winding = loop {
        let mut prev = sweep_point(&datum.h, center, radius, 0, n)?;
        let mut total = 0.0;
        let mut coarse = false;
        for j in 1..=n {
            let cur = sweep_point(&datum.h, center, radius, j % n, n)?;
            let d = (cur / prev).arg();
            if d.abs() > std::f64::consts::FRAC_PI_2 {
                coarse = true;
                break;
            }
            total += d;
            prev = cur;
        }
        if !coarse {
            break total / std::f64::consts::TAU;
        }
        if n >= 1 << 20 {
            return Err(Error::MissingZero {
                detail: "argument sweep did not resolve".into(),
            });
        }
        n *= 4;
    };
    let found = winding.round();
    if (found - expected as f64).abs() > 0.5 {
        return Err(Error::MissingZero {
            detail: format!(
                "h winds {found} times around |z - {center}| = {radius}, {expected} zeros declared inside"
            ),
        });
    }
    Ok(())
}

fn sweep_point(
    h: &AnalyticExpr,
    center: Complex,
    radius: f64,
    j: usize,
    n: usize,
) -> Result<Complex> {
    let t = std::f64::consts::TAU * j as f64 / n as f64;
    let z = center + Complex::from_polar(radius, t);
    let v = h.eval(z)?;
    if v.norm() < ZERO_TOL {
        return Err(Error::MissingZero {
            detail: format!("h vanishes at {z} on the sweep circle"),
        });
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn z4m1() -> AnalyticExpr {
        AnalyticExpr::polynomial(&[
            c(-1.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(1.0, 0.0),
        ])
    }

    fn fourth_roots() -> Vec<Zero> {
        [c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0)]
            .into_iter()
            .map(Zero::simple)
            .collect()
    }

    #[test]
    fn quartic_compensator_has_tenth_residues() {
        let d = WeierstrassDatum::new(z4m1(), 1.0, fourth_roots()).unwrap();
        let k = compensating_k(&d).unwrap();
        assert_eq!(k.pole_centers.len(), 4);
        for z in fourth_roots() {
            let pp = k.principal_coeffs_at(z.p);
            assert_eq!(pp.len(), 1);
            assert!((pp[0] - c(0.1, 0.0)).norm() < 1e-12, "{}: {}", z.p, pp[0]);
        }
    }

    #[test]
    fn shifted_linear_h() {
        let h = AnalyticExpr::z() - AnalyticExpr::constant(c(0.0, 1.0));
        let d = WeierstrassDatum::new(h, 1.0, vec![Zero::simple(c(0.0, 1.0))]).unwrap();
        let k = compensating_k(&d).unwrap();
        let pp = k.principal_coeffs_at(c(0.0, 1.0));
        assert!((pp[0] - c(-0.25, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn vanishing_numerator_gives_zero_k() {
        let d =
            WeierstrassDatum::new(AnalyticExpr::z(), 1.0, vec![Zero::simple(c(0.0, 0.0))]).unwrap();
        let k = compensating_k(&d).unwrap();
        assert!(k.k.is_zero());
        assert!(k.pole_centers.is_empty());
    }

    #[test]
    fn simple_zero_closed_form() {
        // k = -μ conj(H(p)) / (h'(p)(z - p)) at each simple zero
        let h = AnalyticExpr::polynomial(&[c(0.5, -1.0), c(0.3, 0.2), c(1.0, 0.0)]);
        let coeffs = h.polynomial_coefficients().unwrap();
        let (a, b, cc) = (coeffs[2], coeffs[1], coeffs[0]);
        let disc = (b * b - a * cc * 4.0).sqrt();
        let roots = [(-b + disc) / (a * 2.0), (-b - disc) / (a * 2.0)];
        let lam = 0.7;
        let d = WeierstrassDatum::new(
            h.clone(),
            lam,
            roots.iter().map(|&p| Zero::simple(p)).collect(),
        )
        .unwrap();
        let k = compensating_k(&d).unwrap();
        let big_h = h.antiderivative().unwrap();
        let mu = lam / (1.0 + lam);
        for p in roots {
            let want = -big_h.eval(p).unwrap().conj() * mu / h.derivative().eval(p).unwrap();
            let got = k.principal_coeffs_at(p)[0];
            assert!((got - want).norm() < 1e-12);
        }
    }

    #[test]
    fn datum_validation() {
        assert!(matches!(
            WeierstrassDatum::new(z4m1(), 0.0, fourth_roots()),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            WeierstrassDatum::new(z4m1(), 1.0, fourth_roots()[..3].to_vec()),
            Err(Error::MissingZero { .. })
        ));
        assert!(matches!(
            WeierstrassDatum::new(z4m1(), 1.0, vec![Zero::new(c(1.0, 0.0), 2)]),
            Err(Error::WrongZeroOrder { .. })
        ));
    }

    #[test]
    fn certificate_values() {
        let d = WeierstrassDatum::new(z4m1(), 1.0, fourth_roots()).unwrap();
        let r = strict_minimizer_certificate(&d, &[c(1.0, 0.0)]).unwrap();
        assert_eq!(r.min_value, 0.0);
        let one = WeierstrassDatum::new(AnalyticExpr::constant(c(1.0, 0.0)), 1.0, vec![]).unwrap();
        let r = strict_minimizer_certificate(&one, &[c(0.2, 0.3), c(-4.0, 1.0)]).unwrap();
        assert!(r.values.iter().all(|v| (v - 1.0).abs() < 1e-15));
        let lin =
            WeierstrassDatum::new(AnalyticExpr::z(), 2.0, vec![Zero::simple(c(0.0, 0.0))]).unwrap();
        let r = strict_minimizer_certificate(&lin, &[c(2.0, 0.0)]).unwrap();
        assert!((r.min_value - 2.25).abs() < 1e-14);
        // direct 1 + V'(|fz|²) with |fz| = ½(|h|² + 2μ)
        let fz: f64 = 0.5 * (4.0 + 2.0 * 2.0 / 3.0);
        assert!((1.0 + 2.0 * (1.0 - 1.0 / fz) - 2.25).abs() < 1e-14);
        assert!(r.all_nonneg);
    }

    #[test]
    fn argument_sweep_finds_undeclared_zero() {
        // exp(z) - 1 has a zero at 0 (and at 2πi k); declare none
        let h = AnalyticExpr::exp(c(1.0, 0.0), c(1.0, 0.0)) - AnalyticExpr::constant(c(1.0, 0.0));
        let d = WeierstrassDatum::new(h.clone(), 1.0, vec![]).unwrap();
        assert!(matches!(
            validate_zero_count(&d, c(0.0, 0.0), 1.0),
            Err(Error::MissingZero { .. })
        ));
        let d = WeierstrassDatum::new(h, 1.0, vec![Zero::simple(c(0.0, 0.0))]).unwrap();
        validate_zero_count(&d, c(0.0, 0.0), 1.0).unwrap();
        let d = WeierstrassDatum::new(z4m1(), 1.0, fourth_roots()).unwrap();
        validate_zero_count(&d, c(0.0, 0.0), 1.5).unwrap();
        validate_zero_count(&d, c(1.0, 0.0), 0.5).unwrap();
    }
}
