use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::{Complex, POLE_TOL};
use crate::error::{Error, Result};

/// One summand of an [`AnalyticExpr`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Term {
    /// `coeff * (z - center)^power`; `power` may be negative.
    Monomial {
        coeff: Complex,
        center: Complex,
        power: i32,
    },
    /// `coeff * exp(rate * z)`.
    Exp { coeff: Complex, rate: Complex },
}

impl Term {
    pub fn coeff(&self) -> Complex {
        match *self {
            Term::Monomial { coeff, .. } | Term::Exp { coeff, .. } => coeff,
        }
    }

    fn with_coeff(self, c: Complex) -> Term {
        match self {
            Term::Monomial { center, power, .. } => Term::Monomial {
                coeff: c,
                center,
                power,
            },
            Term::Exp { rate, .. } => Term::Exp { coeff: c, rate },
        }
    }

    /// Same monomial or exponential up to the coefficient.
    fn same_shape(&self, other: &Term) -> bool {
        match (self, other) {
            (
                Term::Monomial {
                    center: a,
                    power: n,
                    ..
                },
                Term::Monomial {
                    center: b,
                    power: m,
                    ..
                },
            ) => a == b && n == m,
            (Term::Exp { rate: r, .. }, Term::Exp { rate: s, .. }) => r == s,
            _ => false,
        }
    }

    /// Constants are stored as centered-at-zero monomials of power 0.
    fn canonical(self) -> Term {
        match self {
            Term::Monomial {
                coeff, power: 0, ..
            } => Term::Monomial {
                coeff,
                center: Complex::new(0.0, 0.0),
                power: 0,
            },
            Term::Exp { coeff, rate } if rate == Complex::new(0.0, 0.0) => Term::Monomial {
                coeff,
                center: Complex::new(0.0, 0.0),
                power: 0,
            },
            t => t,
        }
    }

    fn eval(&self, z: Complex) -> Result<Complex> {
        match *self {
            Term::Monomial {
                coeff,
                center,
                power,
            } => {
                let w = z - center;
                if power < 0 && w.norm() < POLE_TOL {
                    return Err(Error::PoleEvaluation { at: z });
                }
                Ok(coeff * w.powi(power))
            }
            Term::Exp { coeff, rate } => Ok(coeff * (rate * z).exp()),
        }
    }
}

/// A finite sum of Laurent monomials and exponentials.
///
/// This is the closed term language for the holomorphic data `h`, `H`, `G`
/// and the meromorphic compensator `k`. Differentiation is always closed;
/// integration is closed except for `1/(z - a)` terms.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AnalyticExpr {
    terms: Vec<Term>,
}

impl AnalyticExpr {
    pub fn new(terms: Vec<Term>) -> Self {
        let mut e = AnalyticExpr { terms };
        e.simplify();
        e
    }

    pub fn zero() -> Self {
        AnalyticExpr { terms: Vec::new() }
    }

    pub fn constant(c: Complex) -> Self {
        Self::monomial(c, Complex::new(0.0, 0.0), 0)
    }

    /// The identity function `z`.
    pub fn z() -> Self {
        Self::monomial(Complex::new(1.0, 0.0), Complex::new(0.0, 0.0), 1)
    }

    pub fn monomial(coeff: Complex, center: Complex, power: i32) -> Self {
        Self::new(vec![Term::Monomial {
            coeff,
            center,
            power,
        }])
    }

    pub fn exp(coeff: Complex, rate: Complex) -> Self {
        Self::new(vec![Term::Exp { coeff, rate }])
    }

    /// Polynomial `Σ coeffs[j] z^j`.
    pub fn polynomial(coeffs: &[Complex]) -> Self {
        let zero = Complex::new(0.0, 0.0);
        Self::new(
            coeffs
                .iter()
                .enumerate()
                .map(|(j, &c)| Term::Monomial {
                    coeff: c,
                    center: zero,
                    power: j as i32,
                })
                .collect(),
        )
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// No negative powers anywhere.
    pub fn is_entire(&self) -> bool {
        self.terms
            .iter()
            .all(|t| !matches!(t, Term::Monomial { power, .. } if *power < 0))
    }

    /// Centers of negative-power monomials, deduplicated.
    pub fn pole_centers(&self) -> Vec<Complex> {
        let mut out: Vec<Complex> = Vec::new();
        for t in &self.terms {
            if let Term::Monomial { center, power, .. } = *t {
                if power < 0 && !out.contains(&center) {
                    out.push(center);
                }
            }
        }
        out
    }

    /// Largest absolute exponential rate, 0 if there is none.
    pub fn max_rate(&self) -> f64 {
        self.terms
            .iter()
            .filter_map(|t| match t {
                Term::Exp { rate, .. } => Some(rate.norm()),
                _ => None,
            })
            .fold(0.0, f64::max)
    }

    fn simplify(&mut self) {
        let mut merged: Vec<Term> = Vec::with_capacity(self.terms.len());
        for t in self.terms.drain(..).map(Term::canonical) {
            if let Some(m) = merged.iter_mut().find(|m| m.same_shape(&t)) {
                *m = m.with_coeff(m.coeff() + t.coeff());
            } else {
                merged.push(t);
            }
        }
        merged.retain(|t| t.coeff() != Complex::new(0.0, 0.0));
        self.terms = merged;
    }

    pub fn eval(&self, z: Complex) -> Result<Complex> {
        let mut acc = Complex::new(0.0, 0.0);
        for t in &self.terms {
            acc += t.eval(z)?;
        }
        Ok(acc)
    }

    pub fn derivative(&self) -> AnalyticExpr {
        let terms = self
            .terms
            .iter()
            .filter_map(|t| match *t {
                Term::Monomial { power: 0, .. } => None,
                Term::Monomial {
                    coeff,
                    center,
                    power,
                } => Some(Term::Monomial {
                    coeff: coeff * power as f64,
                    center,
                    power: power - 1,
                }),
                Term::Exp { coeff, rate } => Some(Term::Exp {
                    coeff: coeff * rate,
                    rate,
                }),
            })
            .collect();
        AnalyticExpr::new(terms)
    }

    /// Term-wise antiderivative with every integration constant set to zero.
    pub fn antiderivative(&self) -> Result<AnalyticExpr> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            terms.push(match *t {
                Term::Monomial {
                    center, power: -1, ..
                } => return Err(Error::LogarithmRequired { center }),
                Term::Monomial {
                    coeff,
                    center,
                    power,
                } => Term::Monomial {
                    coeff: coeff / (power + 1) as f64,
                    center,
                    power: power + 1,
                },
                Term::Exp { coeff, rate } => Term::Exp {
                    coeff: coeff / rate,
                    rate,
                },
            });
        }
        Ok(AnalyticExpr::new(terms))
    }

    /// Product within the term language.
    ///
    /// Monomials with different centers are multiplied only when both have
    /// non-negative powers (re-expanded about 0); a non-constant monomial
    /// times an exponential is rejected.
    pub fn try_mul(&self, other: &AnalyticExpr) -> Result<AnalyticExpr> {
        let mut terms = Vec::new();
        for a in &self.terms {
            for b in &other.terms {
                terms.extend(term_product(a, b)?);
            }
        }
        Ok(AnalyticExpr::new(terms))
    }

    pub fn square(&self) -> Result<AnalyticExpr> {
        self.try_mul(self)
    }

    pub fn scale(&self, c: Complex) -> AnalyticExpr {
        AnalyticExpr::new(
            self.terms
                .iter()
                .map(|t| t.with_coeff(t.coeff() * c))
                .collect(),
        )
    }

    /// Coefficients about 0 when the expression is a polynomial.
    pub fn polynomial_coefficients(&self) -> Option<Vec<Complex>> {
        let mut coeffs: Vec<Complex> = Vec::new();
        for t in &self.terms {
            match *t {
                Term::Monomial {
                    coeff,
                    center,
                    power,
                } if power >= 0 => {
                    let expanded = binomial_expand(center, power as usize);
                    if coeffs.len() < expanded.len() {
                        coeffs.resize(expanded.len(), Complex::new(0.0, 0.0));
                    }
                    for (j, e) in expanded.into_iter().enumerate() {
                        coeffs[j] += coeff * e;
                    }
                }
                _ => return None,
            }
        }
        Some(coeffs)
    }

    /// Taylor coefficients `t_0 .. t_{count-1}` about `p`.
    pub fn taylor(&self, p: Complex, count: usize) -> Result<Vec<Complex>> {
        let mut out = vec![Complex::new(0.0, 0.0); count];
        for t in &self.terms {
            match *t {
                Term::Monomial {
                    coeff,
                    center,
                    power,
                } => {
                    let d = p - center;
                    if d.norm() < POLE_TOL {
                        if power < 0 {
                            return Err(Error::PoleEvaluation { at: p });
                        }
                        if (power as usize) < count {
                            out[power as usize] += coeff;
                        }
                        continue;
                    }
                    // C(n, j) d^(n-j), generated by the ratio (n - j) / ((j + 1) d).
                    let mut c = coeff * d.powi(power);
                    for (j, slot) in out.iter_mut().enumerate() {
                        *slot += c;
                        c = c * ((power as f64 - j as f64) / (j as f64 + 1.0)) / d;
                        if c == Complex::new(0.0, 0.0) {
                            break;
                        }
                    }
                }
                Term::Exp { coeff, rate } => {
                    let mut c = coeff * (rate * p).exp();
                    for (j, slot) in out.iter_mut().enumerate() {
                        *slot += c;
                        c = c * rate / (j as f64 + 1.0);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Structural comparison: same terms in any order, coefficients equal
    /// to within `rel_tol` relative to their magnitude.
    pub fn approx_eq_terms(&self, other: &AnalyticExpr, rel_tol: f64) -> bool {
        self.terms.len() == other.terms.len()
            && self.terms.iter().all(|t| {
                other.terms.iter().any(|u| {
                    t.same_shape(u)
                        && (t.coeff() - u.coeff()).norm()
                            <= rel_tol * t.coeff().norm().max(u.coeff().norm())
                })
            })
    }
}

/// Coefficients of `(z - a)^n` in powers of `z`.
fn binomial_expand(a: Complex, n: usize) -> Vec<Complex> {
    let mut out = vec![Complex::new(0.0, 0.0); n + 1];
    let mut binom = 1.0;
    for (j, slot) in out.iter_mut().enumerate() {
        *slot = (-a).powi((n - j) as i32) * binom;
        binom = binom * (n - j) as f64 / (j + 1) as f64;
    }
    out
}

fn term_product(a: &Term, b: &Term) -> Result<Vec<Term>> {
    let zero = Complex::new(0.0, 0.0);
    match (*a, *b) {
        (Term::Exp { coeff: c, rate: r }, Term::Exp { coeff: d, rate: s }) => Ok(vec![Term::Exp {
            coeff: c * d,
            rate: r + s,
        }]),
        (
            Term::Monomial {
                coeff: c, power: 0, ..
            },
            Term::Exp { coeff: d, rate },
        )
        | (
            Term::Exp { coeff: d, rate },
            Term::Monomial {
                coeff: c, power: 0, ..
            },
        ) => Ok(vec![Term::Exp { coeff: c * d, rate }]),
        (
            Term::Monomial {
                coeff: c,
                center: p,
                power: n,
            },
            Term::Monomial {
                coeff: d,
                center: q,
                power: m,
            },
        ) => {
            if p == q || n == 0 || m == 0 {
                let center = if n == 0 { q } else { p };
                return Ok(vec![Term::Monomial {
                    coeff: c * d,
                    center,
                    power: n + m,
                }]);
            }
            if n < 0 || m < 0 {
                return Err(Error::UnsupportedProduct);
            }
            let x = binomial_expand(p, n as usize);
            let y = binomial_expand(q, m as usize);
            let mut out = Vec::with_capacity(x.len() + y.len());
            for (i, xi) in x.iter().enumerate() {
                for (j, yj) in y.iter().enumerate() {
                    out.push(Term::Monomial {
                        coeff: c * d * xi * yj,
                        center: zero,
                        power: (i + j) as i32,
                    });
                }
            }
            Ok(out)
        }
        _ => Err(Error::UnsupportedProduct),
    }
}

impl Add for AnalyticExpr {
    type Output = AnalyticExpr;
    fn add(mut self, rhs: AnalyticExpr) -> AnalyticExpr {
        self.terms.extend(rhs.terms);
        self.simplify();
        self
    }
}

impl Neg for AnalyticExpr {
    type Output = AnalyticExpr;
    fn neg(self) -> AnalyticExpr {
        self.scale(Complex::new(-1.0, 0.0))
    }
}

impl Sub for AnalyticExpr {
    type Output = AnalyticExpr;
    fn sub(self, rhs: AnalyticExpr) -> AnalyticExpr {
        self + (-rhs)
    }
}

impl Mul<Complex> for AnalyticExpr {
    type Output = AnalyticExpr;
    fn mul(self, rhs: Complex) -> AnalyticExpr {
        self.scale(rhs)
    }
}

fn fmt_complex(c: Complex) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.re == 0.0 {
        format!("{}i", c.im)
    } else {
        format!("({}{:+}i)", c.re, c.im)
    }
}

fn fmt_shift(center: Complex) -> String {
    if center == Complex::new(0.0, 0.0) {
        "z".to_string()
    } else {
        format!("(z - {})", fmt_complex(center))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Term::Monomial {
                coeff, power: 0, ..
            } => write!(f, "{}", fmt_complex(coeff)),
            Term::Monomial {
                coeff,
                center,
                power: 1,
            } => write!(f, "{}*{}", fmt_complex(coeff), fmt_shift(center)),
            Term::Monomial {
                coeff,
                center,
                power: -1,
            } => write!(f, "{}/{}", fmt_complex(coeff), fmt_shift(center)),
            Term::Monomial {
                coeff,
                center,
                power,
            } if power < 0 => write!(f, "{}/{}^{}", fmt_complex(coeff), fmt_shift(center), -power),
            Term::Monomial {
                coeff,
                center,
                power,
            } => write!(f, "{}*{}^{}", fmt_complex(coeff), fmt_shift(center), power),
            Term::Exp { coeff, rate } => {
                write!(f, "{}*exp({}*z)", fmt_complex(coeff), fmt_complex(rate))
            }
        }
    }
}

impl fmt::Display for AnalyticExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn z4_minus_1() -> AnalyticExpr {
        AnalyticExpr::polynomial(&[
            c(-1.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(1.0, 0.0),
        ])
    }

    #[test]
    fn eval_root_and_pole_and_euler() {
        assert_eq!(z4_minus_1().eval(c(1.0, 0.0)).unwrap(), c(0.0, 0.0));

        let pole = AnalyticExpr::monomial(c(0.1, 0.0), c(1.0, 0.0), -1);
        assert!(matches!(
            pole.eval(c(1.0, 0.0)),
            Err(Error::PoleEvaluation { .. })
        ));

        let e = AnalyticExpr::exp(c(1.0, 0.0), c(1.0, 0.0));
        let v = e.eval(c(0.0, std::f64::consts::PI)).unwrap();
        assert!((v - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn derivative_examples() {
        let e = AnalyticExpr::polynomial(&[
            c(0.0, 0.0),
            c(-1.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.2, 0.0),
        ]);
        assert!(e.derivative().approx_eq_terms(&z4_minus_1(), 1e-15));

        let (cc, n) = (c(0.7, -0.2), 3.0);
        let big_h = AnalyticExpr::exp(cc * (2.0 / n), c(n / 2.0, 0.0));
        let h = AnalyticExpr::exp(cc, c(n / 2.0, 0.0));
        assert!(big_h.derivative().approx_eq_terms(&h, 1e-15));

        assert!(AnalyticExpr::constant(c(5.0, 0.0)).derivative().is_zero());
    }

    #[test]
    fn antiderivative_examples() {
        let expected = AnalyticExpr::polynomial(&[
            c(0.0, 0.0),
            c(-1.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.2, 0.0),
        ]);
        assert!(z4_minus_1()
            .antiderivative()
            .unwrap()
            .approx_eq_terms(&expected, 1e-15));

        let log = AnalyticExpr::monomial(c(1.0, 0.0), c(1.0, 0.0), -1);
        assert!(matches!(
            log.antiderivative(),
            Err(Error::LogarithmRequired { .. })
        ));

        let (cc, n) = (c(1.3, 0.4), 2.0);
        let h2 = AnalyticExpr::exp(cc * cc, c(n, 0.0));
        let g = AnalyticExpr::exp(cc * cc / n, c(n, 0.0));
        assert!(h2.antiderivative().unwrap().approx_eq_terms(&g, 1e-15));
    }

    #[test]
    fn constants_are_canonical() {
        let a = AnalyticExpr::exp(c(2.0, 0.0), c(0.0, 0.0));
        let b = AnalyticExpr::monomial(c(2.0, 0.0), c(3.0, 1.0), 0);
        assert_eq!(a, b);
        assert_eq!(a.antiderivative().unwrap().derivative(), a);
    }

    #[test]
    fn squares_and_products() {
        let h = AnalyticExpr::z() - AnalyticExpr::constant(c(0.0, 1.0));
        let h2 = h.square().unwrap();
        let z = c(0.3, -0.8);
        let direct = (z - c(0.0, 1.0)) * (z - c(0.0, 1.0));
        assert!((h2.eval(z).unwrap() - direct).norm() < 1e-14);

        let shifted = AnalyticExpr::monomial(c(1.0, 0.0), c(1.0, 0.0), 2);
        let other = AnalyticExpr::monomial(c(2.0, 0.0), c(0.0, 1.0), 1);
        let prod = shifted.try_mul(&other).unwrap();
        let expect = (z - 1.0) * (z - 1.0) * 2.0 * (z - c(0.0, 1.0));
        assert!((prod.eval(z).unwrap() - expect).norm() < 1e-14);

        let e = AnalyticExpr::exp(c(1.0, 0.0), c(1.0, 0.0));
        assert!(matches!(
            e.try_mul(&AnalyticExpr::z()),
            Err(Error::UnsupportedProduct)
        ));
        let p1 = AnalyticExpr::monomial(c(1.0, 0.0), c(1.0, 0.0), -1);
        let p2 = AnalyticExpr::monomial(c(1.0, 0.0), c(-1.0, 0.0), -1);
        assert!(matches!(p1.try_mul(&p2), Err(Error::UnsupportedProduct)));
    }

    #[test]
    fn taylor_matches_derivatives() {
        let e = z4_minus_1()
            + AnalyticExpr::exp(c(0.5, 0.1), c(-0.3, 1.1))
            + AnalyticExpr::monomial(c(0.2, 0.0), c(2.0, 1.0), -2);
        let p = c(0.4, 0.3);
        let t = e.taylor(p, 4).unwrap();
        let mut d = e.clone();
        let mut fact = 1.0;
        for (j, tj) in t.iter().enumerate() {
            if j > 0 {
                fact *= j as f64;
            }
            let expect = d.eval(p).unwrap() / fact;
            assert!(
                (tj - expect).norm() < 1e-13 * (1.0 + expect.norm()),
                "j={j}"
            );
            d = d.derivative();
        }
    }

    #[test]
    fn display_is_readable() {
        let k = AnalyticExpr::monomial(c(0.1, 0.0), c(1.0, 0.0), -1);
        assert_eq!(k.to_string(), "0.1/(z - 1)");
    }
}
