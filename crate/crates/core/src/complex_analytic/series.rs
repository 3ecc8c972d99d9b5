use super::{AnalyticExpr, Complex, ZERO_TOL};
use crate::error::{Error, Result};

/// Local factorization `h(z) = (z - p)^order * A(z - p)` at a zero `p`.
#[derive(Clone, Debug)]
pub struct ZeroExpansion {
    pub p: Complex,
    pub order: usize,
    /// Taylor coefficients of `A` (so `a[0] != 0`).
    pub a: Vec<Complex>,
    /// Taylor coefficients of `1 / A`.
    pub recip: Vec<Complex>,
}

impl ZeroExpansion {
    /// Expand `h` about `p`, checking that `p` is a zero of exactly `order`.
    /// `terms` coefficients of `A` and `1/A` are kept.
    pub fn new(h: &AnalyticExpr, p: Complex, order: usize, terms: usize) -> Result<Self> {
        let terms = terms.max(1);
        let taylor = h.taylor(p, order + terms)?;
        let found = taylor.iter().position(|t| t.norm() >= ZERO_TOL);
        if found != Some(order) {
            return Err(Error::WrongZeroOrder {
                at: p,
                expected: order,
                found,
            });
        }
        let a = taylor[order..].to_vec();
        let recip = reciprocal_series(&a);
        Ok(ZeroExpansion { p, order, a, recip })
    }
}

/// Power-series reciprocal: `b` with `(Σ a_j w^j)(Σ b_k w^k) = 1`.
pub fn reciprocal_series(a: &[Complex]) -> Vec<Complex> {
    let mut b = Vec::with_capacity(a.len());
    let inv0 = a[0].inv();
    b.push(inv0);
    for k in 1..a.len() {
        let mut s = Complex::new(0.0, 0.0);
        for j in 1..=k {
            s += a[j] * b[k - j];
        }
        b.push(-s * inv0);
    }
    b
}

/// Evaluate `Σ coeffs[j] w^j` by Horner's rule.
pub fn horner(coeffs: &[Complex], w: Complex) -> Complex {
    coeffs
        .iter()
        .rev()
        .fold(Complex::new(0.0, 0.0), |acc, &c| acc * w + c)
}

/// Principal part of `numer / conj(h(z))` at a zero `p` of `h`, as the
/// coefficients of `(z̄ - p̄)^m` for `m = -order ..= -1`.
pub fn principal_part(
    numer: Complex,
    h: &AnalyticExpr,
    p: Complex,
    order: usize,
) -> Result<Vec<Complex>> {
    let ex = ZeroExpansion::new(h, p, order, order)?;
    Ok(conj_laurent(numer, &ex, order))
}

/// Laurent coefficients of `numer / conj(h)` in powers of `(z̄ - p̄)`,
/// starting at `m = -order` and returning `count` of them.
pub fn conj_laurent(numer: Complex, ex: &ZeroExpansion, count: usize) -> Vec<Complex> {
    (0..count)
        .map(|i| {
            let b = ex.recip.get(i).copied().unwrap_or_default();
            numer * b.conj()
        })
        .collect()
}
