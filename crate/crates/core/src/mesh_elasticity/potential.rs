use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Smoothing of `√x` near 0: `√x` is replaced by `√(x + ε²)`.
pub const SQRT_EPS: f64 = 1e-10;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PotentialKind {
    Lambda(f64),
    Custom,
}

/// Convex potential `V` of `x = |f_z|²` with its first two derivatives.
#[derive(Clone)]
pub struct PotentialV {
    kind: PotentialKind,
    custom: Option<(ScalarFn, ScalarFn, ScalarFn)>,
}

impl fmt::Debug for PotentialV {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PotentialV")
            .field("kind", &self.kind)
            .finish()
    }
}

const PROBES: [f64; 9] = [0.01, 0.1, 0.3, 0.7, 1.0, 1.5, 2.0, 4.0, 10.0];

impl PotentialV {
    /// `V(x) = λ(√x − 1)²`.
    pub fn lambda(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "lambda must be positive and finite, got {lambda}"
            )));
        }
        Ok(PotentialV {
            kind: PotentialKind::Lambda(lambda),
            custom: None,
        })
    }

    /// A user potential, checked at probe points for `V(1) = 0`, `V > 0`
    /// elsewhere, `V'' > 0` and consistency of `V'` with `V`.
    pub fn custom(
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d2: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let fail = |m: String| Err(Error::InvalidParameter(format!("potential: {m}")));
        if value(1.0).abs() > 1e-12 {
            return fail(format!("V(1) = {} is not 0", value(1.0)));
        }
        for x in PROBES {
            if x != 1.0 && !(value(x) > 0.0) {
                return fail(format!("V({x}) is not positive"));
            }
            if !(d2(x) > 0.0) {
                return fail(format!("V''({x}) is not positive"));
            }
            let h = 1e-6 * x.max(1e-3);
            let fd = (value(x + h) - value(x - h)) / (2.0 * h);
            if (fd - d1(x)).abs() > 1e-4 * (1.0 + d1(x).abs()) {
                return fail(format!("V'({x}) disagrees with V"));
            }
        }
        Ok(PotentialV {
            kind: PotentialKind::Custom,
            custom: Some((Arc::new(value), Arc::new(d1), Arc::new(d2))),
        })
    }

    pub fn kind(&self) -> PotentialKind {
        self.kind
    }

    pub fn lambda_value(&self) -> Option<f64> {
        match self.kind {
            PotentialKind::Lambda(l) => Some(l),
            PotentialKind::Custom => None,
        }
    }

    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        match (&self.kind, &self.custom) {
            (PotentialKind::Lambda(l), _) => {
                let s = (x + SQRT_EPS * SQRT_EPS).sqrt() - 1.0;
                l * s * s
            }
            (_, Some((v, _, _))) => v(x),
            _ => unreachable!(),
        }
    }

    #[inline]
    pub fn d1(&self, x: f64) -> f64 {
        match (&self.kind, &self.custom) {
            (PotentialKind::Lambda(l), _) => l * (1.0 - 1.0 / (x + SQRT_EPS * SQRT_EPS).sqrt()),
            (_, Some((_, d, _))) => d(x),
            _ => unreachable!(),
        }
    }

    #[inline]
    pub fn d2(&self, x: f64) -> f64 {
        match (&self.kind, &self.custom) {
            (PotentialKind::Lambda(l), _) => {
                let s = (x + SQRT_EPS * SQRT_EPS).sqrt();
                l / (2.0 * s * s * s)
            }
            (_, Some((_, _, d))) => d(x),
            _ => unreachable!(),
        }
    }

    /// `V(x1) − V(x0)` without cancellation for nearby arguments.
    #[inline]
    pub fn difference(&self, x0: f64, x1: f64) -> f64 {
        match self.kind {
            PotentialKind::Lambda(l) => {
                let e2 = SQRT_EPS * SQRT_EPS;
                let (s0, s1) = ((x0 + e2).sqrt(), (x1 + e2).sqrt());
                let ds = (x1 - x0) / (s0 + s1);
                l * ds * (s0 + s1 - 2.0)
            }
            PotentialKind::Custom => self.value(x1) - self.value(x0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_potential_values() {
        let v = PotentialV::lambda(2.0).unwrap();
        assert!(v.value(1.0).abs() < 1e-15);
        assert!((v.value(4.0) - 2.0).abs() < 1e-15);
        assert!((v.value(0.0) - 2.0).abs() < 1e-9);
        assert!((v.d1(4.0) - 1.0).abs() < 1e-15);
        assert!((v.d2(4.0) - 2.0 / 16.0).abs() < 1e-15);
        // V'(x)√x stays bounded near 0
        for x in [1e-4, 1e-8, 1e-12] {
            assert!((v.d1(x) * x.sqrt()).abs() < 2.0 * 2.0);
        }
        let x1 = 1.3 + 1e-12;
        let d = v.difference(1.3, x1);
        assert!((d - v.d1(1.3) * (x1 - 1.3)).abs() < 1e-24);
    }

    #[test]
    fn custom_potential_is_checked() {
        let ok = PotentialV::custom(|x| (x - 1.0).powi(2), |x| 2.0 * (x - 1.0), |_| 2.0).unwrap();
        assert_eq!(ok.kind(), PotentialKind::Custom);
        assert!((ok.value(3.0) - 4.0).abs() < 1e-15);
        assert!(PotentialV::custom(|x| x, |_| 1.0, |_| 0.0).is_err());
        assert!(PotentialV::custom(|x| (x - 1.0).powi(2), |_| 0.0, |_| 2.0).is_err());
        assert!(PotentialV::lambda(0.0).is_err());
    }
}
