use super::Complex;
use crate::error::{Error, Result};

/// Default step for [`wirtinger_fd`]; balances truncation against rounding.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// Central-difference estimates of `(f_z, f_z̄)` at `z`.
///
/// `f_x` and `f_y` come from symmetric differences along the real and
/// imaginary axes, then `f_z = (f_x - i f_y)/2`, `f_z̄ = (f_x + i f_y)/2`.
/// Error is `O(step²)` for smooth maps.
pub fn wirtinger_fd<F>(map: F, z: Complex, step: f64) -> Result<(Complex, Complex)>
where
    F: Fn(Complex) -> Result<Complex>,
{
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "finite-difference step {step}"
        )));
    }
    let dx = Complex::new(step, 0.0);
    let dy = Complex::new(0.0, step);
    let fx = (map(z + dx)? - map(z - dx)?) / (2.0 * step);
    let fy = (map(z + dy)? - map(z - dy)?) / (2.0 * step);
    let i = Complex::new(0.0, 1.0);
    Ok(((fx - i * fy) * 0.5, (fx + i * fy) * 0.5))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_conjugation() {
        let z = Complex::new(0.4, -1.3);
        let (fz, fzb) = wirtinger_fd(Ok, z, DEFAULT_FD_STEP).unwrap();
        assert!((fz - 1.0).norm() < 1e-10 && fzb.norm() < 1e-10);
        let (fz, fzb) = wirtinger_fd(|w: Complex| Ok(w.conj()), z, DEFAULT_FD_STEP).unwrap();
        assert!(fz.norm() < 1e-10 && (fzb - 1.0).norm() < 1e-10);
    }

    #[test]
    fn square_at_one_plus_i() {
        let z = Complex::new(1.0, 1.0);
        let (fz, fzb) = wirtinger_fd(|w: Complex| Ok(w * w), z, 1e-5).unwrap();
        // symbolic oracle: d/dz z² = 2z
        assert!((fz - 2.0 * z).norm() < 1e-8);
        assert!(fzb.norm() < 1e-8);
    }

    #[test]
    fn rejects_bad_step_and_propagates_errors() {
        assert!(wirtinger_fd(Ok, Complex::new(0.0, 0.0), 0.0).is_err());
        let r = wirtinger_fd(
            |w: Complex| {
                if w.re > 0.0 {
                    Err(Error::PoleEvaluation { at: w })
                } else {
                    Ok(w)
                }
            },
            Complex::new(0.0, 0.0),
            1e-3,
        );
        assert!(matches!(r, Err(Error::PoleEvaluation { .. })));
    }
}
