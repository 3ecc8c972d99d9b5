use super::datum::{MeromorphicK, WeierstrassDatum};
use super::{ElasticMap, MapSource, PointDerivatives};
use crate::complex_analytic::{
    conj_laurent, horner, AnalyticExpr, Complex, Term, ZeroExpansion, POLE_TOL, ZERO_TOL,
};
use crate::error::{Error, Result};

const LOCAL_TERMS: usize = 30;

/// Expansion data around one zero `p` of order `l`, with `w = z - p`,
/// `h = w^l A(w)` and `H - H(p) = w^{l+1} B(w)`.
#[derive(Clone, Debug)]
struct LocalPatch {
    p: Complex,
    order: i32,
    radius: f64,
    compensated: bool,
    a: Vec<Complex>,
    b: Vec<Complex>,
    /// `w A'(w) + l A(w)` coefficients, i.e. `h'` divided by `w^{l-1}`.
    d: Vec<Complex>,
    /// Regular part of `μ H(p) / conj(h)` in powers of `w̄`, and its derivative.
    regular: Vec<Complex>,
    regular_d: Vec<Complex>,
    /// `k` without its poles at `p`.
    k_rest: AnalyticExpr,
    k_rest_d: AnalyticExpr,
}

/// The elastic map generated by a Weierstrass datum and a meromorphic `k`.
#[derive(Clone, Debug)]
pub struct WeierstrassMap {
    datum: WeierstrassDatum,
    mu: f64,
    hp: AnalyticExpr,
    big_h: AnalyticExpr,
    big_g: AnalyticExpr,
    k: MeromorphicK,
    kp: AnalyticExpr,
    patches: Vec<LocalPatch>,
}

/// Builds the map `½G + μ H/conj(h) + conj(k)`.
///
/// Near each declared zero the pole of `H/conj(h)` is handled by a local
/// series, so a compensating `k` gives a map that is smooth up to the zero.
/// If `k` does not compensate a zero, evaluation there fails with
/// [`Error::PoleEvaluation`].
pub fn build_elastic_map(datum: &WeierstrassDatum, k: &MeromorphicK) -> Result<WeierstrassMap> {
    let h = &datum.h;
    let big_h = h.antiderivative()?;
    let big_g = h.square()?.antiderivative()?;
    let mu = datum.mu();
    let mut patches = Vec::with_capacity(datum.zeros.len());
    let h_poles = h.pole_centers();
    for zero in &datum.zeros {
        let l = zero.order;
        let p = zero.p;
        let mut reach: f64 = 1.0;
        for q in &datum.zeros {
            if q.p != p {
                reach = reach.min((q.p - p).norm());
            }
        }
        for c in &h_poles {
            reach = reach.min((c - p).norm());
        }
        for c in &k.pole_centers {
            if (c - p).norm() > POLE_TOL {
                reach = reach.min((c - p).norm());
            }
        }
        let radius = 0.1 * reach / (1.0 + h.max_rate());
        let n = l + LOCAL_TERMS + 1;
        let ex = ZeroExpansion::new(h, p, l, n)?;
        let a = ex.a.clone();
        let b: Vec<Complex> = a
            .iter()
            .enumerate()
            .map(|(i, ai)| ai / (l + i + 1) as f64)
            .collect();
        let d: Vec<Complex> = a
            .iter()
            .enumerate()
            .map(|(i, ai)| ai * (l + i) as f64)
            .collect();
        let numer = big_h.eval(p)? * mu;
        let laurent = conj_laurent(numer, &ex, l + LOCAL_TERMS);
        let regular = laurent[l..].to_vec();
        let regular_d: Vec<Complex> = (1..regular.len()).map(|m| regular[m] * m as f64).collect();

        let mut rest = Vec::new();
        for t in k.k.terms() {
            match *t {
                Term::Monomial { center, power, .. }
                    if power < 0 && (center - p).norm() < POLE_TOL => {}
                _ => rest.push(*t),
            }
        }
        let k_rest = AnalyticExpr::new(rest);
        let have = k.principal_coeffs_at(p);
        let want: Vec<Complex> = (0..l).map(|j| -laurent[l - 1 - j].conj()).collect();
        let scale = numer.norm().max(1.0);
        let compensated = have.len() <= l
            && want.iter().enumerate().all(|(j, w)| {
                (have.get(j).copied().unwrap_or_default() - w).norm() <= 1e-9 * scale
            });
        patches.push(LocalPatch {
            p,
            order: l as i32,
            radius,
            compensated,
            a,
            b,
            d,
            regular,
            regular_d,
            k_rest_d: k_rest.derivative(),
            k_rest,
        });
    }
    Ok(WeierstrassMap {
        datum: datum.clone(),
        mu,
        hp: h.derivative(),
        big_h,
        big_g,
        kp: k.k.derivative(),
        k: k.clone(),
        patches,
    })
}

impl WeierstrassMap {
    pub fn datum(&self) -> &WeierstrassDatum {
        &self.datum
    }

    pub fn k(&self) -> &MeromorphicK {
        &self.k
    }

    /// Whether `k` cancels the pole at every declared zero.
    pub fn is_compensated(&self) -> bool {
        self.patches.iter().all(|p| p.compensated)
    }

    pub fn h(&self, z: Complex) -> Result<Complex> {
        self.datum.h.eval(z)
    }

    fn patch_at(&self, z: Complex) -> Option<&LocalPatch> {
        self.patches
            .iter()
            .find(|pt| pt.compensated && (z - pt.p).norm() < pt.radius)
    }

    fn check_h(&self, z: Complex) -> Result<Complex> {
        let hv = self.datum.h.eval(z)?;
        if hv.norm() < ZERO_TOL {
            return Err(Error::PoleEvaluation { at: z });
        }
        Ok(hv)
    }
}

impl LocalPatch {
    /// `(w/w̄)` or 1 at the zero itself.
    fn phase(&self, w: Complex) -> Complex {
        if w.norm() < POLE_TOL {
            Complex::new(1.0, 0.0)
        } else {
            w / w.conj()
        }
    }
}

impl ElasticMap for WeierstrassMap {
    fn lambda(&self) -> f64 {
        self.datum.lambda
    }

    fn source(&self) -> MapSource {
        MapSource::Weierstrass
    }

    fn f(&self, z: Complex) -> Result<Complex> {
        let half_g = self.big_g.eval(z)? * 0.5;
        if let Some(pt) = self.patch_at(z) {
            let w = z - pt.p;
            let u = pt.phase(w);
            let t1 = w * u.powi(pt.order) * horner(&pt.b, w) / horner(&pt.a, w).conj() * self.mu;
            let t2 = horner(&pt.regular, w.conj());
            return Ok(half_g + t1 + t2 + pt.k_rest.eval(z)?.conj());
        }
        let hv = self.check_h(z)?;
        Ok(half_g + self.big_h.eval(z)? * self.mu / hv.conj() + self.k.k.eval(z)?.conj())
    }

    fn derivatives(&self, z: Complex) -> Result<PointDerivatives> {
        let hv = self.datum.h.eval(z)?;
        if let Some(pt) = self.patch_at(z) {
            let w = z - pt.p;
            let u = pt.phase(w);
            let ac = horner(&pt.a, w).conj();
            let fz = hv * hv * 0.5 + u.powi(pt.order) * ac.conj() / ac * self.mu;
            let fzbar = -u.powi(pt.order + 1) * horner(&pt.b, w) * horner(&pt.d, w).conj()
                / (ac * ac)
                * self.mu
                + horner(&pt.regular_d, w.conj())
                + pt.k_rest_d.eval(z)?.conj();
            return Ok(PointDerivatives {
                fz,
                fzbar,
                phase_defined: w.norm() >= POLE_TOL,
            });
        }
        let hv = self.check_h(z)?;
        let hc = hv.conj();
        let fz = hv * hv * 0.5 + hv / hc * self.mu;
        let fzbar = -self.big_h.eval(z)? * self.hp.eval(z)?.conj() / (hc * hc) * self.mu
            + self.kp.eval(z)?.conj();
        Ok(PointDerivatives::regular(fz, fzbar))
    }
}
