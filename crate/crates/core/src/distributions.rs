//! One-dimensional building blocks: p-generalized Gaussians, Gibbs measures and Ullman laws.

use std::f64::consts::PI;

use rand_distr::{Distribution, Gamma};

use crate::error::{Error, Result};
use crate::measure::Density1D;
use crate::orlicz::{self, OrliczFunction};
use crate::quad;
use crate::special::ln_gamma;

/// log of the p-Gaussian normalizer 2 p^{1/p} Γ(1+1/p).
pub fn p_gaussian_log_norm(p: f64) -> f64 {
    2f64.ln() + p.ln() / p + ln_gamma(1.0 + 1.0 / p)
}

pub fn p_gaussian_log_pdf(x: f64, p: f64) -> f64 {
    -x.abs().powf(p) / p - p_gaussian_log_norm(p)
}

/// Density e^{−|x|^p/p} / (2 p^{1/p} Γ(1+1/p)).
pub fn p_gaussian_pdf(x: f64, p: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("p-Gaussian density at non-finite x = {x}")));
    }
    if !(p > 0.0) {
        return Err(Error::Domain(format!("p-Gaussian exponent must be positive, got {p}")));
    }
    Ok(p_gaussian_log_pdf(x, p).exp())
}

pub fn p_gaussian_density(p: f64) -> Density1D {
    Density1D::new(format!("p-gaussian({p})"), (f64::NEG_INFINITY, f64::INFINITY), move |x| {
        p_gaussian_log_pdf(x, p)
    })
    .with_breakpoints(&[0.0])
}

/// Sampler for the p-Gaussian law via |Y|^p/p ~ Gamma(1/p, 1).
#[derive(Debug, Clone, Copy)]
pub struct PGaussian {
    p: f64,
    gamma: Gamma<f64>,
}

impl PGaussian {
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::Domain(format!("p-Gaussian exponent must be finite and positive, got {p}")));
        }
        let gamma = Gamma::new(1.0 / p, 1.0).map_err(|e| Error::Domain(e.to_string()))?;
        Ok(PGaussian { p, gamma })
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

impl Distribution<f64> for PGaussian {
    fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let g: f64 = self.gamma.sample(rng);
        let r = (self.p * g).powf(1.0 / self.p);
        if rng.random::<bool>() { r } else { -r }
    }
}

/// One draw from the p-Gaussian law.
pub fn p_gaussian_sample<R: rand::Rng + ?Sized>(p: f64, rng: &mut R) -> f64 {
    match PGaussian::new(p) {
        Ok(d) => d.sample(rng),
        Err(_) => f64::NAN,
    }
}

/// log M_p(q) = log ∫|x|^q f_p(x) dx.
pub fn log_moment_mpq(p: f64, q: f64) -> f64 {
    q / p * p.ln() + ln_gamma((q + 1.0) / p) - ln_gamma(1.0 / p)
}

/// M_p(q) = p^{q/p} Γ((q+1)/p) / Γ(1/p), the q-th absolute moment of the p-Gaussian.
pub fn moment_mpq(p: f64, q: f64) -> Result<f64> {
    if !(p > 0.0 && q > 0.0) {
        return Err(Error::Domain(format!("moment needs p, q > 0, got p = {p}, q = {q}")));
    }
    let v = log_moment_mpq(p, q).exp();
    if !v.is_finite() || v == 0.0 {
        return Err(Error::Range(format!("M_p(q) overflows at p = {p}, q = {q}")));
    }
    Ok(v)
}

/// Ullman density h_p on [−1, 1]; `p = f64::INFINITY` gives the arcsine law.
pub fn ullman_density(x: f64, p: f64) -> f64 {
    let ax = x.abs();
    if ax > 1.0 || x.is_nan() {
        return 0.0;
    }
    if p == f64::INFINITY {
        return 1.0 / (PI * (1.0 - x * x).sqrt());
    }
    if p == 2.0 {
        return 2.0 / PI * (1.0 - x * x).sqrt();
    }
    if p == 1.0 {
        if ax == 0.0 {
            return f64::INFINITY;
        }
        return ((1.0 + (1.0 - x * x).sqrt()) / ax).ln() / PI;
    }
    if ax == 0.0 {
        return if p > 1.0 { p / (PI * (p - 1.0)) } else { f64::INFINITY };
    }
    // t = √(x²+s²) turns the integrand into (x²+s²)^{(p−2)/2} on [0, √(1−x²)]
    let top = (1.0 - x * x).sqrt();
    if top == 0.0 {
        return 0.0;
    }
    let x2 = x * x;
    let e = 0.5 * (p - 2.0);
    let g = |s: f64| (x2 + s * s).powf(e);
    let v = if ax < top { quad::integrate(g, 0.0, ax) + quad::integrate(g, ax, top) } else { quad::integrate(g, 0.0, top) };
    p / PI * v
}

/// Support endpoint b_p = (p √π Γ(p/2) / Γ((p+1)/2))^{1/p}, with b_∞ = 1.
pub fn ullman_support_bp(p: f64) -> f64 {
    if p == f64::INFINITY {
        return 1.0;
    }
    ((p.ln() + 0.5 * PI.ln() + ln_gamma(p / 2.0) - ln_gamma((p + 1.0) / 2.0)) / p).exp()
}

/// Scaled Ullman law μ^{(p)} on [−b_p, b_p], or its singular-value variant on [0, b_p].
#[derive(Debug, Clone)]
pub struct UllmanLaw {
    pub p: f64,
    pub b_p: f64,
    pub density: Density1D,
    pub singular_variant: bool,
}

impl UllmanLaw {
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 0.0) {
            return Err(Error::Domain(format!("Ullman exponent must be positive, got {p}")));
        }
        let b = ullman_support_bp(p);
        let density = Density1D::new(format!("ullman({p})"), (-b, b), move |x| {
            (ullman_density(x / b, p) / b).ln()
        })
        .with_breakpoints(&[0.0]);
        Ok(UllmanLaw { p, b_p: b, density, singular_variant: false })
    }

    /// Density 2 b_p⁻¹ h_p(x/b_p) on [0, b_p]: the limit law of singular values.
    pub fn singular(p: f64) -> Result<Self> {
        let mut law = Self::new(p)?;
        let b = law.b_p;
        law.density = Density1D::new(format!("ullman_singular({p})"), (0.0, b), move |x| {
            (2.0 * ullman_density(x / b, p) / b).ln()
        });
        law.singular_variant = true;
        Ok(law)
    }

    /// Law of the squares of singular values, supported on [0, b_p²].
    pub fn singular_squared(p: f64) -> Result<Density1D> {
        let b = ullman_support_bp(p);
        Ok(Density1D::new(format!("ullman_singular_sq({p})"), (0.0, b * b), move |x| {
            if x <= 0.0 {
                return f64::INFINITY;
            }
            let s = x.sqrt();
            (2.0 * ullman_density(s / b, p) / b / (2.0 * s)).ln()
        }))
    }
}

/// Normalized Gibbs density e^{αM(x) − φ(α)}.
pub fn gibbs_density(m: &OrliczFunction, alpha: f64) -> Result<Density1D> {
    let phi = orlicz::phi(m, alpha)?;
    let mm = m.clone();
    let support = match m.domain_bound() {
        Some(b) => (-b, b),
        None => (f64::NEG_INFINITY, f64::INFINITY),
    };
    let mut d = Density1D::new(format!("gibbs({}, {alpha})", m.name()), support, move |x| {
        alpha * mm.eval(x) - phi
    })
    .with_breakpoints(&[0.0]);
    d.normalization_checked = false;
    d.checked()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn pdf_closed_forms() {
        assert!((p_gaussian_pdf(0.0, 2.0).unwrap() - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-15);
        assert!((p_gaussian_pdf(0.0, 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(p_gaussian_pdf(f64::NAN, 2.0).is_err());
        assert!(p_gaussian_pdf(f64::INFINITY, 2.0).is_err());
    }

    #[test]
    fn pdf_p4_matches_quadrature_normalization() {
        let z = quad::integrate(|x: f64| (-x.powi(4) / 4.0).exp(), f64::NEG_INFINITY, f64::INFINITY);
        let want = (-0.25f64).exp() / z;
        assert!((p_gaussian_pdf(1.0, 4.0).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn moment_examples() {
        assert!((moment_mpq(2.0, 2.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((moment_mpq(1.0, 2.0).unwrap() - 2.0).abs() < 1e-14);
        assert!(moment_mpq(0.0, 1.0).is_err());
        assert!(moment_mpq(0.01, 50.0).is_err());
    }

    #[test]
    fn moment_grid_matches_quadrature() {
        for &p in &[1.0, 1.5, 2.0, 3.0, 4.0, 7.0] {
            for &q in &[0.5, 1.0, 2.0, 3.0, 5.0] {
                let quad_v = 2.0 * quad::integrate(|x: f64| x.powf(q) * p_gaussian_pdf(x, p).unwrap(), 0.0, f64::INFINITY);
                let v = moment_mpq(p, q).unwrap();
                assert!(((quad_v - v) / v).abs() < 1e-8, "p={p} q={q}: {quad_v} vs {v}");
            }
        }
    }

    #[test]
    fn sample_mean_and_second_moment() {
        let mut r = rng::seeded(11);
        let n = 1_000_000;
        for &(p, want) in &[(2.0, 1.0), (1.0, 2.0)] {
            let d = PGaussian::new(p).unwrap();
            let xs: Vec<f64> = (0..n).map(|_| d.sample(&mut r)).collect();
            let (m, se) = crate::stats::mean_se(&xs);
            assert!(m.abs() < 3.0 * se, "mean {m} se {se}");
            let sq: Vec<f64> = xs.iter().map(|x| x * x).collect();
            let (m2, se2) = crate::stats::mean_se(&sq);
            assert!((m2 - want).abs() < 3.0 * se2, "p={p}: {m2} vs {want} (se {se2})");
        }
    }

    #[test]
    fn ullman_examples() {
        assert!((ullman_density(0.0, 2.0) - 2.0 / PI).abs() < 1e-15);
        assert!((ullman_density(0.0, f64::INFINITY) - 1.0 / PI).abs() < 1e-15);
        assert_eq!(ullman_density(1.0, f64::INFINITY), f64::INFINITY);
        assert_eq!(ullman_density(1.5, 3.0), 0.0);
        assert_eq!(ullman_density(1.0, 3.0), 0.0);
        // quadrature branch agrees with closed forms
        for &x in &[0.1f64, 0.5, 0.9] {
            let gen2 = {
                let top = (1.0 - x * x).sqrt();
                2.0 / PI * quad::integrate(|_s| 1.0, 0.0, top)
            };
            assert!((gen2 - ullman_density(x, 2.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn ullman_normalization() {
        for &p in &[1.0, 1.5, 4.0] {
            let total = quad::integrate_pts(|x| ullman_density(x, p), -1.0, 1.0, &[0.0]);
            assert!((total - 1.0).abs() < 1e-5, "p={p}: {total}");
        }
    }

    #[test]
    fn support_endpoints() {
        assert!((ullman_support_bp(1.0) - PI).abs() < 1e-13);
        assert!((ullman_support_bp(2.0) - 2.0).abs() < 1e-13);
        assert_eq!(ullman_support_bp(f64::INFINITY), 1.0);
        for &p in &[1.0, 2.0, 3.0, 10.0] {
            let law = UllmanLaw::new(p).unwrap();
            let m = law.density.moment_abs(p);
            assert!((m - 1.0).abs() < 1e-4, "p={p}: {m}");
        }
    }

    #[test]
    fn semicircle_coincidence() {
        let law = UllmanLaw::new(2.0).unwrap();
        for i in 0..41 {
            let x = -1.999 + 3.998 * i as f64 / 40.0;
            let sc = (4.0 - x * x).sqrt() / (2.0 * PI);
            assert!((law.density.pdf(x) - sc).abs() < 1e-8);
        }
        let p1 = UllmanLaw::new(1.0).unwrap();
        assert_eq!(p1.density.support, (-PI, PI));
        let x: f64 = 1.3;
        let want = ((PI + (PI * PI - x * x).sqrt()) / x).ln() / (PI * PI);
        assert!((p1.density.pdf(x) - want).abs() < 1e-12);
    }

    #[test]
    fn singular_variant_normalized() {
        let q = UllmanLaw::singular(2.0).unwrap();
        let x: f64 = 1.2;
        assert!((q.density.pdf(x) - (4.0 - x * x).sqrt() / PI).abs() < 1e-12);
        assert!((q.density.integrate(|_| 1.0) - 1.0).abs() < 1e-8);
        let sq = UllmanLaw::singular_squared(2.0).unwrap();
        assert!((sq.integrate(|_| 1.0) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn gibbs_examples() {
        let g = gibbs_density(&OrliczFunction::power(2.0).unwrap(), -0.5).unwrap();
        for &x in &[0.0, 0.7, -2.0] {
            assert!((g.pdf(x) - (-x * x / 2.0f64).exp() / (2.0 * PI).sqrt()).abs() < 1e-12);
        }
        let l = gibbs_density(&OrliczFunction::power(1.0).unwrap(), -1.0).unwrap();
        assert!((l.pdf(0.3) - 0.5 * (-0.3f64).exp()).abs() < 1e-12);
        assert!(gibbs_density(&OrliczFunction::power(2.0).unwrap(), 0.5).is_err());
    }

    #[test]
    fn gibbs_mean_of_m_is_phi_prime() {
        for (m, a) in [(OrliczFunction::power(3.0).unwrap(), -0.7), (OrliczFunction::exp_minus_one(), -1.3)] {
            let g = gibbs_density(&m, a).unwrap();
            let lhs = g.integrate(|x| m.eval(x));
            let rhs = orlicz::phi_prime(&m, a).unwrap();
            assert!((lhs - rhs).abs() < 1e-6);
        }
    }
}
