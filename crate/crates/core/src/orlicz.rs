//! Orlicz functions, Gibbs tilts φ(α), volume asymptotics of Orlicz balls and the
//! intersection dichotomy.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::measure::{Density1D, Measure};
use crate::optim;
use crate::quad::{self, QuadOpts};
use crate::ratecalc;
use crate::special::ln_gamma;

#[derive(Clone)]
enum Kind {
    Power(f64),
    ExpMinusOne,
    /// Polynomial in |t| on each [knots[i], knots[i+1]), last piece unbounded.
    Piecewise { knots: Vec<f64>, coeffs: Vec<Vec<f64>> },
    Custom { name: String, f: Arc<dyn Fn(f64) -> f64 + Send + Sync> },
}

/// Even convex function with M(0) = 0, optionally +∞ outside [−b, b].
#[derive(Clone)]
pub struct OrliczFunction {
    kind: Kind,
    superquadratic: bool,
    domain_bound: Option<f64>,
}

impl fmt::Debug for OrliczFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OrliczFunction({}, superquadratic={}, bound={:?})", self.name(), self.superquadratic, self.domain_bound)
    }
}

fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

impl OrliczFunction {
    pub fn power(p: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::Domain(format!("power Orlicz function needs finite p ≥ 1, got {p}")));
        }
        Ok(OrliczFunction { kind: Kind::Power(p), superquadratic: p > 2.0, domain_bound: None })
    }

    /// e^{|t|} − 1 − |t|.
    pub fn exp_minus_one() -> Self {
        OrliczFunction { kind: Kind::ExpMinusOne, superquadratic: true, domain_bound: None }
    }

    /// Piecewise polynomial in |t|: `coeffs[i]` (ascending powers) applies on `[knots[i], knots[i+1])`.
    pub fn piecewise(knots: Vec<f64>, coeffs: Vec<Vec<f64>>) -> Result<Self> {
        if knots.is_empty() || knots[0] != 0.0 || knots.len() != coeffs.len() {
            return Err(Error::Invalid("piecewise Orlicz function needs knots starting at 0, one polynomial per knot".into()));
        }
        if knots.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Invalid("knots must be strictly increasing".into()));
        }
        let m = OrliczFunction { kind: Kind::Piecewise { knots, coeffs }, superquadratic: false, domain_bound: None };
        m.finish()
    }

    pub fn custom<F>(name: impl Into<String>, f: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let m = OrliczFunction {
            kind: Kind::Custom { name: name.into(), f: Arc::new(f) },
            superquadratic: false,
            domain_bound: None,
        };
        m.finish()
    }

    /// Restricts the function to [−b, b], taking +∞ outside.
    pub fn bounded(mut self, b: f64) -> Result<Self> {
        if !(b > 0.0) {
            return Err(Error::Invalid(format!("domain bound must be positive, got {b}")));
        }
        self.domain_bound = Some(b);
        self.superquadratic = true;
        Ok(self)
    }

    fn finish(mut self) -> Result<Self> {
        self.validate()?;
        self.superquadratic = self.detect_superquadratic();
        Ok(self)
    }

    fn raw(&self, a: f64) -> f64 {
        match &self.kind {
            Kind::Power(p) => a.powf(*p),
            Kind::ExpMinusOne => a.exp_m1() - a,
            Kind::Piecewise { knots, coeffs } => {
                let i = knots.partition_point(|&k| k <= a).max(1) - 1;
                poly(&coeffs[i], a)
            }
            Kind::Custom { f, .. } => f(a),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let a = t.abs();
        if let Some(b) = self.domain_bound {
            if a > b {
                return f64::INFINITY;
            }
        }
        self.raw(a)
    }

    pub fn superquadratic(&self) -> bool {
        self.superquadratic
    }

    pub fn domain_bound(&self) -> Option<f64> {
        self.domain_bound
    }

    pub fn power_exponent(&self) -> Option<f64> {
        match (&self.kind, self.domain_bound) {
            (Kind::Power(p), None) => Some(*p),
            _ => None,
        }
    }

    pub fn name(&self) -> String {
        let base = match &self.kind {
            Kind::Power(p) => format!("power({p})"),
            Kind::ExpMinusOne => "exp_minus_one".into(),
            Kind::Piecewise { knots, .. } => format!("piecewise({} pieces)", knots.len()),
            Kind::Custom { name, .. } => name.clone(),
        };
        match self.domain_bound {
            Some(b) => format!("{base}|[-{b},{b}]"),
            None => base,
        }
    }

    /// Smallest t ≥ 0 with M(t) ≥ level (the chord endpoint of {M ≤ level}).
    pub fn inverse(&self, level: f64) -> f64 {
        if level <= 0.0 {
            return 0.0;
        }
        let cap = self.domain_bound.unwrap_or(f64::INFINITY);
        if let Kind::Power(p) = self.kind {
            return level.powf(1.0 / p).min(cap);
        }
        if cap.is_finite() && self.raw(cap) <= level {
            return cap;
        }
        let mut hi = 1.0;
        while self.raw(hi) < level {
            hi *= 2.0;
            if hi > 1e300 {
                return f64::INFINITY;
            }
        }
        let hi = hi.min(cap);
        optim::root_brent(|t| self.raw(t) - level, 0.0, hi, 1e-15 * hi).unwrap_or(hi)
    }

    fn validate(&self) -> Result<()> {
        if self.raw(0.0).abs() > 1e-12 {
            return Err(Error::Invalid(format!("Orlicz function must vanish at 0, got {}", self.raw(0.0))));
        }
        let grid: Vec<f64> = (1..=400).map(|i| 0.05 * i as f64).collect();
        for &t in &grid {
            let v = self.raw(t);
            if !(v > 0.0) {
                return Err(Error::Invalid(format!("Orlicz function must be positive away from 0, M({t}) = {v}")));
            }
        }
        let mut full = vec![0.0];
        full.extend(grid.iter().cloned());
        for w in full.windows(3) {
            let mid = self.raw(w[1]);
            let avg = 0.5 * (self.raw(w[0]) + self.raw(w[2]));
            if mid > avg + 1e-10 * (1.0 + avg.abs()) {
                return Err(Error::Invalid(format!("Orlicz function not convex near t = {}", w[1])));
            }
        }
        Ok(())
    }

    /// M(t)/t² grows without bound: sampled along a geometric grid.
    fn detect_superquadratic(&self) -> bool {
        let r: Vec<f64> = [1e2, 1e3, 1e4, 1e5]
            .iter()
            .map(|&t| self.raw(t) / (t * t))
            .collect();
        r.iter().all(|v| v.is_finite()) && r.windows(2).all(|w| w[1] > 2.0 * w[0]) || r.iter().any(|v| v.is_infinite())
    }
}

/// Integration scale: where αM(x) = −1.
fn scale(m: &OrliczFunction, alpha: f64) -> f64 {
    if alpha < 0.0 {
        m.inverse(1.0 / -alpha).max(1e-300)
    } else {
        1.0
    }
}

/// (φ, φ', φ'') at α by quadrature.
pub fn tilt_moments(m: &OrliczFunction, alpha: f64) -> Result<(f64, f64, f64)> {
    if alpha >= 0.0 && m.domain_bound().is_none() {
        return Err(Error::Domain(format!("e^{{αM}} is not integrable for α = {alpha} ≥ 0 and unbounded M")));
    }
    if !alpha.is_finite() {
        return Err(Error::Domain(format!("non-finite α = {alpha}")));
    }
    let s = scale(m, alpha);
    let opts = QuadOpts { abs_tol: 1e-300, rel_tol: 1e-14, max_intervals: 4000 };
    let upper = m.domain_bound().unwrap_or(f64::INFINITY);
    // integrate on [0, upper) with x = s·u so the tilt scale is unit
    let shift = if alpha > 0.0 { alpha * m.eval(upper) } else { 0.0 };
    let w = |u: f64| {
        let x = s * u;
        let v = (alpha * m.eval(x) - shift).exp();
        if v.is_finite() { v } else { 0.0 }
    };
    let ub = upper / s;
    let cuts: Vec<f64> = if ub.is_finite() {
        vec![0.0, ub]
    } else {
        vec![0.0, 0.5, 1.0, 2.0, 4.0, 8.0, f64::INFINITY]
    };
    let integ = |g: &dyn Fn(f64) -> f64| -> f64 {
        cuts.windows(2).map(|c| quad::integrate_with(|u| g(u), c[0], c[1], &opts).value).sum()
    };
    let z = integ(&|u| w(u));
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!("φ integral diverges or vanishes at α = {alpha}")));
    }
    let mean = integ(&|u| m.eval(s * u) * w(u)) / z;
    let var = integ(&|u| {
        let d = m.eval(s * u) - mean;
        d * d * w(u)
    }) / z;
    let phi = 2f64.ln() + s.ln() + z.ln() + shift;
    Ok((phi, mean, var))
}

/// φ(α) = log ∫ e^{αM(x)} dx.
pub fn phi(m: &OrliczFunction, alpha: f64) -> Result<f64> {
    tilt_moments(m, alpha).map(|t| t.0)
}

pub fn phi_prime(m: &OrliczFunction, alpha: f64) -> Result<f64> {
    tilt_moments(m, alpha).map(|t| t.1)
}

pub fn phi_doubleprime(m: &OrliczFunction, alpha: f64) -> Result<f64> {
    tilt_moments(m, alpha).map(|t| t.2)
}

/// Solution of φ'(α*) = R with α* < 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TiltSolution {
    pub alpha_star: f64,
    pub phi_at: f64,
    pub sigma2_star: f64,
    pub r: f64,
}

pub fn solve_alpha_star(m: &OrliczFunction, r: f64) -> Result<TiltSolution> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("level R must be positive and finite, got {r}")));
    }
    let g = |u: f64| -> f64 {
        match phi_prime(m, -u.exp()) {
            Ok(v) => v - r,
            Err(_) => f64::NAN,
        }
    };
    if let Some(b) = m.domain_bound() {
        // supremum of φ' over α < 0 is the uniform mean of M on [−b, b]
        let sup = quad::integrate(|x| m.eval(x), 0.0, b) / b;
        if r >= sup {
            return Err(Error::Domain(format!(
                "R = {r} is not achievable with α < 0; achievable range is (0, {sup})"
            )));
        }
    }
    let mut lo = 0.0;
    let mut hi = 0.0;
    let mut glo = g(lo);
    let mut ghi = glo;
    let mut k = 0;
    while !(glo > 0.0) {
        lo -= 2.0;
        glo = g(lo);
        k += 1;
        if k > 400 || lo < -700.0 {
            return Err(Error::Domain(format!("R = {r} exceeds the range of φ' on α < 0")));
        }
    }
    k = 0;
    while !(ghi < 0.0) {
        hi += 2.0;
        ghi = g(hi);
        k += 1;
        if k > 400 || hi > 700.0 {
            return Err(Error::Domain(format!("R = {r} is below the range of φ' on α < 0")));
        }
    }
    let u = optim::root_brent(g, lo, hi, 1e-15)?;
    let alpha = -u.exp();
    let (phi_at, mean, var) = tilt_moments(m, alpha)?;
    if (mean - r).abs() > 1e-8 * r.max(1.0) {
        return Err(Error::Numerical(format!("tilt solve residual {} too large", mean - r)));
    }
    if !(var > 0.0) {
        return Err(Error::Numerical("φ''(α*) is not positive".into()));
    }
    Ok(TiltSolution { alpha_star: alpha, phi_at, sigma2_star: var, r })
}

/// lim (1/d) log vol{Σ M(x_i) ≤ dR} = φ(α*) − α*R.
pub fn log_volume_limit(m: &OrliczFunction, r: f64) -> Result<f64> {
    let t = solve_alpha_star(m, r)?;
    Ok(t.phi_at - t.alpha_star * r)
}

#[derive(Debug, Clone, Copy)]
pub struct VolumeEstimate {
    pub log_volume: f64,
    pub volume: f64,
    pub limit: f64,
}

/// e^{d[φ(α*)−α*R]} / (|α*| √(2π d σ*²)), carried in log-space.
pub fn volume_estimate(m: &OrliczFunction, r: f64, d: usize) -> Result<VolumeEstimate> {
    if d == 0 {
        return Err(Error::Invalid("dimension must be positive".into()));
    }
    let t = solve_alpha_star(m, r)?;
    let limit = t.phi_at - t.alpha_star * r;
    let df = d as f64;
    let log_volume =
        df * limit - (-t.alpha_star).ln() - 0.5 * (2.0 * std::f64::consts::PI * df * t.sigma2_star).ln();
    Ok(VolumeEstimate { log_volume, volume: log_volume.exp(), limit })
}

/// log vol(radius · 𝔹_p^d) = d log(2Γ(1+1/p)) − log Γ(1+d/p) + d log radius.
pub fn lp_ball_log_volume(d: usize, p: f64, radius: f64) -> f64 {
    let df = d as f64;
    df * (2.0 * (ln_gamma(1.0 + 1.0 / p)).exp()).ln() - ln_gamma(1.0 + df / p) + df * radius.ln()
}

/// Closed form (1/p) log(epR) + log(2Γ(1+1/p)) for M = |x|^p.
pub fn power_log_volume_limit(p: f64, r: f64) -> f64 {
    (std::f64::consts::E * p * r).ln() / p + (2.0f64).ln() + ln_gamma(1.0 + 1.0 / p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DichotomyClass {
    Zero,
    One,
    Critical,
    Inconclusive,
}

impl fmt::Display for DichotomyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DichotomyClass::Zero => "zero",
            DichotomyClass::One => "one",
            DichotomyClass::Critical => "critical",
            DichotomyClass::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Dichotomy {
    pub theta: f64,
    pub class: DichotomyClass,
}

/// Limit of vol(B_{M1}(dR1) ∩ B_{M2}(dR2)) / vol(B_{M1}(dR1)) as d → ∞.
pub fn intersection_ratio_limit(m1: &OrliczFunction, r1: f64, m2: &OrliczFunction, r2: f64) -> Result<Dichotomy> {
    let t = solve_alpha_star(m1, r1)?;
    let g = crate::distributions::gibbs_density(m1, t.alpha_star)?;
    let theta = g.integrate(|x| m2.eval(x));
    let tol = 1e-8 * r2.max(1.0);
    let class = if (theta - r2).abs() <= tol {
        DichotomyClass::Critical
    } else if theta > r2 {
        DichotomyClass::Zero
    } else {
        let second = g.integrate(|x| m2.eval(x).powi(2));
        if second.is_finite() { DichotomyClass::One } else { DichotomyClass::Inconclusive }
    };
    Ok(Dichotomy { theta, class })
}

/// ∫ M dμ; +∞ on divergence.
pub fn moment_map(mu: &Measure, m: &OrliczFunction) -> f64 {
    match mu {
        Measure::Empirical(e) => e.expect(|x| m.eval(x)),
        Measure::Density(d) => density_moment(d, m),
    }
}

fn density_moment(d: &Density1D, m: &OrliczFunction) -> f64 {
    if let Some(b) = m.domain_bound() {
        let outside = d.integrate(|x| if x.abs() > b { 1.0 } else { 0.0 });
        if outside > 0.0 {
            return f64::INFINITY;
        }
    }
    let opts = QuadOpts { abs_tol: 1e-15, rel_tol: 1e-12, max_intervals: 4000 };
    let h = |x: f64| {
        let lp = d.log_pdf(x);
        if lp == f64::NEG_INFINITY { 0.0 } else { m.eval(x) * lp.exp() }
    };
    let mut total = 0.0;
    for w in d.edges().windows(2) {
        let r = quad::integrate_with(h, w[0], w[1], &opts);
        if !r.converged || !r.value.is_finite() {
            return f64::INFINITY;
        }
        total += r.value;
    }
    total
}

/// H(μ | μ_{M,α*}) + α*(∫M dμ − R) on {∫M dμ ≤ R}, +∞ elsewhere.
pub fn orlicz_sanov_rate(mu: &Measure, m: &OrliczFunction, r: f64) -> Result<f64> {
    let t = solve_alpha_star(m, r)?;
    let mm = moment_map(mu, m);
    if !(mm <= r * (1.0 + 1e-12)) {
        return Ok(f64::INFINITY);
    }
    let g = crate::distributions::gibbs_density(m, t.alpha_star)?;
    let h = ratecalc::relative_entropy(mu, &g);
    Ok((h + t.alpha_star * (mm - r)).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::centered_gaussian;
    use std::f64::consts::PI;

    #[test]
    fn construction_checks() {
        assert!(OrliczFunction::power(0.5).is_err());
        assert!(OrliczFunction::custom("concave", |t: f64| t.sqrt()).is_err());
        assert!(OrliczFunction::custom("shifted", |t: f64| t * t + 1.0).is_err());
        let pw = OrliczFunction::piecewise(vec![0.0, 1.0], vec![vec![0.0, 0.0, 1.0], vec![-1.0, 2.0]]).unwrap();
        assert!((pw.eval(-2.0) - 3.0).abs() < 1e-15);
        assert!(!pw.superquadratic());
        assert!(OrliczFunction::power(4.0).unwrap().superquadratic());
        assert!(!OrliczFunction::power(2.0).unwrap().superquadratic());
        assert!(OrliczFunction::exp_minus_one().superquadratic());
        let q = OrliczFunction::custom("quartic", |t: f64| t.powi(4)).unwrap();
        assert!(q.superquadratic());
    }

    #[test]
    fn evenness_and_inverse() {
        let m = OrliczFunction::exp_minus_one();
        assert_eq!(m.eval(1.3), m.eval(-1.3));
        let t = m.inverse(2.0);
        assert!((m.eval(t) - 2.0).abs() < 1e-12);
        let b = OrliczFunction::power(2.0).unwrap().bounded(1.5).unwrap();
        assert_eq!(b.eval(2.0), f64::INFINITY);
        assert_eq!(b.inverse(10.0), 1.5);
    }

    #[test]
    fn phi_examples() {
        let m2 = OrliczFunction::power(2.0).unwrap();
        assert!((phi(&m2, -0.5).unwrap() - (2.0 * PI).sqrt().ln()).abs() < 1e-12);
        for &p in &[1.0, 1.5, 2.0, 3.0, 4.0] {
            let m = OrliczFunction::power(p).unwrap();
            for &a in &[-0.01, -0.3, -1.0, -7.0] {
                let want = (2.0 * ln_gamma(1.0 + 1.0 / p).exp()).ln() - (-a as f64).ln() / p;
                assert!((phi(&m, a).unwrap() - want).abs() < 1e-8, "p={p} a={a}");
            }
        }
        assert!(phi(&m2, 0.1).is_err());
    }

    #[test]
    fn phi_prime_is_derivative() {
        let m = OrliczFunction::exp_minus_one();
        for &a in &[-0.2, -1.0, -3.0] {
            let h = 1e-5;
            let fd = (phi(&m, a + h).unwrap() - phi(&m, a - h).unwrap()) / (2.0 * h);
            assert!((fd - phi_prime(&m, a).unwrap()).abs() < 1e-6);
            let fd2 = (phi_prime(&m, a + h).unwrap() - phi_prime(&m, a - h).unwrap()) / (2.0 * h);
            assert!((fd2 - phi_doubleprime(&m, a).unwrap()).abs() < 1e-5);
        }
    }

    #[test]
    fn alpha_star_closed_forms() {
        let t = solve_alpha_star(&OrliczFunction::power(2.0).unwrap(), 1.0).unwrap();
        assert!((t.alpha_star + 0.5).abs() < 1e-10);
        assert!((t.sigma2_star - 2.0).abs() < 1e-8);
        let t1 = solve_alpha_star(&OrliczFunction::power(1.0).unwrap(), 1.0).unwrap();
        assert!((t1.alpha_star + 1.0).abs() < 1e-10);
        for &p in &[1.0, 2.0, 4.0] {
            for &r in &[0.01, 0.5, 3.0, 1e3] {
                let t = solve_alpha_star(&OrliczFunction::power(p).unwrap(), r).unwrap();
                assert!((t.alpha_star + 1.0 / (p * r)).abs() < 1e-9 / r, "p={p} r={r}");
            }
        }
    }

    #[test]
    fn bounded_out_of_range_names_range() {
        let m = OrliczFunction::power(2.0).unwrap().bounded(1.0).unwrap();
        let e = solve_alpha_star(&m, 0.5).unwrap_err();
        assert!(matches!(e, Error::Domain(ref s) if s.contains("achievable range")));
        let ok = solve_alpha_star(&m, 0.2).unwrap();
        assert!(ok.alpha_star < 0.0);
    }

    #[test]
    fn log_volume_limits() {
        let v2 = log_volume_limit(&OrliczFunction::power(2.0).unwrap(), 1.0).unwrap();
        assert!((v2 - 0.5 * (1.0 + (2.0 * PI).ln())).abs() < 1e-9);
        let v1 = log_volume_limit(&OrliczFunction::power(1.0).unwrap(), 1.0).unwrap();
        assert!((v1 - (1.0 + 2f64.ln())).abs() < 1e-9);
        for &p in &[1.0, 1.5, 3.0] {
            for &r in &[0.3, 2.0] {
                let v = log_volume_limit(&OrliczFunction::power(p).unwrap(), r).unwrap();
                assert!((v - power_log_volume_limit(p, r)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn volume_estimate_vs_exact_ball() {
        let m = OrliczFunction::power(2.0).unwrap();
        for &(d, lo, hi) in &[(64usize, 0.9, 1.1), (256, 0.97, 1.03)] {
            let est = volume_estimate(&m, 1.0, d).unwrap();
            let exact = lp_ball_log_volume(d, 2.0, (d as f64).sqrt());
            let ratio = (est.log_volume - exact).exp();
            assert!(ratio > lo && ratio < hi, "d={d}: {ratio}");
        }
        let big = volume_estimate(&m, 1.0, 10_000).unwrap();
        assert!((big.log_volume / 1e4 - big.limit).abs() < 2e-3);
        assert!(volume_estimate(&m, 1.0, 0).is_err());
    }

    #[test]
    fn dichotomy_examples() {
        let m2 = OrliczFunction::power(2.0).unwrap();
        let m1 = OrliczFunction::power(1.0).unwrap();
        let one = intersection_ratio_limit(&m2, 1.0, &m1, 1.0).unwrap();
        assert!((one.theta - (2.0 / PI).sqrt()).abs() < 1e-10);
        assert_eq!(one.class, DichotomyClass::One);
        assert_eq!(intersection_ratio_limit(&m2, 1.0, &m1, 0.5).unwrap().class, DichotomyClass::Zero);
        let m = OrliczFunction::exp_minus_one();
        assert_eq!(intersection_ratio_limit(&m, 0.7, &m, 0.7).unwrap().class, DichotomyClass::Critical);
    }

    #[test]
    fn moment_map_examples() {
        let m2 = OrliczFunction::power(2.0).unwrap();
        let dirac = Measure::Empirical(crate::measure::EmpiricalMeasure::uniform(&[0.0]).unwrap());
        assert_eq!(moment_map(&dirac, &m2), 0.0);
        let g = Measure::Density(centered_gaussian(1.0));
        assert!((moment_map(&g, &m2) - 1.0).abs() < 1e-10);
        let m = OrliczFunction::exp_minus_one();
        let t = solve_alpha_star(&m, 0.8).unwrap();
        let gd = Measure::Density(crate::distributions::gibbs_density(&m, t.alpha_star).unwrap());
        assert!((moment_map(&gd, &m) - 0.8).abs() < 1e-6);
        let cauchy = Density1D::new("cauchy", (f64::NEG_INFINITY, f64::INFINITY), |x| -(PI * (1.0 + x * x)).ln());
        assert_eq!(moment_map(&Measure::Density(cauchy), &m2), f64::INFINITY);
    }

    #[test]
    fn sanov_rate_gaussian_closed_form() {
        let m2 = OrliczFunction::power(2.0).unwrap();
        for &s2 in &[0.3, 0.7, 0.95] {
            let mu = Measure::Density(centered_gaussian(f64::sqrt(s2)));
            let v = orlicz_sanov_rate(&mu, &m2, 1.0).unwrap();
            let want = (s2 - 1.0 - f64::ln(s2)) / 2.0 - 0.5 * (s2 - 1.0);
            assert!((v - want).abs() < 1e-6, "{v} vs {want}");
        }
        let wide = Measure::Density(centered_gaussian(1.2));
        assert_eq!(orlicz_sanov_rate(&wide, &m2, 1.0).unwrap(), f64::INFINITY);
        let at = Measure::Density(centered_gaussian(1.0));
        assert!(orlicz_sanov_rate(&at, &m2, 1.0).unwrap().abs() < 1e-9);
    }
}
