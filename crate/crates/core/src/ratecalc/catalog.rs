use std::cell::{Cell, RefCell};
use std::sync::{Arc, Mutex};

use super::{combine_independent_product_bracketed, legendre_nd_from, CumulantFunction, LqLpConjugate, RateFunction, Speed};
use crate::distributions::{log_moment_mpq, moment_mpq, p_gaussian_log_norm};
use crate::error::{Error, Flag, Flagged, Result};
use crate::optim;
use crate::quad;
use crate::special::ln_gamma;

/// −log z on (0, 1], +∞ elsewhere.
pub fn rate_uniform_power(z: f64) -> f64 {
    if z > 0.0 && z <= 1.0 { -z.ln() } else { f64::INFINITY }
}

pub fn rate_uniform_power_fn() -> RateFunction {
    RateFunction::new(rate_uniform_power, "(0, 1]", Speed::N, Some(1.0))
}

/// 𝕁_p(x) = |x|^{r_p}/r_p with r_p = 2p/(2+p).
pub fn rate_gkr_lowp(x: f64, p: f64) -> Result<f64> {
    if !(1.0..2.0).contains(&p) {
        return Err(Error::Domain(format!("low-p projection rate needs p in [1, 2), got {p}")));
    }
    let r = 2.0 * p / (2.0 + p);
    Ok(x.abs().powf(r) / r)
}

/// Φ_p(t₀,t₁,t₂) = log ∬ e^{t₀z² + t₁zy + t₂|y|^p} μ₂(dz) μ_p(dy), with the Gaussian
/// variable integrated out in closed form.
pub fn gkr_cumulant(p: f64) -> CumulantFunction {
    let log_norm = p_gaussian_log_norm(p);
    let f = move |t: &[f64]| {
        let d = 1.0 - 2.0 * t[0];
        if d <= 0.0 || t[2] >= 1.0 / p {
            return f64::INFINITY;
        }
        let c = t[1] * t[1] / d;
        let a = t[2] - 1.0 / p;
        -0.5 * d.ln() + 2f64.ln() - log_norm + quad::log_integral_exp(|y| 0.5 * c * y * y + a * y.powf(p), 0.0, f64::INFINITY)
    };
    let derivs = move |t: &[f64]| -> Option<(Vec<f64>, Vec<Vec<f64>>)> {
        let d = 1.0 - 2.0 * t[0];
        if d <= 0.0 || t[2] >= 1.0 / p {
            return None;
        }
        let t1 = t[1];
        let c = t1 * t1 / d;
        let a = t[2] - 1.0 / p;
        let m = quad::exp_moments(
            |y| 0.5 * c * y * y + a * y.powf(p),
            0.0,
            f64::INFINITY,
            &[&|y: f64| y * y, &|y: f64| y.powf(p), &|y: f64| y.powi(4), &|y: f64| y.powf(p + 2.0), &|y: f64| y.powf(2.0 * p)],
        );
        let (e2, ep, e4, ep2, epp) = (m[0], m[1], m[2], m[3], m[4]);
        let a_c = 0.5 * e2;
        let a_t2 = ep;
        let a_cc = 0.25 * (e4 - e2 * e2);
        let a_ct2 = 0.5 * (ep2 - e2 * ep);
        let a_t2t2 = epp - ep * ep;
        let c0 = 2.0 * t1 * t1 / (d * d);
        let c1 = 2.0 * t1 / d;
        let c00 = 8.0 * t1 * t1 / (d * d * d);
        let c01 = 4.0 * t1 / (d * d);
        let c11 = 2.0 / d;
        let g = vec![1.0 / d + a_c * c0, a_c * c1, a_t2];
        let h00 = 2.0 / (d * d) + a_cc * c0 * c0 + a_c * c00;
        let h01 = a_cc * c0 * c1 + a_c * c01;
        let h11 = a_cc * c1 * c1 + a_c * c11;
        let h02 = a_ct2 * c0;
        let h12 = a_ct2 * c1;
        let h = vec![vec![h00, h01, h02], vec![h01, h11, h12], vec![h02, h12, a_t2t2]];
        Some((g, h))
    };
    CumulantFunction::new(3, f, move |t| t[0] < 0.5 && t[2] < 1.0 / p).with_derivatives(Arc::new(derivs))
}

/// Legendre transform evaluator that warm-starts from the previous maximizer.
pub(crate) struct WarmLegendre {
    f: CumulantFunction,
    last: RefCell<Vec<f64>>,
}

impl WarmLegendre {
    pub(crate) fn new(f: CumulantFunction) -> Self {
        let d = f.dim();
        WarmLegendre { f, last: RefCell::new(vec![0.0; d]) }
    }

    pub(crate) fn eval(&self, x: &[f64]) -> (f64, Option<Flag>) {
        let start = self.last.borrow().clone();
        let (v, t, flag) = legendre_nd_from(&self.f, x, &start);
        let (v, t, flag) = if flag.is_some() || !v.is_finite() {
            let zero = vec![0.0; x.len()];
            let (v0, t0, f0) = legendre_nd_from(&self.f, x, &zero);
            if v0 >= v || !v.is_finite() { (v0, t0, f0) } else { (v, t, flag) }
        } else {
            (v, t, flag)
        };
        if v.is_finite() && flag.is_none() {
            *self.last.borrow_mut() = t;
        }
        (v, flag)
    }
}

/// 𝕀_p(x): the annealed one-dimensional projection rate for p > 2 (p = 2 in closed form).
pub fn rate_gkr_highp(x: f64, p: f64) -> Result<Flagged> {
    if p == 2.0 {
        return Ok(if x.abs() < 1.0 { Flagged::ok(-0.5 * (1.0 - x * x).ln()) } else { Flagged::infinite(Flag::OutsideDomain) });
    }
    if !(p > 2.0) || !p.is_finite() {
        return Err(Error::Domain(format!("high-p projection rate needs p in (2, ∞), got {p}")));
    }
    if x.abs() >= 1.0 {
        return Ok(Flagged::infinite(Flag::OutsideDomain));
    }
    if x == 0.0 {
        return Ok(Flagged::ok(0.0));
    }
    let lt = WarmLegendre::new(gkr_cumulant(p));
    let worst = RefCell::new(None);
    // fiber of T_p(τ) = τ₀^{−1/2} τ₁ τ₂^{−1/p} parameterized by (log τ₀, log τ₂)
    let obj = |u: &[f64]| {
        let (t0, t2) = (u[0].exp(), u[1].exp());
        let t1 = x * t0.sqrt() * t2.powf(1.0 / p);
        let (v, flag) = lt.eval(&[t0, t1, t2]);
        if flag == Some(Flag::NotConverged) {
            *worst.borrow_mut() = Some(Flag::NotConverged);
        }
        v
    };
    let (_, v, ok) = optim::nelder_mead(obj, &[0.0, 0.0], 0.2, 1e-13, 3000);
    let mut out = Flagged::ok(v.max(0.0));
    if !ok {
        out = out.merge_flag(Some(Flag::NotConverged));
    }
    let w = *worst.borrow();
    Ok(out.merge_flag(w))
}

/// (1/p)(z^q − M_p(q))^{p/q} for z ≥ M_p(q)^{1/q}, +∞ otherwise.
pub fn rate_lqnorm_low(z: f64, p: f64, q: f64) -> Result<f64> {
    if !(q > p && p >= 1.0) {
        return Err(Error::Domain(format!("low-p norm rate needs q > p ≥ 1, got p = {p}, q = {q}")));
    }
    let m = moment_mpq(p, q)?;
    if z < 0.0 {
        return Ok(f64::INFINITY);
    }
    let s = z.powf(q);
    // the threshold itself despite rounding in z = M^{1/q}
    if (s - m).abs() <= 1e-12 * m {
        return Ok(0.0);
    }
    if s < m {
        return Ok(f64::INFINITY);
    }
    Ok((s - m).powf(p / q) / p)
}

/// 𝕀₂(z) = inf { Λ*(x, y) : x^{1/q} y^{−1/p} = z } by a search along the fiber in y.
pub fn lq_fiber_rate(z: f64, p: f64, q: f64) -> Flagged {
    lq_fiber_argmin(z, p, q).0
}

/// [`lq_fiber_rate`] with the minimizing point (x, y) and its dual (t₁, t₂).
pub fn lq_fiber_argmin(z: f64, p: f64, q: f64) -> (Flagged, [f64; 2], [f64; 2]) {
    let nan = [f64::NAN; 2];
    if !(z > 0.0) {
        return (Flagged::infinite(Flag::OutsideDomain), nan, nan);
    }
    let flag = Cell::new(None);
    let conj = LqLpConjugate::new(p, q);
    let point = |v: f64| {
        let y = v.exp();
        ((z * y.powf(1.0 / p)).powf(q), y)
    };
    let obj = |v: f64| {
        let (x, y) = point(v);
        let r = conj.eval(x, y);
        if r.flag == Some(Flag::NotConverged) {
            flag.set(r.flag);
        }
        r.value
    };
    let nodes: Vec<f64> = (0..=8).map(|i| -2.0 + 0.5 * i as f64).collect();
    let m = optim::minimize_nodes_tol(obj, &nodes, 1e-5);
    if !m.value.is_finite() {
        return (Flagged::infinite(Flag::OutsideDomain), nan, nan);
    }
    let (x, y) = point(m.x);
    let v = conj.eval(x, y);
    let (t1, t2) = conj.last_dual();
    let mut out = Flagged::ok(v.value.max(0.0));
    if m.at_boundary {
        out = out.merge_flag(Some(Flag::BoundaryOptimum));
    }
    (out.merge_flag(flag.get()), [x, y], [t1, t2])
}

/// Rate of n^{1/p−1/q}‖Z‖_q for Z uniform in 𝔹_p^n, 1 ≤ q < p: the product combination of
/// −log on (0, 1] with the fiber rate 𝕀₂.
pub fn rate_lqnorm_high(z: f64, p: f64, q: f64) -> Result<Flagged> {
    if !(1.0 <= q && q < p) || !p.is_finite() {
        return Err(Error::Domain(format!("high-p norm rate needs 1 ≤ q < p < ∞, got p = {p}, q = {q}")));
    }
    if !(z > 0.0) {
        return Ok(Flagged::infinite(Flag::OutsideDomain));
    }
    let failed = Arc::new(Mutex::new(None));
    let f2 = failed.clone();
    let i2 = RateFunction::new(
        move |z2| {
            let r = lq_fiber_rate(z2, p, q);
            if r.flag.map_or(false, |f| f.is_failure()) {
                *f2.lock().unwrap() = r.flag;
            }
            r.value
        },
        "(0, ∞)",
        Speed::N,
        Some(typical_lq(p, q)),
    );
    let iu = super::rate_uniform_power_fn();
    let m = typical_lq(p, q);
    // z₁ < z/m only pushes z₂ further above its minimizer
    let lo = (z / m).min(1.0);
    let mut out = combine_independent_product_bracketed(&iu, &i2, z, lo, 1.0);
    out = out.merge_flag(*failed.lock().unwrap());
    Ok(out)
}

/// Almost-sure limit M_p(q)^{1/q} of n^{1/p−1/q}‖Z‖_q.
pub fn typical_lq(p: f64, q: f64) -> f64 {
    (log_moment_mpq(p, q) / q).exp()
}

/// Upper-tail stretched Cramér rate c(a − m)^r for a > m, 0 for a ≤ m.
pub fn rate_stretched_cramer(a: f64, c: f64, r: f64, m: f64) -> f64 {
    if a <= m { 0.0 } else { c * (a - m).powf(r) }
}

/// σ² = (1/q²)(Γ(1/p)Γ((2q+1)/p)/Γ((q+1)/p)² − 1) − 1/p.
pub fn mdp_sigma2(p: f64, q: f64) -> Result<f64> {
    if !(q > 0.0 && p > 0.0) {
        return Err(Error::Domain(format!("MDP variance needs p, q > 0, got p = {p}, q = {q}")));
    }
    let ratio = (ln_gamma(1.0 / p) + ln_gamma((2.0 * q + 1.0) / p) - 2.0 * ln_gamma((q + 1.0) / p)).exp();
    let s = (ratio - 1.0) / (q * q) - 1.0 / p;
    if !(s > 0.0) {
        return Err(Error::Domain(format!("MDP variance is not positive at p = {p}, q = {q}")));
    }
    Ok(s)
}

pub fn mdp_rate(t: f64, sigma2: f64) -> f64 {
    t * t / (2.0 * sigma2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn uniform_power() {
        assert_eq!(rate_uniform_power(1.0), 0.0);
        assert!((rate_uniform_power((-1f64).exp()) - 1.0).abs() < 1e-15);
        assert_eq!(rate_uniform_power(1.5), f64::INFINITY);
        assert_eq!(rate_uniform_power(0.0), f64::INFINITY);
    }

    #[test]
    fn gkr_lowp() {
        assert_eq!(rate_gkr_lowp(0.0, 1.0).unwrap(), 0.0);
        assert!((rate_gkr_lowp(1.0, 1.0).unwrap() - 1.5).abs() < 1e-15);
        for i in 0..20 {
            let x = 0.3 * i as f64;
            assert_eq!(rate_gkr_lowp(x, 1.5).unwrap(), rate_gkr_lowp(-x, 1.5).unwrap());
        }
        assert!(rate_gkr_lowp(1.0, 2.0).is_err());
    }

    #[test]
    fn gkr_highp_reference_and_zero() {
        let r = rate_gkr_highp(0.5, 2.0).unwrap().value;
        assert!((r - 0.14384).abs() < 1e-5);
        assert_eq!(rate_gkr_highp(0.0, 4.0).unwrap().value, 0.0);
        assert!(rate_gkr_highp(0.5, 1.5).is_err());
        assert_eq!(rate_gkr_highp(1.0, 3.0).unwrap().value, f64::INFINITY);
    }

    #[test]
    fn gkr_cumulant_gradient_at_zero() {
        let c = gkr_cumulant(3.0);
        let (g, h) = c.derivatives(&[0.0, 0.0, 0.0]).unwrap();
        assert!((g[0] - 1.0).abs() < 1e-10 && g[1].abs() < 1e-12 && (g[2] - 1.0).abs() < 1e-9);
        // E[z²y²] = M_p(2) for the off-diagonal curvature in t₁
        assert!((h[1][1] - moment_mpq(3.0, 2.0).unwrap()).abs() < 1e-8);
        let fd = (c.eval(&[0.0, 1e-3, 0.0]) - 2.0 * c.eval(&[0.0, 0.0, 0.0]) + c.eval(&[0.0, -1e-3, 0.0])) / 1e-6;
        assert!((fd - h[1][1]).abs() < 1e-4);
    }

    #[test]
    fn lqnorm_low_examples() {
        let m = moment_mpq(1.0, 2.0).unwrap();
        assert_eq!(rate_lqnorm_low(m.sqrt(), 1.0, 2.0).unwrap(), 0.0);
        assert!((rate_lqnorm_low(2.0, 1.0, 2.0).unwrap() - 2f64.sqrt()).abs() < 1e-14);
        assert_eq!(rate_lqnorm_low(1.0, 1.0, 2.0).unwrap(), f64::INFINITY);
        assert!(rate_lqnorm_low(1.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn lqnorm_high_zero_and_domain() {
        let (p, q) = (3.0, 1.0);
        let m = typical_lq(p, q);
        assert!(rate_lqnorm_high(m, p, q).unwrap().value < 1e-9);
        assert_eq!(rate_lqnorm_high(0.0, p, q).unwrap().value, f64::INFINITY);
        assert_eq!(rate_lqnorm_high(-1.0, p, q).unwrap().value, f64::INFINITY);
        assert!(rate_lqnorm_high(1.2 * m, p, q).unwrap().value > 1e-3);
        assert!(rate_lqnorm_high(0.9 * m, p, q).unwrap().value > 1e-4);
    }

    #[test]
    fn stretched_and_mdp() {
        assert_eq!(rate_stretched_cramer(2.0, 1.0, 0.5, 2.0), 0.0);
        assert_eq!(rate_stretched_cramer(3.0, 1.7, 0.5, 2.0), 1.7);
        assert!((rate_stretched_cramer(6.0, 1.0, 0.5, 2.0) - 2.0).abs() < 1e-15);
        let s = mdp_sigma2(2.0, 1.0).unwrap();
        assert!((s - (PI / 2.0 - 1.5)).abs() < 1e-13);
        assert_eq!(mdp_rate(0.0, s), 0.0);
    }
}
