use std::cell::Cell;

use super::CumulantFunction;
use crate::error::{Error, Flag, Flagged, Result};
use crate::optim;
use crate::quad;

const T_MAX: f64 = 1e9;

/// sup_t [t·x − f(t)] for a one-dimensional cumulant.
pub fn legendre_1d(f: &CumulantFunction, x: f64) -> Result<Flagged> {
    if f.dim() != 1 {
        return Err(Error::Invalid(format!("legendre_1d needs a 1D cumulant, got dim {}", f.dim())));
    }
    let f0 = f.eval(&[0.0]);
    if !f0.is_finite() {
        return Err(Error::Domain("cumulant must be finite at 0".into()));
    }
    let g = |t: f64| {
        let v = f.eval(&[t]);
        if v.is_finite() { t * x - v } else { f64::NEG_INFINITY }
    };
    let g0 = g(0.0);
    let mut h = 1e-3;
    // shrink the probe until both sides are in the domain
    while !(g(h).is_finite() && g(-h).is_finite()) && h > 1e-12 {
        h *= 0.1;
    }
    let (gp, gm) = (g(h), g(-h));
    if gp <= g0 && gm <= g0 {
        let (_, v) = optim::golden_max(g, -h, h, 1e-14, 300);
        return Ok(Flagged::ok(v.max(g0)));
    }
    let dir = if gp > gm { 1.0 } else { -1.0 };
    let mut prev2 = 0.0;
    let mut prev = 0.0;
    let mut gprev = g0;
    let mut cur = dir * h;
    loop {
        let gc = g(cur);
        if gc == f64::NEG_INFINITY {
            // domain edge between prev and cur
            let (mut a, mut b) = (prev, cur);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if g(m).is_finite() { a = m } else { b = m }
                if (b - a).abs() <= 1e-15 * a.abs().max(1e-300) {
                    break;
                }
            }
            if a.abs() >= 256.0 && g(a) > g(0.5 * a) + 1e-9 * a.abs() {
                // still climbing where the cumulant overflows
                return Ok(Flagged::infinite(Flag::UnboundedSup));
            }
            let (lo, hi) = if dir > 0.0 { (prev2, a) } else { (a, prev2) };
            let (_, v) = optim::golden_max(g, lo, hi, 1e-15, 500);
            let v = v.max(g(a)).max(gprev);
            return Ok(Flagged::ok(v));
        }
        if (gc - gprev).abs() <= 1e-15 * (1.0 + gc.abs()) && cur.abs() > 1.0 {
            // increments have died out: the supremum is a limit at infinity
            return Ok(Flagged::with(gc.max(gprev), Flag::LimitAtInfinity));
        }
        if gc <= gprev {
            let (lo, hi) = if dir > 0.0 { (prev2, cur) } else { (cur, prev2) };
            let (_, v) = optim::golden_max(g, lo, hi, 1e-15, 500);
            return Ok(Flagged::ok(v.max(gprev)));
        }
        if cur.abs() > T_MAX {
            let inc = gc - gprev;
            if inc < 1e-12 * (1.0 + gc.abs()) {
                return Ok(Flagged::with(gc, Flag::LimitAtInfinity));
            }
            return Ok(Flagged::infinite(Flag::UnboundedSup));
        }
        prev2 = prev;
        prev = cur;
        gprev = gc;
        cur *= 2.0;
    }
}

fn finite_diff(f: &CumulantFunction, t: &[f64]) -> Option<(Vec<f64>, Vec<Vec<f64>>)> {
    let d = t.len();
    let f0 = f.eval(t);
    let hs: Vec<f64> = t.iter().map(|v| 1e-4 * v.abs().max(1.0)).collect();
    let at = |i: usize, si: f64, j: usize, sj: f64| {
        let mut u = t.to_vec();
        u[i] += si * hs[i];
        u[j] += sj * hs[j];
        f.eval(&u)
    };
    let mut grad = vec![0.0; d];
    let mut hess = vec![vec![0.0; d]; d];
    for i in 0..d {
        let mut up = t.to_vec();
        up[i] += hs[i];
        let mut dn = t.to_vec();
        dn[i] -= hs[i];
        let (fu, fd) = (f.eval(&up), f.eval(&dn));
        if !(fu.is_finite() && fd.is_finite()) {
            return None;
        }
        grad[i] = (fu - fd) / (2.0 * hs[i]);
        hess[i][i] = (fu - 2.0 * f0 + fd) / (hs[i] * hs[i]);
        for j in 0..i {
            let v = (at(i, 1.0, j, 1.0) - at(i, 1.0, j, -1.0) - at(i, -1.0, j, 1.0) + at(i, -1.0, j, -1.0))
                / (4.0 * hs[i] * hs[j]);
            if !v.is_finite() {
                return None;
            }
            hess[i][j] = v;
            hess[j][i] = v;
        }
    }
    Some((grad, hess))
}

fn solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let d = b.len();
    let m = nalgebra::DMatrix::from_fn(d, d, |i, j| a[i][j]);
    let v = nalgebra::DVector::from_column_slice(b);
    m.lu().solve(&v).map(|s| s.iter().cloned().collect())
}

/// Newton ascent of t ↦ ⟨t,x⟩ − f(t) from `start`. Returns (value, argmax, flag).
pub fn legendre_nd_from(f: &CumulantFunction, x: &[f64], start: &[f64]) -> (f64, Vec<f64>, Option<Flag>) {
    let d = x.len();
    let g = |t: &[f64]| {
        let v = f.eval(t);
        if v.is_finite() { t.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() - v } else { f64::NEG_INFINITY }
    };
    let mut t = start.to_vec();
    let mut gt = g(&t);
    if !gt.is_finite() {
        return (f64::NEG_INFINITY, t, Some(Flag::OutsideDomain));
    }
    let mut lambda = 0.0;
    let mut stalled = 0;
    let mut edge = 0;
    for _ in 0..500 {
        let (grad, hess) = match f.derivatives(&t).or_else(|| finite_diff(f, &t)) {
            Some(v) => v,
            None => break,
        };
        let r: Vec<f64> = (0..d).map(|i| x[i] - grad[i]).collect();
        let scale = hess.iter().enumerate().map(|(i, row)| row[i].abs()).fold(0.0, f64::max).max(1e-300);
        let mut step = None;
        for _ in 0..40 {
            let mut a = hess.clone();
            for (i, row) in a.iter_mut().enumerate() {
                row[i] += lambda * scale + 1e-14 * scale;
            }
            if let Some(s) = solve(&a, &r) {
                let dec: f64 = s.iter().zip(&r).map(|(u, v)| u * v).sum();
                if dec > 0.0 && s.iter().all(|v| v.is_finite()) {
                    step = Some((s, dec));
                    break;
                }
            }
            lambda = if lambda == 0.0 { 1e-8 } else { lambda * 10.0 };
        }
        let (s, dec) = match step {
            Some(v) => v,
            None => break,
        };
        if dec < 1e-22 * (1.0 + gt.abs()) {
            return (gt, t, None);
        }
        let mut alpha = 1.0;
        let mut accepted = false;
        let mut hit_edge = false;
        while alpha > 1e-14 {
            let trial: Vec<f64> = (0..d).map(|i| t[i] + alpha * s[i]).collect();
            let gn = g(&trial);
            if gn == f64::NEG_INFINITY {
                hit_edge = true;
            }
            if gn.is_finite() && gn >= gt - 1e-15 * gt.abs() {
                let gain = gn - gt;
                t = trial;
                gt = gn;
                accepted = true;
                if gain.abs() <= 1e-15 * (1.0 + gt.abs()) {
                    stalled += 1;
                } else {
                    stalled = 0;
                }
                break;
            }
            alpha *= 0.5;
        }
        if alpha == 1.0 {
            lambda *= 0.1;
            if lambda < 1e-10 {
                lambda = 0.0;
            }
        } else {
            lambda = if lambda == 0.0 { 1e-6 } else { lambda * 4.0 };
        }
        if !accepted || stalled > 3 {
            return (gt, t, None);
        }
        // pinned against the edge of the effective domain: the supremum sits on it
        if hit_edge && alpha < 1e-6 {
            edge += 1;
            if edge >= 5 {
                return (gt, t, None);
            }
        } else {
            edge = 0;
        }
        let norm = t.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > T_MAX {
            return (f64::INFINITY, t, Some(Flag::UnboundedSup));
        }
    }
    // budget exhausted: decide between divergence and slow convergence
    let norm = t.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 1e5 {
        return (f64::INFINITY, t, Some(Flag::UnboundedSup));
    }
    (gt, t, Some(Flag::NotConverged))
}

/// sup_t [⟨t,x⟩ − f(t)] over the effective domain, multi-start.
pub fn legendre_nd(f: &CumulantFunction, x: &[f64]) -> Result<Flagged> {
    let d = f.dim();
    if x.len() != d {
        return Err(Error::Invalid(format!("point has dimension {} but cumulant has {d}", x.len())));
    }
    let mut starts = vec![vec![0.0; d]];
    for i in 0..d {
        let mut s = vec![0.0; d];
        s[i] = -0.1;
        starts.push(s);
    }
    let mut best: Option<(f64, Option<Flag>)> = None;
    for s in &starts {
        if !f.in_domain(s) || !f.eval(s).is_finite() {
            continue;
        }
        let (v, _, flag) = legendre_nd_from(f, x, s);
        if best.map_or(true, |(b, _)| v > b) {
            best = Some((v, flag));
        }
        if flag.is_none() && best.map_or(false, |(b, _)| (b - v).abs() <= 1e-10 * (1.0 + v.abs())) && v.is_finite() {
            // a clean convergence to the same optimum: further starts are redundant
            break;
        }
    }
    match best {
        None => Ok(Flagged::infinite(Flag::OutsideDomain)),
        Some((v, flag)) => Ok(Flagged { value: v, flag }),
    }
}

/// Whether e^{t₁s^q + (t₂ − 1/p)s^p} is integrable on (0, ∞).
fn lq_lp_finite(t1: f64, t2: f64, p: f64, q: f64) -> bool {
    let a = t2 - 1.0 / p;
    if !t1.is_finite() || !t2.is_finite() {
        return false;
    }
    if q > p {
        t1 < 0.0 || (t1 == 0.0 && a < 0.0)
    } else if q < p {
        a < 0.0 || (a == 0.0 && t1 < 0.0)
    } else {
        t1 + a < 0.0
    }
}

/// Λ(t₁,t₂) = log ∫ e^{t₁|s|^q + t₂|s|^p} f_p(s) ds; +∞ where the integral diverges.
pub fn cumulant_lq_lp(t1: f64, t2: f64, p: f64, q: f64) -> f64 {
    if !lq_lp_finite(t1, t2, p, q) {
        return f64::INFINITY;
    }
    let a = t2 - 1.0 / p;
    let h = |s: f64| t1 * s.powf(q) + a * s.powf(p);
    let lz = quad::log_integral_exp(h, 0.0, f64::INFINITY);
    lz + 2f64.ln() - crate::distributions::p_gaussian_log_norm(p)
}

/// Tilted moments (E s^q, E s^p, Var s^q, Cov, Var s^p) under e^{t₁s^q + t₂s^p} f_p.
fn lq_lp_moments(t1: f64, t2: f64, p: f64, q: f64) -> Option<[f64; 5]> {
    if !lq_lp_finite(t1, t2, p, q) {
        return None;
    }
    let a = t2 - 1.0 / p;
    let h = |s: f64| t1 * s.powf(q) + a * s.powf(p);
    let m = quad::exp_moments(
        h,
        0.0,
        f64::INFINITY,
        &[&|s: f64| s.powf(q), &|s: f64| s.powf(p), &|s: f64| s.powf(2.0 * q), &|s: f64| s.powf(p + q), &|s: f64| s.powf(2.0 * p)],
    );
    if m.iter().any(|v| !v.is_finite()) {
        return None;
    }
    Some([m[0], m[1], m[2] - m[0] * m[0], m[3] - m[0] * m[1], m[4] - m[1] * m[1]])
}

/// Safeguarded Newton root of an increasing function on a bracket.
fn increasing_root<F: Fn(f64) -> Option<(f64, f64)>>(f: F, mut lo: f64, mut hi: f64, x0: f64) -> Option<f64> {
    let mut x = x0;
    for _ in 0..200 {
        let (v, dv) = f(x)?;
        if v == 0.0 {
            return Some(x);
        }
        if dv > 0.0 && (v / dv).abs() <= 1e-15 * (1.0 + x.abs()) {
            return Some(x);
        }
        if v < 0.0 { lo = x } else { hi = x }
        let newton = x - v / dv;
        x = if dv > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if (hi - lo).abs() <= 1e-14 * (1.0 + x.abs()) {
            return Some(x);
        }
    }
    Some(x)
}

/// Λ*(a, b) for the pair (|Y|^q, |Y|^p), q < p, Y ~ μ_p, a, b > 0.
///
/// The supremum over t₂ may sit on the closed edge t₂ = 1/p, where Λ stays finite for
/// t₁ < 0; it is found by nested one-dimensional solves rather than a joint Newton step.
pub fn lq_lp_conjugate(a: f64, b: f64, p: f64, q: f64) -> Flagged {
    LqLpConjugate::new(p, q).eval(a, b)
}

/// [`lq_lp_conjugate`] with the dual point of the previous call kept as a starting guess.
pub struct LqLpConjugate {
    p: f64,
    q: f64,
    warm: Cell<(f64, f64)>,
}

impl LqLpConjugate {
    pub fn new(p: f64, q: f64) -> Self {
        assert!(q < p, "LqLpConjugate needs q < p");
        LqLpConjugate { p, q, warm: Cell::new((0.0, 0.0)) }
    }

    /// Root of E_{t₁,t₂}|s|^q = a in t₁, with the tilted moments there.
    fn inner(&self, a: f64, t2: f64, x0: f64) -> Option<(f64, [f64; 5])> {
        let (p, q) = (self.p, self.q);
        let g = |t1: f64| lq_lp_moments(t1, t2, p, q).map(|m| (m[0] - a, m[2]));
        let (lo, hi);
        if t2 >= 1.0 / p {
            let mut l = -1.0;
            while g(l)?.0 > 0.0 {
                l *= 2.0;
                if l < -1e12 {
                    return None;
                }
            }
            // the q-moment blows up as t₁ → 0⁻; back off until it is finite
            let mut h = -1e-8;
            while g(h).is_none() {
                h *= 10.0;
                if h < l {
                    return None;
                }
            }
            if g(h)?.0 < 0.0 {
                return None;
            }
            (lo, hi) = (l, h);
        } else {
            let mut d = 0.5;
            let up = g(x0)?.0 < 0.0;
            loop {
                let x = if up { x0 + d } else { x0 - d };
                let v = g(x)?.0;
                if (up && v >= 0.0) || (!up && v <= 0.0) {
                    (lo, hi) = if up { (x0, x) } else { (x, x0) };
                    break;
                }
                d *= 2.0;
                if d > 1e12 {
                    return None;
                }
            }
        }
        let t1 = increasing_root(g, lo, hi, 0.5 * (lo + hi))?;
        Some((t1, lq_lp_moments(t1, t2, p, q)?))
    }

    /// Dual point (t₁, t₂) of the last successful evaluation.
    pub fn last_dual(&self) -> (f64, f64) {
        self.warm.get()
    }

    pub fn eval(&self, a: f64, b: f64) -> Flagged {
        let (p, q) = (self.p, self.q);
        if !(a > 0.0 && b > 0.0) {
            return Flagged::infinite(Flag::OutsideDomain);
        }
        // Jensen: (E|Y|^q)^{p/q} ≤ E|Y|^p, with equality only for point masses
        if a.powf(p / q) >= b {
            return Flagged::infinite(Flag::OutsideDomain);
        }
        let top = 1.0 / p;
        let (w1, w2) = self.warm.get();
        let last_t1 = Cell::new(w1);
        let value = |t2: f64, t1: f64| t1 * a + t2 * b - cumulant_lq_lp(t1, t2, p, q);
        // outer: g'(t₂) = b − E|s|^p is decreasing
        let slope = |t2: f64| {
            let r = self.inner(a, t2, last_t1.get());
            if let Some((t1, _)) = r {
                if t2 < top {
                    last_t1.set(t1);
                }
            }
            r.map(|(t1, m)| (b - m[1], t1, m))
        };
        if let Some((s, t1, _)) = slope(top) {
            if s >= 0.0 {
                self.warm.set((t1, top));
                return Flagged::ok(value(top, t1).max(0.0));
            }
        }
        let start = if w2 < top { w2 } else { top - 1.0 };
        let (mut lo, mut hi) = (start, top - 1e-15);
        match slope(start) {
            Some((s, _, _)) if s > 0.0 => {}
            Some(_) => {
                hi = start;
                let mut d = 1.0;
                loop {
                    lo = start - d;
                    match slope(lo) {
                        Some((s, _, _)) if s > 0.0 => break,
                        Some(_) => d *= 2.0,
                        None => return Flagged::infinite(Flag::NotConverged),
                    }
                    if d > 1e18 {
                        return Flagged::infinite(Flag::UnboundedSup);
                    }
                }
            }
            None => return Flagged::infinite(Flag::NotConverged),
        }
        let f = |t2: f64| slope(t2).map(|(s, _, m)| (-s, m[4] - m[3] * m[3] / m[2]));
        let x0 = if start > lo && start < hi { start } else { 0.5 * (lo + hi) };
        let t2 = match increasing_root(f, lo, hi, x0) {
            Some(v) => v,
            None => return Flagged::infinite(Flag::NotConverged),
        };
        let t1 = match slope(t2) {
            Some((_, t1, _)) => t1,
            None => return Flagged::infinite(Flag::NotConverged),
        };
        self.warm.set((t1, t2));
        Flagged::ok(value(t2, t1).max(0.0))
    }
}

/// Λ with gradient and Hessian from tilted moments of (|s|^q, |s|^p).
pub fn cumulant_lq_lp_function(p: f64, q: f64) -> CumulantFunction {
    let f = move |t: &[f64]| cumulant_lq_lp(t[0], t[1], p, q);
    let derivs = move |t: &[f64]| -> Option<(Vec<f64>, Vec<Vec<f64>>)> {
        if !lq_lp_finite(t[0], t[1], p, q) {
            return None;
        }
        let a = t[1] - 1.0 / p;
        let h = |s: f64| t[0] * s.powf(q) + a * s.powf(p);
        let m = crate::quad::exp_moments(
            h,
            0.0,
            f64::INFINITY,
            &[&|s: f64| s.powf(q), &|s: f64| s.powf(p), &|s: f64| s.powf(2.0 * q), &|s: f64| s.powf(p + q), &|s: f64| s.powf(2.0 * p)],
        );
        let (e1, e2, e11, e12, e22) = (m[0], m[1], m[2], m[3], m[4]);
        Some((vec![e1, e2], vec![vec![e11 - e1 * e1, e12 - e1 * e2], vec![e12 - e1 * e2, e22 - e2 * e2]]))
    };
    CumulantFunction::new(2, f, move |t| lq_lp_finite(t[0], t[1], p, q)).with_derivatives(std::sync::Arc::new(derivs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::moment_mpq;

    #[test]
    fn lq_lp_conjugate_edge_closed_form() {
        // at t₂ = 1/4 the (s², s⁴) cumulant is Gaussian in s: sup at t₁ = −1/(2a)
        let lognorm = (2.0 * 2f64.sqrt() * crate::special::ln_gamma(1.25).exp()).ln();
        for &a in &[0.05, 0.2, 0.3] {
            let want = -0.5 + 0.25 - 0.5 * (2.0 * std::f64::consts::PI * a).ln() + lognorm;
            let got = lq_lp_conjugate(a, 1.0, 4.0, 2.0);
            assert!((got.value - want).abs() < 1e-9, "{a}: {got:?} vs {want}");
        }
    }

    #[test]
    fn lq_lp_conjugate_interior_matches_joint_newton() {
        let f = cumulant_lq_lp_function(4.0, 2.0);
        for &y in &[0.85f64, 0.9, 0.93] {
            let (v, _, _) = legendre_nd_from(&f, &[y * y, 1.0], &[0.0, 0.0]);
            let w = lq_lp_conjugate(y * y, 1.0, 4.0, 2.0);
            assert!((v - w.value).abs() < 1e-8, "{y}: {v} vs {w:?}");
        }
        let m2 = moment_mpq(4.0, 2.0).unwrap();
        assert!(lq_lp_conjugate(m2, 1.0, 4.0, 2.0).value < 1e-10);
        assert_eq!(lq_lp_conjugate(1.0, 1.0, 4.0, 2.0).value, f64::INFINITY);
    }

    #[test]
    fn quadratic_self_dual() {
        let f = CumulantFunction::scalar(|t| t * t / 2.0);
        let v = legendre_1d(&f, 1.5).unwrap();
        assert!((v.value - 1.125).abs() < 1e-12);
        assert!(v.flag.is_none());
        for &a in &[-2.0, 0.0, 0.3, 4.0] {
            assert!((legendre_1d(&f, a).unwrap().value - a * a / 2.0).abs() < 1e-11);
        }
    }

    #[test]
    fn rademacher_rate() {
        let f = CumulantFunction::scalar(|t: f64| t.abs() + (-2.0 * t.abs()).exp().ln_1p() - 2f64.ln());
        let v = legendre_1d(&f, 0.5).unwrap().value;
        let want = 0.75 * 1.5f64.ln() + 0.25 * 0.5f64.ln();
        assert!((v - want).abs() < 1e-11);
        assert!((v - 0.13081).abs() < 1e-5);
        let edge = legendre_1d(&f, 1.0).unwrap();
        assert!((edge.value - 2f64.ln()).abs() < 1e-9);
        assert_eq!(edge.flag, Some(Flag::LimitAtInfinity));
        let out = legendre_1d(&f, 1.5).unwrap();
        assert_eq!(out.value, f64::INFINITY);
        assert_eq!(out.flag, Some(Flag::UnboundedSup));
    }

    #[test]
    fn chi_square_domain_edge() {
        let f = CumulantFunction::new(1, |t| -0.5 * (1.0 - 2.0 * t[0]).ln(), |t| t[0] < 0.5);
        for &y in &[0.2, 1.0, 3.0, 40.0] {
            let v = legendre_1d(&f, y).unwrap().value;
            assert!((v - (y - 1.0 - f64::ln(y)) / 2.0).abs() < 1e-10, "y={y}");
        }
        let neg = legendre_1d(&f, -1.0).unwrap();
        assert_eq!(neg.value, f64::INFINITY);
    }

    #[test]
    fn nd_quadratic_and_domain() {
        let f = CumulantFunction::new(2, |t| 0.5 * (t[0] * t[0] + t[1] * t[1]), |_| true);
        let v = legendre_nd(&f, &[1.0, 1.0]).unwrap();
        assert!((v.value - 1.0).abs() < 1e-10);
        assert!(legendre_nd(&f, &[1.0]).is_err());
        let never = CumulantFunction::new(2, |_| 0.0, |_| false);
        assert_eq!(legendre_nd(&never, &[0.0, 0.0]).unwrap().flag, Some(Flag::OutsideDomain));
    }

    #[test]
    fn lq_lp_cumulant_basics() {
        assert!(cumulant_lq_lp(0.0, 0.0, 3.0, 1.0).abs() < 1e-12);
        assert_eq!(cumulant_lq_lp(0.0, 1.0 / 3.0, 3.0, 1.0), f64::INFINITY);
        let near = cumulant_lq_lp(0.0, 1.0 / 3.0 - 1e-9, 3.0, 1.0);
        assert!(near > 5.0);
        let h = 1e-5;
        let d = (cumulant_lq_lp(h, 0.0, 3.0, 1.5) - cumulant_lq_lp(-h, 0.0, 3.0, 1.5)) / (2.0 * h);
        assert!((d - moment_mpq(3.0, 1.5).unwrap()).abs() < 1e-6);
        let c = cumulant_lq_lp_function(3.0, 1.5);
        let (g, _) = c.derivatives(&[0.0, 0.0]).unwrap();
        assert!((g[0] - moment_mpq(3.0, 1.5).unwrap()).abs() < 1e-9);
        assert!((g[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn lq_lp_transform_vanishes_at_mean() {
        for &(p, q) in &[(3.0, 1.0), (4.0, 2.0)] {
            let c = cumulant_lq_lp_function(p, q);
            let m = moment_mpq(p, q).unwrap();
            let v = legendre_nd(&c, &[m, 1.0]).unwrap();
            assert!(v.value.abs() < 1e-10, "p={p} q={q}: {}", v.value);
            let off = legendre_nd(&c, &[1.3 * m, 1.0]).unwrap();
            assert!(off.value > 1e-3);
        }
    }
}
