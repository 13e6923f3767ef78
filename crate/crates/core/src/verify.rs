//! Oracles and estimators that confront rate functions with measured probabilities:
//! lattice-convolution tails, exponentially tilted importance sampling, LDP slope fits
//! and moderate-deviation experiments.

use std::fmt::Write as _;

use num_complex::Complex;
use rand::Rng as _;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::distributions::{log_moment_mpq, p_gaussian_log_pdf};
use crate::error::{Error, Flag, Flagged, Result};
use crate::measure::{integrate_segment_with, CdfTable, Density1D};
use crate::quad::{self, QuadOpts};
use crate::ratecalc::{cumulant_lq_lp, lq_fiber_argmin, mdp_sigma2, typical_lq};
use crate::rng::{self, Rng};
use crate::sampling::{sample_lp_ball, BallMode};
use crate::stats;

const MAX_CONVOLUTIONS: usize = 1 << 14;
const TRUNCATION_LIMIT: f64 = 1e-12;

/// Lattice used by [`fft_tail`]. Unset fields are chosen from the density.
#[derive(Debug, Clone, Copy, Default)]
pub struct TailGrid {
    pub step: Option<f64>,
    pub range: Option<(f64, f64)>,
}

/// Which side of the threshold the event lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tail {
    Upper,
    Lower,
}

fn rel_opts() -> QuadOpts {
    QuadOpts { abs_tol: 1e-300, rel_tol: 1e-10, max_intervals: 400 }
}

/// Mass of the hat function centred at `x` with half-width `h`.
fn hat_mass(d: &Density1D, x: f64, h: f64) -> f64 {
    let (a, b) = d.support;
    let left = |t: f64| d.pdf(t) * (1.0 - (x - t) / h);
    let right = |t: f64| d.pdf(t) * (1.0 - (t - x) / h);
    let mut m = 0.0;
    let (l0, l1) = ((x - h).max(a), x.min(b));
    if l1 > l0 {
        m += integrate_segment_with(&left, l0, l1, &rel_opts());
    }
    let (r0, r1) = (x.max(a), (x + h).min(b));
    if r1 > r0 {
        m += integrate_segment_with(&right, r0, r1, &rel_opts());
    }
    m.max(0.0)
}

fn outside_mass(d: &Density1D, lo: f64, hi: f64) -> f64 {
    let (a, b) = d.support;
    let mut m = 0.0;
    if lo > a {
        m += quad::log_integral_exp(|x| d.log_pdf(x), a, lo).exp();
    }
    if hi < b {
        m += quad::log_integral_exp(|x| d.log_pdf(x), hi, b).exp();
    }
    m
}

/// Compensated (Neumaier) sum.
fn neumaier(xs: impl Iterator<Item = f64>) -> f64 {
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for x in xs {
        let t = s + x;
        if s.abs() >= x.abs() {
            c += (s - t) + x;
        } else {
            c += (x - t) + s;
        }
        s = t;
    }
    s + c
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + neumaier(xs.iter().map(|x| (x - m).exp())).ln()
}

/// log P[S_n ≥ threshold] for S_n a sum of n iid draws from `density`.
///
/// The density is put on a lattice with mean-preserving hat weights. Light tails are handled
/// by an exponentially tilted n-fold convolution, computed as an n-th power in the frequency
/// domain. When the tilted lattice law piles up at the grid edge (no usable exponential
/// moment), a support bounded below allows an exact capped convolution of positive terms.
pub fn fft_tail(density: &Density1D, n: usize, threshold: f64, grid: &TailGrid) -> Result<Flagged> {
    if n == 0 || n > MAX_CONVOLUTIONS {
        return Err(Error::Invalid(format!("convolution count must be in 1..={MAX_CONVOLUTIONS}, got {n}")));
    }
    if n == 1 {
        let (a, b) = density.support;
        if threshold >= b {
            return Ok(Flagged::with(f64::NEG_INFINITY, Flag::OutsideDomain));
        }
        return Ok(Flagged::ok(quad::log_integral_exp(|x| density.log_pdf(x), threshold.max(a), b)));
    }
    let (lo, hi) = grid.range.unwrap_or_else(|| density.effective_range());
    if !(hi > lo) {
        return Err(Error::Invalid(format!("empty grid range [{lo}, {hi}]")));
    }
    let c = threshold / n as f64;
    if c >= hi {
        return Ok(Flagged::with(f64::NEG_INFINITY, Flag::OutsideDomain));
    }
    let mut hi = hi;
    for _ in 0..6 {
        match light_tail(density, n, c, lo, hi, grid.step)? {
            Light::Done(v) => return Ok(v),
            Light::Heavy => return capped_tail(density, n, threshold, grid),
            Light::Edge(m) if grid.range.is_some() => {
                return Err(Error::Range(format!("tilted law leaves {m:e} at the grid edge; widen the grid")))
            }
            Light::Edge(_) => hi += hi - lo,
        }
    }
    Err(Error::Range("tilted law does not fit any default grid".into()))
}

enum Light {
    Done(Flagged),
    /// no usable exponential moment on the lattice
    Heavy,
    Edge(f64),
}

fn light_tail(d: &Density1D, n: usize, c: f64, lo: f64, hi: f64, step: Option<f64>) -> Result<Light> {
    let h = step.unwrap_or((hi - lo) / 2048.0);
    // lattice c + k h, so the threshold sits on a lattice point
    let k_lo = ((lo - c) / h).floor() as i64;
    let k_hi = ((hi - c) / h).ceil() as i64;
    let xs: Vec<f64> = (k_lo..=k_hi).map(|k| c + k as f64 * h).collect();
    let out = outside_mass(d, xs[0], *xs.last().unwrap());
    let lower_bounded = d.support.0.is_finite();
    if out > TRUNCATION_LIMIT && !(lower_bounded && c > lo) {
        return Err(Error::Range(format!("grid range truncates {out:e} of the mass; widen the grid")));
    }
    let w: Vec<f64> = xs.par_iter().map(|&x| hat_mass(d, x, h)).collect();
    let lw: Vec<f64> = w.iter().map(|v| v.ln()).collect();
    let k = w.len();
    let jstar = -k_lo as f64;
    // tilt θ (per lattice unit) so the tilted mean lands on the threshold index
    let log_z = |th: f64| log_sum_exp(&lw.iter().enumerate().map(|(j, l)| l + th * j as f64).collect::<Vec<_>>());
    let mean = |th: f64| {
        let lz = log_z(th);
        lw.iter().enumerate().map(|(j, l)| j as f64 * (l + th * j as f64 - lz).exp()).sum::<f64>()
    };
    let mut theta = 0.0;
    if mean(0.0) < jstar {
        let mut up = 1.0 / k as f64;
        while mean(up) < jstar {
            up *= 2.0;
            if up > 1e6 {
                return Ok(Light::Heavy);
            }
        }
        let mut dn = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (dn + up);
            if mean(mid) < jstar { dn = mid } else { up = mid }
        }
        theta = 0.5 * (dn + up);
    }
    let lz = log_z(theta);
    let pt: Vec<f64> = lw.iter().enumerate().map(|(j, l)| (l + theta * j as f64 - lz).exp()).collect();
    let edge = (k / 100).max(1);
    let edge_mass: f64 = pt[k - edge..].iter().sum();
    if edge_mass > TRUNCATION_LIMIT {
        return Ok(if lower_bounded { Light::Heavy } else { Light::Edge(edge_mass) });
    }
    let mu: f64 = pt.iter().enumerate().map(|(j, p)| j as f64 * p).sum();
    let var: f64 = pt.iter().enumerate().map(|(j, p)| (j as f64 - mu).powi(2) * p).sum();
    let nf = n as f64;
    let spread = (40.0 * (nf * var).sqrt()).max(5.0 * k as f64 * nf.sqrt()).min(nf * k as f64);
    let len = ((2.0 * spread) as usize + 2 * k + 1).next_power_of_two();
    let mut buf: Vec<Complex<f64>> = vec![Complex::new(0.0, 0.0); len];
    for (j, p) in pt.iter().enumerate() {
        buf[j % len].re += p;
    }
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(len).process(&mut buf);
    for z in buf.iter_mut() {
        *z = z.powu(n as u32);
    }
    planner.plan_fft_inverse(len).process(&mut buf);
    let centre = nf * mu;
    let start = (centre - len as f64 / 2.0).ceil() as i64;
    let js = jstar as i64 * n as i64;
    let mut terms = Vec::new();
    for r in 0..len as i64 {
        let jj = start + (r - start).rem_euclid(len as i64);
        if jj < js {
            continue;
        }
        let v = (buf[r as usize].re / len as f64).max(0.0);
        let wgt = if jj == js { 0.5 } else { 1.0 };
        terms.push(wgt * v * (-theta * (jj - js) as f64).exp());
    }
    terms.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let s = neumaier(terms.into_iter());
    if !(s > 0.0) {
        return Ok(Light::Done(Flagged::with(f64::NEG_INFINITY, Flag::InsufficientCounts)));
    }
    Ok(Light::Done(Flagged::ok(nf * lz - theta * js as f64 + s.ln())))
}

/// Capped lattice law: regular bins 0..cap, then one absorbing bin for "≥ cap".
fn capped_convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let cap = a.len() - 1;
    let mut out: Vec<f64> = (0..cap)
        .into_par_iter()
        .map(|j| {
            let mut s = 0.0;
            for i in 0..=j {
                s += a[i] * b[j - i];
            }
            s
        })
        .collect();
    let mut suffix = vec![0.0; cap + 1];
    for j in (0..cap).rev() {
        suffix[j] = suffix[j + 1] + b[j];
    }
    let a_reg: f64 = a[..cap].iter().sum();
    let b_all: f64 = b.iter().sum();
    let mut top = a[cap] * b_all + b[cap] * a_reg;
    for i in 1..cap {
        top += a[i] * suffix[cap - i];
    }
    out.push(top);
    out
}

fn capped_tail(d: &Density1D, n: usize, threshold: f64, grid: &TailGrid) -> Result<Flagged> {
    let lo = match grid.range {
        Some((lo, _)) => lo,
        None => d.support.0,
    };
    if !lo.is_finite() {
        return Err(Error::Range("no exponential moment and no lower bound; the tail needs a wider grid".into()));
    }
    let below = outside_mass(d, lo, f64::INFINITY);
    if below > TRUNCATION_LIMIT {
        return Err(Error::Range(format!("grid range truncates {below:e} of the mass; widen the grid")));
    }
    let span = threshold - n as f64 * lo;
    if span <= 0.0 {
        return Ok(Flagged::ok(0.0));
    }
    let bins = match grid.step {
        Some(h) => (span / h).round().max(1.0) as usize,
        None => 8192,
    };
    let h = span / bins as f64;
    // regular bins 0..=bins, absorbing bin for sums above the threshold lattice point
    let cap = bins + 1;
    let mut single: Vec<f64> = (0..cap).into_par_iter().map(|j| hat_mass(d, lo + j as f64 * h, h)).collect();
    let x_last = lo + bins as f64 * h;
    let ramp = |t: f64| d.pdf(t) * (t - x_last) / h;
    let top = integrate_segment_with(&ramp, x_last, x_last + h, &rel_opts())
        + quad::log_integral_exp(|x| d.log_pdf(x), x_last + h, d.support.1.max(x_last + h)).exp();
    single.push(top);
    let mut acc: Option<Vec<f64>> = None;
    let mut pow = single;
    let mut m = n;
    while m > 0 {
        if m & 1 == 1 {
            acc = Some(match acc {
                None => pow.clone(),
                Some(a) => capped_convolve(&a, &pow),
            });
        }
        m >>= 1;
        if m > 0 {
            pow = capped_convolve(&pow, &pow);
        }
    }
    let law = acc.expect("n ≥ 1");
    let p = law[cap] + 0.5 * law[bins];
    if !(p > 0.0) {
        return Ok(Flagged::with(f64::NEG_INFINITY, Flag::InsufficientCounts));
    }
    Ok(Flagged::ok(p.ln()))
}

/// Importance-sampling estimate of a log-probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TiltedEstimate {
    pub log_prob: f64,
    /// Standard error of `log_prob` (delta method).
    pub std_err: f64,
    /// Relative standard error of the probability itself.
    pub rel_std_err: f64,
    pub tilt: f64,
    pub ess: f64,
    pub samples: usize,
    pub flag: Option<Flag>,
}

/// Log-weights ℓᵢ with event indicators, reduced to an estimate of log E[1{event} e^ℓ].
fn reduce_weights(logw: &[f64], tilt: f64) -> TiltedEstimate {
    let samples = logw.len();
    let m = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return TiltedEstimate {
            log_prob: f64::NEG_INFINITY,
            std_err: f64::INFINITY,
            rel_std_err: f64::INFINITY,
            tilt,
            ess: 0.0,
            samples,
            flag: Some(Flag::InsufficientCounts),
        };
    }
    let v: Vec<f64> = logw.iter().map(|l| (l - m).exp()).collect();
    let (mean, se) = stats::mean_se(&v);
    let s1: f64 = v.iter().sum();
    let s2: f64 = v.iter().map(|x| x * x).sum();
    let ess = s1 * s1 / s2;
    let rel = se / mean;
    TiltedEstimate {
        log_prob: m + mean.ln(),
        std_err: rel,
        rel_std_err: rel,
        tilt,
        ess,
        samples,
        flag: if ess < 100.0 { Some(Flag::LowEffectiveSampleSize) } else { None },
    }
}

/// Cumulant log ∫ e^{θx} f(x) dx, its first two derivatives.
fn density_cumulant(d: &Density1D, theta: f64) -> (f64, f64, f64) {
    let (a, b) = d.support;
    let h = |x: f64| theta * x + d.log_pdf(x);
    let lz = quad::log_integral_exp(h, a, b);
    let m = quad::exp_moments(h, a, b, &[&|x| x, &|x| x * x]);
    (lz, m[0], m[1] - m[0] * m[0])
}

fn negated(d: &Density1D) -> Density1D {
    let e = d.clone();
    let (a, b) = d.support;
    let bps: Vec<f64> = d.breakpoints.iter().map(|x| -x).collect();
    Density1D::new(format!("-{}", d.label), (-b, -a), move |x| e.log_pdf(-x)).with_breakpoints(&bps)
}

/// Importance-sampling estimate of log P[S_n ≥ threshold] (or ≤ for `Tail::Lower`).
///
/// Draws come from the tilted law e^{θx − Λ(θ)} f(x) tabulated on a fine grid; weights use
/// the exact ratio of f to the tabulated proposal, so the estimator is unbiased for any tilt.
/// With `tilt = None` the tilt solves Λ'(θ) = threshold / n; θ = 0 is plain Monte Carlo up to
/// the tabulation weights.
pub fn tilted_rare_event(
    base: &Density1D,
    tilt: Option<f64>,
    n: usize,
    threshold: f64,
    tail: Tail,
    samples: usize,
    rng: &mut Rng,
) -> Result<TiltedEstimate> {
    if n == 0 || samples < 2 {
        return Err(Error::Invalid(format!("need n ≥ 1 and at least two samples, got n = {n}, samples = {samples}")));
    }
    let (d, thr) = match tail {
        Tail::Upper => (base.clone(), threshold),
        Tail::Lower => (negated(base), -threshold),
    };
    let target = thr / n as f64;
    let theta = match tilt {
        Some(t) => t,
        None => solve_tilt(&d, target)?,
    };
    let (lz, _, _) = density_cumulant(&d, theta);
    if !lz.is_finite() {
        return Err(Error::Domain(format!("no exponential moment at tilt {theta}")));
    }
    let dd = d.clone();
    let tilted = Density1D::new(format!("tilted {}", d.label), d.support, move |x| dd.log_pdf(x) + theta * x - lz)
        .with_breakpoints(&d.breakpoints);
    let table = CdfTable::new(&tilted, 20000);
    let mut logw = Vec::with_capacity(samples);
    for _ in 0..samples {
        let mut s = 0.0;
        let mut lw = 0.0;
        for _ in 0..n {
            let x = table.quantile(rng.random::<f64>());
            s += x;
            lw += d.log_pdf(x) - table.log_q(x);
        }
        logw.push(if s >= thr { lw } else { f64::NEG_INFINITY });
    }
    Ok(reduce_weights(&logw, theta))
}

fn solve_tilt(d: &Density1D, target: f64) -> Result<f64> {
    let (_, m0, _) = density_cumulant(d, 0.0);
    if (target - m0).abs() < 1e-14 * (1.0 + m0.abs()) {
        return Ok(0.0);
    }
    let dir = if target > m0 { 1.0 } else { -1.0 };
    let mut far = dir * 0.5;
    loop {
        let (lz, m, _) = density_cumulant(d, far);
        if !lz.is_finite() {
            return Err(Error::Domain(format!("no exponential moment reaches mean {target}")));
        }
        if (m - target) * dir >= 0.0 {
            break;
        }
        far *= 2.0;
        if far.abs() > 1e8 {
            return Err(Error::Domain(format!("tilt for mean {target} not found")));
        }
    }
    let (mut a, mut b) = (0.0, far);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        let (_, m, _) = density_cumulant(d, mid);
        if (m - target) * dir < 0.0 { a = mid } else { b = mid }
    }
    Ok(0.5 * (a + b))
}

/// Importance-sampling estimate of log P[n^{1/p−1/q}‖Z‖_q ≥ z], Z uniform in 𝔹_p^n, q < p,
/// z above the typical value, tilting the coordinates of the p-Gaussian representation at
/// the dual point of the optimal fiber point.
pub fn lqnorm_tilted_rare_event(p: f64, q: f64, n: usize, z: f64, samples: usize, seed: u64) -> Result<TiltedEstimate> {
    if !(1.0 <= q && q < p && p.is_finite()) {
        return Err(Error::Domain(format!("need 1 ≤ q < p < ∞, got p = {p}, q = {q}")));
    }
    if !(z > typical_lq(p, q)) {
        return Err(Error::Domain(format!("threshold {z} is not above the typical value {}", typical_lq(p, q))));
    }
    let (rate, _, [t1, t2]) = lq_fiber_argmin(z, p, q);
    if !rate.is_finite() {
        return Err(Error::Domain(format!("threshold {z} is outside the rate's domain")));
    }
    let lam = cumulant_lq_lp(t1, t2, p, q);
    let half = Density1D::new("tilted |Y|", (0.0, f64::INFINITY), move |s: f64| {
        (2.0f64).ln() + p_gaussian_log_pdf(s, p) + t1 * s.powf(q) + t2 * s.powf(p) - lam
    })
    .with_breakpoints(&[]);
    let table = CdfTable::new(&half, 20000);
    let batches = 64usize;
    let per = samples.div_ceil(batches);
    let chunks: Vec<Vec<f64>> = (0..batches)
        .into_par_iter()
        .map(|bi| {
            let mut r = rng::stream(seed, bi as u64);
            let mut out = Vec::with_capacity(per);
            for _ in 0..per {
                let (mut sq, mut sp, mut lw) = (0.0, 0.0, 0.0);
                for _ in 0..n {
                    let s = table.quantile(r.random::<f64>());
                    sq += s.powf(q);
                    sp += s.powf(p);
                    lw += (2.0f64).ln() + p_gaussian_log_pdf(s, p) - table.log_q(s);
                }
                let u: f64 = r.random::<f64>();
                let nf = n as f64;
                let stat = u.powf(1.0 / nf) * (sq / nf).powf(1.0 / q) / (sp / nf).powf(1.0 / p);
                out.push(if stat >= z { lw } else { f64::NEG_INFINITY });
            }
            out
        })
        .collect();
    let logw: Vec<f64> = chunks.into_iter().flatten().collect();
    Ok(reduce_weights(&logw, t2))
}

/// Least-squares fit of log-probabilities against the speed.
#[derive(Debug, Clone, PartialEq)]
pub struct LdpSlopeEstimate {
    pub n_grid: Vec<usize>,
    pub log_probs: Vec<f64>,
    pub std_errs: Vec<f64>,
    pub speed_values: Vec<f64>,
    pub fitted_slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub flag: Option<Flag>,
}

impl LdpSlopeEstimate {
    /// CSV with columns n, s_n, log_prob, std_err, rate_prediction.
    pub fn to_csv(&self, rate_prediction: f64) -> String {
        let mut s = String::from("n,s_n,log_prob,std_err,rate_prediction\n");
        for i in 0..self.n_grid.len() {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                self.n_grid[i], self.speed_values[i], self.log_probs[i], self.std_errs[i], rate_prediction
            );
        }
        s
    }
}

/// Fits log P(n) ≈ slope · s(n) + intercept; the slope estimates −I.
pub fn fit_ldp_slope(n_grid: &[usize], log_probs: &[f64], std_errs: &[f64], speed: &dyn Fn(usize) -> f64) -> Result<LdpSlopeEstimate> {
    if n_grid.len() < 3 {
        return Err(Error::Invalid(format!("slope fit needs at least 3 grid points, got {}", n_grid.len())));
    }
    if n_grid.len() != log_probs.len() || std_errs.len() != log_probs.len() {
        return Err(Error::Invalid("grid, log-probabilities and errors differ in length".into()));
    }
    if n_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Invalid("n_grid must be strictly increasing".into()));
    }
    if log_probs.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("a log-probability is not finite".into()));
    }
    let s: Vec<f64> = n_grid.iter().map(|&n| speed(n)).collect();
    let fit = stats::linear_fit(&s, log_probs);
    Ok(LdpSlopeEstimate {
        n_grid: n_grid.to_vec(),
        log_probs: log_probs.to_vec(),
        std_errs: std_errs.to_vec(),
        speed_values: s,
        fitted_slope: fit.slope,
        intercept: fit.intercept,
        r_squared: fit.r_squared.clamp(0.0, 1.0),
        flag: None,
    })
}

/// Exact log P[U^{1/n} ≤ z] = n log z.
pub fn uniform_root_log_prob(n: usize, z: f64) -> f64 {
    if z <= 0.0 {
        f64::NEG_INFINITY
    } else if z >= 1.0 {
        0.0
    } else {
        n as f64 * z.ln()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MdpRow {
    pub t: f64,
    pub exceed: usize,
    /// (1/b_n²) log of the empirical tail P[T ≥ t].
    pub scaled_log_tail: f64,
    /// −t²/(2σ²).
    pub mdp_prediction: f64,
    /// (1/b_n²) log of the Gaussian tail P[N(0, σ²/b_n²) ≥ t].
    pub gaussian_prediction: f64,
    pub flag: Option<Flag>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MdpExperiment {
    pub n: usize,
    pub b_n: f64,
    pub sigma2: f64,
    /// Empirical variance of √n (normalized norm − 1).
    pub sigma2_empirical: f64,
    pub rows: Vec<MdpRow>,
    pub statistics: Vec<f64>,
}

/// Simulates T = (√n/b_n)((n^{1/p−1/q}/M_p(q)^{1/q})‖Z‖_q − 1), b_n = n^γ, Z uniform in 𝔹_p^n.
pub fn mdp_experiment(p: f64, q: f64, gamma: f64, n: usize, samples: usize, t_grid: &[f64], seed: u64) -> Result<MdpExperiment> {
    if !(q < p) {
        return Err(Error::Domain(format!("moderate deviations need q < p, got p = {p}, q = {q}")));
    }
    if !(gamma > 0.0 && gamma < 0.5) {
        return Err(Error::Domain(format!("b_n = n^γ needs γ ∈ (0, 1/2), got {gamma}")));
    }
    let sigma2 = mdp_sigma2(p, q)?;
    let nf = n as f64;
    let b_n = nf.powf(gamma);
    let norm = nf.powf(1.0 / p - 1.0 / q) / (log_moment_mpq(p, q) / q).exp();
    let batches = 64usize;
    let per = samples.div_ceil(batches);
    let chunks: Result<Vec<Vec<f64>>> = (0..batches)
        .into_par_iter()
        .map(|bi| {
            let mut r = rng::stream(seed, bi as u64);
            let mut out = Vec::with_capacity(per);
            for _ in 0..per {
                let z = sample_lp_ball(n, p, BallMode::Uniform, &mut r)?;
                let lq = z.iter().map(|x| x.abs().powf(q)).sum::<f64>().powf(1.0 / q);
                out.push(nf.sqrt() * (norm * lq - 1.0));
            }
            Ok(out)
        })
        .collect();
    let unscaled: Vec<f64> = chunks?.into_iter().flatten().collect();
    let sigma2_empirical = stats::variance(&unscaled);
    let stats_t: Vec<f64> = unscaled.iter().map(|v| v / b_n).collect();
    let total = stats_t.len() as f64;
    let rows = t_grid
        .iter()
        .map(|&t| {
            let exceed = stats_t.iter().filter(|&&v| v >= t).count();
            let frac = exceed as f64 / total;
            let x = t * b_n / sigma2.sqrt();
            let g = 0.5 * libm::erfc(x / std::f64::consts::SQRT_2);
            MdpRow {
                t,
                exceed,
                scaled_log_tail: frac.ln() / (b_n * b_n),
                mdp_prediction: -t * t / (2.0 * sigma2),
                gaussian_prediction: g.ln() / (b_n * b_n),
                flag: if exceed < 30 { Some(Flag::InsufficientCounts) } else { None },
            }
        })
        .collect();
    Ok(MdpExperiment { n, b_n, sigma2, sigma2_empirical, rows, statistics: stats_t })
}

/// Source of the random vectors X^{(n)} in [`norm_ldp_experiment`].
pub enum NormSource<'a> {
    /// Uniform in n^{1/p}𝔹_p^n, simulated through the ball sampler.
    ScaledLpBall { p: f64 },
    /// iid standard Gaussian coordinates; tilted importance sampling on the squares.
    GaussianProduct,
    /// Any sampler; plain Monte Carlo.
    Sampler(&'a (dyn Fn(usize, &mut Rng) -> Vec<f64> + Sync)),
}

/// LDP slope of P[‖X‖₂/√n ≤ z] over `n_grid` at speed n.
pub fn norm_ldp_experiment(source: &NormSource, n_grid: &[usize], z: f64, samples: usize, seed: u64) -> Result<LdpSlopeEstimate> {
    let mut lps = Vec::new();
    let mut ses = Vec::new();
    let mut flag = None;
    for (gi, &n) in n_grid.iter().enumerate() {
        let (lp, se, f) = match source {
            NormSource::GaussianProduct => {
                let chi = Density1D::new("chi-square(1)", (0.0, f64::INFINITY), |x: f64| {
                    -0.5 * x - 0.5 * x.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln()
                });
                let mut r = rng::stream(seed, gi as u64);
                let e = tilted_rare_event(&chi, None, n, n as f64 * z * z, Tail::Lower, samples, &mut r)?;
                (e.log_prob, e.std_err, e.flag)
            }
            NormSource::ScaledLpBall { p } => {
                let p = *p;
                let draw = move |n: usize, r: &mut Rng| -> Vec<f64> {
                    let s = (n as f64).powf(1.0 / p);
                    sample_lp_ball(n, p, BallMode::Uniform, r).map(|v| v.into_iter().map(|x| x * s).collect()).unwrap_or_default()
                };
                if !(p >= 1.0) {
                    return Err(Error::Domain(format!("ball sampler needs p ≥ 1, got {p}")));
                }
                plain_norm_mc(&draw, n, z, samples, seed, gi as u64)
            }
            NormSource::Sampler(f) => plain_norm_mc(*f, n, z, samples, seed, gi as u64),
        };
        if !lp.is_finite() {
            return Ok(LdpSlopeEstimate {
                n_grid: n_grid.to_vec(),
                log_probs: vec![f64::NEG_INFINITY; n_grid.len()],
                std_errs: vec![f64::INFINITY; n_grid.len()],
                speed_values: n_grid.iter().map(|&n| n as f64).collect(),
                fitted_slope: f64::NEG_INFINITY,
                intercept: f64::NAN,
                r_squared: 0.0,
                flag: Some(Flag::InsufficientCounts),
            });
        }
        if f.is_some() {
            flag = f;
        }
        lps.push(lp);
        ses.push(se);
    }
    let mut fit = fit_ldp_slope(n_grid, &lps, &ses, &|n| n as f64)?;
    fit.flag = flag;
    Ok(fit)
}

fn plain_norm_mc(draw: &(dyn Fn(usize, &mut Rng) -> Vec<f64> + Sync), n: usize, z: f64, samples: usize, seed: u64, stream: u64) -> (f64, f64, Option<Flag>) {
    let batches = 32usize;
    let per = samples.div_ceil(batches);
    let hits: usize = (0..batches)
        .into_par_iter()
        .map(|bi| {
            let mut r = rng::stream(seed, (stream << 20) + bi as u64);
            (0..per)
                .filter(|_| {
                    let x = draw(n, &mut r);
                    let s: f64 = x.iter().map(|v| v * v).sum();
                    (s / n as f64).sqrt() <= z
                })
                .count()
        })
        .sum();
    let total = (per * batches) as f64;
    if hits == 0 {
        return (f64::NEG_INFINITY, f64::INFINITY, Some(Flag::InsufficientCounts));
    }
    let p = hits as f64 / total;
    let se = ((1.0 - p) / (p * total)).sqrt();
    (p.ln(), se, if hits < 30 { Some(Flag::InsufficientCounts) } else { None })
}
