//! Samplers for ℓ_p balls, Orlicz balls, Haar frames on Stiefel manifolds, and coordinate
//! projections.

use nalgebra::DMatrix;
use rand::Rng as _;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::distributions::p_gaussian_sample;
use crate::error::{Error, Result};
use crate::measure::EmpiricalMeasure;
use crate::orlicz::{self, lp_ball_log_volume, OrliczFunction};
use crate::rng::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BallMode {
    Uniform,
    Cone,
}

fn lp_norm(x: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        x.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    } else {
        x.iter().map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// Draw from the unit ℓ_p ball (uniform) or its boundary under the cone measure.
pub fn sample_lp_ball(n: usize, p: f64, mode: BallMode, rng: &mut Rng) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::Invalid("dimension must be positive".into()));
    }
    if !(p >= 1.0) {
        return Err(Error::Domain(format!("ℓ_p ball needs p ≥ 1, got {p}")));
    }
    if p.is_infinite() {
        let mut x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        if mode == BallMode::Cone {
            let i = rng.random_range(0..n);
            x[i] = if rng.random::<bool>() { 1.0 } else { -1.0 };
        }
        return Ok(x);
    }
    let z: Vec<f64> = (0..n).map(|_| p_gaussian_sample(p, rng)).collect();
    let norm = lp_norm(&z, p);
    let radial = match mode {
        BallMode::Uniform => rng.random::<f64>().powf(1.0 / n as f64),
        BallMode::Cone => 1.0,
    };
    Ok(z.iter().map(|v| radial * v / norm).collect())
}

/// Uniform draw from n^{1/p}·𝔹_p^n (n^{1/p} = 1 for p = ∞).
pub fn sample_scaled_lp_ball(n: usize, p: f64, rng: &mut Rng) -> Result<Vec<f64>> {
    let scale = if p.is_infinite() { 1.0 } else { (n as f64).powf(1.0 / p) };
    Ok(sample_lp_ball(n, p, BallMode::Uniform, rng)?.into_iter().map(|v| v * scale).collect())
}

/// Exact sampler for the Gibbs law ∝ e^{αM(x)}, α < 0.
#[derive(Debug, Clone)]
pub struct GibbsSampler {
    m: OrliczFunction,
    alpha: f64,
    kind: GibbsKind,
}

#[derive(Debug, Clone)]
enum GibbsKind {
    Power { p: f64, gamma: Gamma<f64> },
    Envelope(Envelope),
}

/// Step envelope of the decreasing function e^{αM(a)} on [0, A], with an exponential tail.
#[derive(Debug, Clone)]
struct Envelope {
    edges: Vec<f64>,
    heights: Vec<f64>,
    cum: Vec<f64>,
    tail_rate: f64,
    tail_height: f64,
    total: f64,
}

impl GibbsSampler {
    pub fn new(m: &OrliczFunction, alpha: f64) -> Result<Self> {
        if !(alpha < 0.0) {
            return Err(Error::Domain(format!("Gibbs sampler needs α < 0, got {alpha}")));
        }
        let kind = match m.power_exponent() {
            Some(p) => GibbsKind::Power {
                p,
                gamma: Gamma::new(1.0 / p, 1.0 / -alpha).map_err(|e| Error::Numerical(e.to_string()))?,
            },
            None => GibbsKind::Envelope(Envelope::build(m, alpha)?),
        };
        Ok(GibbsSampler { m: m.clone(), alpha, kind })
    }

    pub fn sample(&self, rng: &mut Rng) -> f64 {
        let a = match &self.kind {
            GibbsKind::Power { p, gamma } => gamma.sample(rng).powf(1.0 / p),
            GibbsKind::Envelope(env) => loop {
                let (a, h) = env.draw(rng);
                let target = (self.alpha * self.m.eval(a)).exp();
                if rng.random::<f64>() * h <= target {
                    break a;
                }
            },
        };
        if rng.random::<bool>() { a } else { -a }
    }
}

impl Envelope {
    fn build(m: &OrliczFunction, alpha: f64) -> Result<Self> {
        let f = |a: f64| (alpha * m.eval(a)).exp();
        let mut top = m.inverse(40.0 / -alpha);
        let bounded = m.domain_bound();
        if let Some(b) = bounded {
            top = top.min(b);
        }
        if !top.is_finite() || !(top > 0.0) {
            return Err(Error::Numerical(format!("cannot bracket the Gibbs law of {}", m.name())));
        }
        let cells = 256;
        let edges: Vec<f64> = (0..=cells).map(|i| top * i as f64 / cells as f64).collect();
        let heights: Vec<f64> = edges[..cells].iter().map(|&a| f(a)).collect();
        let mut cum = Vec::with_capacity(cells + 1);
        cum.push(0.0);
        for i in 0..cells {
            let next = cum[i] + heights[i] * (edges[i + 1] - edges[i]);
            cum.push(next);
        }
        let at_cap = bounded.map_or(false, |b| top >= b);
        let (tail_rate, tail_height) = if at_cap {
            (0.0, 0.0)
        } else {
            let h = top * 1e-6;
            let slope = (m.eval(top) - m.eval(top - h)) / h;
            (-alpha * slope, f(top))
        };
        let tail_mass = if tail_rate > 0.0 { tail_height / tail_rate } else { 0.0 };
        let total = cum[cells] + tail_mass;
        Ok(Envelope { edges, heights, cum, tail_rate, tail_height, total })
    }

    /// Point from the normalized envelope and the envelope height there.
    fn draw(&self, rng: &mut Rng) -> (f64, f64) {
        let u = rng.random::<f64>() * self.total;
        let body = *self.cum.last().unwrap();
        if u < body {
            let i = self.cum.partition_point(|&c| c <= u).clamp(1, self.heights.len()) - 1;
            let a = rng.random_range(self.edges[i]..self.edges[i + 1]);
            (a, self.heights[i])
        } else {
            let top = *self.edges.last().unwrap();
            let e: f64 = -rng.random::<f64>().ln() / self.tail_rate;
            let a = top + e;
            (a, self.tail_height * (-self.tail_rate * e).exp())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrliczMethod {
    Rejection,
    HitAndRun,
}

pub const DEFAULT_ACCEPTANCE_FLOOR: f64 = 1e-4;

/// Predicted acceptance probability of the tilted rejection sampler,
/// vol(B) · e^{d(α*R − φ(α*))} with the volume taken exactly when known and from the
/// Petrov-corrected asymptotic otherwise.
pub fn acceptance_rate_estimate(d: usize, m: &OrliczFunction, r: f64) -> Result<f64> {
    let sol = orlicz::solve_alpha_star(m, r)?;
    let df = d as f64;
    let log_vol = if let Some(p) = m.power_exponent() {
        lp_ball_log_volume(d, p, (df * r).powf(1.0 / p))
    } else if d == 1 {
        (2.0 * m.inverse(r)).ln()
    } else {
        orlicz::volume_estimate(m, r, d)?.log_volume
    };
    Ok((log_vol + df * (sol.alpha_star * r - sol.phi_at)).exp().min(1.0))
}

/// Markov chain on {Σ M(xᵢ) ≤ dR} updating one uniformly chosen coordinate per step by
/// an exact uniform draw on its chord.
#[derive(Debug, Clone)]
pub struct HitAndRun {
    m: OrliczFunction,
    budget: f64,
    x: Vec<f64>,
    mx: Vec<f64>,
    sum: f64,
    steps: u64,
    pub thin: usize,
}

impl HitAndRun {
    /// Chain started at the origin and run for `burn_in` steps (default 10·d).
    pub fn new(d: usize, m: &OrliczFunction, r: f64, burn_in: Option<usize>, rng: &mut Rng) -> Result<Self> {
        if d == 0 || !(r > 0.0) {
            return Err(Error::Invalid(format!("hit-and-run needs d ≥ 1 and R > 0, got d = {d}, R = {r}")));
        }
        let mut chain = HitAndRun {
            m: m.clone(),
            budget: d as f64 * r,
            x: vec![0.0; d],
            mx: vec![0.0; d],
            sum: 0.0,
            steps: 0,
            thin: d,
        };
        for _ in 0..burn_in.unwrap_or(10 * d) {
            chain.step(rng);
        }
        Ok(chain)
    }

    pub fn step(&mut self, rng: &mut Rng) {
        let d = self.x.len();
        let i = rng.random_range(0..d);
        let level = (self.budget - (self.sum - self.mx[i])).max(0.0);
        let half = self.m.inverse(level);
        let mut xi = rng.random_range(-1.0..=1.0) * half;
        let mut mi = self.m.eval(xi);
        if !(mi <= level) {
            // root finder rounding at the chord end
            xi *= 1.0 - 1e-12;
            mi = self.m.eval(xi);
            if !(mi <= level) {
                xi = 0.0;
                mi = 0.0;
            }
        }
        self.sum += mi - self.mx[i];
        self.x[i] = xi;
        self.mx[i] = mi;
        self.steps += 1;
        if self.steps % 1024 == 0 {
            self.sum = self.mx.iter().sum();
        }
    }

    /// Advance by `thin` steps and return the state.
    pub fn next_draw(&mut self, rng: &mut Rng) -> Vec<f64> {
        for _ in 0..self.thin {
            self.step(rng);
        }
        self.x.clone()
    }

    pub fn state(&self) -> &[f64] {
        &self.x
    }
}

/// Exact rejection sampler for the uniform law on {Σ M(xᵢ) ≤ dR}.
#[derive(Debug, Clone)]
pub struct OrliczRejection {
    gibbs: GibbsSampler,
    m: OrliczFunction,
    abs_alpha: f64,
    budget: f64,
    d: usize,
    pub attempts: u64,
    pub accepted: u64,
}

impl OrliczRejection {
    pub fn new(d: usize, m: &OrliczFunction, r: f64, floor: f64) -> Result<Self> {
        if d == 0 {
            return Err(Error::Invalid("dimension must be positive".into()));
        }
        let est = acceptance_rate_estimate(d, m, r)?;
        if est < floor {
            return Err(Error::Advisory(format!(
                "predicted rejection acceptance {est:.3e} is below the floor {floor:.1e}; use hit_and_run"
            )));
        }
        let sol = orlicz::solve_alpha_star(m, r)?;
        Ok(OrliczRejection {
            gibbs: GibbsSampler::new(m, sol.alpha_star)?,
            m: m.clone(),
            abs_alpha: -sol.alpha_star,
            budget: d as f64 * r,
            d,
            attempts: 0,
            accepted: 0,
        })
    }

    pub fn draw(&mut self, rng: &mut Rng) -> Vec<f64> {
        loop {
            self.attempts += 1;
            let x: Vec<f64> = (0..self.d).map(|_| self.gibbs.sample(rng)).collect();
            let s: f64 = x.iter().map(|&v| self.m.eval(v)).sum();
            if s <= self.budget && rng.random::<f64>() < (self.abs_alpha * (s - self.budget)).exp() {
                self.accepted += 1;
                return x;
            }
        }
    }

    pub fn acceptance(&self) -> f64 {
        if self.attempts == 0 { f64::NAN } else { self.accepted as f64 / self.attempts as f64 }
    }
}

/// `count` draws from the uniform law on {Σ M(xᵢ) ≤ dR}.
pub fn sample_uniform_orlicz_ball(
    d: usize,
    m: &OrliczFunction,
    r: f64,
    method: OrliczMethod,
    count: usize,
    rng: &mut Rng,
) -> Result<Vec<Vec<f64>>> {
    match method {
        OrliczMethod::Rejection => {
            let mut s = OrliczRejection::new(d, m, r, DEFAULT_ACCEPTANCE_FLOOR)?;
            Ok((0..count).map(|_| s.draw(rng)).collect())
        }
        OrliczMethod::HitAndRun => {
            let mut c = HitAndRun::new(d, m, r, None, rng)?;
            Ok((0..count).map(|_| c.next_draw(rng)).collect())
        }
    }
}

/// n×k matrix with orthonormal columns.
#[derive(Debug, Clone)]
pub struct StiefelFrame {
    entries: DMatrix<f64>,
}

impl StiefelFrame {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        let g = entries.transpose() * &entries;
        let k = entries.ncols();
        if (g - DMatrix::identity(k, k)).amax() > 1e-10 {
            return Err(Error::Invalid("columns are not orthonormal".into()));
        }
        Ok(StiefelFrame { entries })
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn k(&self) -> usize {
        self.entries.ncols()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }
}

/// Haar frame: thin QR of a Gaussian n×k matrix, columns of Q flipped so that R has a
/// positive diagonal.
pub fn sample_haar_stiefel(n: usize, k: usize, rng: &mut Rng) -> Result<StiefelFrame> {
    if !(1 <= k && k <= n) {
        return Err(Error::Invalid(format!("Stiefel frame needs 1 ≤ k ≤ n, got n = {n}, k = {k}")));
    }
    let g = DMatrix::<f64>::from_fn(n, k, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..k {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    Ok(StiefelFrame { entries: q })
}

/// Aᵀx and the uniform empirical measure of its coordinates.
pub fn project_empirical(a: &StiefelFrame, x: &[f64]) -> Result<(Vec<f64>, EmpiricalMeasure)> {
    if x.len() != a.n() {
        return Err(Error::Invalid(format!("vector of length {} does not match frame with n = {}", x.len(), a.n())));
    }
    let v = a.entries.tr_mul(&nalgebra::DVector::from_column_slice(x));
    let y: Vec<f64> = v.iter().cloned().collect();
    let mu = EmpiricalMeasure::uniform(&y)?;
    Ok((y, mu))
}
