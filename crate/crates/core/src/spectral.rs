//! Eigenvalue and singular-value gases, Schatten-ball spectra, their Sanov rate and
//! comparison with Ullman limit laws.

use std::f64::consts::PI;

use nalgebra::{Complex, DMatrix};
use rand::Rng as _;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;

use crate::distributions::{p_gaussian_sample, UllmanLaw};
use crate::error::{Error, Result};
use crate::measure::{CdfTable, Density1D, EmpiricalMeasure, Measure};
use crate::ratecalc::log_energy;
use crate::rng::{self, Rng};
use crate::sampling::BallMode;
use crate::special::ln_gamma;
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasParams {
    pub n: usize,
    pub beta: f64,
    pub p: f64,
    pub selfadjoint: bool,
    /// Potential n·Σ V(xᵢ) instead of Σ V(xᵢ).
    pub scaled_by_n: bool,
}

impl GasParams {
    pub fn new(n: usize, beta: f64, p: f64, selfadjoint: bool, scaled_by_n: bool) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("gas needs n ≥ 1".into()));
        }
        if ![1.0, 2.0, 4.0].contains(&beta) {
            return Err(Error::Domain(format!("β must be 1, 2 or 4, got {beta}")));
        }
        if !(p > 0.0) {
            return Err(Error::Domain(format!("exponent must be positive, got {p}")));
        }
        Ok(GasParams { n, beta, p, selfadjoint, scaled_by_n })
    }

    fn potential(&self, x: f64) -> f64 {
        if self.p.is_infinite() {
            let a = if self.selfadjoint { x.abs() } else { x };
            return if a <= 1.0 { 0.0 } else { f64::INFINITY };
        }
        if self.selfadjoint { x.abs().powf(self.p) } else { x.powf(self.p / 2.0) }
    }

    fn weight(&self) -> f64 {
        if self.scaled_by_n { self.n as f64 } else { 1.0 }
    }

    /// m in the radial exponent 1/(n + m) of the Schatten-ball representation.
    pub fn radial_m(&self) -> f64 {
        let n = self.n as f64;
        let m = self.beta * n * (n - 1.0) / 2.0;
        if self.selfadjoint { m } else { m + n * (self.beta / 2.0 - 1.0) }
    }
}

/// Points (eigenvalues or squared singular values) with their empirical measure, the
/// latter rescaled by n^{1/p} (self-adjoint) or n^{2/p}.
#[derive(Debug, Clone)]
pub struct SpectralSample {
    pub points: Vec<f64>,
    pub measure: EmpiricalMeasure,
}

impl SpectralSample {
    pub fn new(points: Vec<f64>, scale: f64) -> Result<Self> {
        let measure = EmpiricalMeasure::uniform(&points)?.scaled(scale);
        Ok(SpectralSample { points, measure })
    }
}

/// Unnormalized log-density of the gas.
pub fn gas_log_density(x: &[f64], params: &GasParams) -> f64 {
    if x.len() != params.n {
        return f64::NAN;
    }
    if !params.selfadjoint && x.iter().any(|&v| !(v > 0.0)) {
        return f64::NEG_INFINITY;
    }
    let w = params.weight();
    let mut total = -w * x.iter().map(|&v| params.potential(v)).sum::<f64>();
    for i in 0..x.len() {
        for j in (i + 1)..x.len() {
            total += params.beta * (x[i] - x[j]).abs().ln();
        }
    }
    if !params.selfadjoint {
        total += (params.beta / 2.0 - 1.0) * x.iter().map(|v| v.ln()).sum::<f64>();
    }
    if total.is_nan() { f64::NEG_INFINITY } else { total }
}

/// Single-site Metropolis chain on the gas.
#[derive(Debug, Clone)]
pub struct GasChain {
    params: GasParams,
    x: Vec<f64>,
    log_sigma: f64,
    adapt_round: u64,
    proposed: u64,
    accepted: u64,
}

impl GasChain {
    /// Starts from sorted iid p-Gaussians (absolute values for singular values),
    /// redrawing until the log-density is finite.
    pub fn new(params: GasParams, rng: &mut Rng) -> Result<Self> {
        let scale = if params.scaled_by_n || params.p.is_infinite() { 1.0 } else { (params.n as f64).powf(1.0 / params.p) };
        let pz = if params.p.is_finite() { params.p.max(0.5) } else { 2.0 };
        for _ in 0..1000 {
            let mut x: Vec<f64> = (0..params.n)
                .map(|_| {
                    let z = p_gaussian_sample(pz, rng);
                    if params.p.is_infinite() {
                        rng.random_range(-1.0..1.0)
                    } else if params.selfadjoint {
                        scale * z
                    } else {
                        scale * z.abs()
                    }
                })
                .collect();
            if !params.selfadjoint && params.p.is_infinite() {
                x.iter_mut().for_each(|v| *v = v.abs());
            }
            x.sort_by(|a, b| a.partial_cmp(b).unwrap());
            if gas_log_density(&x, &params).is_finite() {
                let spread = (x[params.n - 1] - x[0]).max(1e-3);
                let sigma = spread / params.n as f64;
                return Ok(GasChain { params, x, log_sigma: sigma.ln(), adapt_round: 0, proposed: 0, accepted: 0 });
            }
        }
        Err(Error::Numerical("could not find a finite starting configuration".into()))
    }

    fn delta(&self, i: usize, new: f64) -> f64 {
        let p = &self.params;
        let old = self.x[i];
        if !p.selfadjoint && !(new > 0.0) {
            return f64::NEG_INFINITY;
        }
        let dv = p.potential(new) - p.potential(old);
        if dv.is_infinite() {
            return f64::NEG_INFINITY;
        }
        let mut d = -p.weight() * dv;
        let mut inter = 0.0;
        for (j, &xj) in self.x.iter().enumerate() {
            if j != i {
                inter += ((new - xj) / (old - xj)).abs().ln();
            }
        }
        d += p.beta * inter;
        if !p.selfadjoint {
            d += (p.beta / 2.0 - 1.0) * (new / old).ln();
        }
        d
    }

    /// One sweep over all coordinates; returns the number of accepted moves.
    pub fn sweep(&mut self, rng: &mut Rng) -> usize {
        let sigma = self.log_sigma.exp();
        let mut acc = 0;
        for i in 0..self.params.n {
            let z: f64 = rng.sample(StandardNormal);
            let new = self.x[i] + sigma * z;
            let d = self.delta(i, new);
            if d.is_finite() && (d >= 0.0 || rng.random::<f64>().ln() < d) {
                self.x[i] = new;
                acc += 1;
            }
        }
        self.proposed += self.params.n as u64;
        self.accepted += acc as u64;
        acc
    }

    /// Sweep with a Robbins–Monro update of the step size toward 0.3 acceptance.
    pub fn adapt_sweep(&mut self, rng: &mut Rng) {
        let acc = self.sweep(rng) as f64 / self.params.n as f64;
        self.adapt_round += 1;
        self.log_sigma += (acc - 0.3) * 2.0 / (self.adapt_round as f64).powf(0.6);
    }

    pub fn reset_counters(&mut self) {
        self.proposed = 0;
        self.accepted = 0;
    }

    pub fn acceptance(&self) -> f64 {
        if self.proposed == 0 { f64::NAN } else { self.accepted as f64 / self.proposed as f64 }
    }

    pub fn state(&self) -> &[f64] {
        &self.x
    }
}

#[derive(Debug, Clone, Copy)]
pub struct McmcOpts {
    pub chains: usize,
    /// Total sweeps per chain, burn-in included.
    pub steps: usize,
    pub burn_in: usize,
    pub thin: usize,
}

impl McmcOpts {
    pub fn for_size(n: usize, samples_per_chain: usize) -> Self {
        let burn_in = 500 + 2 * n * n;
        let thin = 2 + n / 4;
        McmcOpts { chains: 4, steps: burn_in + samples_per_chain * thin, burn_in, thin }
    }
}

#[derive(Debug, Clone)]
pub struct GasRun {
    /// Thinned configurations, chain after chain.
    pub samples: Vec<Vec<f64>>,
    pub chains: usize,
    pub acceptance: f64,
    /// Split-R̂ of the per-configuration mean potential.
    pub rhat: f64,
}

/// Runs independent chains in parallel, chain c on stream c of `seed`.
pub fn gas_mcmc(params: &GasParams, opts: &McmcOpts, seed: u64) -> Result<GasRun> {
    if opts.steps < opts.burn_in || opts.chains == 0 || opts.thin == 0 {
        return Err(Error::Invalid(format!(
            "need steps ≥ burn-in, chains ≥ 1, thin ≥ 1 (steps {}, burn-in {}, chains {}, thin {})",
            opts.steps, opts.burn_in, opts.chains, opts.thin
        )));
    }
    let runs: Vec<Result<(Vec<Vec<f64>>, f64)>> = (0..opts.chains)
        .into_par_iter()
        .map(|c| {
            let mut r = rng::stream(seed, c as u64);
            let mut chain = GasChain::new(*params, &mut r)?;
            for _ in 0..opts.burn_in {
                chain.adapt_sweep(&mut r);
            }
            chain.reset_counters();
            let mut out = Vec::new();
            for s in 0..(opts.steps - opts.burn_in) {
                chain.sweep(&mut r);
                if (s + 1) % opts.thin == 0 {
                    out.push(chain.state().to_vec());
                }
            }
            Ok((out, chain.acceptance()))
        })
        .collect();
    let mut samples = Vec::new();
    let mut summaries = Vec::new();
    let mut acc = 0.0;
    for run in runs {
        let (s, a) = run?;
        summaries.push(s.iter().map(|x| x.iter().map(|&v| params.potential(v)).sum::<f64>() / params.n as f64).collect::<Vec<f64>>());
        samples.extend(s);
        acc += a;
    }
    let rhat = if opts.chains >= 2 && summaries[0].len() >= 4 { stats::split_rhat(&summaries) } else { f64::NAN };
    Ok(GasRun { samples, chains: opts.chains, acceptance: acc / opts.chains as f64, rhat })
}

fn check_schatten(n: usize, p: f64, beta: f64) -> Result<()> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::Domain(format!("Schatten exponent must be in (0, ∞), got {p}")));
    }
    GasParams::new(n, beta, p, true, true).map(|_| ())
}

/// Maps a gas configuration to the Schatten ball (or sphere in cone mode).
fn to_schatten(params: &GasParams, x: &[f64], mode: BallMode, u: f64) -> Result<SpectralSample> {
    let n = params.n as f64;
    let p = params.p;
    let (norm, scale) = if params.selfadjoint {
        (x.iter().map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p), n.powf(1.0 / p))
    } else {
        (x.iter().map(|v| v.powf(p / 2.0)).sum::<f64>().powf(2.0 / p), n.powf(2.0 / p))
    };
    let radial = match mode {
        BallMode::Uniform => u.powf(1.0 / (n + params.radial_m())),
        BallMode::Cone => 1.0,
    };
    let mut pts: Vec<f64> = x.iter().map(|v| radial * v / norm).collect();
    let q = if params.selfadjoint { p } else { p / 2.0 };
    let s: f64 = pts.iter().map(|v| v.abs().powf(q)).sum();
    if s > 1.0 {
        let f = s.powf(-1.0 / q);
        pts.iter_mut().for_each(|v| *v *= f);
    }
    SpectralSample::new(pts, scale)
}

/// Draw from a chain after the default burn-in.
fn single_draw(params: GasParams, mode: BallMode, rng: &mut Rng) -> Result<SpectralSample> {
    let x = if params.n == 1 {
        // no interaction: the gas is an explicit one-dimensional law
        let v = if params.selfadjoint {
            p_gaussian_sample(params.p, rng)
        } else {
            let shape = params.beta / 2.0 * 2.0 / params.p;
            let g = Gamma::new(shape, 1.0).map_err(|e| Error::Numerical(e.to_string()))?;
            g.sample(rng).powf(2.0 / params.p)
        };
        vec![v]
    } else {
        let mut chain = GasChain::new(params, rng)?;
        let opts = McmcOpts::for_size(params.n, 1);
        for _ in 0..opts.burn_in {
            chain.adapt_sweep(rng);
        }
        chain.state().to_vec()
    };
    to_schatten(&params, &x, mode, rng.random::<f64>())
}

/// Eigenvalues of a matrix uniform in the unit Schatten p-ball (or on its sphere).
pub fn sample_schatten_eigs(n: usize, p: f64, beta: f64, mode: BallMode, rng: &mut Rng) -> Result<SpectralSample> {
    check_schatten(n, p, beta)?;
    single_draw(GasParams::new(n, beta, p, true, true)?, mode, rng)
}

/// Squared singular values of a matrix uniform in the unit Schatten p-ball.
pub fn sample_schatten_singular_sq(n: usize, p: f64, beta: f64, mode: BallMode, rng: &mut Rng) -> Result<SpectralSample> {
    check_schatten(n, p, beta)?;
    single_draw(GasParams::new(n, beta, p, false, true)?, mode, rng)
}

/// Many Schatten-ball spectra from parallel chains; radial factors use stream `chains` of
/// `seed`.
pub fn sample_schatten_batch(
    n: usize,
    p: f64,
    beta: f64,
    selfadjoint: bool,
    mode: BallMode,
    opts: &McmcOpts,
    seed: u64,
) -> Result<(Vec<SpectralSample>, GasRun)> {
    check_schatten(n, p, beta)?;
    let params = GasParams::new(n, beta, p, selfadjoint, true)?;
    let run = gas_mcmc(&params, opts, seed)?;
    let mut r = rng::stream(seed, opts.chains as u64);
    let out = run
        .samples
        .iter()
        .map(|x| to_schatten(&params, x, mode, r.random::<f64>()))
        .collect::<Result<Vec<_>>>()?;
    Ok((out, run))
}

fn schatten_constant(p: f64) -> f64 {
    0.5 * PI.ln() + p.ln() + ln_gamma(p / 2.0) - p * 2f64.ln() - 0.5 - ln_gamma((p + 1.0) / 2.0)
}

/// Sanov rate of the spectral measure of a uniform Schatten-ball matrix at speed n².
pub fn schatten_rate(mu: &Measure, p: f64, beta: f64, selfadjoint: bool) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::Domain(format!("Schatten exponent must be positive, got {p}")));
    }
    if !(beta > 0.0) {
        return Err(Error::Domain(format!("β must be positive, got {beta}")));
    }
    let tol = 1e-9;
    if !selfadjoint {
        let neg = mu.expect(|x| if x < 0.0 { 1.0 } else { 0.0 });
        if neg > 0.0 {
            return Ok(f64::INFINITY);
        }
    }
    if p.is_infinite() {
        let outside = mu.expect(|x| if x.abs() > 1.0 { 1.0 } else { 0.0 });
        if outside > 0.0 {
            return Ok(f64::INFINITY);
        }
        let e = log_energy(mu);
        return Ok(-0.5 * beta * e - 0.5 * beta * 2f64.ln());
    }
    let q = if selfadjoint { p } else { p / 2.0 };
    let moment = mu.expect(|x| x.abs().powf(q));
    if moment > 1.0 + tol {
        return Ok(f64::INFINITY);
    }
    let e = log_energy(mu);
    let c = if selfadjoint { beta / (2.0 * p) } else { beta / p };
    Ok(-0.5 * beta * e + c * schatten_constant(p))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralMetric {
    Kolmogorov,
    Wasserstein1,
}

/// Distance between pooled points and a limit density, through a tabulated CDF.
pub fn spectral_distance(points: &[f64], law: &Density1D, metric: SpectralMetric) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::Invalid("empty sample".into()));
    }
    let table = CdfTable::new(law, 4000);
    let cdf = |x: f64| table.cdf_at(x);
    Ok(match metric {
        SpectralMetric::Kolmogorov => stats::ks_one_sample(points, cdf),
        SpectralMetric::Wasserstein1 => {
            let (lo, hi) = (table.edges[0], *table.edges.last().unwrap());
            stats::wasserstein1(points, cdf, lo, hi)
        }
    })
}

/// Limit law of the rescaled spectral measure: the Ullman law for eigenvalues, its
/// squared singular-value variant otherwise.
pub fn limit_law(p: f64, selfadjoint: bool) -> Result<Density1D> {
    if selfadjoint { Ok(UllmanLaw::new(p)?.density) } else { UllmanLaw::singular_squared(p) }
}

fn sym_eigs(m: DMatrix<f64>) -> Vec<f64> {
    let mut e: Vec<f64> = m.symmetric_eigenvalues().iter().cloned().collect();
    e.sort_by(|a, b| a.partial_cmp(b).unwrap());
    e
}

fn herm_eigs(m: DMatrix<Complex<f64>>) -> Vec<f64> {
    let mut e: Vec<f64> = m.symmetric_eigenvalues().iter().cloned().collect();
    e.sort_by(|a, b| a.partial_cmp(b).unwrap());
    e
}

fn normal(rng: &mut Rng, var: f64) -> f64 {
    var.sqrt() * rng.sample::<f64, _>(StandardNormal)
}

fn real_symmetric(n: usize, diag_var: f64, off_var: f64, rng: &mut Rng) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = normal(rng, diag_var);
        for j in 0..i {
            let v = normal(rng, off_var);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

fn hermitian(n: usize, diag_var: f64, off_var: f64, rng: &mut Rng) -> DMatrix<Complex<f64>> {
    let mut m = DMatrix::from_element(n, n, Complex::new(0.0, 0.0));
    for i in 0..n {
        m[(i, i)] = Complex::new(normal(rng, diag_var), 0.0);
        for j in 0..i {
            let v = Complex::new(normal(rng, off_var), normal(rng, off_var));
            m[(i, j)] = v;
            m[(j, i)] = v.conj();
        }
    }
    m
}

/// Eigenvalues of a real symmetric matrix with density ∝ e^{−n tr H²}.
pub fn goe_eigs(n: usize, rng: &mut Rng) -> Vec<f64> {
    let nf = n as f64;
    sym_eigs(real_symmetric(n, 1.0 / (2.0 * nf), 1.0 / (4.0 * nf), rng))
}

/// Eigenvalues of a Hermitian matrix with density ∝ e^{−n tr H²}.
pub fn gue_eigs(n: usize, rng: &mut Rng) -> Vec<f64> {
    let nf = n as f64;
    herm_eigs(hermitian(n, 1.0 / (2.0 * nf), 1.0 / (4.0 * nf), rng))
}

fn frobenius_radial(dim: f64, rng: &mut Rng) -> f64 {
    rng.random::<f64>().powf(1.0 / dim)
}

/// Eigenvalues of a real symmetric matrix uniform in the Frobenius unit ball.
pub fn frobenius_ball_symmetric_eigs(n: usize, rng: &mut Rng) -> Vec<f64> {
    let m = real_symmetric(n, 1.0, 0.5, rng);
    let f = m.norm();
    let r = frobenius_radial((n * (n + 1) / 2) as f64, rng);
    sym_eigs(m * (r / f))
}

/// Eigenvalues of a Hermitian matrix uniform in the Frobenius unit ball.
pub fn frobenius_ball_hermitian_eigs(n: usize, rng: &mut Rng) -> Vec<f64> {
    let m = hermitian(n, 1.0, 0.5, rng);
    let f = m.norm();
    let r = frobenius_radial((n * n) as f64, rng);
    herm_eigs(m * Complex::new(r / f, 0.0))
}

/// Squared singular values of a complex n×n matrix uniform in the Frobenius unit ball.
pub fn frobenius_ball_complex_singular_sq(n: usize, rng: &mut Rng) -> Vec<f64> {
    let m = DMatrix::from_fn(n, n, |_, _| Complex::new(normal(rng, 1.0), normal(rng, 1.0)));
    let f = m.norm();
    let r = frobenius_radial((2 * n * n) as f64, rng);
    let a = m * Complex::new(r / f, 0.0);
    herm_eigs(a.adjoint() * a).into_iter().map(|v| v.max(0.0)).collect()
}

/// Squared singular values of a real n×n matrix uniform in the Frobenius unit ball.
pub fn frobenius_ball_real_singular_sq(n: usize, rng: &mut Rng) -> Vec<f64> {
    let m = DMatrix::from_fn(n, n, |_, _| normal(rng, 1.0));
    let f = m.norm();
    let r = frobenius_radial((n * n) as f64, rng);
    let a = m * (r / f);
    sym_eigs(a.transpose() * a).into_iter().map(|v| v.max(0.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{ks_two_sample, mean_se};

    #[test]
    fn density_basics() {
        let p1 = GasParams::new(1, 2.0, 3.0, true, false).unwrap();
        assert!((gas_log_density(&[0.7], &p1) + 0.7f64.powi(3)).abs() < 1e-14);
        let p = GasParams::new(3, 1.0, 2.0, true, true).unwrap();
        let a = gas_log_density(&[0.1, -0.4, 0.9], &p);
        let b = gas_log_density(&[-0.4, 0.1, 0.9], &p);
        assert_eq!(a, b);
        assert_eq!(gas_log_density(&[0.1, 0.1, 0.2], &p), f64::NEG_INFINITY);
        let ns = GasParams::new(2, 2.0, 2.0, false, true).unwrap();
        assert_eq!(gas_log_density(&[-0.1, 0.3], &ns), f64::NEG_INFINITY);
        assert!(GasParams::new(2, 3.0, 2.0, true, true).is_err());
    }

    #[test]
    fn gue_density_difference() {
        // log of e^{−n tr H²}|Δ|² written out directly
        let n = 4;
        let p = GasParams::new(n, 2.0, 2.0, true, true).unwrap();
        let direct = |x: &[f64]| {
            let mut v = -(n as f64) * x.iter().map(|t| t * t).sum::<f64>();
            for i in 0..n {
                for j in 0..i {
                    v += 2.0 * (x[i] - x[j]).abs().ln();
                }
            }
            v
        };
        let a = [-1.1, -0.2, 0.35, 0.8];
        let b = [-0.6, -0.1, 0.05, 1.3];
        let d1 = gas_log_density(&a, &p) - gas_log_density(&b, &p);
        let d2 = direct(&a) - direct(&b);
        assert!((d1 - d2).abs() < 1e-12);
    }

    #[test]
    fn cone_and_uniform_constraints() {
        let mut r = rng::seeded(1);
        for &p in &[1.0, 2.0, 3.0] {
            let s = sample_schatten_eigs(5, p, 1.0, BallMode::Cone, &mut r).unwrap();
            let t: f64 = s.points.iter().map(|v| v.abs().powf(p)).sum();
            assert!((t - 1.0).abs() < 1e-12);
            let u = sample_schatten_singular_sq(4, p, 2.0, BallMode::Uniform, &mut r).unwrap();
            assert!(u.points.iter().map(|v| v.powf(p / 2.0)).sum::<f64>() <= 1.0 + 1e-12);
            assert!(u.points.iter().all(|&v| v > 0.0));
        }
    }

    #[test]
    fn n1_uniform_modulus() {
        let mut r = rng::seeded(2);
        let xs: Vec<f64> = (0..100_000)
            .map(|_| sample_schatten_eigs(1, 1.5, 2.0, BallMode::Uniform, &mut r).unwrap().points[0].abs())
            .collect();
        let (m, se) = mean_se(&xs);
        assert!((m - 0.5).abs() < 3.0 * se);
    }

    #[test]
    fn oracles_are_in_the_ball() {
        let mut r = rng::seeded(3);
        for _ in 0..100 {
            assert!(frobenius_ball_symmetric_eigs(4, &mut r).iter().map(|v| v * v).sum::<f64>() <= 1.0 + 1e-12);
            assert!(frobenius_ball_hermitian_eigs(4, &mut r).iter().map(|v| v * v).sum::<f64>() <= 1.0 + 1e-12);
            assert!(frobenius_ball_complex_singular_sq(3, &mut r).iter().sum::<f64>() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn mcmc_matches_gue_small() {
        let params = GasParams::new(6, 2.0, 2.0, true, true).unwrap();
        let opts = McmcOpts::for_size(6, 1500);
        let run = gas_mcmc(&params, &opts, 11).unwrap();
        assert!(run.acceptance > 0.15 && run.acceptance < 0.5, "{}", run.acceptance);
        assert!(run.rhat < 1.05, "{}", run.rhat);
        let pooled: Vec<f64> = run.samples.iter().flatten().cloned().collect();
        let mut r = rng::seeded(12);
        let oracle: Vec<f64> = (0..20_000).flat_map(|_| gue_eigs(6, &mut r)).collect();
        assert!(ks_two_sample(&pooled, &oracle) < 0.03);
    }

    #[test]
    fn rate_vanishes_at_limits() {
        let sc = UllmanLaw::new(2.0).unwrap().density;
        assert!(schatten_rate(&Measure::Density(sc), 2.0, 2.0, true).unwrap().abs() < 1e-3);
        let arc = UllmanLaw::new(f64::INFINITY).unwrap().density;
        assert!(schatten_rate(&Measure::Density(arc), f64::INFINITY, 2.0, true).unwrap().abs() < 1e-3);
        let wide = Density1D::new("u", (-3.0, 3.0), |_| (1.0f64 / 6.0).ln());
        assert_eq!(schatten_rate(&Measure::Density(wide), 2.0, 2.0, true).unwrap(), f64::INFINITY);
    }

    #[test]
    fn distance_self_consistent() {
        let law = UllmanLaw::new(2.0).unwrap().density;
        let table = CdfTable::new(&law, 4000);
        let mut r = rng::seeded(4);
        let xs: Vec<f64> = (0..10_000).map(|_| table.quantile(r.random::<f64>())).collect();
        assert!(spectral_distance(&xs, &law, SpectralMetric::Kolmogorov).unwrap() < 0.02);
        assert!(spectral_distance(&xs, &law, SpectralMetric::Wasserstein1).unwrap() < 0.05);
        assert!(spectral_distance(&[], &law, SpectralMetric::Kolmogorov).is_err());
    }
}
